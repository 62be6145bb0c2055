import psutil
import pytest
from pytest import mark, raises

import config
from cli.history import events_table
from utils.run_log import RunEventType, RunLogger, get_run_logger, run_log_enabled
from utils.validation import (
    parse_ket,
    parse_probability,
    parse_range,
    validate_columns,
    validate_output_path,
    validate_steps,
)
from utils.workers import resolve_workers


# -- validation ------------------------------------------------------------------

@mark.parametrize("  text  expected".split(),
                  (('0', 0.0), ('1', 1.0), ('0.25', 0.25), (' 0.5 ', 0.5)))
def test_parse_probability(text, expected):
    assert parse_probability(text) == expected


@mark.parametrize("  text  open_interval".split(),
                  (('-0.1', False), ('1.01', False), ('nan', False), ('inf', False),
                   ('x', False), (None, False), ('0', True), ('1', True)))
def test_parse_probability_rejects(text, open_interval):
    with raises(ValueError):
        parse_probability(text, 'eta1', open_interval)


@mark.parametrize("  text  expected".split(),
                  (('1,0', (1, 0)),
                   ('(0.6+0.2j, 0.77)', (0.6 + 0.2j, 0.77)),
                   ('0.6, 0.8i', (0.6, 0.8j)),
                   ('[1, -1j]', (1, -1j))))
def test_parse_ket(text, expected):
    assert parse_ket(text) == expected


@mark.parametrize("text", ('', '1', '1,2,3', '1,abc', '1,', 'nan,0'))
def test_parse_ket_rejects(text):
    with raises(ValueError):
        parse_ket(text)


def test_parse_range():
    assert parse_range('0:1') == (0.0, 1.0)
    assert parse_range(' 0.1 : 0.4 ') == (0.1, 0.4)
    for bad in ('0.5', '0.6:0.2', '0:1.5', 'a:b'):
        with raises(ValueError):
            parse_range(bad)
    with raises(ValueError):
        parse_range('0:0.5', open_interval=True)


def test_validate_steps():
    assert validate_steps('10') == 10
    for bad in ('1', 'x', None):
        with raises(ValueError):
            validate_steps(bad)


def test_validate_output_path():
    assert validate_output_path(' out.csv ', ['csv']) == 'out.csv'
    for bad in ('', 'out.txt', 'out', 'a\x00.csv'):
        with raises(ValueError):
            validate_output_path(bad, ['csv'])


def test_validate_columns():
    assert validate_columns(None, ('a', 'b')) == ['a', 'b']
    assert validate_columns('b, a', ('a', 'b')) == ['b', 'a']
    assert validate_columns('', ('a', 'b', 'c'), ('a', 'c')) == ['a', 'c']
    with raises(ValueError):
        validate_columns('a,c', ('a', 'b'))


# -- workers ---------------------------------------------------------------------

def test_workers_default_to_cpu_count(monkeypatch):
    monkeypatch.delenv('QMARGIN_MAX_WORKERS', raising=False)
    assert resolve_workers() == (psutil.cpu_count(logical=True) or 1)


def test_workers_cap(monkeypatch):
    monkeypatch.setenv('QMARGIN_MAX_WORKERS', '1')
    assert resolve_workers() == 1
    assert resolve_workers(8) == 1


def test_workers_request(monkeypatch):
    monkeypatch.setenv('QMARGIN_MAX_WORKERS', 'not a number')
    assert resolve_workers(3) == 3
    assert resolve_workers(0) == 1


# -- run log ---------------------------------------------------------------------

@pytest.fixture
def logger(tmp_path):
    return RunLogger(enabled=True, log_file=tmp_path / 'runs.log', daily_dir=tmp_path / 'daily')


def test_run_log_records_events(logger):
    logger.log_event(RunEventType.SOLVE, 'weak m=0.15 -> intermediate', {'p_max': 0.649})
    logger.log_event(RunEventType.SWEEP, 'weak sweep, 10 rows')

    events = logger.get_recent_events()
    assert [e['event_type'] for e in events] == ['SWEEP', 'SOLVE']
    assert events[1]['details'] == {'p_max': 0.649}
    assert logger.get_recent_events(event_type='SOLVE')[0]['summary'].startswith('weak')
    assert len(logger.get_recent_events(limit=1)) == 1

    daily = list(logger.daily_dir.iterdir())
    assert len(daily) == 1
    assert 'SOLVE weak m=0.15' in daily[0].read_text()


def test_run_log_skips_corrupt_lines(logger):
    logger.log_event(RunEventType.VERIFY, 'weak: 0/10 failed')
    with open(logger.log_file, 'a', encoding='utf-8') as f:
        f.write('{not json\n\n')
    assert [e['event_type'] for e in logger.get_recent_events()] == ['VERIFY']


def test_disabled_run_log_writes_nothing(tmp_path):
    logger = RunLogger(enabled=False, log_file=tmp_path / 'runs.log')
    logger.log_event(RunEventType.SOLVE, 'ignored')
    assert not logger.log_file.exists()
    assert logger.get_recent_events() == []


def test_run_log_never_raises(tmp_path):
    blocker = tmp_path / 'file'
    blocker.write_text('')
    logger = RunLogger(enabled=True, log_file=blocker / 'runs.log', daily_dir=blocker / 'daily')
    logger.log_event(RunEventType.SOLVE, 'cannot be written')


@mark.parametrize("  value  enabled".split(),
                  (('1', True), ('yes', True), ('On', True), ('0', False), ('', False)))
def test_run_log_switch(monkeypatch, value, enabled):
    monkeypatch.setenv('QMARGIN_RUN_LOG', value)
    assert run_log_enabled() is enabled
    assert get_run_logger().enabled is enabled


def test_events_table(logger):
    logger.log_event(RunEventType.MIXED_BOUND, 'dim 2, m=0.1', {'fidelity': 0.9, 'upper_bound': 0.7})
    table = events_table(logger.get_recent_events())
    assert table.row_count == 1
    assert len(table.columns) == 5


def test_events_table_tolerates_bad_timestamps():
    table = events_table([{'timestamp': 'yesterday', 'event_type': 'SOLVE', 'details': {'x': 'y' * 100}}])
    assert table.row_count == 1


# -- configuration ---------------------------------------------------------------

def test_tolerances():
    tol = config.get_tolerances()
    assert tol['psd'] == 1e-12
    assert tol['duality_gap'] == 1e-10
    assert tol['oracle'] == 1e-3
    assert all(isinstance(v, float) for v in tol.values())


def test_search_defaults():
    search = config.get_search_defaults()
    assert search['coarse_grid'] == 180
    assert search['azimuth_levels'] == 1


def test_env_int(monkeypatch):
    monkeypatch.setenv('QMARGIN_TEST_INT', '12')
    assert config.get_env_int('QMARGIN_TEST_INT') == 12
    monkeypatch.setenv('QMARGIN_TEST_INT', 'twelve')
    assert config.get_env_int('QMARGIN_TEST_INT', 3) == 3
    monkeypatch.delenv('QMARGIN_TEST_INT')
    assert config.get_env_int('QMARGIN_TEST_INT') is None


def test_user_overrides(tmp_path, monkeypatch):
    overrides = tmp_path / 'overrides.yaml'
    overrides.write_text('tolerances:\n  oracle: 5.0e-4\nsearch: not-a-section\n')
    monkeypatch.setattr(config, 'USER_OVERRIDES_FILE', overrides)
    monkeypatch.setattr(config, '_cache', None)
    tol = config.get_tolerances()
    assert tol['oracle'] == 5e-4
    assert tol['psd'] == 1e-12
    assert config.get_search_defaults()['coarse_grid'] == 180

