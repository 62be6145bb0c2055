from hypothesis import given, settings
from hypothesis.strategies import floats
from pytest import approx, mark

from core.certificate import check_certificate, check_solution, dual_feasibility
from core.instance import DomainTag, canonicalize, instance_from_overlap
from core.op2 import Herm2
from core.weak_solver import Certificate, build_min_error, solve_weak


@mark.parametrize("  eta1  overlap  m  tag".split(),
                  ((0.3, 0.9, 0.5, DomainTag.MINIMUM_ERROR),
                   (0.3, 0.9, 0.15, DomainTag.INTERMEDIATE),
                   (0.3, 0.9, 0.03, DomainTag.SINGLE_STATE),
                   (0.3, 0.9, 0.0, DomainTag.SINGLE_STATE),
                   (0.5, 0.9, 0.0, DomainTag.INTERMEDIATE),
                   (0.45, 0.7, 0.0, DomainTag.INTERMEDIATE),
                   (0.7, 0.9, 0.15, DomainTag.INTERMEDIATE),
                   (0.7, 0.9, 0.03, DomainTag.SINGLE_STATE),
                   (0.5, 0.0, 0.0, DomainTag.MINIMUM_ERROR)))
def test_certificates_of_each_domain(eta1, overlap, m, tag):
    sol = solve_weak(instance_from_overlap(eta1, overlap), m)
    assert sol.domain.tag is tag
    report = check_solution(sol)
    assert report.failures() == []
    assert report.gap == approx(0.0, abs=1e-10)
    assert report.dual_value == approx(sol.p_max, abs=1e-10)


def test_zero_margin_certificates_are_limiting():
    for eta1 in (0.5, 0.3):
        sol = solve_weak(instance_from_overlap(eta1, 0.9), 0.0)
        assert sol.cert.limiting
        assert sol.cert.as_dict()['y'] is None
        assert check_solution(sol).ok


def test_complex_input_states():
    inst = canonicalize((1, 1j), (0.3, 0.2 - 0.5j), 0.64)
    for m in (0.0, 0.01, 0.05, 0.2, 1.0):
        assert check_solution(solve_weak(inst, m)).ok, m


def test_infeasible_certificate_is_reported(base_instance):
    povm, _ = build_min_error(base_instance)
    bogus = Certificate(Herm2(0.1), 0.0, 1.0)
    report = check_certificate(base_instance, povm, bogus)
    assert not report.ok
    assert min(dual_feasibility(base_instance, bogus)) < 0.0
    assert any('gap' in f for f in report.failures())


def test_report_serializes(base_instance):
    report = check_solution(solve_weak(base_instance, 0.15))
    data = report.as_dict()
    assert data['ok'] is True
    assert len(data['slackness']) == 4


@settings(max_examples=300, deadline=None)
@given(floats(0.02, 0.98), floats(0.0, 0.98), floats(1e-3, 1.0))
def test_certificates_hold_everywhere(eta1, S, m):
    sol = solve_weak(instance_from_overlap(eta1, S ** 0.5), m)
    report = check_solution(sol)
    assert report.failures() == [], (eta1, S, m)
    assert sol.p_success == approx(sol.p_max, abs=1e-10)
