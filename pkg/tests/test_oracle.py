import math

import numpy as np
import pytest
from pytest import approx, mark, raises

from core.errors import DimensionUnsupported
from core.instance import instance_from_overlap
from core.mixed_bounds import DensityMatrix, make_mixed_instance, upper_bound_mixed
from core.op2 import Herm2, Vec3
from core.oracle import (
    SearchConfig,
    classical_fidelity,
    oracle_mixed_weak,
    oracle_pure_strong,
    oracle_pure_weak,
    reflect_average,
)
from core.strong_margin import p_max_strong
from core.weak_solver import Povm3, diagnostics, p_max_weak, solve_weak

pytestmark = mark.slow


@pytest.fixture(scope='module')
def cfg():
    return SearchConfig.from_defaults()


def random_unit(rng):
    v = rng.normal(size=3)
    return Vec3.from_iterable(v / np.linalg.norm(v))


# -- configuration ---------------------------------------------------------------

def test_search_config_defaults(cfg):
    assert cfg.coarse_grid == 180
    assert cfg.tolerance == 1e-3
    assert not cfg.full_sphere
    assert SearchConfig.from_defaults(coarse_grid=60, azimuth_levels=3).full_sphere


@mark.parametrize("overrides", ({'coarse_grid': 4},
                                {'refine_shrink': 1.0},
                                {'refine_seeds': 0},
                                {'azimuth_levels': 0}))
def test_search_config_validation(overrides):
    with raises(ValueError):
        SearchConfig(**overrides)


# -- pure states -----------------------------------------------------------------

@mark.parametrize("  m  expected".split(),
                  ((1.0, 0.782665),
                   (0.15, 0.649299),
                   (0.03, 0.341166),
                   (0.0, 0.133)))
def test_weak_oracle_reaches_closed_form(base_instance, cfg, m, expected):
    result = oracle_pure_weak(base_instance, m, cfg)
    assert result.p_best == approx(expected, abs=1e-3)
    assert result.p_best <= p_max_weak(base_instance, m) + 1e-9


def test_weak_oracle_measurement_is_feasible(base_instance, cfg):
    result = oracle_pure_weak(base_instance, 0.15, cfg)
    assert result.povm.completeness_residual() < 1e-12
    assert all(e.min_eig() >= -1e-9 for e in result.povm.elements())
    diag = diagnostics(base_instance, result.povm, 0.15)
    assert diag.p_error <= 0.15 + 1e-9
    assert diag.p_success == approx(result.p_best, abs=1e-12)


def test_orthogonal_states_are_perfectly_distinguished(cfg):
    inst = instance_from_overlap(0.3, 0.0)
    assert oracle_pure_weak(inst, 0.0, cfg).p_best == approx(1.0, abs=1e-9)


def test_equal_priors_zero_margin(cfg):
    inst = instance_from_overlap(0.5, 0.9)
    assert oracle_pure_weak(inst, 0.0, cfg).p_best == approx(0.1, abs=1e-3)


@mark.parametrize("  eta1  overlap  m_s".split(),
                  ((0.3, 0.9, 0.1),
                   (0.3, 0.9, 0.18),
                   (0.5, 0.9, 0.05),
                   (0.2, 0.6, 0.0)))
def test_strong_oracle_reaches_closed_form(cfg, eta1, overlap, m_s):
    inst = instance_from_overlap(eta1, overlap)
    assert oracle_pure_strong(inst, m_s, cfg) == approx(p_max_strong(inst, m_s), abs=1e-3)


def test_strong_random_instances_agree_with_closed_form(cfg):
    rng = np.random.default_rng(43)
    worst = 0.0
    for _ in range(50):
        inst = instance_from_overlap(rng.uniform(0.02, 0.5), math.sqrt(rng.uniform(0.0, 0.98)))
        m_s = rng.uniform(0.0, 0.5)
        worst = max(worst, abs(oracle_pure_strong(inst, m_s, cfg) - p_max_strong(inst, m_s)))
    assert worst <= 1e-3


def test_oracle_never_beats_dual_value(cfg):
    rng = np.random.default_rng(31)
    for _ in range(30):
        inst = instance_from_overlap(rng.uniform(0.02, 0.5), math.sqrt(rng.uniform(0.0, 0.98)))
        m = rng.uniform(0.01, 1.0)
        sol = solve_weak(inst, m)
        assert oracle_pure_weak(inst, m, cfg).p_best <= sol.cert.d + 1e-9


def test_full_sphere_search_finds_nothing_better():
    sphere = SearchConfig.from_defaults(coarse_grid=40, azimuth_levels=4)
    rng = np.random.default_rng(17)
    for _ in range(10):
        inst = instance_from_overlap(rng.uniform(0.05, 0.5), math.sqrt(rng.uniform(0.1, 0.9)))
        m = rng.uniform(0.0, 0.5)
        p_best = oracle_pure_weak(inst, m, sphere).p_best
        analytic = p_max_weak(inst, m)
        assert p_best <= analytic + 1e-9
        assert p_best == approx(analytic, abs=1e-3)


def test_random_instances_agree_with_closed_form(cfg):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        inst = instance_from_overlap(rng.uniform(0.02, 0.5), math.sqrt(rng.uniform(0.0, 0.98)))
        m = rng.uniform(0.0, 1.0)
        worst = max(worst, abs(oracle_pure_weak(inst, m, cfg).p_best - p_max_weak(inst, m)))
    assert worst <= 1e-3


# -- mixed states ----------------------------------------------------------------

@mark.parametrize("m", (1.0, 0.15, 0.03))
def test_mixed_oracle_on_pure_states_matches_pure_oracle(base_kets, cfg, m):
    psi1, psi2 = base_kets
    minst = make_mixed_instance(DensityMatrix.pure(psi1), DensityMatrix.pure(psi2), 0.3)
    inst = instance_from_overlap(0.3, 0.9)
    assert oracle_mixed_weak(minst, m, cfg) == approx(oracle_pure_weak(inst, m, cfg).p_best, abs=1e-6)


def test_mixed_oracle_on_identical_pure_states(cfg):
    up = DensityMatrix.pure((1, 0))
    minst = make_mixed_instance(up, up, 0.3)
    assert oracle_mixed_weak(minst, 0.35, cfg) == approx(0.7, abs=1e-9)


def test_mixed_oracle_stays_below_bound(cfg):
    rng = np.random.default_rng(6)
    for _ in range(100):
        r1 = random_unit(rng) * rng.uniform(0.0, 1.0)
        r2 = random_unit(rng) * rng.uniform(0.0, 1.0)
        minst = make_mixed_instance(DensityMatrix.from_bloch(r1.as_tuple()),
                                    DensityMatrix.from_bloch(r2.as_tuple()),
                                    rng.uniform(0.05, 0.95))
        m = rng.uniform(0.01, 1.0)
        assert oracle_mixed_weak(minst, m, cfg) <= upper_bound_mixed(minst, m) + 1e-6


def test_mixed_oracle_rejects_qudits(cfg):
    rho = DensityMatrix(np.eye(3) / 3)
    with raises(DimensionUnsupported):
        oracle_mixed_weak(make_mixed_instance(rho, rho, 0.5), 0.1, cfg)


# -- measurement helpers ---------------------------------------------------------

def test_classical_fidelity_of_unambiguous_measurement():
    inst = instance_from_overlap(0.5, 0.9)
    sol = solve_weak(inst, 0.0)
    assert classical_fidelity(sol.instance, sol.povm) == approx(0.9, abs=1e-12)


def test_classical_fidelity_bounds_state_overlap(base_instance):
    rng = np.random.default_rng(9)
    for _ in range(200):
        e1 = 0.5 * Herm2.projector(random_unit(rng))
        e2 = 0.5 * Herm2.projector(random_unit(rng))
        povm = Povm3(e1, e2, Herm2.identity() - e1 - e2)
        assert classical_fidelity(base_instance, povm) >= 0.9 - 1e-12
    for m in (0.0, 0.03, 0.15, 1.0):
        sol = solve_weak(base_instance, m)
        assert classical_fidelity(sol.instance, sol.povm) >= 0.9 - 1e-12


def test_reflect_average_keeps_statistics(base_instance):
    rng = np.random.default_rng(1)
    e1 = 0.5 * Herm2.projector(random_unit(rng))
    e2 = 0.5 * Herm2.projector(random_unit(rng))
    povm = Povm3(e1, e2, Herm2.identity() - e1 - e2)
    flat = reflect_average(povm)
    assert all(e.beta.y == 0.0 for e in flat.elements())
    assert all(e.min_eig() >= -1e-15 for e in flat.elements())
    assert flat.completeness_residual() < 1e-15
    before = diagnostics(base_instance, povm, 1.0).joint
    after = diagnostics(base_instance, flat, 1.0).joint
    np.testing.assert_allclose(after, before, atol=1e-15)
