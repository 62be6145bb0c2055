# QMARGIN v1.0 - Brute-force reference optimizer
'''
Direct numerical maximization of the success probability over explicitly
parameterized three-outcome measurements. Nothing here uses the closed
forms; the result is a lower bound used to cross-check them.

Parameterization: E1 = t1 (I + u1.sigma)/2, E2 = t2 (I + u2.sigma)/2 and
E3 = I - E1 - E2. For fixed directions u1, u2 the feasible weights form the
convex set

    0 <= t1, t2 <= 1,   1 - t1 - t2 + k t1 t2 >= 0,   k = (1 - u1.u2)/2

(the second condition is E3 >= 0), cut by the margin constraint. The
objective is linear in (t1, t2), so the best weights are found exactly among
the extreme points of that set; only the directions are searched.

In-plane restriction: both states and every constraint operator lie in the
real span of {I, sigma_x, sigma_z}. Averaging a POVM with its mirror image
through the x-z plane (``reflect_average``) keeps every tr(E rho) and keeps
the elements PSD, so the default search runs over the x-z plane
(``azimuth_levels = 1``). Higher azimuth levels search the full sphere.
'''
import itertools
import logging
import math
from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np

from config import get_search_defaults, get_tolerances
from core.errors import DimensionUnsupported, NoFeasiblePoint
from core.instance import Instance, validate_margin
from core.mixed_bounds import MixedInstance
from core.op2 import Herm2, Vec3, trace_product
from core.weak_solver import Povm3

_log = logging.getLogger(__name__)

_EPS = 1e-15


@dataclass(frozen=True)
class SearchConfig:
    coarse_grid: int = 180
    refine_iters: int = 40
    refine_shrink: float = 0.5
    refine_seeds: int = 3
    max_passes: int = 25
    azimuth_levels: int = 1
    tolerance: float = 1e-3
    margin_slack: float = 1e-12

    def __post_init__(self):
        if self.coarse_grid < 8:
            raise ValueError(f"coarse_grid must be at least 8, got {self.coarse_grid}")
        if self.refine_iters < 0 or self.refine_seeds < 1 or self.max_passes < 1:
            raise ValueError("refinement counts must be positive")
        if not (0.0 < self.refine_shrink < 1.0):
            raise ValueError(f"refine_shrink must lie in (0, 1), got {self.refine_shrink}")
        if self.azimuth_levels < 1:
            raise ValueError("azimuth_levels must be at least 1")

    @classmethod
    def from_defaults(cls, **overrides):
        '''Build from config/defaults.yaml (plus user overrides), then kwargs.'''
        known = {f.name for f in fields(cls)}
        values = {k: v for k, v in get_search_defaults().items() if k in known}
        tol = get_tolerances()
        values.setdefault('tolerance', tol.get('oracle', 1e-3))
        values.setdefault('margin_slack', tol.get('margin_slack', 1e-12))
        values.update(overrides)
        return cls(**values)

    @property
    def full_sphere(self):
        return self.azimuth_levels > 1


class OracleResult(NamedTuple):
    p_best: float
    povm: Povm3


# -- geometry -------------------------------------------------------------------

def _directions(theta, phi):
    '''Unit vectors (..., 3) for polar angle theta and azimuth phi.'''
    s = np.sin(theta)
    return np.stack([s * np.cos(phi), s * np.sin(phi), np.cos(theta)], axis=-1)


def _boundary(t, k):
    '''Largest t2 with 1 - t - t2 + k t t2 >= 0.'''
    denom = 1.0 - k * t
    with np.errstate(divide='ignore', invalid='ignore'):
        b = np.where(denom > _EPS, (1.0 - t) / np.where(denom > _EPS, denom, 1.0), 1.0)
    return np.clip(b, 0.0, 1.0)


def _quadratic_roots(a, b, c):
    '''Both real roots of a t^2 + b t + c (NaN where none), stable form.'''
    with np.errstate(divide='ignore', invalid='ignore'):
        disc = b * b - 4.0 * a * c
        root = np.sqrt(np.where(disc >= 0.0, disc, np.nan))
        q = -0.5 * (b + np.copysign(root, b))
        linear = np.abs(a) < _EPS
        r1 = np.where(linear, -c / b, q / a)
        r2 = np.where(linear, np.nan, c / q)
    return r1, r2


class _Problem:
    '''Priors and Bloch vectors (|r| <= 1) of the two hypotheses.'''

    def __init__(self, eta1, eta2, r1, r2, margin, strong=False, slack=1e-12):
        self.eta1, self.eta2 = float(eta1), float(eta2)
        self.r1 = np.asarray(r1, dtype=float)
        self.r2 = np.asarray(r2, dtype=float)
        self.margin = margin
        self.strong = strong
        self.slack = slack

    def anchor_angles(self):
        '''In-plane angles of +-r1 and +-r2.

        Zero-margin optima sit exactly on directions orthogonal to one of
        the states, where the feasible region is too narrow for a grid.
        '''
        angles = []
        for r in (self.r1, self.r2):
            if np.hypot(r[0], r[2]) > 1e-12:
                base = math.atan2(r[0], r[2])
                angles.extend([base % (2.0 * math.pi), (base + math.pi) % (2.0 * math.pi)])
        return angles

    def coefficients(self, u1, u2):
        o1 = self.eta1 * 0.5 * (1.0 + u1 @ self.r1)
        o2 = self.eta2 * 0.5 * (1.0 + u2 @ self.r2)
        e1 = self.eta2 * 0.5 * (1.0 + u1 @ self.r2)
        e2 = self.eta1 * 0.5 * (1.0 + u2 @ self.r1)
        k = 0.5 * (1.0 - np.sum(u1 * u2, axis=-1))
        return o1, o2, e1, e2, k

    def _candidates(self, o1, o2, e1, e2, k):
        zero, one = np.zeros_like(o1), np.ones_like(o1)
        cands = [(zero, zero), (one, zero), (zero, one), (one, one)]

        with np.errstate(divide='ignore', invalid='ignore'):
            ratio = np.sqrt(np.clip(o2 * (1.0 - k), 0.0, None) / o1)
            t_tan = np.clip(np.nan_to_num((1.0 - ratio) / k, nan=0.0, posinf=0.0, neginf=0.0), 0.0, 1.0)
        cands.append((t_tan, _boundary(t_tan, k)))

        if not self.strong:
            budget = self.margin
            for t in _quadratic_roots(-e1 * k, e1 - e2 + budget * k, e2 - budget):
                cands.append((t, _boundary(t, k)))
            with np.errstate(divide='ignore', invalid='ignore'):
                cands.append((budget / e1, zero))
                cands.append((zero, budget / e2))
                cands.append((one, (budget - e1) / e2))
                cands.append(((budget - e2) / e1, one))
        return cands

    def best_weights(self, u1, u2):
        '''Exact optimum over (t1, t2) for each direction pair.

        Returns (value, t1, t2); value is -inf where nothing is feasible.
        '''
        o1, o2, e1, e2, k = self.coefficients(u1, u2)
        cands = self._candidates(o1, o2, e1, e2, k)
        t1 = np.stack([c[0] for c in cands])
        t2 = np.stack([c[1] for c in cands])

        if self.strong:
            # Conditional error of an outcome does not depend on its weight
            bound = self.margin + self.slack
            with np.errstate(divide='ignore', invalid='ignore'):
                ok1 = ~((o1 + e1) > _EPS) | (e1 <= bound * (o1 + e1))
                ok2 = ~((o2 + e2) > _EPS) | (e2 <= bound * (o2 + e2))
            t1 = np.where(ok1, t1, 0.0)
            t2 = np.where(ok2, t2, 0.0)

        feasible = np.isfinite(t1) & np.isfinite(t2)
        t1 = np.where(feasible, t1, 0.0)
        t2 = np.where(feasible, t2, 0.0)
        feasible &= (t1 >= -_EPS) & (t1 <= 1.0 + _EPS) & (t2 >= -_EPS) & (t2 <= 1.0 + _EPS)
        t1, t2 = np.clip(t1, 0.0, 1.0), np.clip(t2, 0.0, 1.0)
        feasible &= (1.0 - t1 - t2 + k * t1 * t2) >= -self.slack
        if not self.strong:
            feasible &= (t1 * e1 + t2 * e2) <= self.margin + self.slack

        values = np.where(feasible, t1 * o1 + t2 * o2, -np.inf)
        idx = np.argmax(values, axis=0)
        pick = np.expand_dims(idx, 0)
        return (
            np.take_along_axis(values, pick, 0)[0],
            np.take_along_axis(t1, pick, 0)[0],
            np.take_along_axis(t2, pick, 0)[0],
        )


# -- search ---------------------------------------------------------------------

def _unpack(params, full_sphere):
    '''params (..., 2 or 4) -> direction arrays u1, u2.'''
    if full_sphere:
        return _directions(params[..., 0], params[..., 2]), _directions(params[..., 1], params[..., 3])
    zero = np.zeros_like(params[..., 0])
    return _directions(params[..., 0], zero), _directions(params[..., 1], zero)


def _coarse_grid(cfg: SearchConfig, anchors=()):
    theta = np.linspace(0.0, 2.0 * math.pi, cfg.coarse_grid, endpoint=False)
    theta = np.unique(np.concatenate([theta, np.asarray(anchors, dtype=float)]))
    if not cfg.full_sphere:
        t1, t2 = np.meshgrid(theta, theta, indexing='ij')
        return np.stack([t1.ravel(), t2.ravel()], axis=-1)
    phi = np.linspace(0.0, math.pi, cfg.azimuth_levels, endpoint=False)
    grid = np.meshgrid(theta, theta, phi, phi, indexing='ij')
    return np.stack([g.ravel() for g in grid], axis=-1)


def _moves(dim):
    '''Coordinate steps plus pairwise diagonals, as a (n, dim) array.'''
    moves = []
    for i in range(dim):
        for sign in (1.0, -1.0):
            v = np.zeros(dim)
            v[i] = sign
            moves.append(v)
    for i, j in itertools.combinations(range(dim), 2):
        for si, sj in itertools.product((1.0, -1.0), repeat=2):
            v = np.zeros(dim)
            v[i], v[j] = si, sj
            moves.append(v)
    return np.array(moves)


def _refine(problem: _Problem, start, value, cfg: SearchConfig):
    '''Pattern search with geometric step shrinking.'''
    x = np.array(start, dtype=float)
    moves = _moves(x.shape[0])
    step = 2.0 * math.pi / cfg.coarse_grid
    for _ in range(cfg.refine_iters):
        for _ in range(cfg.max_passes):
            trial = x + step * moves
            vals, _, _ = problem.best_weights(*_unpack(trial, cfg.full_sphere))
            best = int(np.argmax(vals))
            if vals[best] <= value:
                break
            x, value = trial[best], float(vals[best])
        step *= cfg.refine_shrink
    return x, value


def _search(problem: _Problem, cfg: SearchConfig) -> OracleResult:
    grid = _coarse_grid(cfg, problem.anchor_angles())
    values, _, _ = problem.best_weights(*_unpack(grid, cfg.full_sphere))
    if not np.any(np.isfinite(values)):
        raise NoFeasiblePoint("no feasible measurement on the search grid")

    n_seeds = min(cfg.refine_seeds, values.shape[0])
    seeds = np.argsort(values)[::-1][:n_seeds]

    best_x, best_val = grid[seeds[0]], float(values[seeds[0]])
    for s in seeds:
        x, val = _refine(problem, grid[s], float(values[s]), cfg)
        if val > best_val:
            best_x, best_val = x, val

    u1, u2 = _unpack(best_x[np.newaxis, :], cfg.full_sphere)
    _, t1, t2 = problem.best_weights(u1, u2)
    e1 = float(t1[0]) * Herm2.projector(Vec3.from_iterable(u1[0]))
    e2 = float(t2[0]) * Herm2.projector(Vec3.from_iterable(u2[0]))
    povm = Povm3(e1, e2, Herm2.identity() - e1 - e2)
    _log.debug(f"oracle best={best_val:.12g} t=({float(t1[0]):.6g}, {float(t2[0]):.6g})")
    return OracleResult(best_val, povm)


def _config(cfg):
    return cfg if cfg is not None else SearchConfig.from_defaults()


def oracle_pure_weak(inst: Instance, m, cfg: SearchConfig = None) -> OracleResult:
    '''Best (p_success, POVM) found under the weak margin, in the instance's labels.'''
    cfg = _config(cfg)
    m = validate_margin(m)
    problem = _Problem(
        inst.eta1, inst.eta2, inst.n1.as_tuple(), inst.n2.as_tuple(),
        m, slack=cfg.margin_slack,
    )
    return _search(problem, cfg)


def oracle_pure_strong(inst: Instance, m_s, cfg: SearchConfig = None) -> float:
    cfg = _config(cfg)
    m_s = validate_margin(m_s)
    problem = _Problem(
        inst.eta1, inst.eta2, inst.n1.as_tuple(), inst.n2.as_tuple(),
        m_s, strong=True, slack=cfg.margin_slack,
    )
    return _search(problem, cfg).p_best


def _planar_frame(r1, r2):
    '''Orthonormal (ex, ez) spanning the plane of r1, r2, z along their bisector.'''
    def unit(v):
        n = np.linalg.norm(v)
        return v / n if n > 1e-12 else np.zeros(3)

    a, b = unit(r1), unit(r2)
    ez = unit(a + b)
    if not ez.any():
        d = unit(a - b)
        ez = unit(np.cross(d, [0.0, 1.0, 0.0])) if d.any() else np.array([0.0, 0.0, 1.0])
        if not ez.any():
            ez = np.array([0.0, 0.0, 1.0])
    d = a - b
    ex = unit(d - (d @ ez) * ez)
    if not ex.any():
        helper = np.array([1.0, 0.0, 0.0]) if abs(ez[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        ex = unit(helper - (helper @ ez) * ez)
    return ex, ez


def oracle_mixed_weak(minst: MixedInstance, m, cfg: SearchConfig = None) -> float:
    '''Best success probability for two qubit density matrices (E1, E2 rank one).'''
    if minst.dim != 2:
        raise DimensionUnsupported(f"mixed oracle supports qubits only, got dim {minst.dim}")
    cfg = _config(cfg)
    m = validate_margin(m)
    r1 = np.array(minst.rho1.bloch().as_tuple())
    r2 = np.array(minst.rho2.bloch().as_tuple())
    ex, ez = _planar_frame(r1, r2)
    planar1 = (r1 @ ex, 0.0, r1 @ ez)
    planar2 = (r2 @ ex, 0.0, r2 @ ez)
    problem = _Problem(minst.eta1, minst.eta2, planar1, planar2, m, slack=cfg.margin_slack)
    return _search(problem, cfg).p_best


# -- measurement-level helpers ----------------------------------------------------

def classical_fidelity(inst: Instance, povm: Povm3) -> float:
    '''sum_mu sqrt(P(E_mu|rho1) P(E_mu|rho2)); never below the state overlap.'''
    total = 0.0
    for e in povm.elements():
        p1 = max(0.0, trace_product(inst.rho1, e))
        p2 = max(0.0, trace_product(inst.rho2, e))
        total += math.sqrt(p1 * p2)
    return total


def reflect_average(povm: Povm3) -> Povm3:
    '''Average each element with its mirror image through the x-z plane.'''
    def flatten(e: Herm2):
        return Herm2(e.alpha, Vec3(e.beta.x, 0.0, e.beta.z))
    return Povm3(*(flatten(e) for e in povm.elements()))
