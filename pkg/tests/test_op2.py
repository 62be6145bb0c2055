import numpy as np
from hypothesis import given
from hypothesis.strategies import floats, tuples
from pytest import approx, mark, raises

from core.op2 import (
    Herm2,
    Mat2c,
    Vec3,
    conjugate,
    eigs,
    frobenius_norm,
    is_psd,
    mul,
    trace_product,
)

UP = Herm2.projector(Vec3(0, 0, 1))
DOWN = Herm2.projector(Vec3(0, 0, -1))

coord = floats(min_value=-2, max_value=2, allow_nan=False)
herm = tuples(coord, coord, coord, coord).map(lambda v: Herm2(v[0], Vec3(v[1], v[2], v[3])))


@mark.parametrize("  alpha  beta  expected".split(),
                  ((1.0, (0, 0, 0), (1.0, 1.0)),
                   (0.5, (0, 0, 0.5), (0.0, 1.0)),
                   (0.3, (0.3, 0, 0.4), (-0.2, 0.8))))
def test_eigs(alpha, beta, expected):
    lo, hi = eigs(Herm2(alpha, Vec3(*beta)))
    assert lo == approx(expected[0], abs=1e-15)
    assert hi == approx(expected[1], abs=1e-15)


def test_is_psd():
    assert is_psd(Herm2.identity(), tol=0)
    assert not is_psd(Herm2(0.0, Vec3(0, 0, 1)), tol=1e-12)
    assert is_psd(Herm2(0.5, Vec3(0, 0, 0.5 + 1e-13)), tol=1e-12)


def test_is_psd_rejects_negative_tolerance():
    with raises(ValueError):
        is_psd(Herm2.identity(), tol=-1e-3)


def test_trace_product_and_orthogonal_projectors():
    assert trace_product(Herm2.identity(), UP) == approx(1.0)
    assert trace_product(UP, DOWN) == approx(0.0, abs=1e-15)
    assert frobenius_norm(mul(UP, DOWN)) == approx(0.0, abs=1e-15)


@given(herm)
def test_eigs_match_dense_eigensolver(h):
    np.testing.assert_allclose(eigs(h), np.linalg.eigvalsh(h.to_array()), rtol=0, atol=1e-13)


@given(herm)
def test_is_psd_without_tolerance_means_no_negative_eigenvalue(h):
    assert is_psd(h, 0) == all(lam >= 0 for lam in eigs(h))


@given(herm)
def test_trace_product_with_identity_is_trace(h):
    assert trace_product(h, Herm2.identity()) == h.trace()


@given(herm, herm)
def test_mul_matches_dense_product(a, b):
    dense = a.to_array() @ b.to_array()
    np.testing.assert_allclose(mul(a, b).to_array(), dense, atol=1e-12)


@given(herm, herm)
def test_trace_product_matches_dense_trace(a, b):
    dense = np.trace(a.to_array() @ b.to_array()).real
    assert trace_product(a, b) == approx(dense, abs=1e-12)


def test_from_matrix_recovers_bloch_form():
    h = Herm2(0.25, Vec3(0.1, -0.3, 0.2))
    back = Herm2.from_matrix(h.to_array())
    assert back.alpha == approx(h.alpha)
    np.testing.assert_allclose(back.beta.as_tuple(), h.beta.as_tuple(), atol=1e-15)


def test_from_matrix_rejects_wrong_shape():
    with raises(ValueError):
        Herm2.from_matrix(np.eye(3))


def test_reflection_flips_x_and_y():
    h = Herm2(0.5, Vec3(0.1, 0.2, 0.3)).reflected()
    assert h.beta.as_tuple() == (-0.1, -0.2, 0.3)


def test_conjugate_by_unitary_preserves_spectrum():
    theta = 0.7
    u = np.array([[np.cos(theta), -1j * np.sin(theta)], [-1j * np.sin(theta), np.cos(theta)]])
    h = Herm2(0.3, Vec3(0.3, 0, 0.4))
    rotated = Herm2.from_matrix(conjugate(h, u))
    assert rotated.eigs() == approx(h.eigs(), abs=1e-14)


def test_mat2c_product():
    a = Mat2c(1, 2j, 0, 1)
    b = Mat2c(0, 1, 1, 0)
    np.testing.assert_allclose((a @ b).to_array(), a.to_array() @ b.to_array())
    assert (a @ b).trace() == approx(2j)
