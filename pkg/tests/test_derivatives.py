import numpy as np
import pytest

from conftest import max_abs, rel_scale_err
from specshift.derivatives import (
    DerivativeRequest,
    d1_divdiff,
    d1_poly,
    d2_divdiff,
    d2_poly,
    evaluate_derivative,
    remainder_simplex_poly,
    remainder_trace,
)
from specshift.exceptions import DimensionMismatchError
from specshift.functions import GaussianPacket, Polynomial, monomial
from specshift.oracles import fd_frechet, random_hermitian, random_instance
from specshift.spectral import HermitianOperator, apply_function, eig


@pytest.fixture
def instance(rng):
    A = random_hermitian(rng, 4)
    X = random_hermitian(rng, 4).entries
    Y = random_hermitian(rng, 4).entries
    return A, X, Y


def test_d1_poly_low_orders(instance):
    A, X, _ = instance
    assert max_abs(d1_poly(A, X, 0)) == 0.0
    assert max_abs(d1_poly(A, X, 1) - X) == 0.0
    expected = A.entries @ X + X @ A.entries
    assert max_abs(d1_poly(A, X, 2) - expected) <= 1e-14 * max_abs(expected)
    with pytest.raises(ValueError):
        d1_poly(A, X, -1)
    with pytest.raises(DimensionMismatchError):
        d1_poly(A, np.zeros((3, 3)), 2)


def test_d1_poly_matches_central_difference(instance):
    A, X, _ = instance
    h = 1e-5
    fd = fd_frechet(monomial(5), A, X, h=h, order=1)
    assert max_abs(d1_poly(A, X, 5) - fd) <= 1e-7 * max(max_abs(fd), 1.0)


def test_d2_poly_closed_cases(instance):
    A, X, Y = instance
    # r = 2 evaluates to XY + YX
    assert max_abs(d2_poly(A, X, Y, 2) - (X @ Y + Y @ X)) <= 1e-13 * max_abs(X @ Y)
    tr = np.trace(d2_poly(A, X, X, 2))
    assert tr == pytest.approx(2.0 * np.trace(X @ X), rel=1e-12)
    # r = 3 at A = I collapses to 3(XY + YX)
    I3 = HermitianOperator(np.eye(4))
    expected = 3.0 * (X @ Y + Y @ X)
    assert max_abs(d2_poly(I3, X, Y, 3) - expected) <= 1e-13 * max_abs(expected)
    assert max_abs(d2_poly(A, np.zeros_like(X), Y, 7)) == 0.0


def test_d2_poly_symmetric_in_directions(instance):
    A, X, Y = instance
    for r in (3, 5, 8):
        diff = d2_poly(A, X, Y, r) - d2_poly(A, Y, X, r)
        assert max_abs(diff) <= 1e-12 * max(max_abs(d2_poly(A, X, Y, r)), 1.0)


def test_d2_trace_symmetry_invariant(rng):
    for _ in range(5):
        A = random_hermitian(rng, 5)
        X = random_hermitian(rng, 5).entries
        Y = random_hermitian(rng, 5).entries
        dec = eig(A)
        g = GaussianPacket(center=0.0, width=1.5)
        t1 = np.trace(d2_divdiff(g, dec, X, Y))
        t2 = np.trace(d2_divdiff(g, dec, Y, X))
        assert abs(t1 - t2) <= 1e-10 * (1.0 + abs(t1))


def test_d1_divdiff_routes(instance, rng):
    A, X, _ = instance
    dec = eig(A)
    for r in (1, 3, 7, 10):
        err = rel_scale_err(d1_divdiff(monomial(r), dec, X), d1_poly(A, X, r))
        assert err <= 1e-9
    # scalar base: phi'(c) X
    c = 0.8
    scal = HermitianOperator(np.eye(4) * c)
    g = GaussianPacket(center=0.0, width=1.0)
    out = d1_divdiff(g, eig(scal), X)
    assert max_abs(out - g.derivative()(c) * X) <= 1e-12


def test_d2_divdiff_matches_power_sums(instance):
    A, X, Y = instance
    dec = eig(A)
    for r in (2, 4, 6, 8):
        err = rel_scale_err(d2_divdiff(monomial(r), dec, X, Y), d2_poly(A, X, Y, r))
        assert err <= 1e-8
    assert max_abs(d2_divdiff(monomial(5), dec,
                              np.zeros_like(X), np.zeros_like(Y))) == 0.0


def test_d2_divdiff_confluent_scalar_base(instance):
    A, X, Y = instance
    c = -0.4
    scal = HermitianOperator(np.eye(4) * c)
    for phi in (monomial(5), GaussianPacket(center=0.1, width=0.9)):
        out = d2_divdiff(phi, eig(scal), X, Y)
        if isinstance(phi, Polynomial):
            oracle = d2_poly(scal, X, Y, 5)
        else:
            oracle = 0.5 * phi.derivative(2)(c) * (X @ Y + Y @ X)
        assert max_abs(out - oracle) <= 1e-9 * max(max_abs(oracle), 1.0)


def test_route_agreement_random_corpus():
    for k in range(10):
        n = 2 + k % 7
        A, V = random_instance(100 + k, n, 0.9)
        X = V.entries
        dec = eig(A)
        coeffs = np.random.default_rng(k).uniform(-1, 1, size=11)
        p = Polynomial(coeffs)
        d1p = evaluate_derivative(DerivativeRequest(p, A, (X,), route="poly"))
        d1d = d1_divdiff(p, dec, X)
        assert rel_scale_err(d1d, d1p) <= 1e-8
        d2p = evaluate_derivative(DerivativeRequest(p, A, (X, X), route="poly"))
        d2d = d2_divdiff(p, dec, X, X)
        assert rel_scale_err(d2d, d2p) <= 1e-7


def test_derivative_request_validation(instance):
    A, X, _ = instance
    g = GaussianPacket(center=0.0, width=1.0)
    with pytest.raises(ValueError):
        DerivativeRequest(g, A, (X,), route="poly")
    with pytest.raises(ValueError):
        DerivativeRequest(monomial(3), A, (X,), route="fourier")
    with pytest.raises(ValueError):
        DerivativeRequest(monomial(3), A, (X, X, X), route="poly")
    with pytest.raises(ValueError):
        DerivativeRequest(monomial(3), A, (X,), route="nope")


def test_remainder_trace_low_degree_zero(rng):
    A, V = random_instance(7, 5, 0.8)
    for r in (0, 1, 2):
        assert remainder_trace(monomial(r), A, V, 3) == 0.0
    # the numerically assembled remainder also cancels to rounding error
    p = monomial(2)
    dec = eig(A)
    assembled = np.trace(apply_function(p, A + V).entries
                         - apply_function(p, A).entries
                         - d1_divdiff(p, dec, V.entries)
                         - 0.5 * d2_divdiff(p, dec, V.entries, V.entries))
    assert abs(assembled) <= 1e-10


def test_remainder_trace_canonical_1x1():
    A = HermitianOperator([[0.0]])
    V = HermitianOperator([[1.0]])
    # Tr[(A+V)^3 - A^3 - D1 - D2/2] = Tr V^3 = 1; the density integrates to 1/6
    assert remainder_trace(monomial(3), A, V, 3) == pytest.approx(1.0, abs=1e-12)


def test_remainder_trace_commuting_matches_scalar_taylor(rng):
    a = rng.uniform(-1, 1, size=5)
    v = rng.uniform(-0.5, 0.5, size=5)
    A = HermitianOperator.from_diagonal(a)
    V = HermitianOperator.from_diagonal(v)
    p = Polynomial([0.0, 0.3, -0.2, 1.0, 0.5, 0.1])
    d1, d2 = p.derivative(1), p.derivative(2)
    oracle = float(np.sum(p(a + v) - p(a) - d1(a) * v - 0.5 * d2(a) * v ** 2))
    assert remainder_trace(p, A, V, 3) == pytest.approx(oracle, rel=1e-11, abs=1e-13)
    # lower orders subtract fewer Taylor terms
    first = float(np.sum(p(a + v) - p(a)))
    assert remainder_trace(p, A, V, 1) == pytest.approx(first, rel=1e-12)
    second = float(np.sum(p(a + v) - p(a) - d1(a) * v))
    assert remainder_trace(p, A, V, 2) == pytest.approx(second, rel=1e-12)
    with pytest.raises(ValueError):
        remainder_trace(p, A, V, 4)


def test_remainder_simplex_low_and_canonical():
    A = HermitianOperator([[0.0]])
    V = HermitianOperator([[1.0]])
    for r in (0, 1, 2):
        assert remainder_simplex_poly(A, V, r) == 0.0
    assert remainder_simplex_poly(A, V, 3) == pytest.approx(1.0, abs=1e-13)


def test_remainder_simplex_matches_trace(rng):
    A, V = random_instance(55, 5, 1.0)
    for r in range(3, 11):
        trace_val = remainder_trace(monomial(r), A, V, 3)
        simplex_val = remainder_simplex_poly(A, V, r, quad_order=32)
        assert abs(trace_val - simplex_val) <= 1e-8 * (1.0 + abs(trace_val))


def test_finite_difference_convergence_order(rng):
    A = random_hermitian(rng, 4)
    X = random_hermitian(rng, 4).entries
    p = monomial(5)
    exact = d1_poly(A, X, 5)
    hs = [1e-2, 1e-3, 1e-4]
    errs = [max_abs(fd_frechet(p, A, X, h=h, order=1) - exact) for h in hs]
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope >= 1.8
