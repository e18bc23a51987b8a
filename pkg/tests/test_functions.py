import numpy as np
import pytest

from specshift.exceptions import FunctionDomainError
from specshift.functions import (
    GaussianPacket,
    GridFunction,
    Polynomial,
    divided_difference_1,
    divided_difference_2,
    hom_sum_pairs,
    monomial,
)


def brute_hom(x, y, m):
    return sum(x ** p * y ** (m - p) for p in range(m + 1))


def test_polynomial_basics():
    p = Polynomial([1.0, 0.0, 2.0])  # 1 + 2 x^2
    assert p.degree == 2
    assert p(3.0) == pytest.approx(19.0)
    assert p.derivative()(3.0) == pytest.approx(12.0)
    assert p.derivative(3).coefficients == pytest.approx([0.0])
    assert monomial(4)(2.0) == pytest.approx(16.0)
    with pytest.raises(ValueError):
        Polynomial([np.inf])
    with pytest.raises(ValueError):
        monomial(-1)


@pytest.mark.parametrize("m", [0, 1, 2, 5, 9])
def test_hom_sum_matches_brute_force(m, rng):
    x = rng.uniform(-2, 2, size=4)
    y = rng.uniform(-2, 2, size=3)
    table = hom_sum_pairs(x, y, m)
    for i, xi in enumerate(x):
        for j, yj in enumerate(y):
            assert table[i, j] == pytest.approx(brute_hom(xi, yj, m), rel=1e-13)
    # coincident arguments: (m+1) x^m
    diag = hom_sum_pairs(x, x, m)
    for i, xi in enumerate(x):
        assert diag[i, i] == pytest.approx((m + 1) * xi ** m, rel=1e-13)


def test_polynomial_dd1_quotient_and_confluent(rng):
    p = Polynomial(rng.uniform(-1, 1, size=7))
    lam = np.array([-1.3, 0.2, 0.2 + 1e-13, 1.7])
    table = divided_difference_1(p, lam, lam)
    for i, li in enumerate(lam):
        for j, mj in enumerate(lam):
            if abs(li - mj) > 1e-6:
                expected = (p(li) - p(mj)) / (li - mj)
            else:
                expected = p.derivative()(0.5 * (li + mj))
            assert table[i, j] == pytest.approx(expected, rel=1e-10, abs=1e-12)


def brute_dd2(fn, x0, x1, x2):
    def dd1(a, b):
        return (fn(a) - fn(b)) / (a - b)

    return (dd1(x0, x1) - dd1(x1, x2)) / (x0 - x2)


def test_polynomial_dd2_matches_recursive_definition(rng):
    p = Polynomial(rng.uniform(-1, 1, size=8))
    pts = np.array([-1.5, -0.2, 0.9])
    table = divided_difference_2(p, pts, pts, pts)
    for i in range(3):
        for k in range(3):
            for j in range(3):
                if len({i, k, j}) == 3:
                    expected = brute_dd2(p, pts[i], pts[k], pts[j])
                    assert table[i, k, j] == pytest.approx(expected, rel=1e-10)
    # fully confluent limit is half the second derivative
    x = np.array([0.7])
    conf = divided_difference_2(p, x, x, x)[0, 0, 0]
    assert conf == pytest.approx(0.5 * p.derivative(2)(0.7), rel=1e-12)


def test_gaussian_derivatives_match_finite_differences():
    g = GaussianPacket(center=0.3, width=0.8)
    h = 1e-5
    for k in (1, 2, 3):
        dk = g.derivative(k)
        prev = g.derivative(k - 1)
        for x in (-0.5, 0.3, 1.1):
            fd = (prev(x + h) - prev(x - h)) / (2 * h)
            assert dk(x) == pytest.approx(fd, rel=1e-8, abs=1e-8)
    with pytest.raises(ValueError):
        GaussianPacket(center=0.0, width=0.0)


def test_gaussian_dd_consistent_across_confluent_switch():
    g = GaussianPacket(center=0.0, width=1.0)
    # spectral diameter ~2, threshold ~2e-8; straddle it; the divided
    # difference equals the derivative at the midpoint up to O(gap^2)
    for gap in (1e-9, 1e-7, 1e-4):
        lam = np.array([0.4, 0.4 + gap, -1.0, 1.0])
        table = divided_difference_1(g, lam, lam)
        assert table[0, 1] == pytest.approx(
            g.derivative()(0.4 + 0.5 * gap), rel=1e-6)


def test_gaussian_dd2_confluent_consistency():
    g = GaussianPacket(center=0.2, width=0.7)
    pts = np.array([-0.9, 0.5, 1.3])
    table = divided_difference_2(g, pts, pts, pts)
    expected = brute_dd2(g, *pts)
    assert table[0, 1, 2] == pytest.approx(expected, rel=1e-9)
    x = np.array([0.5])
    assert divided_difference_2(g, x, x, x)[0, 0, 0] == pytest.approx(
        0.5 * g.derivative(2)(0.5), rel=1e-7)


def test_grid_function_interpolates_and_guards_range():
    xs = np.linspace(-1, 1, 21)
    f = GridFunction(xs, xs ** 2)
    assert f(0.55) == pytest.approx(0.55 ** 2, abs=3e-3)
    with pytest.raises(FunctionDomainError):
        f(1.5)
    with pytest.raises(FunctionDomainError):
        f.derivative()
    with pytest.raises(FunctionDomainError):
        divided_difference_1(f, np.array([0.2, 0.2]), np.array([0.2]))
    with pytest.raises(FunctionDomainError):
        divided_difference_2(f, np.array([0.1]), np.array([0.5]), np.array([0.9]))
    # well-separated arguments are fine without derivative data
    t = divided_difference_1(f, np.array([-0.5]), np.array([0.5]))
    assert t[0, 0] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        GridFunction(xs[::-1], xs ** 2)
