"""First and second Frechet derivatives of matrix functions, and the Taylor
remainder traces built from them.

Two routes are implemented here and cross-checked in the tests:

* explicit power sums for polynomials, ``D1(A**r)(X) = sum_j A**(r-1-j) X A**j``
  and the corresponding double sum for the second derivative;
* divided differences in the eigenbasis of the base operator, valid for any
  differentiable scalar function.

A third, time-domain route lives in :mod:`specshift.fourier_path`.

The remainder traces are the quantities the shift density represents:
``order=1`` is the plain difference ``Tr[phi(A+V) - phi(A)]``, ``order=2``
subtracts the first derivative term, and ``order=3`` subtracts half the
second derivative term as well.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, QuadratureWarning
from .functions import (
    GaussianPacket,
    Polynomial,
    ScalarFunction,
    divided_difference_1,
    divided_difference_2,
)
from .quadrature import gauss_legendre, simplex_integral
from .spectral import HermitianOperator, SpectralDecomposition, eig

__all__ = [
    "DerivativeRequest",
    "d1_poly",
    "d2_poly",
    "d1_divdiff",
    "d2_divdiff",
    "evaluate_derivative",
    "remainder_trace",
    "remainder_simplex_poly",
]


def _as_matrix(X, n=None) -> np.ndarray:
    m = np.asarray(X.entries if isinstance(X, HermitianOperator) else X, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise DimensionMismatchError(f"dimension mismatch: {m.shape[0]} vs {n}")
    return m


def _powers(A: np.ndarray, up_to: int):
    out = [np.eye(A.shape[0], dtype=complex)]
    for _ in range(up_to):
        out.append(out[-1] @ A)
    return out


def d1_poly(A, X, r: int) -> np.ndarray:
    """``D1(A**r)(X)`` as the power sum ``sum_{j=0}^{r-1} A**(r-1-j) X A**j``."""
    if r < 0:
        raise ValueError("power must be non-negative")
    Am = _as_matrix(A)
    Xm = _as_matrix(X, Am.shape[0])
    if r == 0:
        return np.zeros_like(Am)
    pw = _powers(Am, r - 1)
    out = np.zeros_like(Am)
    for j in range(r):
        out += pw[r - 1 - j] @ Xm @ pw[j]
    return out


def d2_poly(A, X, Y, r: int) -> np.ndarray:
    """``D2(A**r)(X, Y)`` as the double power sums

    ``sum_{j=0}^{r-2} sum_{k=0}^{r-j-2} A**(r-j-k-2) X A**k Y A**j
    + sum_{j=1}^{r-1} sum_{k=0}^{j-1} A**(r-j-1) Y A**k X A**(j-k-1)``.
    """
    if r < 0:
        raise ValueError("power must be non-negative")
    Am = _as_matrix(A)
    n = Am.shape[0]
    Xm = _as_matrix(X, n)
    Ym = _as_matrix(Y, n)
    out = np.zeros_like(Am)
    if r < 2:
        return out
    pw = _powers(Am, r - 2)
    for j in range(r - 1):
        for k in range(r - j - 1):
            out += pw[r - j - k - 2] @ Xm @ pw[k] @ Ym @ pw[j]
    for j in range(1, r):
        for k in range(j):
            out += pw[r - j - 1] @ Ym @ pw[k] @ Xm @ pw[j - k - 1]
    return out


def d1_divdiff(phi: ScalarFunction, dec: SpectralDecomposition, X) -> np.ndarray:
    """``D1 phi(A)(X)`` through first divided differences in the eigenbasis."""
    Xm = _as_matrix(X, dec.n)
    Xt = dec.transform_to_eigenbasis(Xm)
    table = divided_difference_1(phi, dec.eigenvalues, dec.eigenvalues)
    return dec.transform_from_eigenbasis(table * Xt)


def d2_divdiff(phi: ScalarFunction, dec: SpectralDecomposition, X, Y) -> np.ndarray:
    """``D2 phi(A)(X, Y)`` through second divided differences.

    In the eigenbasis the (i, j) entry is
    ``sum_k (X_ik Y_kj + Y_ik X_kj) phi[lam_i, lam_k, lam_j]``.
    """
    Xm = _as_matrix(X, dec.n)
    Ym = _as_matrix(Y, dec.n)
    Xt = dec.transform_to_eigenbasis(Xm)
    Yt = dec.transform_to_eigenbasis(Ym)
    lam = dec.eigenvalues
    table = divided_difference_2(phi, lam, lam, lam)
    core = np.einsum("ik,kj,ikj->ij", Xt, Yt, table)
    core += np.einsum("ik,kj,ikj->ij", Yt, Xt, table)
    return dec.transform_from_eigenbasis(core)


@dataclass(frozen=True)
class DerivativeRequest:
    """A derivative evaluation bundled with its route.

    ``route`` is one of ``"poly"`` (explicit power sums; needs a polynomial),
    ``"divdiff"`` (divided differences; any differentiable function) or
    ``"fourier"`` (time-domain integrals; needs an explicit transform).
    ``directions`` holds one matrix for the first derivative, two for the
    second.
    """

    function: ScalarFunction
    base: HermitianOperator
    directions: tuple
    route: str = "divdiff"

    def __post_init__(self):
        if self.route not in ("poly", "divdiff", "fourier"):
            raise ValueError(f"unknown route {self.route!r}")
        if len(self.directions) not in (1, 2):
            raise ValueError("provide one or two direction matrices")
        if self.route == "poly" and not isinstance(self.function, Polynomial):
            raise ValueError("the poly route needs a Polynomial function")
        if self.route == "fourier" and not (
                isinstance(self.function, GaussianPacket)
                or hasattr(self.function, "phi_hat")):
            raise ValueError(
                "the fourier route needs a function with an explicit transform"
            )


def evaluate_derivative(request: DerivativeRequest) -> np.ndarray:
    """Dispatch a :class:`DerivativeRequest` to its route."""
    phi, A = request.function, request.base
    dirs = request.directions
    if request.route == "poly":
        coeffs = phi.coefficients
        out = np.zeros((A.n, A.n), dtype=complex)
        for r, c in enumerate(coeffs):
            if c == 0.0 or r == 0:
                continue
            if len(dirs) == 1:
                out += c * d1_poly(A, dirs[0], r)
            else:
                out += c * d2_poly(A, dirs[0], dirs[1], r)
        return out
    if request.route == "divdiff":
        dec = eig(A)
        if len(dirs) == 1:
            return d1_divdiff(phi, dec, dirs[0])
        return d2_divdiff(phi, dec, dirs[0], dirs[1])
    from .fourier_path import FourierFunction, d1_fourier, d2_fourier

    ff = phi if isinstance(phi, FourierFunction) else FourierFunction.from_gaussian(phi)
    if len(dirs) == 1:
        return d1_fourier(ff, A, dirs[0])
    return d2_fourier(ff, A, dirs[0], dirs[1])


def remainder_trace(phi, A: HermitianOperator, V: HermitianOperator,
                    order: int = 3) -> float:
    """Trace of the Taylor remainder of ``phi`` at ``A`` in direction ``V``.

    ``order=1``: Tr[phi(A+V) - phi(A)] (the first-order difference);
    ``order=2``: additionally subtracts ``D1 phi(A)(V)``;
    ``order=3``: additionally subtracts ``D2 phi(A)(V, V) / 2``.

    The result of the exact expression is real; the imaginary residue of the
    computed trace is checked against 1e-10 relative and discarded.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    if V.n != A.n:
        raise DimensionMismatchError(f"dimension mismatch: {A.n} vs {V.n}")
    if isinstance(phi, Polynomial) and phi.degree < order:
        # the Taylor expansion of a polynomial of degree < order is exact,
        # so the remainder vanishes identically
        return 0.0
    dec_a = eig(A)
    dec_av = eig(A + V)
    total = complex(np.sum(phi(dec_av.eigenvalues)) - np.sum(phi(dec_a.eigenvalues)))
    if order >= 2:
        total -= np.trace(d1_divdiff(phi, dec_a, V.entries))
    if order >= 3:
        total -= 0.5 * np.trace(d2_divdiff(phi, dec_a, V.entries, V.entries))
    if abs(total.imag) > 1e-10 * (1.0 + abs(total.real)):
        warnings.warn(
            f"remainder trace has imaginary residue {total.imag:.3e}",
            QuadratureWarning,
        )
    return float(total.real)


def remainder_simplex_poly(A: HermitianOperator, V: HermitianOperator, r: int,
                           quad_order: int = 32, convergence_tol=None) -> float:
    """Third-order monomial remainder through the coupling-constant integral

    ``r * sum_{k=0}^{r-2} int_0^1 ds int_0^s dtau
    Tr[V A_tau**(r-k-2) V A_tau**k - V A**(r-k-2) V A**k]``

    evaluated with the triangle reduced to a (1 - tau)-weighted line integral.
    The integrand is a polynomial in tau, so Gauss-Legendre is exact once the
    order passes (r - 1) / 2; when ``convergence_tol`` is given the value is
    re-checked at twice the order and a :class:`QuadratureWarning` is emitted
    on disagreement.
    """
    if r < 0:
        raise ValueError("power must be non-negative")
    if V.n != A.n:
        raise DimensionMismatchError(f"dimension mismatch: {A.n} vs {V.n}")
    if r < 3:
        return 0.0

    Vm = V.entries
    base_powers = _powers(A.entries, r - 2)
    base = sum(
        np.trace(Vm @ base_powers[r - k - 2] @ Vm @ base_powers[k])
        for k in range(r - 1)
    )

    def integrand(taus):
        out = np.empty_like(taus)
        for i, tau in enumerate(taus):
            pw = _powers(A.entries + tau * Vm, r - 2)
            acc = sum(
                np.trace(Vm @ pw[r - k - 2] @ Vm @ pw[k]) for k in range(r - 1)
            )
            out[i] = (acc - base).real
        return out

    rule = gauss_legendre(quad_order)
    value = r * simplex_integral(integrand, rule)
    if convergence_tol is not None:
        finer = r * simplex_integral(integrand, gauss_legendre(2 * quad_order))
        if abs(finer - value) > convergence_tol * (1.0 + abs(finer)):
            warnings.warn(
                f"simplex quadrature not converged: {value!r} vs {finer!r}",
                QuadratureWarning,
            )
        value = finer
    return float(value)
