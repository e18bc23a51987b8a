"""Independent brute-force oracles and cross-route consistency reports.

Nothing here shares code with the computational paths it checks: the
combinatorial identity is evaluated as literal double sums, derivatives are
re-derived from central differences, and the commuting-case density comes
from the scalar Taylor remainder.  The report builders run several remainder
routes side by side and record pairwise residuals.
"""

from dataclasses import dataclass

import numpy as np

from .derivatives import remainder_simplex_poly, remainder_trace
from .fourier_path import FourierFunction, remainder_fourier
from .functions import GaussianPacket, Polynomial, ScalarFunction
from .shift_density import eta_density, support_bounds
from .spectral import HermitianOperator, apply_function, eig

__all__ = [
    "PalindromeCheck",
    "CommutingEta",
    "random_hermitian",
    "random_instance",
    "palindrome_sum_identity",
    "fd_frechet",
    "commuting_eta_closed_form",
    "cross_check_report",
    "corpus_cross_check",
]


# ---------------------------------------------------------------------------
# seeded instance generation

def random_hermitian(rng, n: int, hs_norm=None, complex_entries: bool = True
                     ) -> HermitianOperator:
    """Symmetrized i.i.d. standard-normal matrix, optionally rescaled in
    Hilbert-Schmidt norm."""
    G = rng.standard_normal((n, n))
    if complex_entries:
        G = G + 1j * rng.standard_normal((n, n))
    H = 0.5 * (G + G.conj().T)
    if hs_norm is not None:
        H = H * (hs_norm / np.linalg.norm(H))
    return HermitianOperator(H)


def random_instance(seed: int, n: int, v_norm: float = 1.0,
                    complex_entries: bool = True):
    """A reproducible pair (A, V) with ``||V||_2`` equal to ``v_norm``."""
    rng = np.random.default_rng(seed)
    A = random_hermitian(rng, n, complex_entries=complex_entries)
    V = random_hermitian(rng, n, hs_norm=v_norm, complex_entries=complex_entries)
    return A, V


# ---------------------------------------------------------------------------
# combinatorial identity

@dataclass(frozen=True)
class PalindromeCheck:
    lhs: object
    rhs: object

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def palindrome_sum_identity(a) -> PalindromeCheck:
    """Literal evaluation of the double-sum identity

    ``sum_{j=0}^{n-1} sum_{k=0}^{n-j-1} a_k + sum_{j=1}^{n} sum_{k=0}^{j-1} a_k
    = (n + 1) sum_k a_k``

    for palindromic sequences ``a_{n-k-1} = a_k``.  Inputs are used as given
    (integers stay exact), and a non-palindromic sequence is a precondition
    violation.
    """
    a = list(a)
    n = len(a)
    if n == 0:
        raise ValueError("sequence must be non-empty")
    for k in range(n):
        if a[n - k - 1] != a[k]:
            raise ValueError(f"sequence is not palindromic at position {k}")
    lhs = sum(a[k] for j in range(n) for k in range(n - j))
    lhs += sum(a[k] for j in range(1, n + 1) for k in range(j))
    rhs = (n + 1) * sum(a)
    return PalindromeCheck(lhs=lhs, rhs=rhs)


# ---------------------------------------------------------------------------
# finite differences

def fd_frechet(phi, A: HermitianOperator, X, h=None, order: int = 1) -> np.ndarray:
    """Central-difference estimate of the first or second derivative.

    ``order=1``: ``(phi(A + hX) - phi(A - hX)) / (2h)``;
    ``order=2``: ``(phi(A + hX) - 2 phi(A) + phi(A - hX)) / h**2``, which
    estimates the second derivative in the repeated direction (X, X).
    The default step balances truncation against rounding:
    ``h = 1e-5 (1 + ||A||_op) / (1 + ||X||_op)``.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    Xm = np.asarray(X.entries if isinstance(X, HermitianOperator) else X,
                    dtype=complex)
    if h is None:
        a_op = float(np.linalg.norm(A.entries, 2))
        x_op = float(np.linalg.norm(Xm, 2))
        h = 1e-5 * (1.0 + a_op) / (1.0 + x_op)
    plus = apply_function(phi, HermitianOperator(A.entries + h * Xm)).entries
    minus = apply_function(phi, HermitianOperator(A.entries - h * Xm)).entries
    if order == 1:
        return (plus - minus) / (2.0 * h)
    centre = apply_function(phi, A).entries
    return (plus - 2.0 * centre + minus) / (h * h)


# ---------------------------------------------------------------------------
# commuting-case closed form

@dataclass(frozen=True)
class CommutingEta:
    """Scalar-Taylor closed form of the density for commuting diagonal data.

    One signed parabolic lobe per eigenvalue: ``(a_i + v_i - x)**2 / 2`` with
    sign(v_i), carried on the half-open interval from ``a_i`` towards
    ``a_i + v_i`` (half-open at the far end, matching the right-continuous
    convention of the constructed density at its jumps).
    """

    a: np.ndarray
    v: np.ndarray

    def evaluate(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros_like(x)
        for ai, vi in zip(self.a, self.v):
            if vi > 0:
                lobe = (x >= ai) & (x < ai + vi)
                out += np.where(lobe, 0.5 * (ai + vi - x) ** 2, 0.0)
            elif vi < 0:
                lobe = (x >= ai + vi) & (x < ai)
                out -= np.where(lobe, 0.5 * (ai + vi - x) ** 2, 0.0)
        return out

    def moment(self, k: int) -> float:
        total = 0.0
        for ai, vi in zip(self.a, self.v):
            if vi == 0.0:
                continue
            # signed int_{a_i}^{a_i+v_i} x^k (a_i + v_i - x)^2 / 2 dx
            base = np.zeros(k + 1)
            base[k] = 0.5
            quad = np.polynomial.polynomial.Polynomial([ai + vi, -1.0]) ** 2
            integrand = np.polynomial.polynomial.Polynomial(base) * quad
            anti = integrand.integ()
            total += anti(ai + vi) - anti(ai)
        return float(total)


def commuting_eta_closed_form(a, v) -> CommutingEta:
    a = np.asarray(a, dtype=float)
    v = np.asarray(v, dtype=float)
    if a.shape != v.shape or a.ndim != 1:
        raise ValueError("need matching 1-D eigenvalue/shift vectors")
    return CommutingEta(a=a, v=v)


# ---------------------------------------------------------------------------
# cross-route reports

def _gaussian_for(A, V):
    sup = support_bounds(A, V)
    width = max(sup.width / 6.0, 0.25)
    return GaussianPacket(center=0.5 * (sup.a + sup.b), width=width)


def cross_check_report(A: HermitianOperator, V: HermitianOperator,
                       phi_corpus, tol: float = 1e-6,
                       quad_order: int = 64) -> dict:
    """Evaluate every applicable remainder route for each test function.

    Routes: the spectral remainder trace (always), the coupling-constant
    simplex integral (polynomials), the time-domain transform route
    (Gaussian packets), and the shift-density pairing ``int phi''' eta``.
    Failures of individual routes are recorded, not raised, so one bad
    function does not abort the rest.  Residuals are relative:
    ``|v_i - v_j| / (1 + max |route values|)``.
    """
    density = eta_density(A, V, grid_size=41, quad_order=quad_order,
                          path_samples=4 * quad_order + 1)
    results = []
    for phi in phi_corpus:
        values = {}
        errors = {}

        def attempt(name, fn):
            try:
                values[name] = float(fn())
            except Exception as exc:  # noqa: BLE001 - aggregated into report
                errors[name] = f"{type(exc).__name__}: {exc}"

        attempt("trace", lambda: remainder_trace(phi, A, V, 3))
        if isinstance(phi, Polynomial):
            attempt("simplex", lambda: sum(
                c * remainder_simplex_poly(A, V, r, quad_order=quad_order)
                for r, c in enumerate(phi.coefficients) if c != 0.0))
            attempt("density", lambda: density.integrate_against_polynomial(
                phi.derivative(3)))
        elif isinstance(phi, GaussianPacket):
            attempt("fourier", lambda: remainder_fourier(
                FourierFunction.from_gaussian(phi), A, V, quad_order=quad_order))
            attempt("density", lambda: density.integrate_against_smooth(
                phi.derivative(3)))
        names = sorted(values)
        scale = 1.0 + max((abs(values[m]) for m in names), default=0.0)
        residuals = {
            f"{p}|{q}": abs(values[p] - values[q]) / scale
            for i, p in enumerate(names) for q in names[i + 1:]
        }
        max_residual = max(residuals.values(), default=0.0)
        results.append({
            "function": _describe(phi),
            "values": values,
            "errors": errors,
            "residual_matrix": residuals,
            "max_residual": max_residual,
            "pass": bool(not errors and max_residual <= tol),
        })
    return {
        "n": A.n,
        "tol": tol,
        "quad_order": quad_order,
        "functions": results,
        "pass": bool(all(r["pass"] for r in results)),
    }


def _describe(phi) -> str:
    if isinstance(phi, Polynomial):
        return "poly:" + ",".join(f"{c:g}" for c in phi.coefficients)
    if isinstance(phi, GaussianPacket):
        return f"gauss:{phi.center:g},{phi.width:g}"
    return type(phi).__name__


def corpus_cross_check(seed: int, instances: int = 8, n: int = 6,
                       v_norm: float = 0.8, degrees=(3, 4, 6, 8),
                       include_gaussian: bool = True, tol: float = 1e-6,
                       quad_order: int = 64) -> dict:
    """Seeded multi-instance report; the schema mirrors what the CLI emits."""
    out = []
    for k in range(instances):
        A, V = random_instance(seed + k, n, v_norm)
        corpus = [Polynomial(_monomial_coeffs(d)) for d in degrees]
        if include_gaussian:
            corpus.append(_gaussian_for(A, V))
        rep = cross_check_report(A, V, corpus, tol=tol, quad_order=quad_order)
        out.append({
            "id": k,
            "seed": seed + k,
            "residual_matrix": [f["residual_matrix"] for f in rep["functions"]],
            "max_residual": max(f["max_residual"] for f in rep["functions"]),
            "pass": rep["pass"],
        })
    failures = [r["id"] for r in out if not r["pass"]]
    return {
        "seed": seed,
        "n": n,
        "instances": out,
        "summary": {
            "max_residual": max(r["max_residual"] for r in out),
            "failures": failures,
        },
    }


def _monomial_coeffs(r):
    coeffs = np.zeros(r + 1)
    coeffs[r] = 1.0
    return coeffs
