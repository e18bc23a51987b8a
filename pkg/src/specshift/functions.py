"""Scalar functions of a real spectral variable and their divided differences.

Three representations are supported: dense-coefficient polynomials, Gaussian
packets (which also carry an explicit Fourier transform, used by the
time-domain route), and sampled grids.  All of them evaluate pointwise and,
where the data allows, expose derivatives and first/second divided
differences.

Divided differences are the numerical heart of the derivative formulas, so
the polynomial path avoids the subtraction-based quotient entirely: with
``hom_m(x, y) = sum_{p+q=m} x^p y^q`` one has

    p[x, y]    = sum_k c_k hom_{k-1}(x, y),
    p[x, v, y] = sum_k c_k sum_{p+q+r=k-2} x^p v^q y^r,

which are cancellation-free in the coincidence limit.  Non-polynomial
functions fall back to quotients with a confluent switch: argument pairs
closer than ``CONFLUENT_RTOL`` times the spectral diameter use the
derivative limit instead of the quotient.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import hermite_e as herme
from numpy.polynomial import polynomial as P

from .exceptions import FunctionDomainError

__all__ = [
    "ScalarFunction",
    "Polynomial",
    "GaussianPacket",
    "GridFunction",
    "monomial",
    "hom_sum_pairs",
    "divided_difference_1",
    "divided_difference_2",
]

# Relative gap below which two spectral points are treated as coincident.
CONFLUENT_RTOL = 1e-8


class ScalarFunction:
    """Base class for scalar functions; subclasses are immutable."""

    def __call__(self, x):
        raise NotImplementedError

    def derivative(self, order: int = 1) -> "ScalarFunction":
        raise NotImplementedError

    @property
    def kind(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Polynomial(ScalarFunction):
    """Polynomial with ascending real coefficients ``c0 + c1 x + ...``."""

    coefficients: np.ndarray

    def __post_init__(self):
        coeffs = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise ValueError("coefficients must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    @property
    def kind(self) -> str:
        return "polynomial"

    def __call__(self, x):
        return P.polyval(x, self.coefficients)

    def derivative(self, order: int = 1) -> "Polynomial":
        der = P.polyder(self.coefficients, m=order)
        if der.size == 0:
            der = np.zeros(1)
        return Polynomial(der)

    def dd1(self, lam, mu):
        """First divided difference table ``p[lam_i, mu_j]``."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        out = np.zeros((lam.size, mu.size))
        for k in range(1, self.coefficients.size):
            c = self.coefficients[k]
            if c != 0.0:
                out += c * hom_sum_pairs(lam, mu, k - 1)
        return out

    def dd2(self, lam, nu, mu):
        """Second divided difference tensor ``p[lam_i, nu_k, mu_j]``."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        nu = np.atleast_1d(np.asarray(nu, dtype=float))
        mu = np.atleast_1d(np.asarray(mu, dtype=float))
        out = np.zeros((lam.size, nu.size, mu.size))
        deg = self.degree
        if deg < 2:
            return out
        # cache hom_m(lam, mu) for m = 0 .. deg-2
        homs = [hom_sum_pairs(lam, mu, m) for m in range(deg - 1)]
        nu_pows = np.ones((deg - 1, nu.size))
        for q in range(1, deg - 1):
            nu_pows[q] = nu_pows[q - 1] * nu
        for k in range(2, deg + 1):
            c = self.coefficients[k]
            if c == 0.0:
                continue
            m = k - 2
            block = np.zeros_like(out)
            for q in range(m + 1):
                block += nu_pows[q][None, :, None] * homs[m - q][:, None, :]
            out += c * block
        return out


def monomial(r: int) -> Polynomial:
    """The monomial ``x**r``."""
    if r < 0:
        raise ValueError("exponent must be non-negative")
    coeffs = np.zeros(r + 1)
    coeffs[r] = 1.0
    return Polynomial(coeffs)


@dataclass(frozen=True)
class GaussianPacket(ScalarFunction):
    """``exp(-(x - center)**2 / (2 width**2))``, optionally differentiated.

    Derivatives stay in closed form through the probabilists' Hermite
    polynomials: the k-th derivative is
    ``(-1/width)**k He_k((x - center)/width) * exp(-u**2/2)``.
    """

    center: float
    width: float
    deriv_order: int = field(default=0)

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("width must be positive")

    @property
    def kind(self) -> str:
        return "gaussian"

    def __call__(self, x):
        u = (np.asarray(x, dtype=float) - self.center) / self.width
        base = np.exp(-0.5 * u * u)
        if self.deriv_order == 0:
            return base
        he = np.zeros(self.deriv_order + 1)
        he[self.deriv_order] = 1.0
        return ((-1.0 / self.width) ** self.deriv_order) * herme.hermeval(u, he) * base

    def derivative(self, order: int = 1) -> "GaussianPacket":
        return GaussianPacket(self.center, self.width, self.deriv_order + order)


@dataclass(frozen=True)
class GridFunction(ScalarFunction):
    """Linearly interpolated samples; evaluation outside the range raises.

    Carries no derivative information, so divided differences at coincident
    arguments are an error rather than a silent extrapolation.
    """

    abscissae: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.abscissae, dtype=float).copy()
        ys = np.asarray(self.values, dtype=float).copy()
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise ValueError("need matching 1-D abscissae/values with >= 2 samples")
        if not np.all(np.diff(xs) > 0):
            raise ValueError("abscissae must be strictly increasing")
        xs.flags.writeable = False
        ys.flags.writeable = False
        object.__setattr__(self, "abscissae", xs)
        object.__setattr__(self, "values", ys)

    @property
    def kind(self) -> str:
        return "grid"

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.abscissae[0], self.abscissae[-1]
        if np.any(x < lo) or np.any(x > hi):
            raise FunctionDomainError(
                f"evaluation outside sampled range [{lo:g}, {hi:g}]"
            )
        return np.interp(x, self.abscissae, self.values)

    def derivative(self, order: int = 1) -> "ScalarFunction":
        raise FunctionDomainError("sampled grid carries no derivative data")


def hom_sum_pairs(x, y, m: int) -> np.ndarray:
    """Complete homogeneous sum ``sum_{p+q=m} x_i^p y_j^q`` as an (i, j) table.

    Equals the divided difference of ``t**(m+1)`` and is evaluated without
    subtractions, so it is stable arbitrarily close to the diagonal.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if m < 0:
        return np.zeros((x.size, y.size))
    xp = np.vander(x, m + 1, increasing=True)
    yp = np.vander(y, m + 1, increasing=True)
    return xp @ yp[:, ::-1].T


def _confluent_threshold(*arg_sets):
    points = np.concatenate([np.ravel(a) for a in arg_sets])
    diam = float(points.max() - points.min()) if points.size else 0.0
    return max(CONFLUENT_RTOL * diam, 1e-300)


def divided_difference_1(fn: ScalarFunction, lam, mu, threshold=None) -> np.ndarray:
    """Table ``fn[lam_i, mu_j]`` with the confluent limit ``fn'`` on the diagonal."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if isinstance(fn, Polynomial):
        return fn.dd1(lam, mu)
    delta = _confluent_threshold(lam, mu) if threshold is None else threshold
    diff = lam[:, None] - mu[None, :]
    close = np.abs(diff) < delta
    if np.any(close) and isinstance(fn, GridFunction):
        raise FunctionDomainError(
            "coincident spectral points need derivative data the grid lacks"
        )
    safe = np.where(close, 1.0, diff)
    quotient = (fn(lam)[:, None] - fn(mu)[None, :]) / safe
    if np.any(close):
        dfn = fn.derivative(1)
        mid = 0.5 * (lam[:, None] + mu[None, :])
        quotient = np.where(close, dfn(mid), quotient)
    return quotient


def divided_difference_2(fn: ScalarFunction, lam, nu, mu, threshold=None) -> np.ndarray:
    """Tensor ``fn[lam_i, nu_k, mu_j]`` with confluent limits on all collisions."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if isinstance(fn, Polynomial):
        return fn.dd2(lam, nu, mu)
    if isinstance(fn, GridFunction):
        raise FunctionDomainError(
            "second divided differences need derivative data the grid lacks"
        )
    delta = _confluent_threshold(lam, nu, mu) if threshold is None else threshold
    d1_ln = divided_difference_1(fn, lam, nu, threshold=delta)   # (L, K)
    d1_nm = divided_difference_1(fn, nu, mu, threshold=delta)    # (K, M)
    diff = lam[:, None, None] - mu[None, None, :]                # (L, 1, M)
    close = np.abs(diff) < delta
    safe = np.where(close, 1.0, diff)
    out = (d1_ln[:, :, None] - d1_nm[None, :, :]) / safe
    if np.any(close):
        out = np.where(close, _dd2_confluent_outer(fn, lam, nu, mu, delta), out)
    return out


def _dd2_confluent_outer(fn, lam, nu, mu, delta):
    # fn[x, nu, x] for x = (lam + mu)/2: derivative of the first divided
    # difference in its end argument, with a second confluent switch at nu = x.
    x = 0.5 * (lam[:, None, None] + mu[None, None, :])           # (L, 1, M)
    v = nu[None, :, None]                                        # (1, K, 1)
    gap = x - v
    inner_close = np.abs(gap) < delta
    safe = np.where(inner_close, 1.0, gap)
    d1 = fn.derivative(1)
    generic = (d1(x) * gap - (fn(x) - fn(v))) / (safe * safe)
    if np.any(inner_close):
        d2 = fn.derivative(2)
        generic = np.where(inner_close, 0.5 * d2(0.5 * (x + v)), generic)
    return np.broadcast_to(generic, (lam.size, nu.size, mu.size)).copy()
