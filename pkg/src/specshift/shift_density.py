"""Construction of the third-order spectral shift density.

For self-adjoint ``A`` and ``V`` the third-order Taylor remainder trace

    Tr[phi(A+V) - phi(A) - D1 phi(A)(V) - 1/2 D2 phi(A)(V, V)]

equals ``int phi'''(x) eta(x) dx`` for a real density ``eta`` supported on
``[a, b] = [min spec(A) - ||V||, max spec(A) + ||V||]`` with
``int eta = Tr(V**3)/6`` and ``||eta||_L1 <= (b - a) ||V||_2**2``.

The density is built from the double-operator-integral representation.  In
finite dimensions the two-variable spectral measure of ``A_tau = A + tau V``
is the discrete pair measure ``m_ij(tau) = |<u_i(tau), V u_j(tau)>|**2``, and

    eta(x) = int_0^1 (1 - tau) [S_tau(x) - S_0(x)] dtau,
    S_tau(x) = sum_ij m_ij(tau) K(x; lam_i(tau), lam_j(tau)),

where ``K`` is the piecewise-linear tent kernel obtained by pushing the
divided difference of a double antiderivative through the test function
(see :func:`tent_kernel`).  The (1 - tau) weight is the exact reduction of
the iterated coupling-constant integral over the triangle.

Numerically the construction is split by smoothness in ``tau``:

* Integrals of ``eta`` against polynomials reduce to pair sums of divided
  differences of polynomials, which are themselves polynomials in ``tau``;
  Gauss-Legendre in ``tau`` is then *exact*, which is what makes the moment
  and trace-formula identities hold to rounding error.
* Pointwise values involve the diagonal kernel terms
  ``m_ii(tau) 1(x < lam_i(tau))``, which jump as an eigenvalue path crosses
  the evaluation point, so plain quadrature in ``tau`` cannot converge fast.
  The diagonal contribution is therefore integrated exactly against a dense
  piecewise-linear model of each eigenvalue path (the Gauss-Legendre estimate
  of the same term is subtracted out).  For linear paths with constant
  weights -- every commuting case -- this correction is exact.

Values are hard zero outside ``[a, b]``; inside, the represented density is
piecewise quadratic between the recorded spectral breakpoints, and the
integral helpers (`moment`, `l1_norm`, `integrate`) exploit that structure
instead of the export grid, so reported integrals do not depend on the grid
resolution chosen for plotting.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .derivatives import remainder_trace
from .exceptions import DimensionMismatchError, QuadratureWarning
from .functions import Polynomial, divided_difference_1, hom_sum_pairs
from .quadrature import converge_by_doubling, gauss_legendre
from .spectral import (
    HermitianOperator,
    SpectralDecomposition,
    eig,
    pair_measure,
    schatten_norm,
)

__all__ = [
    "SupportInterval",
    "DoiKernel",
    "EtaDensity",
    "TraceFormulaCheck",
    "support_bounds",
    "tent_kernel",
    "eta_density",
    "eta_moment",
    "trace_formula_residual",
    "doi_trace",
    "simplex_doi_difference",
]


@dataclass(frozen=True)
class SupportInterval:
    """The interval guaranteed to contain the spectra of every ``A + tau V``."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a <= self.b:
            raise ValueError(f"empty interval [{self.a}, {self.b}]")

    @property
    def width(self) -> float:
        return self.b - self.a


def support_bounds(A: HermitianOperator, V: HermitianOperator) -> SupportInterval:
    """``[min spec(A) - ||V||_op, max spec(A) + ||V||_op]``."""
    if V.n != A.n:
        raise DimensionMismatchError(f"dimension mismatch: {A.n} vs {V.n}")
    lam = np.linalg.eigvalsh(A.entries)
    vop = schatten_norm(V, "op")
    return SupportInterval(float(lam[0]) - vop, float(lam[-1]) + vop)


def tent_kernel(x, lam, mu):
    """The kernel ``K(x; lam, mu)`` with values in [0, 1].

    Writing ``l = min(lam, mu)``, ``u = max(lam, mu)``:
    ``K = 1`` for ``x <= l``, ``(u - x)/(u - l)`` for ``l < x < u`` and ``0``
    for ``x >= u``; the coincident case degenerates to the open indicator
    ``1(x < lam)``.  This is exactly what multiplies a test function ``f``
    when the divided difference ``(h(lam) - h(mu))/(lam - mu)`` of a double
    antiderivative ``h`` (``h'' = f``) is unfolded into an integral over
    ``x``; the identity is re-verified numerically in the test suite.
    Vectorized over broadcastable arguments.
    """
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    l = np.minimum(lam, mu)
    u = np.maximum(lam, mu)
    width = u - l
    degenerate = width == 0.0
    safe = np.where(degenerate, 1.0, width)
    ramp = np.clip((u - x) / safe, 0.0, 1.0)
    step = (x < l).astype(float)
    out = np.where(degenerate, step, np.where(x <= l, 1.0, ramp))
    return out if out.shape else float(out)


# ---------------------------------------------------------------------------
# double operator integrals


@dataclass(frozen=True)
class DoiKernel:
    """Divided-difference kernel ``(h(lam) - h(mu)) / (lam - mu)``.

    ``dd(lams, mus)`` returns the full table with the confluent limit
    ``h'(lam)`` on coincidences.  Use :meth:`from_polynomial` for polynomial
    ``h`` (cancellation-free evaluation) and :meth:`from_indicator` for the
    double antiderivative of an interval indicator, evaluated through its
    closed-form overlap with the tent kernel.
    """

    h: object
    _dd: object

    def dd(self, lams, mus) -> np.ndarray:
        return self._dd(np.atleast_1d(np.asarray(lams, dtype=float)),
                        np.atleast_1d(np.asarray(mus, dtype=float)))

    @classmethod
    def from_polynomial(cls, coefficients) -> "DoiKernel":
        poly = Polynomial(coefficients)
        return cls(h=poly, _dd=lambda lams, mus: poly.dd1(lams, mus))

    @classmethod
    def from_callable(cls, h, h_prime) -> "DoiKernel":
        class _Wrapped:
            def __call__(self, x):
                return h(x)

            def derivative(self, order=1):
                if order != 1:
                    raise ValueError("only the first derivative is available")
                return h_prime

        wrapped = _Wrapped()
        return cls(h=h, _dd=lambda lams, mus: divided_difference_1(wrapped, lams, mus))

    @classmethod
    def from_indicator(cls, c: float, d: float, origin: float) -> "DoiKernel":
        """Kernel of ``h(x) = int_origin^x (x - t) 1_[c,d](t) dt``.

        The divided difference equals the overlap integral
        ``int 1_[c,d](t) K(t; lam, mu) dt``, evaluated in closed form; this
        stays stable arbitrarily close to the diagonal.
        """
        if not c <= d:
            raise ValueError("need c <= d")

        def h(x):
            x = np.asarray(x, dtype=float)
            up = np.clip(x - c, 0.0, None) ** 2 - np.clip(x - d, 0.0, None) ** 2
            lo = np.clip(origin - c, 0.0, None) ** 2 - np.clip(origin - d, 0.0, None) ** 2
            slope = np.clip(origin - c, 0.0, d - c)
            return 0.5 * (up - lo) - slope * (x - origin)

        def dd(lams, mus):
            l = np.minimum(lams[:, None], mus[None, :])
            u = np.maximum(lams[:, None], mus[None, :])
            # full-weight region below l, tapered overlap on (l, u)
            full = np.clip(np.minimum(l, d) - np.minimum(l, c), 0.0, None)
            full -= np.clip(np.minimum(origin, d) - np.minimum(origin, c), 0.0, None)
            width = u - l
            degenerate = width == 0.0
            safe = np.where(degenerate, 1.0, width)
            a_seg = np.maximum(l, c)
            b_seg = np.minimum(u, d)
            seg = np.clip(b_seg - a_seg, 0.0, None)
            # int_(a_seg)^(b_seg) (u - t)/(u - l) dt
            taper = seg * (u - 0.5 * (a_seg + b_seg)) / safe
            return full + np.where(degenerate, 0.0, taper)

        return cls(h=h, _dd=dd)


def doi_trace(dec_left: SpectralDecomposition, dec_right: SpectralDecomposition,
              V: HermitianOperator, kernel: DoiKernel) -> float:
    """``sum_ij k(lam_i, mu_j) |<u_i, V w_j>|**2``.

    The discrete form of the double operator integral
    ``Tr[V E_left(d lam) V E_right(d mu)]`` against the kernel; real for
    Hermitian ``V`` and real symmetric kernels.
    """
    if dec_left.n != V.n or dec_right.n != V.n:
        raise DimensionMismatchError("decompositions and V must share a dimension")
    cross = dec_left.eigenvectors.conj().T @ V.entries @ dec_right.eigenvectors
    weights = np.abs(cross) ** 2
    table = kernel.dd(dec_left.eigenvalues, dec_right.eigenvalues)
    return float(np.sum(weights * table))


def simplex_doi_difference(A: HermitianOperator, V: HermitianOperator,
                           kernel: DoiKernel, base_order: int = 64,
                           tol: float = 1e-9, max_doublings: int = 6):
    """``int_0^1 ds int_0^s dtau [doi(tau) - doi(0)]`` by order doubling.

    ``doi(tau)`` is :func:`doi_trace` of ``A + tau V`` against itself.  The
    integrand can have kinks in ``tau`` where eigenvalue paths cross the
    kernel's break points, so the order is doubled until the estimate is
    stable to ``tol`` (relative to 1 + |value|).
    """
    base = doi_trace(eig(A), eig(A), V, kernel)

    def integrand(taus):
        out = np.empty_like(taus)
        for i, tau in enumerate(taus):
            dec = eig(A.axpy(float(tau), V))
            out[i] = doi_trace(dec, dec, V, kernel) - base
        return (1.0 - taus) * out

    result = converge_by_doubling(integrand, base_order, tol,
                                  max_doublings=max_doublings)
    if not result.converged:
        warnings.warn(
            f"coupling-constant integral not converged: last delta "
            f"{result.achieved_tol:.3e}", QuadratureWarning,
        )
    return result


# ---------------------------------------------------------------------------
# the density itself


def _accumulate_tents(xs, lams, masses, weight, dA, dB, width_tol):
    """Add ``weight * sum_ij m_ij K(x; lam_i, lam_j)`` to piecewise-linear
    difference accumulators over the sorted points ``xs``."""
    li = np.minimum(lams[:, None], lams[None, :]).ravel()
    ui = np.maximum(lams[:, None], lams[None, :]).ravel()
    m = (weight * masses).ravel()
    width = ui - li
    steps = width <= width_tol
    # coincident pair: open step m * 1(x < lam)
    if np.any(steps):
        lam_s = li[steps]
        ms = m[steps]
        dA[0] += ms.sum()
        np.subtract.at(dA, np.searchsorted(xs, lam_s, side="left"), ms)
    tents = ~steps
    if np.any(tents):
        l, u, mt, w = li[tents], ui[tents], m[tents], width[tents]
        il = np.searchsorted(xs, l, side="right")
        iu = np.searchsorted(xs, u, side="left")
        dA[0] += mt.sum()
        np.subtract.at(dA, il, mt)
        alpha = mt * u / w
        beta = -mt / w
        np.add.at(dA, il, alpha)
        np.subtract.at(dA, iu, alpha)
        np.add.at(dB, il, beta)
        np.subtract.at(dB, iu, beta)


def _accumulate_diag_steps(xs, lams, masses_diag, weight, dA):
    """Add ``weight * sum_i m_ii 1(x < lam_i)`` to the accumulators."""
    m = weight * masses_diag
    dA[0] += m.sum()
    np.subtract.at(dA, np.searchsorted(xs, lams, side="left"), m)


def _accumulate_path(xs, taus, lam_path, wm_path, scale, dA, dB, dC):
    """Add the exact integral of one diagonal eigenvalue path.

    Contributes ``scale * int c(tau) 1(lam(tau) > x) dtau`` where ``lam`` and
    ``c`` are piecewise linear through the path samples.  On each
    subinterval the crossing point is linear in ``x``, so the contribution
    is piecewise quadratic; it is accumulated exactly.
    """
    la, lb = lam_path[:-1], lam_path[1:]
    ca, cb = wm_path[:-1], wm_path[1:]
    dtau = np.diff(taus)
    full = scale * 0.5 * dtau * (ca + cb)

    flat = la == lb
    if np.any(flat):
        idx = np.searchsorted(xs, la[flat], side="left")
        dA[0] += full[flat].sum()
        np.subtract.at(dA, idx, full[flat])

    rising = lb > la
    if np.any(rising):
        l0, l1 = la[rising], lb[rising]
        c0, c1 = ca[rising], cb[rising]
        dt = dtau[rising]
        I = full[rising]
        d = l1 - l0
        p1 = scale * dt * c0 / d                 # coefficient of (x - l0)
        p2 = scale * dt * (c1 - c0) / (2 * d * d)  # coefficient of (x - l0)^2
        i0 = np.searchsorted(xs, l0, side="left")
        i1 = np.searchsorted(xs, l1, side="left")
        dA[0] += I.sum()
        np.subtract.at(dA, i0, I)
        # quadratic I - p1 (x - l0) - p2 (x - l0)^2 on [l0, l1)
        A = I + p1 * l0 - p2 * l0 * l0
        B = -p1 + 2 * p2 * l0
        C = -p2
        for arr, coef in ((dA, A), (dB, B), (dC, C)):
            np.add.at(arr, i0, coef)
            np.subtract.at(arr, i1, coef)

    falling = lb < la
    if np.any(falling):
        l0, l1 = la[falling], lb[falling]
        c0, c1 = ca[falling], cb[falling]
        dt = dtau[falling]
        I = full[falling]
        e = l0 - l1
        q1 = scale * dt * c0 / e                  # coefficient of (l0 - x)
        q2 = scale * dt * (c1 - c0) / (2 * e * e)  # coefficient of (l0 - x)^2
        i1 = np.searchsorted(xs, l1, side="left")
        i0 = np.searchsorted(xs, l0, side="left")
        dA[0] += I.sum()
        np.subtract.at(dA, i1, I)
        # quadratic q1 (l0 - x) + q2 (l0 - x)^2 on [l1, l0)
        A = q1 * l0 + q2 * l0 * l0
        B = -q1 - 2 * q2 * l0
        C = q2
        for arr, coef in ((dA, A), (dB, B), (dC, C)):
            np.add.at(arr, i1, coef)
            np.subtract.at(arr, i0, coef)


@dataclass(frozen=True)
class EtaDensity:
    """Grid representation of the shift density plus its analytic structure.

    ``grid``/``values`` are the export view.  Integral quantities are
    computed from the recorded spectral data (Gauss-Legendre nodes for the
    smooth part, eigenvalue-path samples for the diagonal part), so they are
    independent of the export grid.
    """

    support: SupportInterval
    grid: np.ndarray
    values: np.ndarray
    metadata: dict

    node_taus: np.ndarray
    node_weights: np.ndarray
    node_lams: np.ndarray     # (Q, n)
    node_masses: np.ndarray   # (Q, n, n)
    base_lam: np.ndarray
    base_mass: np.ndarray
    path_taus: np.ndarray     # (P,)
    path_lams: np.ndarray     # (P, n)
    path_wm: np.ndarray       # (P, n): (1 - tau) * m_ii(tau)
    diag_scale: np.ndarray    # (n,)

    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for name in ("grid", "values", "node_taus", "node_weights", "node_lams",
                     "node_masses", "base_lam", "base_mass", "path_taus",
                     "path_lams", "path_wm", "diag_scale"):
            arr = np.asarray(getattr(self, name))
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    # -- pointwise -----------------------------------------------------

    def evaluate(self, x):
        """Density values at arbitrary points; identically zero off support."""
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.zeros_like(x)
        inside = (x >= self.support.a) & (x <= self.support.b)
        if np.any(inside):
            xs = x[inside]
            order = np.argsort(xs, kind="stable")
            vals = np.empty_like(xs)
            vals[order] = self._eval_sorted(xs[order])
            out[inside] = vals
        return float(out[0]) if scalar else out

    def _eval_sorted(self, xs):
        G = xs.size
        dA = np.zeros(G + 1)
        dB = np.zeros(G + 1)
        dC = np.zeros(G + 1)
        diam = max(self.support.width, 1e-300)
        wtol = 1e-15 * diam
        base_weight = float(self.node_weights.sum())
        for q in range(self.node_taus.size):
            lams = self.node_lams[q]
            masses = self.node_masses[q]
            w = self.node_weights[q]
            _accumulate_tents(xs, lams, masses, w, dA, dB, wtol)
            # the Gauss-Legendre estimate of the diagonal part is replaced by
            # the exact path integral below
            _accumulate_diag_steps(xs, lams, np.diag(masses), -w, dA)
        _accumulate_tents(xs, self.base_lam, self.base_mass, -base_weight,
                          dA, dB, wtol)
        for i in range(self.base_lam.size):
            _accumulate_path(xs, self.path_taus, self.path_lams[:, i],
                             self.path_wm[:, i], self.diag_scale[i], dA, dB, dC)
        A = np.cumsum(dA[:G])
        B = np.cumsum(dB[:G])
        C = np.cumsum(dC[:G])
        return A + xs * (B + xs * C)

    # -- integrals (grid-independent) -----------------------------------

    def moment(self, k: int) -> float:
        """``int x**k eta(x) dx`` by exact tent-moment integration.

        The tent moment of a pair ``(lam, mu)`` is, up to an additive
        constant that cancels between ``tau`` and the baseline, the divided
        difference of ``x**(k+2) / ((k+1)(k+2))``; the resulting
        ``tau``-integrand is a polynomial of degree ``k + 1``, so the
        Gauss-Legendre sum is exact.
        """
        if k < 0:
            raise ValueError("moment index must be non-negative")
        key = ("moment", k)
        if key not in self._cache:
            scale = 1.0 / ((k + 1) * (k + 2))

            def phi(lams, masses):
                return float(np.sum(masses * hom_sum_pairs(lams, lams, k + 1)))

            base = phi(self.base_lam, self.base_mass)
            total = 0.0
            for q in range(self.node_taus.size):
                total += self.node_weights[q] * (
                    phi(self.node_lams[q], self.node_masses[q]) - base
                )
            self._cache[key] = scale * total
        return self._cache[key]

    def _breakpoints(self, resolution: int, extra=()):
        pts = [np.linspace(self.support.a, self.support.b, resolution),
               self.node_lams.ravel(), self.base_lam, self.path_lams.ravel()]
        pts.extend(np.atleast_1d(np.asarray(e, dtype=float)) for e in extra)
        xs = np.unique(np.concatenate(pts))
        return xs[(xs >= self.support.a) & (xs <= self.support.b)]

    def _piecewise(self, resolution: int, extra=()):
        """Breakpoints plus interior samples at the 1/4, 1/2, 3/4 points.

        The density may jump *at* breakpoints (the diagonal kernel terms are
        open steps), so every interval is sampled strictly inside where the
        function is a single quadratic.
        """
        xs = self._breakpoints(resolution, extra)
        h = np.diff(xs)
        quarters = [xs[:-1] + f * h for f in (0.25, 0.5, 0.75)]
        vals = self.evaluate(np.concatenate(quarters))
        m = h.size
        return xs, np.stack([vals[:m], vals[m:2 * m], vals[2 * m:]])

    def l1_norm(self, resolution: int = 4097) -> float:
        """``int |eta|`` from the piecewise-quadratic structure.

        Between recorded breakpoints the density is exactly quadratic, so an
        open three-point rule per interval is exact; intervals with a sign
        change are split at the quadratic's roots.
        """
        key = ("l1", resolution)
        if key not in self._cache:
            xs, samples = self._piecewise(resolution)
            self._cache[key] = _integrate_piecewise_quadratic(
                xs, samples, absolute=True)
        return self._cache[key]

    def integrate(self, c: float, d: float) -> float:
        """``int_c^d eta(x) dx`` exactly on the represented density."""
        if not c <= d:
            raise ValueError("need c <= d")
        c = max(c, self.support.a)
        d = min(d, self.support.b)
        if c >= d:
            return 0.0
        xs, samples = self._piecewise(257, extra=(c, d))
        keep = np.flatnonzero((xs >= c) & (xs <= d))
        return _integrate_piecewise_quadratic(
            xs[keep], samples[:, keep[:-1]], absolute=False)

    def integrate_against_polynomial(self, poly: Polynomial) -> float:
        """``int p(x) eta(x) dx`` through exact moments."""
        return float(sum(c * self.moment(k)
                         for k, c in enumerate(poly.coefficients) if c != 0.0))

    def integrate_against_smooth(self, f, segment_order: int = 32) -> float:
        """``int f(x) eta(x) dx`` for smooth ``f`` by per-tent quadrature.

        Exactness in ``tau`` is lost, but for smooth ``f`` the
        ``tau``-integrand is smooth away from exact crossings and the
        Gauss-Legendre node sum converges at the usual spectral rate.
        """
        rule = gauss_legendre(segment_order)
        a = self.support.a

        def tent_integrals(lams, masses):
            # sum_ij m_ij int f(t) K(t; lam_i, lam_j) dt, with the plateau
            # handled through g(lam) = int_a^lam f
            n = lams.size
            nodes = a + np.outer(lams - a, rule.nodes)       # (n, S)
            g = (lams - a) * (rule.weights @ np.asarray(f(nodes)).T)
            l = np.minimum(lams[:, None], lams[None, :])
            u = np.maximum(lams[:, None], lams[None, :])
            width = u - l
            deg = width <= 0.0
            safe = np.where(deg, 1.0, width)
            t = l[..., None] + width[..., None] * rule.nodes  # (n, n, S)
            ft = np.asarray(f(t))
            taper = (u[..., None] - t) / safe[..., None]
            ramp = width * np.einsum("s,ijs->ij", rule.weights, ft * taper)
            # plateau value int_a^l f = g at the smaller eigenvalue
            low_idx = np.where(lams[:, None] <= lams[None, :],
                               np.arange(n)[:, None], np.arange(n)[None, :])
            table = g[low_idx] + np.where(deg, 0.0, ramp)
            return float(np.sum(masses * table))

        base = tent_integrals(self.base_lam, self.base_mass)
        total = 0.0
        for q in range(self.node_taus.size):
            total += self.node_weights[q] * (
                tent_integrals(self.node_lams[q], self.node_masses[q]) - base
            )
        return total

    # -- reporting -------------------------------------------------------

    def l1_bound(self) -> float:
        """The guaranteed bound ``(b - a) ||V||_2**2``."""
        return self.support.width * self.metadata["v_hs_norm"] ** 2

    def report(self) -> dict:
        md = self.metadata
        l1 = self.l1_norm()
        cubic = md["v_hs_norm"] ** 3 / 6.0
        return {
            "support": {"a": self.support.a, "b": self.support.b},
            "moment0": self.moment(0),
            "trV3_over_6": md["tr_v3"] / 6.0,
            "l1_norm": l1,
            "l1_bound": self.l1_bound(),
            "cubic_reference": cubic,
            "within_cubic_reference": bool(l1 <= cubic * (1 + 1e-9)),
            "quad_order": md["quad_order"],
            "grid_size": int(self.grid.size),
            "path_samples": md["path_samples"],
            "residuals": md.get("residuals", []),
        }


def _integrate_piecewise_quadratic(xs, samples, absolute=False) -> float:
    """Exact integral of a piecewise-quadratic function from interior samples.

    ``samples`` holds values at the 1/4, 1/2 and 3/4 points of every
    interval ``[xs[k], xs[k+1]]``.  The open rule
    ``int_0^1 q = (2 q(1/4) - q(1/2) + 2 q(3/4)) / 3`` is exact for
    quadratics; with ``absolute`` the quadratic is reconstructed and the
    integral split at its roots.
    """
    h = np.diff(xs)
    f1, f2, f3 = samples
    open3 = h * (2.0 * f1 - f2 + 2.0 * f3) / 3.0
    if not absolute:
        return float(open3.sum())
    same_sign = (f1 >= 0) & (f2 >= 0) & (f3 >= 0)
    same_sign |= (f1 <= 0) & (f2 <= 0) & (f3 <= 0)
    total = float(np.abs(open3[same_sign]).sum())
    # reconstruct q(t) = a t^2 + b t + c on the unit interval
    a_all = 8.0 * (f1 - 2.0 * f2 + f3)
    b_all = 2.0 * (f3 - f1) - a_all
    c_all = f2 - 0.25 * a_all - 0.5 * b_all
    for k in np.flatnonzero(~same_sign):
        a, b, c = a_all[k], b_all[k], c_all[k]
        roots = []
        if a != 0.0:
            disc = b * b - 4 * a * c
            if disc >= 0.0:
                s = np.sqrt(disc)
                q = -0.5 * (b + np.copysign(s, b)) if b != 0.0 else 0.5 * s
                cands = {q / a} if q == 0.0 else {q / a, c / q}
                roots = [t for t in cands if 0.0 < t < 1.0]
        elif b != 0.0:
            t = -c / b
            if 0.0 < t < 1.0:
                roots = [t]
        pieces = np.sort(np.array([0.0, *roots, 1.0]))

        def antider(t):
            return a * t ** 3 / 3 + b * t ** 2 / 2 + c * t

        seg = 0.0
        for lo, hi in zip(pieces[:-1], pieces[1:]):
            seg += abs(antider(hi) - antider(lo))
        total += h[k] * seg
    return total


def eta_density(A: HermitianOperator, V: HermitianOperator,
                grid_size: int = 1001, quad_order: int = 64,
                path_samples=None, convergence_tol=None) -> EtaDensity:
    """Construct the third-order shift density of the pair ``(A, V)``.

    Parameters
    ----------
    grid_size : number of export grid points spanning the support.
    quad_order : Gauss-Legendre order of the coupling-constant integral.
    path_samples : sample count of the piecewise-linear eigenvalue-path model
        used for the diagonal part; defaults to ``16 * quad_order + 1``.
    convergence_tol : when given, the zeroth moment and the grid values are
        re-computed at twice the orders; both estimates are stored in the
        metadata and a :class:`QuadratureWarning` is emitted if they disagree
        by more than the tolerance.

    The result is deterministic for fixed inputs and orders.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    if quad_order < 2:
        raise ValueError("quad_order must be >= 2")
    if V.n != A.n:
        raise DimensionMismatchError(f"dimension mismatch: {A.n} vs {V.n}")
    if path_samples is None:
        path_samples = 16 * quad_order + 1
    if path_samples < 2:
        raise ValueError("path_samples must be >= 2")

    density = _build(A, V, grid_size, quad_order, path_samples)
    if convergence_tol is not None:
        finer = _build(A, V, grid_size, 2 * quad_order, 2 * path_samples)
        m_delta = abs(finer.moment(0) - density.moment(0))
        g_delta = float(np.max(np.abs(finer.values - density.values))) \
            if density.grid.size == finer.grid.size else float("nan")
        density.metadata["residuals"] = [
            {"quantity": "moment0", "coarse": density.moment(0),
             "fine": finer.moment(0), "delta": m_delta},
            {"quantity": "grid_sup", "delta": g_delta},
        ]
        scale = 1.0 + abs(finer.moment(0))
        if m_delta > convergence_tol * scale or g_delta > convergence_tol * 10:
            warnings.warn(
                f"shift density not converged at order {quad_order}: "
                f"moment0 delta {m_delta:.3e}, grid sup delta {g_delta:.3e}",
                QuadratureWarning,
            )
    return density


def _build(A, V, grid_size, quad_order, path_samples) -> EtaDensity:
    support = support_bounds(A, V)
    rule = gauss_legendre(quad_order)
    node_weights = rule.weights * (1.0 - rule.nodes)

    def spectral_data(tau):
        dec = eig(A.axpy(float(tau), V)) if tau else eig(A)
        pm = pair_measure(dec, V)
        return pm.eigenvalues, pm.weights

    base_lam, base_mass = spectral_data(0.0)
    n = base_lam.size
    node_lams = np.empty((quad_order, n))
    node_masses = np.empty((quad_order, n, n))
    for q, tau in enumerate(rule.nodes):
        node_lams[q], node_masses[q] = spectral_data(tau)

    path_taus = np.linspace(0.0, 1.0, path_samples)
    path_lams = np.empty((path_samples, n))
    path_wm = np.empty((path_samples, n))
    for p, tau in enumerate(path_taus):
        lam, mass = spectral_data(tau)
        path_lams[p] = lam
        path_wm[p] = (1.0 - tau) * np.diag(mass)

    # normalize the path estimate of int (1-tau) m_ii dtau to the node
    # estimate so the two diagonal treatments cancel exactly at the support
    # edges (and identically for constant paths)
    gl_totals = np.einsum("q,qii->i", node_weights, node_masses)
    fp_totals = np.trapezoid(path_wm, path_taus, axis=0)
    safe = np.where(fp_totals == 0.0, 1.0, fp_totals)
    diag_scale = np.where(fp_totals == 0.0, 0.0, gl_totals / safe)

    density = EtaDensity(
        support=support,
        grid=np.linspace(support.a, support.b, grid_size),
        values=np.zeros(grid_size),
        metadata={
            "v_hs_norm": schatten_norm(V, 2),
            "tr_v3": float(np.trace(V.entries @ V.entries @ V.entries).real),
            "quad_order": quad_order,
            "path_samples": path_samples,
        },
        node_taus=rule.nodes,
        node_weights=node_weights,
        node_lams=node_lams,
        node_masses=node_masses,
        base_lam=base_lam,
        base_mass=base_mass,
        path_taus=path_taus,
        path_lams=path_lams,
        path_wm=path_wm,
        diag_scale=diag_scale,
    )
    values = density.evaluate(density.grid)
    object.__setattr__(density, "values", values)
    density.values.flags.writeable = False
    return density


def eta_moment(density: EtaDensity, k: int) -> float:
    """``int x**k eta(x) dx``; see :meth:`EtaDensity.moment`."""
    return density.moment(k)


@dataclass(frozen=True)
class TraceFormulaCheck:
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs) / (1.0 + abs(self.lhs))


def trace_formula_residual(A: HermitianOperator, V: HermitianOperator,
                           phi, density: EtaDensity) -> TraceFormulaCheck:
    """Compare the remainder trace of ``phi`` with ``int phi''' eta``."""
    lhs = remainder_trace(phi, A, V, order=3)
    third = phi.derivative(3)
    if isinstance(third, Polynomial):
        rhs = density.integrate_against_polynomial(third)
    else:
        rhs = density.integrate_against_smooth(third)
    return TraceFormulaCheck(lhs=lhs, rhs=rhs)
