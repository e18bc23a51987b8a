"""Deterministic quadrature rules on [0, 1].

Provides Gauss-Legendre nodes/weights mapped to the unit interval, the
reduction of the iterated coupling-constant integral over the triangle
``{0 <= tau <= s <= 1}`` to a single weighted integral, and a
convergence-by-doubling estimator for integrands of unknown smoothness.

The triangle reduction is elementary: when the integrand depends on the
inner variable only,

    int_0^1 ds int_0^s F(tau) dtau = int_0^1 (1 - tau) F(tau) dtau,

and ``simplex_integral`` evaluates the right-hand side.  The equivalence is
re-verified against a 2-D tensor-product rule in the test suite before
anything downstream relies on it.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

__all__ = [
    "QuadratureRule",
    "DoublingResult",
    "gauss_legendre",
    "simplex_integral",
    "converge_by_doubling",
]


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes/weights for integration over (0, 1); weights sum to one."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, f):
        """Apply the rule to a callable or to an array of node values."""
        values = f(self.nodes) if callable(f) else np.asarray(f)
        return float(np.dot(self.weights, values))


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> QuadratureRule:
    """Gauss-Legendre rule with ``order`` nodes mapped to (0, 1).

    Exact for polynomials up to degree ``2 * order - 1``.  Rules are cached;
    nodes and weights are read-only.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    x, w = roots_legendre(order)
    nodes = 0.5 * (x + 1.0)
    weights = 0.5 * w
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return QuadratureRule(nodes=nodes, weights=weights, order=order)


def simplex_integral(F, rule: QuadratureRule) -> float:
    """Integrate ``F(tau)`` over the triangle 0 <= tau <= s <= 1.

    ``F`` may be a callable evaluated at the rule's nodes or a precomputed
    array of node values; the (1 - tau) weight of the reduced integral is
    folded in here rather than baked into the rule.
    """
    values = F(rule.nodes) if callable(F) else np.asarray(F)
    return float(np.dot(rule.weights * (1.0 - rule.nodes), values))


@dataclass(frozen=True)
class DoublingResult:
    value: float
    achieved_tol: float
    orders_used: tuple
    converged: bool


def converge_by_doubling(integrand, base_order: int, tol: float,
                         max_doublings: int = 3) -> DoublingResult:
    """Integrate ``integrand`` over [0, 1], doubling the order until stable.

    Returns the finest estimate together with the last inter-order
    disagreement.  Non-convergence after ``max_doublings`` doublings is
    reported through ``converged=False`` rather than an exception; callers
    decide how severe that is.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    order = int(base_order)
    orders = [order]
    previous = gauss_legendre(order).integrate(integrand)
    achieved = np.inf
    for _ in range(max_doublings):
        order *= 2
        orders.append(order)
        current = gauss_legendre(order).integrate(integrand)
        achieved = abs(current - previous)
        previous = current
        if achieved <= tol:
            return DoublingResult(previous, achieved, tuple(orders), True)
    return DoublingResult(previous, achieved, tuple(orders), False)
