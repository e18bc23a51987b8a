"""Dense Hermitian linear algebra.

Everything downstream runs through the objects here: validated Hermitian
matrices, their eigendecompositions with deterministic ordering and phase
fixing, functional calculus ``phi(A) = U diag(phi(lambda)) U*``, Schatten
norms, and the discrete two-variable spectral measure attached to a
perturbation, ``m_ij = |<u_i, V u_j>|**2``.

All types are immutable after construction and all operations are pure, so
they are safe to call from concurrent workers.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, NonHermitianError
from .functions import GridFunction, ScalarFunction

__all__ = [
    "HermitianOperator",
    "SpectralDecomposition",
    "PairMeasure",
    "eig",
    "apply_function",
    "schatten_norm",
    "pair_measure",
]

HERMITICITY_RTOL = 1e-12


def _as_square_complex(entries) -> np.ndarray:
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class HermitianOperator:
    """A dense self-adjoint matrix; construction validates the invariants."""

    entries: np.ndarray

    def __post_init__(self):
        m = _as_square_complex(self.entries).copy()
        if m.shape[0] < 1:
            raise DimensionMismatchError("dimension must be positive")
        if not np.all(np.isfinite(m.view(float))):
            raise ValueError("matrix entries must be finite")
        scale = float(np.max(np.abs(m)))
        violation = float(np.max(np.abs(m - m.conj().T)))
        threshold = HERMITICITY_RTOL * max(scale, 1.0)
        if violation > threshold:
            raise NonHermitianError(violation, threshold)
        # remove the sub-tolerance asymmetry so A is exactly self-adjoint
        m = 0.5 * (m + m.conj().T)
        m.flags.writeable = False
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def axpy(self, scale: float, other: "HermitianOperator") -> "HermitianOperator":
        """The operator ``self + scale * other`` (used for the path A + tau V)."""
        if other.n != self.n:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.n} vs {other.n}"
            )
        return HermitianOperator(self.entries + scale * other.entries)

    def __add__(self, other):
        return self.axpy(1.0, other)

    @staticmethod
    def from_diagonal(values) -> "HermitianOperator":
        return HermitianOperator(np.diag(np.asarray(values, dtype=complex)))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues with a unitary matrix of column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=float).copy()
        vecs = np.asarray(self.eigenvectors, dtype=complex).copy()
        vals.flags.writeable = False
        vecs.flags.writeable = False
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def transform_to_eigenbasis(self, matrix: np.ndarray) -> np.ndarray:
        """``U* M U``."""
        U = self.eigenvectors
        return U.conj().T @ np.asarray(matrix, dtype=complex) @ U

    def transform_from_eigenbasis(self, matrix: np.ndarray) -> np.ndarray:
        """``U M U*``."""
        U = self.eigenvectors
        return U @ np.asarray(matrix, dtype=complex) @ U.conj().T


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    """Make the first significant component of each column real positive."""
    out = vecs.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        mags = np.abs(col)
        idx = int(np.argmax(mags > 1e-8 * (mags.max() + 1e-300)))
        pivot = col[idx]
        if pivot != 0:
            out[:, k] = col * (pivot.conjugate() / abs(pivot))
    return out


def eig(A: HermitianOperator) -> SpectralDecomposition:
    """Eigendecomposition with ascending eigenvalues and fixed phases."""
    vals, vecs = np.linalg.eigh(A.entries)
    return SpectralDecomposition(vals, _fix_phases(vecs))


def apply_function(phi, A: HermitianOperator) -> HermitianOperator:
    """Functional calculus ``phi(A)`` through the spectral decomposition.

    ``phi`` may be a :class:`~specshift.functions.ScalarFunction` or any
    callable defined on the spectrum.  A :class:`GridFunction` whose sampled
    range does not cover the spectrum raises rather than extrapolates.
    The result commutes with ``A`` by construction.
    """
    dec = eig(A)
    fvals = np.asarray(phi(dec.eigenvalues), dtype=float)
    return HermitianOperator(
        dec.transform_from_eigenbasis(np.diag(fvals.astype(complex)))
    )


def apply_function_given(phi, dec: SpectralDecomposition) -> np.ndarray:
    """Like :func:`apply_function` but reusing a decomposition; returns an array."""
    fvals = np.asarray(phi(dec.eigenvalues), dtype=complex)
    return (dec.eigenvectors * fvals) @ dec.eigenvectors.conj().T


def schatten_norm(X, p) -> float:
    """Schatten norm of a matrix: p in {1, 2, 3} or "op" for the largest singular value."""
    m = np.asarray(X.entries if isinstance(X, HermitianOperator) else X, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatchError("expected a matrix")
    sv = np.linalg.svd(m, compute_uv=False)
    if p == "op":
        return float(sv[0]) if sv.size else 0.0
    if p in (1, 2, 3):
        return float(np.sum(sv ** p) ** (1.0 / p))
    raise ValueError(f"unsupported Schatten index {p!r}; use 1, 2, 3 or 'op'")


@dataclass(frozen=True)
class PairMeasure:
    """Discrete measure on spectrum x spectrum with weights ``|<u_i, V u_j>|**2``.

    The weights are non-negative, symmetric, and sum to ``||V||_2**2``; this
    is the finite-dimensional form of Tr[V E(d lambda) V E(d mu)].
    """

    eigenvalues: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=float).copy()
        w = np.asarray(self.weights, dtype=float).copy()
        vals.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "weights", w)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())


def pair_measure(dec: SpectralDecomposition, V: HermitianOperator) -> PairMeasure:
    """Spectral pair measure of the perturbation ``V`` in the eigenbasis of ``dec``."""
    if V.n != dec.n:
        raise DimensionMismatchError(f"dimension mismatch: {dec.n} vs {V.n}")
    Vt = dec.transform_to_eigenbasis(V.entries)
    return PairMeasure(dec.eigenvalues, np.abs(Vt) ** 2)
