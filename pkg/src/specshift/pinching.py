"""The commutator map on Hilbert-Schmidt space and its orthogonal splitting.

For a self-adjoint ``B`` the map ``M_B(X) = BX - XB`` splits the matrix
space orthogonally (in the Frobenius inner product) into its kernel and the
range of ``M_B``.  In a fixed eigenbasis of ``B`` with distinct eigenvalues
the kernel part of ``X`` is simply the diagonal of ``X``; with degenerate
eigenvalues it is the block-diagonal compression onto the eigenspace blocks
("pinching").  Both parts of a self-adjoint ``X`` are self-adjoint, and the
masses satisfy the Pythagoras identity
``||X||_2**2 = ||X_1||_2**2 + ||X_2||_2**2``.

Because the range of ``M_B`` is closed in finite dimensions, the preimage
problem ``[B, Y] = X_2`` is solved exactly entrywise instead of through an
approximating sequence; the minimum-norm solution (zero block-diagonal) is
returned, and it is skew-adjoint whenever ``X_2`` is self-adjoint.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatchError, PreimageConsistencyError
from .spectral import HermitianOperator, SpectralDecomposition, eig

__all__ = [
    "PinchDecomposition",
    "BlockStructureWarning",
    "commutator",
    "eigenvalue_blocks",
    "pinch",
    "solve_commutator_preimage",
    "resolvent_pinch",
    "path_decomposition",
]

DEFAULT_BLOCK_RTOL = 1e-9


class BlockStructureWarning(UserWarning):
    """Consecutive path nodes disagree on the near-degenerate block structure."""


def _as_matrix(X, n=None):
    m = np.asarray(X.entries if isinstance(X, HermitianOperator) else X, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise DimensionMismatchError(f"dimension mismatch: {m.shape[0]} vs {n}")
    return m


def commutator(B, X) -> np.ndarray:
    """``BX - XB``; its trace vanishes identically."""
    Bm = _as_matrix(B)
    Xm = _as_matrix(X, Bm.shape[0])
    return Bm @ Xm - Xm @ Bm


def eigenvalue_blocks(values: np.ndarray, tol: float) -> tuple:
    """Partition sorted (or complex) values into maximal chains of gaps < tol.

    ``tol`` is an absolute gap threshold; chains are grown greedily along the
    given order, so the partition is a set of contiguous index ranges.
    """
    values = np.asarray(values)
    n = values.size
    blocks = []
    start = 0
    for i in range(1, n):
        if abs(values[i] - values[i - 1]) >= tol:
            blocks.append(tuple(range(start, i)))
            start = i
    blocks.append(tuple(range(start, n)))
    return tuple(blocks)


@dataclass(frozen=True)
class PinchDecomposition:
    """The splitting ``X = v1 + v2`` with ``v1`` in Ker(M_B), ``v2`` in Ran(M_B).

    ``blocks`` records the near-degenerate eigenvalue grouping the kernel
    projection was taken against, and ``tolerance`` the absolute gap used.
    """

    v1: np.ndarray
    v2: np.ndarray
    blocks: tuple
    tolerance: float

    def __post_init__(self):
        for name in ("v1", "v2"):
            m = np.asarray(getattr(self, name), dtype=complex).copy()
            m.flags.writeable = False
            object.__setattr__(self, name, m)

    @property
    def kernel_dimension(self) -> int:
        return sum(len(b) ** 2 for b in self.blocks)

    @property
    def v1_norm(self) -> float:
        return float(np.linalg.norm(self.v1))

    @property
    def v2_norm(self) -> float:
        return float(np.linalg.norm(self.v2))


def _block_mask(blocks, n):
    labels = np.empty(n, dtype=int)
    for b, idx in enumerate(blocks):
        labels[list(idx)] = b
    return labels[:, None] == labels[None, :]


def pinch(dec: SpectralDecomposition, X, tol: float = DEFAULT_BLOCK_RTOL
          ) -> PinchDecomposition:
    """Split ``X`` against the eigenspace blocks of the decomposed operator.

    Eigenvalues closer than ``tol`` times the spectral diameter are grouped
    into one block.  ``v1`` is the block-diagonal compression transported
    back to the original basis; ``v2 = X - v1`` exactly.
    """
    Xm = _as_matrix(X, dec.n)
    lam = dec.eigenvalues
    diam = float(lam[-1] - lam[0])
    abs_tol = max(tol * max(diam, 1e-300), 1e-300)
    blocks = eigenvalue_blocks(lam, abs_tol)
    mask = _block_mask(blocks, dec.n)
    Xt = dec.transform_to_eigenbasis(Xm)
    v1 = dec.transform_from_eigenbasis(np.where(mask, Xt, 0.0))
    return PinchDecomposition(v1=v1, v2=Xm - v1, blocks=blocks, tolerance=abs_tol)


def solve_commutator_preimage(dec: SpectralDecomposition, v2,
                              tol: float = DEFAULT_BLOCK_RTOL,
                              consistency_rtol: float = 1e-10) -> np.ndarray:
    """Solve ``[B, Y] = v2`` exactly for the range part ``v2``.

    In the eigenbasis ``Y_ij = v2_ij / (lam_i - lam_j)`` off the blocks and
    zero on them, which is the minimum-Frobenius-norm solution.  A ``v2``
    carrying block-diagonal mass beyond ``consistency_rtol`` (relative to its
    Frobenius norm) is not a commutator and is rejected.
    """
    Vm = _as_matrix(v2, dec.n)
    lam = dec.eigenvalues
    diam = float(lam[-1] - lam[0])
    abs_tol = max(tol * max(diam, 1e-300), 1e-300)
    blocks = eigenvalue_blocks(lam, abs_tol)
    mask = _block_mask(blocks, dec.n)
    Vt = dec.transform_to_eigenbasis(Vm)
    scale = float(np.linalg.norm(Vt))
    on_block = float(np.linalg.norm(np.where(mask, Vt, 0.0)))
    if on_block > consistency_rtol * max(scale, 1e-300):
        raise PreimageConsistencyError(
            f"input has kernel component of norm {on_block:.3e} "
            f"(tolerance {consistency_rtol * max(scale, 1e-300):.3e}); "
            "it is not in the range of the commutator map"
        )
    gaps = lam[:, None] - lam[None, :]
    Yt = np.where(mask, 0.0, Vt / np.where(mask, 1.0, gaps))
    return dec.transform_from_eigenbasis(Yt)


def resolvent_pinch(A: HermitianOperator, X, tol: float = DEFAULT_BLOCK_RTOL
                    ) -> PinchDecomposition:
    """Split ``X`` against the commutator map of the resolvent ``(A + i)**-1``.

    The resolvent is a bounded normal operator sharing eigenvectors with
    ``A``, and ``lam -> 1/(lam + i)`` is injective on the reals, so in finite
    dimensions the splitting coincides with :func:`pinch` of ``A`` itself.
    The block grouping is nevertheless computed from the resolvent
    eigenvalues, which is what makes that coincidence a testable property.
    """
    dec = eig(A)
    b_vals = 1.0 / (dec.eigenvalues + 1j)
    diam = float(np.max(np.abs(b_vals[:, None] - b_vals[None, :])))
    abs_tol = max(tol * max(diam, 1e-300), 1e-300)
    blocks = eigenvalue_blocks(b_vals, abs_tol)
    mask = _block_mask(blocks, dec.n)
    Xm = _as_matrix(X, dec.n)
    Xt = dec.transform_to_eigenbasis(Xm)
    v1 = dec.transform_from_eigenbasis(np.where(mask, Xt, 0.0))
    return PinchDecomposition(v1=v1, v2=Xm - v1, blocks=blocks, tolerance=abs_tol)


def path_decomposition(A: HermitianOperator, V: HermitianOperator, taus,
                       tol: float = DEFAULT_BLOCK_RTOL) -> list:
    """Pinch ``V`` against ``A + tau V`` for every node of a path in [0, 1].

    Returns one :class:`PinchDecomposition` per node.  A change of block
    structure between consecutive nodes signals a possible eigenvalue
    crossing, where the kernel projection need not vary continuously; that
    is reported as a :class:`BlockStructureWarning`, not an error.
    """
    if V.n != A.n:
        raise DimensionMismatchError(f"dimension mismatch: {A.n} vs {V.n}")
    taus = np.asarray(taus, dtype=float)
    out = []
    previous_sizes = None
    for tau in taus:
        node = pinch(eig(A.axpy(float(tau), V)), V.entries, tol=tol)
        sizes = tuple(len(b) for b in node.blocks)
        if previous_sizes is not None and sizes != previous_sizes:
            warnings.warn(
                f"block structure changed along the path at tau={tau:g} "
                f"({previous_sizes} -> {sizes}); possible eigenvalue crossing",
                BlockStructureWarning,
            )
        previous_sizes = sizes
        out.append(node)
    return out
