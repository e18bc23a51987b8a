import numpy as np
import pytest

from conftest import max_abs
from specshift.exceptions import DimensionMismatchError, PreimageConsistencyError
from specshift.oracles import random_hermitian
from specshift.pinching import (
    BlockStructureWarning,
    commutator,
    path_decomposition,
    pinch,
    resolvent_pinch,
    solve_commutator_preimage,
)
from specshift.spectral import HermitianOperator, eig, schatten_norm


@pytest.fixture
def split(rng):
    B = random_hermitian(rng, 6)
    X = random_hermitian(rng, 6).entries
    return B, X, pinch(eig(B), X)


def test_commutator_basics(rng):
    B = random_hermitian(rng, 5).entries
    assert max_abs(commutator(B, B)) <= 1e-14 * max_abs(B @ B)
    d = np.array([0.0, 1.0, 2.5])
    Bd = np.diag(d)
    X = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    expected = (d[:, None] - d[None, :]) * X
    assert max_abs(commutator(Bd, X) - expected) <= 1e-14
    Y = rng.standard_normal((5, 5))
    scale = max_abs(B) * max_abs(Y)
    assert abs(np.trace(commutator(B, Y))) <= 1e-13 * max(scale, 1.0)
    with pytest.raises(DimensionMismatchError):
        commutator(B, X)


def test_pinch_invariants(split):
    B, X, pd = split
    hs2 = np.linalg.norm(X) ** 2
    assert max_abs(pd.v1 + pd.v2 - X) <= 1e-14 * max(max_abs(X), 1.0)
    assert abs(np.trace(pd.v1.conj().T @ pd.v2)) <= 1e-12 * hs2
    assert abs(hs2 - pd.v1_norm ** 2 - pd.v2_norm ** 2) <= 1e-12 * hs2
    b_scale = schatten_norm(B, "op")
    assert max_abs(commutator(B.entries, pd.v1)) <= 1e-10 * b_scale * np.sqrt(hs2)
    # Hermitian input splits into Hermitian parts
    assert max_abs(pd.v1 - pd.v1.conj().T) <= 1e-12
    assert max_abs(pd.v2 - pd.v2.conj().T) <= 1e-12


def test_pinch_distinct_spectrum_is_diagonal_compression(split):
    B, X, pd = split
    dec = eig(B)
    Xt = dec.transform_to_eigenbasis(X)
    expected = dec.transform_from_eigenbasis(np.diag(np.diag(Xt)))
    assert max_abs(pd.v1 - expected) <= 1e-12 * max(max_abs(X), 1.0)
    assert pd.kernel_dimension == 6


def test_pinch_identity_base(rng):
    X = random_hermitian(rng, 4).entries
    pd = pinch(eig(HermitianOperator(np.eye(4))), X)
    assert max_abs(pd.v1 - X) == 0.0
    assert max_abs(pd.v2) == 0.0
    assert pd.kernel_dimension == 16


def test_kernel_range_orthogonality(split, rng):
    B, X, pd = split
    for _ in range(5):
        Y = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        inner = np.trace(pd.v1.conj().T @ commutator(B.entries, Y))
        assert abs(inner) <= 1e-11 * max(max_abs(Y), 1.0) * max_abs(B.entries)


def test_kernel_invariant_under_multiplication(split):
    B, X, pd = split
    prod = B.entries @ pd.v1
    again = pinch(eig(B), prod)
    assert max_abs(again.v2) <= 1e-12 * max(max_abs(prod), 1.0)
    prod = pd.v1 @ B.entries
    again = pinch(eig(B), prod)
    assert max_abs(again.v2) <= 1e-12 * max(max_abs(prod), 1.0)


def test_adjoint_compatibility(rng):
    B = random_hermitian(rng, 5)
    X = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    dec = eig(B)
    pd = pinch(dec, X)
    pd_star = pinch(dec, X.conj().T)
    assert max_abs(pd_star.v1 - pd.v1.conj().T) <= 1e-12
    assert max_abs(pd_star.v2 - pd.v2.conj().T) <= 1e-12


def test_preimage_solves_commutator_equation(split):
    B, X, pd = split
    Y = solve_commutator_preimage(eig(B), pd.v2)
    resid = commutator(B.entries, Y) - pd.v2
    assert max_abs(resid) <= 1e-10 * max(max_abs(pd.v2), 1.0)
    # skew-adjoint for Hermitian right-hand side, block-diagonal free
    assert max_abs(Y + Y.conj().T) <= 1e-12
    dec = eig(B)
    assert max_abs(np.diag(dec.transform_to_eigenbasis(Y))) <= 1e-14


def test_preimage_trivial_and_hand_case():
    B = HermitianOperator.from_diagonal([0.0, 1.0])
    dec = eig(B)
    assert max_abs(solve_commutator_preimage(dec, np.zeros((2, 2)))) == 0.0
    c = 0.3 + 0.4j
    v2 = np.array([[0.0, c], [np.conj(c), 0.0]])
    Y = solve_commutator_preimage(dec, v2)
    expected = np.array([[0.0, -c], [np.conj(c), 0.0]])
    assert max_abs(Y - expected) <= 1e-14
    assert max_abs(commutator(B.entries, Y) - v2) <= 1e-14


def test_preimage_rejects_kernel_component(split):
    B, X, _ = split
    with pytest.raises(PreimageConsistencyError):
        solve_commutator_preimage(eig(B), X)  # X has a diagonal part


def test_preimage_composed_with_commutator_is_identity_on_range(split, rng):
    B, _, _ = split
    dec = eig(B)
    Y = random_hermitian(rng, 6).entries
    v2 = commutator(B.entries, Y)
    Y_back = solve_commutator_preimage(dec, v2)
    assert max_abs(commutator(B.entries, Y_back) - v2) <= 1e-10 * max(max_abs(v2), 1.0)
    # Y_back is the block-off-diagonal part of Y
    off = Y - dec.transform_from_eigenbasis(
        np.diag(np.diag(dec.transform_to_eigenbasis(Y))))
    assert max_abs(Y_back - off) <= 1e-11


def test_resolvent_pinch_matches_direct(rng):
    A = random_hermitian(rng, 6)
    X = random_hermitian(rng, 6).entries
    direct = pinch(eig(A), X)
    resolvent = resolvent_pinch(A, X)
    assert max_abs(resolvent.v1 - direct.v1) <= 1e-12 * max(max_abs(X), 1.0)
    hs2 = np.linalg.norm(X) ** 2
    assert abs(hs2 - resolvent.v1_norm ** 2 - resolvent.v2_norm ** 2) <= 1e-12 * hs2
    zero = resolvent_pinch(HermitianOperator(np.zeros((3, 3))), X[:3, :3])
    assert max_abs(zero.v1 - X[:3, :3]) == 0.0


def test_path_decomposition_constant_for_zero_direction(rng):
    A = random_hermitian(rng, 4)
    V = HermitianOperator(np.zeros((4, 4)))
    nodes = path_decomposition(A, V, np.linspace(0, 1, 5))
    assert all(nd.v1_norm == 0.0 and nd.v2_norm == 0.0 for nd in nodes)


def test_path_pythagoras_and_refinement(rng):
    A = random_hermitian(rng, 5)
    V = random_hermitian(rng, 5, 0.7)
    hs2 = schatten_norm(V, 2) ** 2
    nodes = path_decomposition(A, V, np.linspace(0, 1, 21))
    for nd in nodes:
        assert abs(nd.v1_norm ** 2 + nd.v2_norm ** 2 - hs2) <= 1e-12 * hs2
    # node-to-node jumps of the kernel mass shrink under grid refinement
    def max_jump(count):
        ns = path_decomposition(A, V, np.linspace(0, 1, count))
        masses = np.array([nd.v1_norm for nd in ns])
        return float(np.max(np.abs(np.diff(masses))))

    assert max_jump(41) < max_jump(11)


def test_path_warns_on_block_structure_change():
    A = HermitianOperator.from_diagonal([0.0, 1.0])
    V = HermitianOperator.from_diagonal([1.0, -1.0])
    # eigenvalues of A + tau V cross at tau = 1/2
    with pytest.warns(BlockStructureWarning):
        path_decomposition(A, V, np.linspace(0, 1, 21))
