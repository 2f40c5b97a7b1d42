import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbforms.grassmann import (
    DimensionError,
    EMPTY,
    GrassmannVector,
    MultiIndex,
    all_indices,
    compound_matrix,
    exterior_action,
    minor,
    norm,
    scalar_product,
    wedge,
)

subsets = st.sets(st.integers(1, 6), max_size=6).map(MultiIndex.from_indices)


def perm_sign(seq):
    seq = list(seq)
    inv = sum(1 for a, b in itertools.combinations(range(len(seq)), 2) if seq[a] > seq[b])
    return -1 if inv % 2 else 1


def test_multi_index_roundtrip():
    I = MultiIndex.from_indices([3, 1])
    assert I.indices == (1, 3)
    assert len(I) == 2
    assert I.max_index() == 3
    assert len(EMPTY) == 0 and EMPTY.max_index() == 0


def test_multi_index_rejects_bad_input():
    with pytest.raises(ValueError):
        MultiIndex.from_indices([0])
    with pytest.raises(ValueError):
        MultiIndex.from_indices([1, 1])


def test_all_indices_graded_counts():
    idx = all_indices(4)
    assert len(idx) == 16
    assert [len(I) for I in idx] == sorted(len(I) for I in idx)
    assert len(all_indices(4, 2)) == 6


def test_wedge_examples():
    assert wedge([], [2]) == (1, MultiIndex.from_indices([2]))
    assert wedge([1], [1]) is None
    assert wedge([2], [1]) == (-1, MultiIndex.from_indices([1, 2]))


@given(subsets, subsets)
def test_wedge_sign_matches_permutation_parity(I, J):
    res = wedge(I, J)
    if set(I.indices) & set(J.indices):
        assert res is None
        return
    sign, K = res
    assert K.indices == tuple(sorted(I.indices + J.indices))
    assert sign == perm_sign(I.indices + J.indices)


@given(subsets, subsets)
def test_wedge_graded_commutativity(I, J):
    a, b = wedge(I, J), wedge(J, I)
    if a is None:
        assert b is None
        return
    assert a[1] == b[1]
    assert a[0] == b[0] * (-1) ** (len(I) * len(J))


@given(subsets, subsets, subsets)
def test_wedge_associative(I, J, K):
    x = GrassmannVector.basis(6, I)
    y = GrassmannVector.basis(6, J)
    z = GrassmannVector.basis(6, K)
    assert ((x * y) * z).allclose(x * (y * z))


def test_exterior_action_examples():
    assert exterior_action(np.eye(2), [1, 2]).allclose(GrassmannVector.basis(2, [1, 2]))
    out = exterior_action(np.diag([1j, 1]), [1])
    assert out[[1]] == 1j and out[[2]] == 0
    swap = np.array([[0, 1], [1, 0]])
    assert exterior_action(swap, [1, 2])[[1, 2]] == pytest.approx(-1)


def test_minor_large_block_uses_determinant(rng):
    E = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    I = MultiIndex.from_indices(range(1, 6))
    J = MultiIndex.from_indices(range(2, 7))
    assert minor(E, I, J) == pytest.approx(np.linalg.det(E[:5, 1:]))
    I4 = MultiIndex.from_indices([1, 2, 4, 5])
    assert minor(E, I4, I4) == pytest.approx(np.linalg.det(E[np.ix_([0, 1, 3, 4], [0, 1, 3, 4])]))


@pytest.mark.parametrize("degree", [0, 1, 2, 3])
def test_compound_matrix_is_multiplicative(rng, degree):
    # Cauchy-Binet: C_k(E F) = C_k(E) C_k(F)
    E = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    F = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    CE, _ = compound_matrix(E, degree)
    CF, _ = compound_matrix(F, degree)
    CEF, _ = compound_matrix(E @ F, degree)
    np.testing.assert_allclose(CEF, CE @ CF, atol=1e-12)


def test_exterior_action_preserves_wedge(rng):
    E = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    x = GrassmannVector(3, {(1,): 1.0, (2,): 2j})
    y = GrassmannVector(3, {(3,): 0.5, (1,): -1.0})
    lhs = exterior_action(E, x * y)
    rhs = exterior_action(E, x) * exterior_action(E, y)
    assert lhs.allclose(rhs, atol=1e-12)


def test_unitary_action_preserves_norm(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    x = GrassmannVector(3, {(): 1.0, (1, 2): 2 - 1j, (3,): 0.5j, (1, 2, 3): 3.0})
    assert norm(exterior_action(Q, x)) == pytest.approx(norm(x), rel=1e-12)


def test_scalar_product_examples():
    e1 = GrassmannVector.basis(2, [1])
    e2 = GrassmannVector.basis(2, [2])
    assert scalar_product(e1, e2) == 0
    assert scalar_product(e1, e1) == 1
    assert norm(e1 + e2) == pytest.approx(math.sqrt(2))


def test_scalar_product_sesquilinear():
    a = GrassmannVector(2, {(1,): 1 + 2j})
    b = GrassmannVector(2, {(1,): 3 - 1j})
    assert scalar_product(2j * a, b) == pytest.approx(2j * scalar_product(a, b))
    assert scalar_product(a, 2j * b) == pytest.approx(-2j * scalar_product(a, b))


def test_full_sector_and_rank_checks():
    z = GrassmannVector(2, {(3,): 1.0}, full=True)
    assert z.full and z[[3]] == 1
    with pytest.raises(DimensionError):
        GrassmannVector(2, {(3,): 1.0})
    with pytest.raises(DimensionError):
        GrassmannVector(2) + GrassmannVector(3)
    with pytest.raises(DimensionError):
        exterior_action(np.eye(3), GrassmannVector(2))


@settings(max_examples=50)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False), min_size=8, max_size=8))
def test_norm_matches_array_norm(vals):
    x = GrassmannVector(3, dict(zip(all_indices(3), vals)))
    assert norm(x) == pytest.approx(float(np.linalg.norm(x.to_array())), rel=1e-12, abs=1e-12)
