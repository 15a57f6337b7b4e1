from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jetspencer import linalg
from jetspencer.linalg import Subspace


def fraction_rank(rows):
    """Plain Gaussian elimination over Fraction, used as a reference."""
    M = [[Fraction(x) for x in r] for r in rows]
    r = 0
    ncols = len(M[0]) if M else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    return r


def test_rank_examples():
    assert linalg.rank(linalg.matrix([[1, 0], [0, 1]])) == 2
    assert linalg.rank(linalg.zeros(3, 4)) == 0
    assert linalg.rank(linalg.matrix([[1, 2], [2, 4]])) == 1


def test_rank_with_fractions():
    M = linalg.matrix([[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), 1]])
    assert linalg.rank(M) == 1


def test_kernel_examples():
    assert linalg.kernel_basis(linalg.matrix([[1, 0], [0, 1]])).dim == 0
    K = linalg.kernel_basis(linalg.matrix([[1, 1]]))
    assert K.rows_as_fractions() == [[1, -1]]
    assert linalg.kernel_basis(linalg.zeros(2, 3)) == Subspace.full(3)


def test_intersect_examples():
    e1 = linalg.row_space(linalg.matrix([[1, 0]]))
    e2 = linalg.row_space(linalg.matrix([[0, 1]]))
    plane = Subspace.full(2)
    diag = linalg.row_space(linalg.matrix([[1, 1]]))
    assert linalg.intersect(e1, e1) == e1
    assert linalg.intersect(e1, e2).dim == 0
    assert linalg.intersect(plane, diag) == diag


def test_intersect_mismatch():
    with pytest.raises(linalg.DimensionMismatch):
        linalg.intersect(Subspace.full(2), Subspace.full(3))


def test_rref_is_canonical():
    A = linalg.row_space(linalg.matrix([[2, 4, 0], [1, 1, 1]]))
    B = linalg.row_space(linalg.matrix([[1, 3, -1], [0, 2, -2], [3, 5, 1]]))
    assert A == B
    assert A.pivots == (0, 1)


def test_coordinates_at_pivots():
    S = linalg.row_space(linalg.matrix([[1, 0, 2], [0, 1, 3]]))
    assert S.coordinates({0: 5, 1: -1, 2: 7}) == {0: 5, 1: -1}
    assert S.contains([5, -1, 7])
    assert not S.contains([1, 1, 1])


def test_sparse_and_vstack():
    M = linalg.sparse_matrix(2, 3, {(0, 2): 1, (1, 0): Fraction(1, 2)})
    V = linalg.vstack([M, linalg.matrix([[1, 1, 1]])], 3)
    assert V.nrows() == 3 and linalg.rank(V) == 3
    with pytest.raises(linalg.DimensionMismatch):
        linalg.vstack([M, linalg.zeros(1, 2)], 3)


def test_span_sum_and_annihilator():
    a = linalg.row_space(linalg.matrix([[1, 0, 0]]))
    b = linalg.row_space(linalg.matrix([[0, 1, 0]]))
    s = linalg.span_sum(a, b)
    assert s.dim == 2
    ann = linalg.annihilator(s)
    assert ann.rows_as_fractions() == [[0, 0, 1]]
    assert linalg.annihilator(Subspace.zero(2)) == Subspace.full(2)


small = st.integers(-4, 4)
matrices = st.integers(1, 6).flatmap(
    lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=1, max_size=6))


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_rank_properties(rows):
    M = linalg.matrix(rows)
    r = linalg.rank(M)
    assert r == fraction_rank(rows)
    assert r == linalg.rank(M.transpose())
    assert linalg.kernel_basis(M).dim + r == M.ncols()


@settings(max_examples=60, deadline=None)
@given(matrices, matrices)
def test_intersect_commutes(a, b):
    ncols = min(len(a[0]), len(b[0]))
    A = linalg.row_space(linalg.matrix([r[:ncols] for r in a]))
    B = linalg.row_space(linalg.matrix([r[:ncols] for r in b]))
    I = linalg.intersect(A, B)
    assert I == linalg.intersect(B, A)
    assert I.dim >= A.dim + B.dim - ncols
    assert A.contains_space(I) and B.contains_space(I)
