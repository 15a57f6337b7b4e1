"""Exact linear algebra over the rationals.

Matrices are :class:`flint.fmpq_mat` values.  Ranks and echelon forms are
computed on the integer matrix obtained by clearing a common denominator,
which FLINT handles fraction-free and far faster than rational elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import flint

RatMatrix = flint.fmpq_mat

__all__ = [
    "RatMatrix",
    "Subspace",
    "DimensionMismatch",
    "to_fmpq",
    "to_fraction",
    "matrix",
    "zeros",
    "sparse_matrix",
    "rank",
    "rref",
    "kernel_basis",
    "row_space",
    "annihilator",
    "intersect",
    "span_sum",
    "vstack",
]


class DimensionMismatch(ValueError):
    pass


def to_fmpq(x) -> flint.fmpq:
    if isinstance(x, flint.fmpq):
        return x
    if isinstance(x, Fraction):
        return flint.fmpq(x.numerator, x.denominator)
    if isinstance(x, int):
        return flint.fmpq(x)
    return to_fmpq(Fraction(x))


def to_fraction(x) -> Fraction:
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    return Fraction(x)


def zeros(rows: int, cols: int) -> RatMatrix:
    return flint.fmpq_mat(rows, cols)


def matrix(rows: Sequence[Sequence], ncols: int | None = None) -> RatMatrix:
    """Build a rational matrix from nested sequences of ints/Fractions."""
    rows = list(rows)
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    flat = []
    for r in rows:
        if len(r) != ncols:
            raise DimensionMismatch("ragged matrix rows")
        flat.extend(to_fmpq(v) for v in r)
    return flint.fmpq_mat(len(rows), ncols, flat)


def sparse_matrix(rows: int, cols: int, entries: Mapping[tuple[int, int], object] | Iterable) -> RatMatrix:
    M = flint.fmpq_mat(rows, cols)
    items = entries.items() if isinstance(entries, Mapping) else entries
    for (i, j), v in items:
        if v:
            M[i, j] = to_fmpq(v)
    return M


def vstack(blocks: Sequence[RatMatrix], ncols: int) -> RatMatrix:
    total = sum(b.nrows() for b in blocks)
    M = flint.fmpq_mat(total, ncols)
    r0 = 0
    for b in blocks:
        if b.ncols() != ncols:
            raise DimensionMismatch("column counts differ")
        for (i, j), v in _nonzeros(b):
            M[r0 + i, j] = v
        r0 += b.nrows()
    return M


def _nonzeros(M: RatMatrix):
    ncols = M.ncols()
    for k, v in enumerate(M.entries()):
        if v != 0:
            yield divmod(k, ncols), v


def _integer_form(M: RatMatrix) -> flint.fmpz_mat:
    num, _den = M.numer_denom()
    return num


def rank(M: RatMatrix) -> int:
    if M.nrows() == 0 or M.ncols() == 0:
        return 0
    return _integer_form(M).rank()


def rref(M: RatMatrix) -> tuple[RatMatrix, tuple[int, ...]]:
    """Reduced row-echelon form with zero rows dropped, plus pivot columns."""
    nrows, ncols = M.nrows(), M.ncols()
    if nrows == 0 or ncols == 0:
        return flint.fmpq_mat(0, ncols), ()
    R, den, r = _integer_form(M).rref()
    out = flint.fmpq_mat(r, ncols)
    pivots = []
    d = flint.fmpq(int(den))
    entries = R.entries()
    for i in range(r):
        row = entries[i * ncols:(i + 1) * ncols]
        piv = None
        for j, v in enumerate(row):
            if v != 0:
                if piv is None:
                    piv = j
                out[i, j] = flint.fmpq(int(v)) / d
        pivots.append(piv)
    return out, tuple(pivots)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of Q^ambient_dim, held as a reduced row-echelon basis.

    Because the basis is canonical, two subspaces are equal exactly when
    their basis matrices are equal.
    """

    ambient_dim: int
    basis: RatMatrix
    pivots: tuple[int, ...]

    @classmethod
    def from_rows(cls, M: RatMatrix) -> "Subspace":
        R, piv = rref(M)
        return cls(M.ncols(), R, piv)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, flint.fmpq_mat(0, ambient_dim), ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        M = flint.fmpq_mat(ambient_dim, ambient_dim)
        for i in range(ambient_dim):
            M[i, i] = 1
        return cls(ambient_dim, M, tuple(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient_dim == other.ambient_dim
                and self.pivots == other.pivots
                and self.basis == other.basis)

    def __hash__(self):
        return hash((self.ambient_dim, self.pivots))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    @cached_property
    def sparse_rows(self) -> tuple[dict[int, flint.fmpq], ...]:
        n = self.ambient_dim
        entries = self.basis.entries()
        rows = []
        for i in range(self.dim):
            rows.append({j: v for j, v in enumerate(entries[i * n:(i + 1) * n]) if v != 0})
        return tuple(rows)

    def rows_as_fractions(self) -> list[list[Fraction]]:
        n = self.ambient_dim
        entries = [to_fraction(v) for v in self.basis.entries()]
        return [entries[i * n:(i + 1) * n] for i in range(self.dim)]

    def coordinates(self, vec: Mapping[int, object]) -> dict[int, flint.fmpq]:
        """Coordinates of a (sparse) vector assumed to lie in the span.

        With an RREF basis the coordinate on basis row k is the vector's
        entry at that row's pivot column.
        """
        out = {}
        for k, p in enumerate(self.pivots):
            v = vec.get(p)
            if v:
                out[k] = v
        return out

    def contains(self, vec: Sequence) -> bool:
        v = matrix([vec], self.ambient_dim)
        stacked = vstack([self.basis, v], self.ambient_dim)
        return rank(stacked) == self.dim

    def contains_space(self, other: "Subspace") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatch("ambient dimensions differ")
        if other.dim == 0:
            return True
        return rank(vstack([self.basis, other.basis], self.ambient_dim)) == self.dim


def kernel_basis(M: RatMatrix) -> Subspace:
    """Basis of {v : M v = 0}, in RREF."""
    ncols = M.ncols()
    R, piv = rref(M)
    pivset = set(piv)
    free = [j for j in range(ncols) if j not in pivset]
    K = flint.fmpq_mat(len(free), ncols)
    entries = R.entries()
    for k, f in enumerate(free):
        K[k, f] = 1
        for i, p in enumerate(piv):
            v = entries[i * ncols + f]
            if v != 0:
                K[k, p] = -v
    return Subspace.from_rows(K)


def row_space(M: RatMatrix) -> Subspace:
    return Subspace.from_rows(M)


def annihilator(S: Subspace) -> Subspace:
    """All w with <b, w> = 0 for every basis row b of S."""
    if S.dim == 0:
        return Subspace.full(S.ambient_dim)
    return kernel_basis(S.basis)


def intersect(A: Subspace, B: Subspace) -> Subspace:
    """A ∩ B as the common kernel of both annihilators stacked."""
    if A.ambient_dim != B.ambient_dim:
        raise DimensionMismatch(f"ambient {A.ambient_dim} != {B.ambient_dim}")
    n = A.ambient_dim
    if A.is_full:
        return B
    if B.is_full:
        return A
    eqs = vstack([annihilator(A).basis, annihilator(B).basis], n)
    return kernel_basis(eqs)


def span_sum(A: Subspace, B: Subspace) -> Subspace:
    if A.ambient_dim != B.ambient_dim:
        raise DimensionMismatch(f"ambient {A.ambient_dim} != {B.ambient_dim}")
    return Subspace.from_rows(vstack([A.basis, B.basis], A.ambient_dim))
