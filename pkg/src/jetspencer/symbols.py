"""Geometric symbols N^q, their prolongation, characteristic covectors and
restriction to non-characteristic hyperplanes.

An element of Sym^q(V*) (x) W is stored by its Taylor coefficients
c[alpha, sigma] (|sigma| = q), i.e. the derivatives d^sigma u^alpha of a
homogeneous polynomial solution.  In these coordinates a partial derivative
is an index shift, so every matrix below has integer entries before any
basis reduction.  Column order: dependent-major, then graded-lex monomials.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import linalg
from .jets import JetSystem, MultiIndex, monomial_index, monomials, sym_dim
from .linalg import Subspace

__all__ = [
    "SymbolComponent",
    "SymbolFamily",
    "CharacteristicCovector",
    "WindowTooSmall",
    "GenericityBudgetExhausted",
    "symbol_component",
    "symbol_rows",
    "prolong_symbol",
    "symbol_family",
    "symbol_matrix_at",
    "is_non_characteristic",
    "generic_covector",
    "restrict_symbol",
    "shift_table",
    "derivative",
]

COVECTOR_BUDGET = 8


class WindowTooSmall(RuntimeError):
    """The requested degree window does not reach stabilization."""


class GenericityBudgetExhausted(RuntimeError):
    pass


class CharacteristicCovector(ValueError):
    pass


@dataclass(frozen=True)
class SymbolComponent:
    q: int
    n: int
    m: int
    space: Subspace

    @property
    def ambient_dim(self) -> int:
        return self.m * sym_dim(self.n, self.q)

    @property
    def dim(self) -> int:
        return self.space.dim


def column(n: int, q: int, alpha: int, sigma: MultiIndex) -> int:
    return alpha * sym_dim(n, q) + monomial_index(n, q)[sigma]


@lru_cache(maxsize=None)
def shift_table(n: int, m: int, q: int, i: int) -> tuple[int, ...]:
    """For each column of Sym^q (x) W, the column of d/dx_i of it in degree q-1, or -1."""
    size = sym_dim(n, q)
    lower = monomial_index(n, q - 1) if q > 0 else {}
    lsize = sym_dim(n, q - 1)
    out = []
    for alpha in range(m):
        for sigma in monomials(n, q):
            if sigma[i] == 0:
                out.append(-1)
            else:
                out.append(alpha * lsize + lower[sigma.raised(i, -1)])
    assert len(out) == m * size
    return tuple(out)


def derivative(vec: dict, n: int, m: int, q: int, i: int) -> dict:
    """d/dx_i of a sparse degree-q vector (Taylor coefficients: index shift)."""
    table = shift_table(n, m, q, i)
    return {table[j]: v for j, v in vec.items() if table[j] >= 0}


def symbol_rows(s: JetSystem, q: int) -> list[dict[int, Fraction]]:
    """Top-order parts of every D^tau F_A with ord(F_A) + |tau| = q."""
    n = s.n
    rows = []
    for F in s.equations:
        k = F.order
        if k < 0 or k > q:
            continue
        top = F.top_part()
        for tau in monomials(n, q - k):
            rows.append({column(n, q, v.dependent, v.index + tau): c for v, c in top.items()})
    return rows


def symbol_component(s: JetSystem, q: int) -> SymbolComponent:
    """N^q: kernel of the prolonged symbol map in degree q."""
    if q < 0:
        raise ValueError("degree must be >= 0")
    n, m = s.n, s.m
    amb = m * sym_dim(n, q)
    rows = symbol_rows(s, q)
    if not rows:
        return SymbolComponent(q, n, m, Subspace.full(amb))
    M = linalg.sparse_matrix(len(rows), amb,
                             (((r, j), c) for r, row in enumerate(rows) for j, c in row.items()))
    return SymbolComponent(q, n, m, linalg.kernel_basis(M))


def prolong_symbol(c: SymbolComponent) -> SymbolComponent:
    """Pr_1(N) = (V* (x) N) ∩ (Sym^{q+1} (x) W) inside V* (x) Sym^q (x) W."""
    n, m, q = c.n, c.m, c.q
    low = c.ambient_dim
    high = m * sym_dim(n, q + 1)
    big = n * low
    # image of Sym^{q+1} (x) W under c -> (d_1 c, ..., d_n c)
    tables = [shift_table(n, m, q + 1, i) for i in range(n)]
    embed = {}
    for j in range(high):
        for i in range(n):
            t = tables[i][j]
            if t >= 0:
                embed[(j, i * low + t)] = 1
    image = linalg.row_space(linalg.sparse_matrix(high, big, embed))
    # V* (x) N: n block copies of N
    blocks = {}
    d = c.space.dim
    for i in range(n):
        for k, row in enumerate(c.space.sparse_rows):
            for j, v in row.items():
                blocks[(i * d + k, i * low + j)] = v
    tensor = linalg.row_space(linalg.sparse_matrix(n * d, big, blocks))
    meet = linalg.intersect(image, tensor)
    # pull back through the (injective) embedding
    back = []
    for row in meet.sparse_rows:
        vec = {}
        for j in range(high):
            for i in range(n):
                t = tables[i][j]
                if t >= 0:
                    v = row.get(i * low + t)
                    if v:
                        vec[j] = v
                    break
        back.append(vec)
    M = linalg.sparse_matrix(len(back), high,
                             (((r, j), v) for r, vec in enumerate(back) for j, v in vec.items()))
    return SymbolComponent(q + 1, n, m, linalg.row_space(M))


@dataclass(frozen=True)
class SymbolFamily:
    """Components N^0 .. N^qmax of a symbolic system over n variables."""

    n: int
    m: int
    components: tuple[SymbolComponent, ...]
    system: JetSystem | None = None
    stabilization_degree: int | None = None
    label: str = ""

    @property
    def qmax(self) -> int:
        return len(self.components) - 1

    @property
    def dims(self) -> list[int]:
        return [c.dim for c in self.components]

    @property
    def order(self) -> int:
        if self.system is not None:
            return self.system.order
        # first degree that is not the full space
        for c in self.components:
            if not c.space.is_full:
                return c.q
        return 0

    def component(self, q: int) -> SymbolComponent:
        if q < 0:
            return SymbolComponent(q, self.n, self.m, Subspace.zero(0))
        if q > self.qmax:
            raise WindowTooSmall(f"degree {q} beyond family window {self.qmax}")
        return self.components[q]

    def extended(self, qmax: int) -> "SymbolFamily":
        if self.system is None:
            raise WindowTooSmall("cannot extend a family without a system")
        return symbol_family(self.system, qmax)


def _fits_polynomial(values: Sequence[int], degree: int) -> bool:
    """True if the sequence is a polynomial of degree <= `degree` (finite differences)."""
    vals = list(values)
    for _ in range(degree + 1):
        vals = [b - a for a, b in zip(vals, vals[1:])]
    return all(v == 0 for v in vals)


def detect_stabilization(dims: Sequence[int], n: int) -> int | None:
    """Least q0 with dims[q0:] polynomial of degree <= n-1 on >= n+1 points."""
    best = None
    for q0 in range(len(dims) - n - 1, -1, -1):
        tail = dims[q0:]
        if len(tail) >= n + 1 and _fits_polynomial(tail, max(n - 1, 0)):
            best = q0
        else:
            break
    return best


def symbol_family(s: JetSystem, qmax: int, strict: bool = False) -> SymbolFamily:
    if qmax < s.order:
        raise WindowTooSmall(f"qmax={qmax} below system order {s.order}")
    comps = tuple(symbol_component(s, q) for q in range(qmax + 1))
    stab = detect_stabilization([c.dim for c in comps], s.n)
    if strict and stab is None:
        raise WindowTooSmall(f"no stabilization detected up to degree {qmax}")
    return SymbolFamily(s.n, s.m, comps, s, stab, s.name)


def symbol_matrix_at(s: JetSystem, xi: Sequence) -> list[list[Fraction]]:
    """N x m matrix of principal symbols evaluated at a covector."""
    xi = [Fraction(x) for x in xi]
    if len(xi) != s.n:
        raise ValueError(f"covector has {len(xi)} entries, system has n={s.n}")
    out = []
    for F in s.equations:
        row = [Fraction(0)] * s.m
        for v, c in F.top_part().items():
            term = c
            for x, e in zip(xi, v.index):
                term *= x ** e
            row[v.dependent] += term
        out.append(row)
    return out


def is_non_characteristic(s: JetSystem, xi: Sequence) -> bool:
    """Full rank of the symbol matrix at xi: rank == min(m, #equations)."""
    if all(Fraction(x) == 0 for x in xi):
        raise ValueError("zero covector")
    s.check_pure_order()
    rows = symbol_matrix_at(s, xi)
    if not rows:
        return True
    r = linalg.rank(linalg.matrix(rows, s.m))
    return r == min(s.m, len(rows))


def generic_covector(s: JetSystem, seed: int = 0, budget: int = COVECTOR_BUDGET) -> tuple[Fraction, ...]:
    """Seeded integer covector with entries in [-10, 10] that is non-characteristic."""
    rng = random.Random(seed)
    for _ in range(budget):
        xi = tuple(Fraction(rng.randint(-10, 10)) for _ in range(s.n))
        if all(x == 0 for x in xi):
            continue
        if is_non_characteristic(s, xi):
            return xi
    raise GenericityBudgetExhausted(
        f"no non-characteristic covector for {s.name!r} after {budget} draws")


def restrict_symbol(f: SymbolFamily, normal: Sequence) -> SymbolFamily:
    """Restriction of the symbolic system along a non-characteristic covector.

    Dual to passing from the symbol module M to M / l M for the linear form
    l = sum a_i xi_i: on the comodule side we keep the elements killed by
    the directional derivative sum a_i d_i, write them in a basis of V that
    starts with a, and drop the a-coordinate.  Because the remaining basis
    vectors are standard ones, dropping it just deletes the monomials that
    involve the replaced variable.
    """
    a = [Fraction(x) for x in normal]
    if len(a) != f.n:
        raise ValueError("normal has wrong length")
    if all(x == 0 for x in a):
        raise ValueError("zero covector")
    if f.system is not None and not is_non_characteristic(f.system, a):
        raise CharacteristicCovector(f"covector {tuple(map(str, a))} is characteristic")
    n, m = f.n, f.m
    j = next(i for i, x in enumerate(a) if x != 0)
    comps = []
    for c in f.components:
        q = c.q
        basis = c.space.sparse_rows
        if q == 0 or not basis:
            kept = basis
        else:
            tables = [shift_table(n, m, q, i) for i in range(n)]
            low = m * sym_dim(n, q - 1)
            # matrix whose column k is the directional derivative of basis row k
            ent = {}
            for k, row in enumerate(basis):
                for col, v in row.items():
                    for i in range(n):
                        if a[i] and tables[i][col] >= 0:
                            key = (tables[i][col], k)
                            ent[key] = ent.get(key, 0) + linalg.to_fmpq(a[i]) * v
            D = linalg.sparse_matrix(low, len(basis), ent)
            lam = linalg.kernel_basis(D)
            kept = []
            for lrow in lam.sparse_rows:
                vec = {}
                for k, coeff in lrow.items():
                    for col, v in basis[k].items():
                        vec[col] = vec.get(col, 0) + coeff * v
                kept.append({col: v for col, v in vec.items() if v != 0})
        # delete monomials involving variable j
        sub_index = monomial_index(n - 1, q)
        sub_size = sym_dim(n - 1, q)
        mons = monomials(n, q)
        size = sym_dim(n, q)
        ent = {}
        for r, vec in enumerate(kept):
            for col, v in vec.items():
                alpha, mi = divmod(col, size)
                sigma = mons[mi]
                if sigma[j] == 0:
                    tau = MultiIndex(e for i, e in enumerate(sigma) if i != j)
                    ent[(r, alpha * sub_size + sub_index[tau])] = v
        M = linalg.sparse_matrix(len(kept), m * sub_size, ent)
        comps.append(SymbolComponent(q, n - 1, m, linalg.row_space(M)))
    stab = detect_stabilization([c.dim for c in comps], n - 1)
    return SymbolFamily(n - 1, m, tuple(comps), None, stab, f"{f.label}|restricted")
