"""Finite-dimensional spaces of polynomials closed under differentiation and
their annihilator ideals in the dual variables xi_i <-> d/dz_i.

The annihilator is computed up to degree d + 1 (d = top degree in V); every
monomial of degree d + 1 already kills V, so this truncation contains a full
Groebner basis for any degree-compatible order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .jets import MultiIndex, monomials

__all__ = ["DStableSpace", "NotDStable", "DependentBasis", "d_stable_check",
           "annihilator_colength", "parse_polynomials", "AnnihilatorResult"]


class NotDStable(ValueError):
    pass


class DependentBasis(ValueError):
    pass


Poly = dict  # MultiIndex -> Fraction


def _degree(p: Poly) -> int:
    return max((mu.order for mu in p), default=-1)


def _diff(p: Poly, i: int) -> Poly:
    out = {}
    for mu, c in p.items():
        if mu[i]:
            out[mu.raised(i, -1)] = c * mu[i]
    return out


def _diff_multi(p: Poly, beta: MultiIndex) -> Poly:
    for i, e in enumerate(beta):
        for _ in range(e):
            p = _diff(p, i)
            if not p:
                return p
    return p


def _graded_monomials(C: int, d: int) -> list[MultiIndex]:
    """All monomials of degree <= d, highest degree first (grlex descending)."""
    out = []
    for q in range(d, -1, -1):
        out.extend(monomials(C, q))
    return out


@dataclass(frozen=True)
class DStableSpace:
    C: int
    basis: tuple[Poly, ...]
    variables: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.variables:
            object.__setattr__(self, "variables", tuple(f"z{i + 1}" for i in range(self.C)))
        clean = tuple({MultiIndex(mu): Fraction(c) for mu, c in p.items() if c} for p in self.basis)
        object.__setattr__(self, "basis", clean)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def top_degree(self) -> int:
        return max((_degree(p) for p in self.basis), default=-1)

    def _matrix(self, polys: Sequence[Poly]) -> tuple[linalg.RatMatrix, list[MultiIndex]]:
        cols = _graded_monomials(self.C, max(self.top_degree, 0))
        index = {mu: j for j, mu in enumerate(cols)}
        ent = {}
        for r, p in enumerate(polys):
            for mu, c in p.items():
                ent[(r, index[mu])] = c
        return linalg.sparse_matrix(len(polys), len(cols), ent), cols

    def is_independent(self) -> bool:
        M, _ = self._matrix(self.basis)
        return linalg.rank(M) == self.dim

    def span(self) -> linalg.Subspace:
        return linalg.row_space(self._matrix(self.basis)[0])


def parse_polynomials(lines: Sequence[str], variables: Sequence[str] | None = None) -> DStableSpace:
    """Polynomials (sympy syntax) -> DStableSpace.  Variables default to the
    sorted free symbols, or ``z`` for constant-only input."""
    import sympy  # only this entry point needs a polynomial parser

    exprs = [sympy.sympify(line, rational=True) for line in lines if line.strip()]
    if variables is None:
        names = sorted({str(s) for e in exprs for s in e.free_symbols})
        variables = names or ["z"]
    gens = [sympy.Symbol(v) for v in variables]
    basis = []
    for e in exprs:
        P = sympy.Poly(e, *gens, domain="QQ")
        basis.append({MultiIndex(mon): Fraction(int(c.p), int(c.q)) for mon, c in P.terms()})
    return DStableSpace(len(gens), tuple(basis), tuple(variables))


def d_stable_check(V: DStableSpace) -> bool:
    if not V.is_independent():
        raise DependentBasis("basis polynomials are linearly dependent")
    span = V.span()
    for p in V.basis:
        for i in range(V.C):
            q = _diff(p, i)
            if not q:
                continue
            vec, _ = V._matrix([q])
            if not span.contains([linalg.to_fraction(x) for x in vec.entries()]):
                return False
    return True


@dataclass(frozen=True)
class AnnihilatorResult:
    generators: tuple[Poly, ...]     # reduced Groebner basis, grlex
    leading_monomials: tuple[MultiIndex, ...]
    standard_monomials: tuple[MultiIndex, ...]
    colength: int
    dim: int

    def format_generators(self, names: Sequence[str]) -> list[str]:
        return [format_poly(g, names) for g in self.generators]


def annihilator_colength(V: DStableSpace) -> AnnihilatorResult:
    """Ann(V) = {g(xi) : g(d) v = 0 for all v in V}, its reduced Groebner basis
    (degree-compatible lex order) and the number of standard monomials."""
    if not d_stable_check(V):
        raise NotDStable("space is not closed under differentiation")
    d = max(V.top_degree, 0)
    ops = _graded_monomials(V.C, d + 1)
    # column beta holds the coefficients of d^beta applied to every basis vector
    _, target = V._matrix([])
    tindex = {mu: j for j, mu in enumerate(target)}
    rows = len(V.basis) * len(target)
    ent = {}
    for j, beta in enumerate(ops):
        for k, p in enumerate(V.basis):
            for mu, c in _diff_multi(p, beta).items():
                ent[(k * len(target) + tindex[mu], j)] = c
    kernel = linalg.kernel_basis(linalg.sparse_matrix(rows, len(ops), ent))
    leading = [ops[p] for p in kernel.pivots]
    lead_set = set(leading)
    standard = tuple(mu for mu in reversed(ops) if mu not in lead_set)

    def divisible(a, b):  # b divides a
        return a != b and all(x >= y for x, y in zip(a, b))

    gens, lms = [], []
    for row, lm in zip(kernel.sparse_rows, leading):
        if any(divisible(lm, other) for other in lead_set):
            continue
        gens.append({ops[j]: linalg.to_fraction(v) for j, v in sorted(row.items())})
        lms.append(lm)
    return AnnihilatorResult(tuple(gens), tuple(lms), standard, len(standard), V.dim)


def format_poly(p: Poly, names: Sequence[str]) -> str:
    """Terms in grlex-descending order, e.g. ``xi1^2 - xi2``."""
    from .jets import monomial_index
    items = sorted(p.items(), key=lambda kv: (-kv[0].order, monomial_index(len(kv[0]), kv[0].order)[kv[0]]))
    out = ""
    for k, (mu, c) in enumerate(items):
        factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, mu) if e]
        mono = "*".join(factors)
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if k == 0:
            out = ("-" if c < 0 else "") + body
        else:
            out += (" - " if c < 0 else " + ") + body
    return out or "0"
