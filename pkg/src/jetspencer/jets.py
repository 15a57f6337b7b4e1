"""Jet coordinates, linear differential polynomials and PDE systems.

A system is stored in jet coordinates: each equation is a rational linear
combination of jet variables u^alpha_sigma plus a constant.  Coefficients
do not depend on the independent variables, so prolongation is a pure
index shift.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Mapping, NamedTuple

from . import linalg

__all__ = [
    "MultiIndex",
    "JetVariable",
    "LinDiffPoly",
    "JetSystem",
    "FilteredIdealSlice",
    "PureOrderWarning",
    "monomials",
    "monomial_index",
    "sym_dim",
    "total_derivative",
    "prolong_system",
    "ideal_slice",
    "h_krull",
    "direct_sum",
    "NonlinearPoly",
    "NonlinearSystem",
]


class PureOrderWarning(UserWarning):
    """Raised (as a warning) when an analysis needs a pure-order system."""


class MultiIndex(tuple):
    """Exponent vector over the independent variables."""

    def __new__(cls, exponents: Iterable[int] = ()):
        exps = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exps):
            raise ValueError(f"negative exponent in {exps}")
        return super().__new__(cls, exps)

    @classmethod
    def zero(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "MultiIndex":
        return cls(1 if j == i else 0 for j in range(n))

    @property
    def order(self) -> int:
        return sum(self)

    def raised(self, i: int, by: int = 1) -> "MultiIndex":
        return MultiIndex(e + by if j == i else e for j, e in enumerate(self))

    def __add__(self, other):
        if len(other) != len(self):
            raise ValueError("multi-index length mismatch")
        return MultiIndex(a + b for a, b in zip(self, other))

    def __repr__(self):
        return f"MultiIndex{tuple(self)}"


@lru_cache(maxsize=None)
def monomials(n: int, q: int) -> tuple[MultiIndex, ...]:
    """Exponent vectors of degree q in n variables, graded-lex order.

    Within one degree the order is lexicographic descending, so x1^q comes
    first.  This order is fixed for every matrix built in the package.
    """
    if q < 0:
        return ()
    if n == 0:
        return (MultiIndex(()),) if q == 0 else ()

    def gen(k, rest):
        if k == 1:
            yield (rest,)
            return
        for a in range(rest, -1, -1):
            for tail in gen(k - 1, rest - a):
                yield (a,) + tail

    return tuple(MultiIndex(e) for e in gen(n, q))


@lru_cache(maxsize=None)
def monomial_index(n: int, q: int) -> dict[MultiIndex, int]:
    return {m: i for i, m in enumerate(monomials(n, q))}


def sym_dim(n: int, q: int) -> int:
    """dim Sym^q of an n-dimensional space: binom(n+q-1, q)."""
    if q < 0:
        return 0
    if n == 0:
        return 1 if q == 0 else 0
    return comb(n + q - 1, q)


class JetVariable(NamedTuple):
    dependent: int
    index: MultiIndex

    @property
    def order(self) -> int:
        return self.index.order

    def sort_key(self):
        # higher order first, then dependent, then graded-lex position
        return (-self.order, self.dependent, tuple(-e for e in self.index))


@dataclass(frozen=True)
class LinDiffPoly:
    """sum_k c_k u^{alpha_k}_{sigma_k} + constant, with c_k != 0."""

    terms: Mapping[JetVariable, Fraction] = field(default_factory=dict)
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        clean = {}
        for v, c in self.terms.items():
            c = Fraction(c)
            if c != 0:
                clean[JetVariable(v[0], MultiIndex(v[1]))] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "constant", Fraction(self.constant))

    @classmethod
    def variable(cls, dependent: int, index: Iterable[int], coeff=1) -> "LinDiffPoly":
        return cls({JetVariable(dependent, MultiIndex(index)): Fraction(coeff)})

    @property
    def order(self) -> int:
        """Highest derivative order; -1 for a pure constant."""
        return max((v.order for v in self.terms), default=-1)

    @property
    def is_constant(self) -> bool:
        return not self.terms

    def top_part(self) -> dict[JetVariable, Fraction]:
        k = self.order
        return {v: c for v, c in self.terms.items() if v.order == k}

    def sorted_terms(self) -> list[tuple[JetVariable, Fraction]]:
        return sorted(self.terms.items(), key=lambda vc: vc[0].sort_key())

    def __add__(self, other: "LinDiffPoly") -> "LinDiffPoly":
        t = dict(self.terms)
        for v, c in other.terms.items():
            t[v] = t.get(v, Fraction(0)) + c
        return LinDiffPoly(t, self.constant + other.constant)

    def __neg__(self):
        return self.scaled(-1)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c) -> "LinDiffPoly":
        c = Fraction(c)
        return LinDiffPoly({v: c * a for v, a in self.terms.items()}, c * self.constant)

    def __eq__(self, other):
        if not isinstance(other, LinDiffPoly):
            return NotImplemented
        return self.terms == other.terms and self.constant == other.constant

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.constant))

    def __repr__(self):
        parts = [f"{c}*u{v.dependent}{tuple(v.index)}" for v, c in self.sorted_terms()]
        if self.constant or not parts:
            parts.append(str(self.constant))
        return "LinDiffPoly(" + " + ".join(parts) + ")"


def total_derivative(p: LinDiffPoly, i: int) -> LinDiffPoly:
    """D_i: u^a_sigma -> u^a_{sigma + 1_i}; constants vanish."""
    n = None
    for v in p.terms:
        n = len(v.index)
        break
    if n is not None and not 0 <= i < n:
        raise IndexError(f"direction {i} out of range for n={n}")
    return LinDiffPoly({JetVariable(v.dependent, v.index.raised(i)): c for v, c in p.terms.items()})


@dataclass(frozen=True)
class JetSystem:
    """A linear constant-coefficient PDE system in jet coordinates.

    ``declared_order`` only matters for the equation-free ("full") system,
    whose order is otherwise undefined.
    """

    name: str
    independent: tuple[str, ...]
    dependent: tuple[str, ...]
    equations: tuple[LinDiffPoly, ...] = ()
    declared_order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "independent", tuple(self.independent))
        object.__setattr__(self, "dependent", tuple(self.dependent))
        object.__setattr__(self, "equations", tuple(self.equations))
        if self.equations:
            object.__setattr__(self, "declared_order", 0)
        n, m = len(self.independent), len(self.dependent)
        if len(set(self.independent)) != n or len(set(self.dependent)) != m:
            raise ValueError("duplicate variable names")
        if set(self.independent) & set(self.dependent):
            raise ValueError("a name is both independent and dependent")
        for eq in self.equations:
            for v in eq.terms:
                if len(v.index) != n or not 0 <= v.dependent < m:
                    raise ValueError(f"equation term {v} does not fit n={n}, m={m}")

    @property
    def n(self) -> int:
        return len(self.independent)

    @property
    def m(self) -> int:
        return len(self.dependent)

    @property
    def order(self) -> int:
        if not self.equations:
            return self.declared_order
        return max(0, max(eq.order for eq in self.equations))

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(eq.order for eq in self.equations)

    @property
    def is_pure_order(self) -> bool:
        return len({o for o in self.orders if o >= 0}) <= 1

    def check_pure_order(self) -> bool:
        if not self.is_pure_order:
            warnings.warn(
                f"system {self.name!r} is not of pure order (orders {sorted(set(self.orders))})",
                PureOrderWarning,
                stacklevel=3,
            )
            return False
        return True

    def with_equations(self, equations, name: str | None = None) -> "JetSystem":
        return JetSystem(name or self.name, self.independent, self.dependent,
                         tuple(equations), self.declared_order)


def prolong_system(s: JetSystem, r: int) -> JetSystem:
    """All D^sigma F_A with |sigma| <= r, grouped by |sigma| then graded-lex."""
    if r < 0:
        raise ValueError("prolongation order must be >= 0")
    eqs = []
    for d in range(r + 1):
        for sigma in monomials(s.n, d):
            for F in s.equations:
                eqs.append(_apply_multi(F, sigma))
    return JetSystem(s.name if r == 0 else f"{s.name}^({r})", s.independent, s.dependent,
                     tuple(eqs), s.declared_order)


def _apply_multi(F: LinDiffPoly, sigma: MultiIndex) -> LinDiffPoly:
    if sigma.order == 0:
        return F
    return LinDiffPoly({JetVariable(v.dependent, v.index + sigma): c for v, c in F.terms.items()})


@lru_cache(maxsize=None)
def jet_coordinates(n: int, m: int, k: int) -> tuple[JetVariable, ...]:
    """Jet variables of order <= k: by order, then dependent, then graded-lex."""
    out = []
    for q in range(k + 1):
        for a in range(m):
            out.extend(JetVariable(a, mu) for mu in monomials(n, q))
    return tuple(out)


@lru_cache(maxsize=None)
def _jet_coordinate_index(n: int, m: int, k: int) -> dict[JetVariable, int]:
    return {v: i for i, v in enumerate(jet_coordinates(n, m, k))}


@dataclass(frozen=True)
class FilteredIdealSlice:
    """Span of the admissible prolonged equations inside order-<=k jets."""

    k: int
    span: linalg.Subspace
    coordinates: tuple[JetVariable, ...]

    @property
    def dim(self) -> int:
        return self.span.dim


def ideal_slice(s: JetSystem, k: int) -> FilteredIdealSlice:
    """F^k I: Span{D^sigma F_A : ord(F_A) + |sigma| <= k}, linear parts only."""
    if k < 0:
        raise ValueError("k must be >= 0")
    coords = jet_coordinates(s.n, s.m, k)
    index = _jet_coordinate_index(s.n, s.m, k)
    entries = {}
    row = 0
    for F in s.equations:
        if F.is_constant:
            continue
        for d in range(k - F.order + 1):
            for sigma in monomials(s.n, d):
                for v, c in F.terms.items():
                    entries[(row, index[JetVariable(v.dependent, v.index + sigma)])] = c
                row += 1
    M = linalg.sparse_matrix(row, len(coords), entries)
    return FilteredIdealSlice(k, linalg.row_space(M), coords)


def h_krull(s: JetSystem, k: int) -> int:
    """dim(F^k A / F^k I) = m * binom(n+k, n) - dim F^k I."""
    return s.m * comb(s.n + k, s.n) - ideal_slice(s, k).dim


def equation_vector(F: LinDiffPoly, n: int, m: int, k: int) -> list[Fraction]:
    """Coordinates of the linear part of F in the order-<=k jet space."""
    index = _jet_coordinate_index(n, m, k)
    vec = [Fraction(0)] * len(index)
    for v, c in F.terms.items():
        vec[index[v]] = c
    return vec


def direct_sum(*systems: JetSystem, name: str | None = None) -> JetSystem:
    """Block-diagonal union on disjoint dependent variables.

    All summands must share the independent variables.  Dependent names are
    kept when they are distinct, otherwise suffixed with the block number.
    """
    if not systems:
        raise ValueError("need at least one system")
    indep = systems[0].independent
    for s in systems:
        if s.independent != indep:
            raise ValueError("summands must share independent variables")
    names = [d for s in systems for d in s.dependent]
    clash = len(set(names)) != len(names)
    dep, eqs, offset = [], [], 0
    for b, s in enumerate(systems):
        dep.extend(f"{d}{b + 1}" if clash else d for d in s.dependent)
        for F in s.equations:
            eqs.append(LinDiffPoly(
                {JetVariable(v.dependent + offset, v.index): c for v, c in F.terms.items()},
                F.constant,
            ))
        offset += s.m
    return JetSystem(name or "+".join(s.name for s in systems), indep, tuple(dep), tuple(eqs),
                     max(s.order for s in systems))


def iter_equation_terms(s: JetSystem) -> Iterator[tuple[int, JetVariable, Fraction]]:
    for a, F in enumerate(s.equations):
        for v, c in F.terms.items():
            yield a, v, c


@dataclass(frozen=True)
class NonlinearPoly:
    """Polynomial in jet variables: monomial (sorted tuple of jet variables) -> coefficient."""

    terms: Mapping[tuple[JetVariable, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for mono, c in self.terms.items():
            c = Fraction(c)
            key = tuple(sorted((JetVariable(v[0], MultiIndex(v[1])) for v in mono),
                               key=JetVariable.sort_key))
            clean[key] = clean.get(key, Fraction(0)) + c
        object.__setattr__(self, "terms", {k: c for k, c in clean.items() if c != 0})

    @property
    def degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    def linear_part(self) -> LinDiffPoly:
        lin = {k[0]: c for k, c in self.terms.items() if len(k) == 1}
        return LinDiffPoly(lin, self.terms.get((), Fraction(0)))


@dataclass(frozen=True)
class NonlinearSystem:
    name: str
    independent: tuple[str, ...]
    dependent: tuple[str, ...]
    equations: tuple[NonlinearPoly, ...]

    @property
    def n(self) -> int:
        return len(self.independent)

    @property
    def m(self) -> int:
        return len(self.dependent)
