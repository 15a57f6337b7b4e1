"""Hilbert data, Cartan characters, slopes and stability, obstruction
gradings and the Sweeney bound.

Polynomials are in one variable t.  ``hilbert_polynomial`` is the eventual
per-degree dimension dim N^t of the symbol; ``cumulative_hilbert_polynomial``
is its running sum sum_{i<=t} dim N^i.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Sequence

import flint

from . import linalg
from .jets import JetSystem, LinDiffPoly, JetVariable, ideal_slice, equation_vector
from .spencer import (NotStabilized, SpencerTable, cartan_test, involutivity_degree,
                      spencer_table)
from .symbols import SymbolFamily, WindowTooSmall, symbol_family

__all__ = [
    "NumericalPolynomial",
    "Comparison",
    "StabilityVerdict",
    "NotInvolutive",
    "CandidateNotSubideal",
    "ZeroRank",
    "hilbert_function",
    "hilbert_polynomial",
    "cumulative_hilbert_polynomial",
    "dhilbert_via_spencer",
    "cartan_characters",
    "predict_characters",
    "involutive_cartan_degree",
    "rank_of_ideal",
    "reduced_polynomial",
    "spencer_slope",
    "compare_poly_eventually",
    "is_spencer_semistable",
    "polystable_decomposition",
    "block_systems",
    "obstruction_grading",
    "sweeney_bound",
    "functional_dimension",
]


class NotInvolutive(RuntimeError):
    pass


class CandidateNotSubideal(ValueError):
    pass


class ZeroRank(ValueError):
    pass


class RankZeroWarning(UserWarning):
    pass


class NumericalPolynomial:
    """Rational polynomial in t (immutable wrapper around ``flint.fmpq_poly``)."""

    __slots__ = ("_p",)

    def __init__(self, coeffs: Iterable = ()):
        if isinstance(coeffs, flint.fmpq_poly):
            self._p = coeffs
        else:
            self._p = flint.fmpq_poly([linalg.to_fmpq(c) for c in coeffs])

    @classmethod
    def constant(cls, c) -> "NumericalPolynomial":
        return cls([c])

    @classmethod
    def binomial(cls, shift: int, k: int) -> "NumericalPolynomial":
        """binom(t + shift, k) as a polynomial in t."""
        p = flint.fmpq_poly([1])
        for i in range(k):
            p *= flint.fmpq_poly([shift - i, 1])
        return cls(p / factorial(k))

    @classmethod
    def interpolate(cls, points: Sequence[tuple[int, int]]) -> "NumericalPolynomial":
        acc = flint.fmpq_poly([])
        for i, (xi, yi) in enumerate(points):
            term = flint.fmpq_poly([linalg.to_fmpq(yi)])
            for j, (xj, _) in enumerate(points):
                if j != i:
                    term *= flint.fmpq_poly([-xj, 1]) / (xi - xj)
            acc += term
        return cls(acc)

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        """Low degree first; the zero polynomial has no coefficients."""
        return tuple(linalg.to_fraction(c) for c in self._p.coeffs())

    @property
    def degree(self) -> int:
        return self._p.degree()

    @property
    def leading_coefficient(self) -> Fraction:
        if self._p.is_zero():
            return Fraction(0)
        return linalg.to_fraction(self._p.leading_coefficient())

    def coefficient(self, d: int) -> Fraction:
        c = self.coefficients
        return c[d] if 0 <= d < len(c) else Fraction(0)

    def __call__(self, t) -> Fraction:
        return linalg.to_fraction(self._p(linalg.to_fmpq(t)))

    def __add__(self, other):
        return NumericalPolynomial(self._p + _as_poly(other))

    __radd__ = __add__

    def __sub__(self, other):
        return NumericalPolynomial(self._p - _as_poly(other))

    def __mul__(self, other):
        return NumericalPolynomial(self._p * _as_poly(other))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return NumericalPolynomial(self._p / linalg.to_fmpq(c))

    def shifted(self, s: int) -> "NumericalPolynomial":
        """P(t + s)."""
        out = flint.fmpq_poly([])
        for d, c in enumerate(self._p.coeffs()):
            out += c * flint.fmpq_poly([s, 1]) ** d
        return NumericalPolynomial(out)

    def __eq__(self, other):
        if isinstance(other, NumericalPolynomial):
            return self._p == other._p
        if isinstance(other, (int, Fraction)):
            return self._p == _as_poly(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.coefficients)

    def is_integer_valued(self, start: int = 0, samples: int = 4) -> bool:
        return all(self(t).denominator == 1 for t in range(start, start + samples))

    def to_string(self, var: str = "t") -> str:
        """Deterministic human form, e.g. ``t/2 + 1`` or ``3*t^2 - t``."""
        coeffs = self.coefficients
        if not coeffs:
            return "0"
        parts = []
        for d in range(len(coeffs) - 1, -1, -1):
            c = coeffs[d]
            if c == 0:
                continue
            neg, a = c < 0, abs(c)
            mono = "" if d == 0 else (var if d == 1 else f"{var}^{d}")
            if not mono:
                body = str(a)
            elif a.denominator != 1 and a.numerator == 1:
                body = f"{mono}/{a.denominator}"
            elif a == 1:
                body = mono
            elif a.denominator == 1:
                body = f"{a.numerator}*{mono}"
            else:
                body = f"{a.numerator}*{mono}/{a.denominator}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append(("- " if neg else "+ ") + body)
        return " ".join(parts)

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"NumericalPolynomial({self.to_string()!r})"


def _as_poly(x) -> flint.fmpq_poly:
    if isinstance(x, NumericalPolynomial):
        return x._p
    return flint.fmpq_poly([linalg.to_fmpq(x)])


# -- Hilbert data ------------------------------------------------------------

def hilbert_function(f: SymbolFamily) -> dict[str, list[int]]:
    per = f.dims
    cumulative, acc = [], 0
    for d in per:
        acc += d
        cumulative.append(acc)
    return {"per_degree": per, "cumulative": cumulative}


def _stable_start(f: SymbolFamily, table: SpencerTable | None) -> int:
    try:
        return involutivity_degree(table if table is not None else spencer_table(f))
    except WindowTooSmall as exc:
        raise NotStabilized(str(exc)) from None


def hilbert_polynomial(f: SymbolFamily, table: SpencerTable | None = None) -> NumericalPolynomial:
    """Interpolate dim N^q on q >= involutivity degree; the rest of the window
    must agree exactly."""
    q0 = _stable_start(f, table)
    dims = f.dims
    pts = [(q, dims[q]) for q in range(q0, f.qmax + 1)]
    need = max(f.n, 1)
    if len(pts) < need + 1:
        raise NotStabilized(f"only {len(pts)} points from q0={q0}; need {need + 1}")
    P = NumericalPolynomial.interpolate(pts[:need])
    for q, d in pts[need:]:
        if P(q) != d:
            raise NotStabilized(f"interpolant misses dim N^{q} = {d}")
    return P


def cumulative_hilbert_polynomial(f: SymbolFamily, table: SpencerTable | None = None) -> NumericalPolynomial:
    """Q(t) = sum_{i<=t} dim N^i for t >= the involutivity degree."""
    P = hilbert_polynomial(f, table)
    q0 = _stable_start(f, table)
    head = sum(f.dims[:q0])
    # Q(t) = head + sum_{q0<=i<=t} P(i); degree deg P + 1, fixed by deg+2 values
    pts, acc = [], head
    for t in range(q0, q0 + P.degree + 3):
        acc += P(t)
        pts.append((t, acc))
    return NumericalPolynomial.interpolate(pts)


def dhilbert_via_spencer(t: SpencerTable, n: int | None = None) -> NumericalPolynomial:
    """sum over the table of (-1)^p h[q][p] binom(z - q + n - 1, n - 1).

    h[q][p] sits at N^{q-p} (x) Λ^p; the alternating sum over the finite
    Koszul resolution of the dual module gives the per-degree dimension.
    """
    n = t.n if n is None else n
    P = NumericalPolynomial()
    for (q, p), h in sorted(t.nonzero().items()):
        sign = -1 if p % 2 else 1
        P = P + NumericalPolynomial.binomial(n - 1 - q, n - 1) * (sign * h)
    return P


def functional_dimension(P: NumericalPolynomial) -> int:
    """Number of variables the general solution depends on: 1 + deg P (0 if P = 0)."""
    return 0 if P == 0 else P.degree + 1


# -- characters --------------------------------------------------------------

def cartan_characters(f: SymbolFamily, q: int, seed: int = 0) -> tuple[int, ...]:
    res = cartan_test(f, q, seed)
    if not res.involutive:
        raise NotInvolutive(f"Cartan's test fails at q={q} ({res.dim_next} != {res.bound})")
    return res.characters


def predict_characters(chars: Sequence[int], r: int) -> tuple[int, ...]:
    """Characters r degrees higher: alpha^(l) -> sum_{j>=l} binom(r+j-l-1, r-1) alpha^(j)."""
    if r == 0:
        return tuple(chars)
    n = len(chars)
    return tuple(sum(comb(r + j - l - 1, r - 1) * chars[j - 1] for j in range(l, n + 1))
                 for l in range(1, n + 1))


def involutive_cartan_degree(f: SymbolFamily, seed: int = 0) -> int:
    """Least q >= order at which Cartan's test passes."""
    for q in range(f.order, f.qmax):
        if cartan_test(f, q, seed).involutive:
            return q
    raise NotStabilized(f"Cartan's test never passes below {f.qmax}")


def rank_of_ideal(f: SymbolFamily, seed: int = 0) -> int:
    q = involutive_cartan_degree(f, seed)
    return cartan_characters(f, q, seed)[0] if f.n else f.component(q).dim


# -- slopes and stability ----------------------------------------------------

def reduced_polynomial(P: NumericalPolynomial, rank: int) -> NumericalPolynomial:
    if rank <= 0:
        raise ZeroRank("reduced polynomial needs positive rank")
    return P / rank


def spencer_slope(P: NumericalPolynomial, rank: int, degree: int | None = None) -> Fraction:
    """Coefficient of t^degree in P/rank; ``degree`` defaults to deg P."""
    if rank <= 0:
        raise ZeroRank("slope needs positive rank")
    d = P.degree if degree is None else degree
    return P.coefficient(d) / rank


class Comparison(Enum):
    LESS = "Less"
    EQUAL = "Equal"
    GREATER = "Greater"


def compare_poly_eventually(P: NumericalPolynomial, Q: NumericalPolynomial) -> Comparison:
    top = max(P.degree, Q.degree, 0)
    for d in range(top, -1, -1):
        a, b = P.coefficient(d), Q.coefficient(d)
        if a != b:
            return Comparison.LESS if a < b else Comparison.GREATER
    return Comparison.EQUAL


@dataclass(frozen=True)
class Witness:
    candidate: str
    outcome: Comparison
    reduced: NumericalPolynomial
    slope: Fraction


@dataclass(frozen=True)
class StabilityVerdict:
    semistable: bool
    stable: bool
    reduced: NumericalPolynomial
    slope: Fraction
    witnesses: tuple[Witness, ...] = ()


@dataclass(frozen=True)
class _Analysis:
    family: SymbolFamily
    table: SpencerTable
    degree: int
    poly: NumericalPolynomial
    rank: int


def _analyze(s: JetSystem, qmax: int | None, seed: int) -> _Analysis:
    qmax = s.order + s.n + 4 if qmax is None else qmax
    f = symbol_family(s, qmax)
    t = spencer_table(f)
    try:
        deg = involutivity_degree(t)
    except NotStabilized:
        raise NotInvolutive(f"{s.name!r} is not involutive within degree {qmax}") from None
    return _Analysis(f, t, deg, hilbert_polynomial(f, t), rank_of_ideal(f, seed))


def _embed(c: JetSystem, s: JetSystem) -> list[LinDiffPoly]:
    if tuple(c.independent) != tuple(s.independent):
        raise CandidateNotSubideal(f"{c.name!r} has different independent variables")
    idx = {u: a for a, u in enumerate(s.dependent)}
    missing = [u for u in c.dependent if u not in idx]
    if missing:
        raise CandidateNotSubideal(f"{c.name!r} uses unknown dependents {missing}")
    out = []
    for F in c.equations:
        terms = {JetVariable(idx[c.dependent[v.dependent]], v.index): k for v, k in F.terms.items()}
        out.append(LinDiffPoly(terms, F.constant))
    return out


def _check_subideal(c: JetSystem, s: JetSystem) -> None:
    eqs = _embed(c, s)
    if not eqs:
        return
    k = max(max(F.order for F in eqs), s.order)
    span = ideal_slice(s, k).span
    for F in eqs:
        if not span.contains(equation_vector(F, s.n, s.m, k)):
            raise CandidateNotSubideal(f"equation of {c.name!r} not in the ideal of {s.name!r}")


def is_spencer_semistable(s: JetSystem, candidates: Sequence[JetSystem] = (),
                          qmax: int | None = None, seed: int = 0) -> StabilityVerdict:
    """Compare reduced polynomials of candidate sub-blocks against s.

    Each candidate is a standalone system on a subset of s's dependents
    whose equations lie in the ideal generated by s.  Candidates with the
    full set of dependents are not proper and only count toward
    semistability.  Slopes are taken at the degree of s's polynomial so
    that the slope inequality follows from the polynomial comparison.
    """
    a = _analyze(s, qmax, seed)
    red = reduced_polynomial(a.poly, a.rank)
    d = max(a.poly.degree, 0)
    witnesses = []
    semi = stable = True
    for c in candidates:
        _check_subideal(c, s)
        ca = _analyze(c, qmax, seed)
        cred = reduced_polynomial(ca.poly, ca.rank)
        out = compare_poly_eventually(cred, red)
        witnesses.append(Witness(c.name, out, cred, spencer_slope(ca.poly, ca.rank, d)))
        proper = set(c.dependent) != set(s.dependent)
        if out is Comparison.GREATER:
            semi = stable = False
        elif out is Comparison.EQUAL and proper:
            stable = False
    return StabilityVerdict(semi, stable and semi, red, spencer_slope(a.poly, a.rank, d), tuple(witnesses))


def _components(s: JetSystem) -> list[tuple[list[int], list[int]]]:
    """Connected components of the dependent/equation incidence graph."""
    parent = list(range(s.m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for F in s.equations:
        deps = sorted({v.dependent for v in F.terms})
        for d in deps[1:]:
            parent[find(d)] = find(deps[0])
    groups: dict[int, list[int]] = {}
    for a in range(s.m):
        groups.setdefault(find(a), []).append(a)
    out = []
    for deps in sorted(groups.values()):
        ds = set(deps)
        eqs = [k for k, F in enumerate(s.equations) if F.terms and {v.dependent for v in F.terms} <= ds]
        out.append((deps, eqs))
    return out


def block_systems(s: JetSystem) -> list[JetSystem]:
    blocks = []
    for deps, eqs in _components(s):
        remap = {a: i for i, a in enumerate(deps)}
        equations = []
        for k in eqs:
            F = s.equations[k]
            equations.append(LinDiffPoly({JetVariable(remap[v.dependent], v.index): c
                                          for v, c in F.terms.items()}, F.constant))
        name = f"{s.name}[{','.join(s.dependent[a] for a in deps)}]"
        blocks.append(JetSystem(name, s.independent, tuple(s.dependent[a] for a in deps),
                                tuple(equations), s.declared_order))
    return blocks


@dataclass(frozen=True)
class PolystableResult:
    blocks: tuple[JetSystem, ...]
    slopes: tuple[Fraction, ...]
    polystable: bool
    degree: int


def polystable_decomposition(s: JetSystem, qmax: int | None = None, seed: int = 0) -> PolystableResult:
    """Split into connected blocks; polystable iff all block slopes agree.

    A connected block has no proper coordinate sub-block closed under its
    equations, so each block is stable in the coordinate sense.  Slopes
    are compared at the largest polynomial degree among the blocks.
    """
    blocks = block_systems(s)
    analyses = [_analyze(b, qmax, seed) for b in blocks]
    d = max((a.poly.degree for a in analyses), default=0)
    d = max(d, 0)
    slopes = []
    for b, a in zip(blocks, analyses):
        if a.rank == 0:
            warnings.warn(f"block {b.name!r} has rank 0; slope undefined", RankZeroWarning, stacklevel=2)
            return PolystableResult(tuple(blocks), (), False, d)
        slopes.append(spencer_slope(a.poly, a.rank, d))
    return PolystableResult(tuple(blocks), tuple(slopes), len(set(slopes)) <= 1, d)


# -- bounds ------------------------------------------------------------------

def obstruction_grading(t: SpencerTable, reg: int) -> list[int]:
    if reg - 1 > t.qmax:
        raise WindowTooSmall(f"table stops at {t.qmax}, grading needs levels below {reg}")
    return [t.entry(q, 1) for q in range(reg)]


@lru_cache(maxsize=None)
def _rho1(n: int, m: int) -> int:
    if n == 0:
        return 0
    a = _rho1(n - 1, m)
    return m * comb(a + n, n - 1) + a + 1


def sweeney_bound(n: int, m: int, k: int) -> int:
    if not all(isinstance(v, int) for v in (n, m, k)) or n < 0 or m < 1 or k < 1:
        raise ValueError(f"invalid arguments n={n}, m={m}, k={k}")
    if k == 1:
        return _rho1(n, m)
    b = sum(comb(l + n - 1, n - 1) for l in range(k + 1)) * m
    return _rho1(n, b)
