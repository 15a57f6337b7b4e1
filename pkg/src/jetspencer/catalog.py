"""Named generators for classical systems, with oracle records.

Names and parameters are stable: ``make_system("laplace")``,
``make_system("full", n=2, m=3, k=1)``, ``make_system("closed_one_form", n=3)``.
The string form ``name:a,b`` (used by the CLI) maps positional values onto
the parameters in declaration order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable

from .jets import (JetSystem, JetVariable, LinDiffPoly, MultiIndex, NonlinearPoly,
                   NonlinearSystem)

__all__ = ["CatalogEntry", "CATALOG", "NONLINEAR", "make_system", "make_nonlinear",
           "linearize_at_zero_jet", "parse_catalog_spec", "UnknownSystem", "DegenerateLinearization"]


class UnknownSystem(KeyError):
    pass


class DegenerateLinearization(ValueError):
    pass


def _x(n):
    if n == 2:
        return ("x", "y")
    if n == 3:
        return ("x", "y", "z")
    return tuple(f"x{i + 1}" for i in range(n))


def _var(n, alpha, *dirs):
    e = [0] * n
    for d in dirs:
        e[d] += 1
    return JetVariable(alpha, MultiIndex(e))


def _eq(*terms):
    return LinDiffPoly({v: Fraction(c) for c, v in terms})


def _check_n(n, lo=1):
    if not isinstance(n, int) or n < lo:
        raise ValueError(f"n must be an integer >= {lo}")


def full(n: int = 2, m: int = 1, k: int = 1) -> JetSystem:
    _check_n(n)
    if m < 1 or k < 0:
        raise ValueError("need m >= 1, k >= 0")
    return JetSystem(f"full({n},{m},{k})", _x(n), tuple(f"u{a + 1}" for a in range(m)) if m > 1 else ("u",),
                     (), k)


def cauchy_riemann() -> JetSystem:
    return JetSystem("cauchy_riemann", ("x", "y"), ("u", "v"), (
        _eq((1, _var(2, 0, 0)), (-1, _var(2, 1, 1))),
        _eq((1, _var(2, 0, 1)), (1, _var(2, 1, 0))),
    ))


def laplace(n: int = 2) -> JetSystem:
    _check_n(n)
    return JetSystem("laplace" if n == 2 else f"laplace({n})", _x(n), ("u",),
                     (_eq(*((1, _var(n, 0, i, i)) for i in range(n))),))


def wave(n: int = 2) -> JetSystem:
    _check_n(n, 2)
    terms = [(1, _var(n, 0, 0, 0))] + [(-1, _var(n, 0, i, i)) for i in range(1, n)]
    return JetSystem("wave" if n == 2 else f"wave({n})", ("t",) + _x(n - 1) if n > 2 else ("t", "x"),
                     ("u",), (_eq(*terms),))


def heat() -> JetSystem:
    return JetSystem("heat", ("t", "x"), ("u",),
                     (_eq((1, _var(2, 0, 0)), (-1, _var(2, 0, 1, 1))),))


def closed_one_form(n: int = 2) -> JetSystem:
    """d h = 0 for a 1-form h = sum h_i dx_i."""
    _check_n(n)
    eqs = [_eq((1, _var(n, j, i)), (-1, _var(n, i, j))) for i, j in combinations(range(n), 2)]
    return JetSystem(f"closed_one_form({n})", _x(n), tuple(f"h{i + 1}" for i in range(n)), tuple(eqs), 1)


def gradient(n: int = 2) -> JetSystem:
    """The de Rham differential on functions: d u = 0."""
    _check_n(n)
    return JetSystem(f"gradient({n})", _x(n), ("u",), tuple(_eq((1, _var(n, 0, i))) for i in range(n)))


def de_rham_1forms(n: int = 3) -> JetSystem:
    """d on 1-forms; same equations as closed_one_form, kept as its own entry."""
    s = closed_one_form(n)
    return JetSystem(f"de_rham_1forms({n})", s.independent, s.dependent, s.equations, 1)


def flat_connection_linearized(n: int = 2, m: int = 1) -> JetSystem:
    """d_j h_i^a - d_i h_j^a = 0, i < j, at the trivial connection."""
    _check_n(n)
    if m < 1:
        raise ValueError("m must be >= 1")
    dep, idx = [], {}
    for a in range(m):
        for i in range(n):
            idx[(i, a)] = len(dep)
            dep.append(f"h{i + 1}" if m == 1 else f"h{i + 1}_{a + 1}")
    eqs = []
    for a in range(m):
        for i, j in combinations(range(n), 2):
            eqs.append(_eq((1, _var(n, idx[(i, a)], j)), (-1, _var(n, idx[(j, a)], i))))
    return JetSystem(f"flat_connection_linearized({n},{m})", _x(n), tuple(dep), tuple(eqs), 1)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    params: tuple[str, ...]
    generator: Callable[..., JetSystem]
    expected: dict = field(default_factory=dict)
    description: str = ""


CATALOG: dict[str, CatalogEntry] = {e.name: e for e in (
    CatalogEntry("full", ("n", "m", "k"), full, {}, "no equations: every jet is free"),
    CatalogEntry("cauchy_riemann", (), cauchy_riemann,
                 {"dims": [2, 2, 2, 2, 2, 2], "nonzero": {(1, 1): 2}, "degree": 2,
                  "polynomial": "2", "characters": (2, 0), "rank": 2},
                 "u_x = v_y, u_y = -v_x"),
    CatalogEntry("laplace", ("n",), laplace,
                 {"dims": [1, 2, 2, 2, 2, 2], "nonzero": {(2, 1): 1}, "degree": 3,
                  "polynomial": "2", "characters": (2, 0), "rank": 2},
                 "sum of pure second derivatives"),
    CatalogEntry("wave", ("n",), wave,
                 {"dims": [1, 2, 2, 2, 2, 2], "degree": 3, "polynomial": "2"},
                 "u_tt minus the spatial Laplacian"),
    CatalogEntry("heat", (), heat,
                 {"dims": [1, 2, 2, 2, 2, 2], "degree": 3, "polynomial": "2"},
                 "u_t - u_xx (second-order part only in the symbol)"),
    CatalogEntry("closed_one_form", ("n",), closed_one_form,
                 {"dims": [2, 3, 4, 5, 6], "nonzero": {(1, 1): 1}, "degree": 2,
                  "polynomial": "t + 2", "characters": (2, 1), "rank": 2},
                 "d h = 0 for a 1-form h"),
    CatalogEntry("gradient", ("n",), gradient,
                 {"dims": [1, 0, 0, 0], "degree": 3, "polynomial": "0"},
                 "du = 0 (de Rham differential on functions)"),
    CatalogEntry("de_rham_1forms", ("n",), de_rham_1forms, {},
                 "d on 1-forms"),
    CatalogEntry("flat_connection_linearized", ("n", "m"), flat_connection_linearized,
                 {}, "flat-connection equations linearized at the trivial connection"),
)}


def parse_catalog_spec(spec: str) -> tuple[str, dict]:
    name, _, rest = spec.partition(":")
    name = name.strip()
    if name not in CATALOG and name not in NONLINEAR:
        raise UnknownSystem(name)
    params = CATALOG[name].params if name in CATALOG else NONLINEAR[name][1]
    values = [v.strip() for v in rest.split(",") if v.strip()] if rest else []
    if len(values) > len(params):
        raise ValueError(f"{name} takes at most {len(params)} parameters")
    try:
        return name, {p: int(v) for p, v in zip(params, values)}
    except ValueError:
        raise ValueError(f"parameters of {name} must be integers") from None


def make_system(name: str, **params) -> JetSystem:
    if ":" in name:
        name, parsed = parse_catalog_spec(name)
        params = {**parsed, **params}
    if name in NONLINEAR:
        return linearize_at_zero_jet(make_nonlinear(name, **params))
    if name not in CATALOG:
        raise UnknownSystem(name)
    entry = CATALOG[name]
    unknown = set(params) - set(entry.params)
    if unknown:
        raise ValueError(f"{name} does not take {sorted(unknown)}")
    return entry.generator(**params)


# -- nonlinear entries ---------------------------------------------------------

def _mono(*vs):
    return tuple(vs)


def flat_connection(n: int = 2, m: int = 1) -> NonlinearSystem:
    """Flatness of a connection g_i^b(x, u) on the trivial bundle.

    Independent variables x_1..x_n, u_1..u_m; dependents g_i^b.  For i < j:
    d_j g_i^b + sum_c g_j^c d_{u_c} g_i^b - d_i g_j^b - sum_c g_i^c d_{u_c} g_j^b = 0.
    """
    _check_n(n)
    N = n + m
    indep = _x(n) if n > 1 else ("x",)
    indep = tuple(indep) + tuple(f"u{c + 1}" if m > 1 else "u" for c in range(m))
    dep, idx = [], {}
    for b in range(m):
        for i in range(n):
            idx[(i, b)] = len(dep)
            dep.append(f"g{i + 1}" if m == 1 else f"g{i + 1}_{b + 1}")
    eqs = []
    for b in range(m):
        for i, j in combinations(range(n), 2):
            terms = {
                _mono(_var(N, idx[(i, b)], j)): 1,
                _mono(_var(N, idx[(j, b)], i)): -1,
            }
            for c in range(m):
                uc = n + c
                terms[_mono(_var(N, idx[(j, c)]), _var(N, idx[(i, b)], uc))] = 1
                terms[_mono(_var(N, idx[(i, c)]), _var(N, idx[(j, b)], uc))] = -1
            eqs.append(NonlinearPoly(terms))
    return NonlinearSystem(f"flat_connection({n},{m})", indep, tuple(dep), tuple(eqs))


def burgers() -> NonlinearSystem:
    u_t, u_x, u_xx, u = _var(2, 0, 0), _var(2, 0, 1), _var(2, 0, 1, 1), _var(2, 0)
    return NonlinearSystem("burgers", ("t", "x"), ("u",),
                           (NonlinearPoly({(u_t,): 1, (u, u_x): 1, (u_xx,): -1}),))


NONLINEAR: dict[str, tuple[Callable[..., NonlinearSystem], tuple[str, ...]]] = {
    "flat_connection": (flat_connection, ("n", "m")),
    "burgers": (burgers, ()),
}


def make_nonlinear(name: str, **params) -> NonlinearSystem:
    if name not in NONLINEAR:
        raise UnknownSystem(name)
    return NONLINEAR[name][0](**params)


def linearize_at_zero_jet(s: NonlinearSystem | JetSystem) -> JetSystem:
    """Keep the terms of jet-degree <= 1; a linear system is returned as is."""
    if isinstance(s, JetSystem):
        return s
    eqs = []
    for F in s.equations:
        lin = F.linear_part()
        if lin.terms:
            eqs.append(lin)
    if not eqs:
        raise DegenerateLinearization(f"{s.name!r} has zero linear part at the zero jet")
    return JetSystem(f"{s.name}|lin", s.independent, s.dependent, tuple(eqs))
