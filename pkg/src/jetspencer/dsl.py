"""Line-oriented text format for PDE systems.

::

    # comment
    system laplace
    independent x, y
    dependent u
    eq: D[u,x,x] + D[u,y,y] = 0

``D[u,x,x]`` is the jet variable u_xx; ``D[u]`` (or bare ``u``) is u
itself.  Coefficients are integers or ``p/q`` rationals written as
``3/2*D[u,x]``.  In the default linear mode a product of two jet variables
is rejected; ``nonlinear=True`` accepts polynomial terms and returns a
:class:`~jetspencer.jets.NonlinearSystem`.
"""

from __future__ import annotations

import re
from collections import Counter
from fractions import Fraction

from .jets import (JetSystem, JetVariable, LinDiffPoly, MultiIndex, NonlinearPoly,
                   NonlinearSystem)

__all__ = ["DSLError", "parse_system", "format_system", "format_poly"]


class DSLError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line, self.column = line, column
        loc = f"line {line}, column {column}: " if line else ""
        super().__init__(loc + message)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\s*/\s*\d+)?)|(?P<id>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*\[\],=]))")


def _tokenize(text: str, line: int, col0: int):
    pos, out = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise DSLError(f"unexpected character {text[bad]!r}", line, col0 + bad + 1)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), col0 + start + 1))
        pos = m.end()
    out.append(("end", "", col0 + len(text) + 1))
    return out


class _ExprParser:
    def __init__(self, tokens, line, indep, dep, nonlinear):
        self.toks, self.i, self.line = tokens, 0, line
        self.indep = {x: i for i, x in enumerate(indep)}
        self.dep = {u: a for a, u in enumerate(dep)}
        self.nonlinear = nonlinear

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None, kind=None):
        tok = self.toks[self.i]
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value or kind
            got = tok[1] or "end of line"
            raise DSLError(f"expected {want!r}, found {got!r}", self.line, tok[2])
        self.i += 1
        return tok

    def expr(self) -> dict:
        """Returns {monomial tuple: coefficient}."""
        acc: dict = {}
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        self._add(acc, self.term(), sign)
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = -1 if self.take()[1] == "-" else 1
            self._add(acc, self.term(), sign)
        return acc

    @staticmethod
    def _add(acc, term, sign):
        mono, c = term
        acc[mono] = acc.get(mono, Fraction(0)) + sign * c

    def term(self):
        coeff = Fraction(1)
        factors = []
        col = self.peek()[2]
        while True:
            kind, val, c = self.peek()
            if kind == "num":
                self.take()
                coeff *= Fraction(val.replace(" ", ""))
            elif kind == "id":
                factors.append(self.factor())
            else:
                raise DSLError(f"expected a term, found {val or 'end of line'!r}", self.line, c)
            if self.peek()[1] == "*" and self.peek()[0] == "op":
                self.take()
                continue
            break
        if len(factors) > 1 and not self.nonlinear:
            raise DSLError("nonlinear term (product of jet variables) not allowed in linear mode",
                           self.line, col)
        key = tuple(sorted(factors, key=JetVariable.sort_key))
        return key, coeff

    def factor(self) -> JetVariable:
        kind, val, col = self.take(kind="id")
        if val == "D" and self.peek()[1] == "[":
            self.take("[")
            _, dep, dcol = self.take(kind="id")
            if dep not in self.dep:
                raise DSLError(f"unknown dependent variable {dep!r}", self.line, dcol)
            counts = Counter()
            while self.peek()[1] == ",":
                self.take(",")
                _, x, xcol = self.take(kind="id")
                if x not in self.indep:
                    raise DSLError(f"unknown independent variable {x!r}", self.line, xcol)
                counts[self.indep[x]] += 1
            self.take("]")
            return JetVariable(self.dep[dep], MultiIndex(counts[i] for i in range(len(self.indep))))
        if val in self.dep:
            return JetVariable(self.dep[val], MultiIndex.zero(len(self.indep)))
        raise DSLError(f"unknown variable {val!r}", self.line, col)


def _names(rest: str, line: int, col: int) -> list[str]:
    names = [x.strip() for x in rest.split(",")]
    for x in names:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", x):
            raise DSLError(f"invalid identifier {x!r}", line, col)
    return names


def parse_system(text: str, nonlinear: bool = False, name: str = "system"):
    """Parse DSL text into a JetSystem (or NonlinearSystem when ``nonlinear``)."""
    indep: list[str] | None = None
    dep: list[str] | None = None
    order = 0
    raw_eqs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.lstrip()
        col = len(line) - len(stripped) + 1
        word, _, rest = stripped.partition(" ")
        if stripped.startswith("eq:"):
            body = stripped[3:]
            raw_eqs.append((lineno, body, col + 3))
        elif word == "system":
            if not rest.strip():
                raise DSLError("missing system name", lineno, col)
            name = rest.strip()
        elif word == "independent":
            indep = _names(rest, lineno, col + len(word) + 1)
        elif word == "dependent":
            dep = _names(rest, lineno, col + len(word) + 1)
        elif word == "order":
            try:
                order = int(rest)
            except ValueError:
                raise DSLError(f"invalid order {rest.strip()!r}", lineno, col) from None
        else:
            raise DSLError(f"unknown directive {word!r}", lineno, col)
    if indep is None:
        raise DSLError("missing 'independent' declaration")
    if dep is None:
        raise DSLError("missing 'dependent' declaration")
    if set(indep) & set(dep) or len(set(indep)) != len(indep) or len(set(dep)) != len(dep):
        raise DSLError("variable names must be distinct")

    polys = []
    for lineno, body, col in raw_eqs:
        toks = _tokenize(body, lineno, col - 1)
        p = _ExprParser(toks, lineno, indep, dep, nonlinear)
        lhs = p.expr()
        p.take("=")
        rhs = p.expr()
        p.take(kind="end")
        for mono, c in rhs.items():
            lhs[mono] = lhs.get(mono, Fraction(0)) - c
        lhs = {k: c for k, c in lhs.items() if c != 0}
        if not lhs:
            continue
        if nonlinear:
            polys.append(NonlinearPoly(lhs))
        else:
            const = lhs.pop((), Fraction(0))
            polys.append(LinDiffPoly({k[0]: c for k, c in lhs.items()}, const))
    if nonlinear:
        return NonlinearSystem(name, tuple(indep), tuple(dep), tuple(polys))
    return JetSystem(name, tuple(indep), tuple(dep), tuple(polys), order)


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_var(v: JetVariable, indep, dep) -> str:
    args = [dep[v.dependent]]
    for i, e in enumerate(v.index):
        args.extend([indep[i]] * e)
    return "D[" + ",".join(args) + "]"


def format_poly(p: LinDiffPoly, indep, dep) -> str:
    parts = []
    for v, c in p.sorted_terms():
        parts.append((c, _fmt_var(v, indep, dep)))
    if p.constant or not parts:
        parts.append((p.constant, None))
    out = ""
    for k, (c, var) in enumerate(parts):
        neg = c < 0
        a = -c if neg else c
        if var is None:
            body = _fmt_coeff(a)
        elif a == 1:
            body = var
        else:
            body = f"{_fmt_coeff(a)}*{var}"
        if k == 0:
            out = ("-" if neg else "") + body
        else:
            out += (" - " if neg else " + ") + body
    return out


def format_system(s: JetSystem) -> str:
    lines = [f"system {s.name}",
             "independent " + ", ".join(s.independent),
             "dependent " + ", ".join(s.dependent)]
    if not s.equations and s.declared_order:
        lines.append(f"order {s.declared_order}")
    for F in s.equations:
        lines.append(f"eq: {format_poly(F, s.independent, s.dependent)} = 0")
    return "\n".join(lines) + "\n"
