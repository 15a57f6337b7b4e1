"""Analysis pipeline and deterministic report rendering.

Every number in a report is a string: integers as ``"3"``, rationals as
``"p/q"``, polynomials in t as e.g. ``"t/2 + 1"``.  Spencer tables are
lists of rows, row q holding h[q][0..n].
"""

from __future__ import annotations

import json
import warnings
from fractions import Fraction
from typing import Sequence

from .jets import JetSystem
from .numerics import (NotInvolutive, cartan_characters,
                       dhilbert_via_spencer, functional_dimension, hilbert_function,
                       hilbert_polynomial, involutive_cartan_degree, is_spencer_semistable,
                       obstruction_grading, reduced_polynomial, spencer_slope, sweeney_bound)
from .spencer import NotStabilized, involutivity_degree, spencer_table
from .symbols import (GenericityBudgetExhausted, WindowTooSmall, generic_covector,
                      restrict_symbol, symbol_family)

__all__ = ["analyze", "render_json", "render_text", "REPORT_FIELDS"]

REPORT_FIELDS = (
    "systemName", "n", "m", "order", "qmax", "seed",
    "perDegreeSymbolDims", "spencerTable", "involutivityDegree",
    "hilbertFunction", "hilbertPolynomial", "dHilbertViaSpencer", "functionalDimension",
    "cartanDegree", "cartanCharacters", "rank", "reducedPolynomial", "slope", "bundleSlope",
    "stabilityVerdict", "obstructionGrading", "sweeneyBound", "restrictionCheck", "warnings",
)


def _s(x) -> str | None:
    if x is None:
        return None
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


def _ints(xs) -> list[str]:
    return [str(int(v)) for v in xs]


def analyze(s: JetSystem, qmax: int | None = None, seed: int = 0,
            candidates: Sequence[JetSystem] = (), restrict: bool = False,
            degree: Fraction | None = None) -> dict:
    """Run the full pipeline.  Raises NotStabilized when the window is short."""
    if qmax is None:
        qmax = s.order + s.n + 4
    notes: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        s.check_pure_order()
        try:
            f = symbol_family(s, qmax)
        except WindowTooSmall as exc:
            raise NotStabilized(str(exc)) from None
        table = spencer_table(f)
        deg = involutivity_degree(table)
        P = hilbert_polynomial(f, table)
        D = dhilbert_via_spencer(table)
        if D != P:
            notes.append(f"Spencer-table polynomial {D} differs from interpolation {P}")
        hf = hilbert_function(f)

        chars = rank = red = slope = bundle = cdeg = None
        try:
            cdeg = involutive_cartan_degree(f, seed)
            chars = cartan_characters(f, cdeg, seed)
            rank = chars[0] if chars else f.component(cdeg).dim
        except (NotStabilized, NotInvolutive, GenericityBudgetExhausted) as exc:
            notes.append(f"characters unavailable: {exc}")
        if rank:
            red = reduced_polynomial(P, rank)
            slope = spencer_slope(P, rank)
            if degree is not None:
                bundle = Fraction(degree) / (rank * rank)
        elif rank == 0:
            notes.append("rank 0: reduced polynomial and slope undefined")

        verdict = None
        if candidates:
            v = is_spencer_semistable(s, candidates, qmax=qmax, seed=seed)
            verdict = {
                "semistable": v.semistable,
                "stable": v.stable,
                "reducedPolynomial": str(v.reduced),
                "slope": _s(v.slope),
                "witnesses": [{"candidate": w.candidate, "outcome": w.outcome.value,
                               "reducedPolynomial": str(w.reduced), "slope": _s(w.slope)}
                              for w in v.witnesses],
            }

        check = None
        if restrict:
            try:
                xi = generic_covector(s, seed)
                r = restrict_symbol(f, xi)
                rdeg = involutivity_degree(spencer_table(r))
                check = {"covector": [_s(x) for x in xi],
                         "restrictedDims": _ints(r.dims),
                         "restrictedInvolutivityDegree": str(rdeg),
                         "equal": rdeg == deg}
            except (GenericityBudgetExhausted, NotStabilized) as exc:
                notes.append(f"restriction check skipped: {exc}")

    for w in caught:
        notes.insert(0, str(w.message))

    return {
        "systemName": s.name,
        "n": str(s.n),
        "m": str(s.m),
        "order": str(s.order),
        "qmax": str(qmax),
        "seed": str(seed),
        "perDegreeSymbolDims": _ints(f.dims),
        "spencerTable": [_ints(row) for row in table.rows],
        "involutivityDegree": str(deg),
        "hilbertFunction": {"perDegree": _ints(hf["per_degree"]),
                            "cumulative": _ints(hf["cumulative"])},
        "hilbertPolynomial": str(P),
        "dHilbertViaSpencer": str(D),
        "functionalDimension": str(functional_dimension(P)),
        "cartanDegree": _s(cdeg),
        "cartanCharacters": _ints(chars) if chars is not None else None,
        "rank": _s(rank),
        "reducedPolynomial": _s(red),
        "slope": _s(slope),
        "bundleSlope": _s(bundle),
        "stabilityVerdict": verdict,
        "obstructionGrading": _ints(obstruction_grading(table, deg)),
        "sweeneyBound": str(sweeney_bound(s.n, s.m, max(s.order, 1))),
        "restrictionCheck": check,
        "warnings": notes,
    }


def render_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, list):
        return ", ".join(_fmt(x) for x in v) if v else "(none)"
    return str(v)


def render_text(report: dict) -> str:
    out = [f"system {report['systemName']}  (n={report['n']}, m={report['m']}, order={report['order']})",
           f"window q=0..{report['qmax']}  seed={report['seed']}",
           f"symbol dims:          {_fmt(report['perDegreeSymbolDims'])}",
           "spencer table h[q][p]:"]
    for q, row in enumerate(report["spencerTable"]):
        out.append(f"  q={q:<3} " + " ".join(f"{x:>4}" for x in row))
    hf = report["hilbertFunction"]
    out += [
        f"involutivity degree:  {report['involutivityDegree']}",
        f"hilbert function:     {_fmt(hf['perDegree'])}",
        f"  cumulative:         {_fmt(hf['cumulative'])}",
        f"hilbert polynomial:   {report['hilbertPolynomial']}",
        f"  via spencer table:  {report['dHilbertViaSpencer']}",
        f"functional dimension: {report['functionalDimension']}",
        f"cartan degree:        {_fmt(report['cartanDegree'])}",
        f"cartan characters:    {_fmt(report['cartanCharacters'])}",
        f"rank:                 {_fmt(report['rank'])}",
        f"reduced polynomial:   {_fmt(report['reducedPolynomial'])}",
        f"slope:                {_fmt(report['slope'])}",
    ]
    if report["bundleSlope"] is not None:
        out.append(f"bundle slope:         {report['bundleSlope']}")
    out.append(f"obstruction grading:  {_fmt(report['obstructionGrading'])}")
    out.append(f"sweeney bound:        {report['sweeneyBound']}")
    v = report["stabilityVerdict"]
    if v is not None:
        out.append(f"semistable: {_fmt(v['semistable'])}  stable: {_fmt(v['stable'])}")
        for w in v["witnesses"]:
            out.append(f"  {w['candidate']}: {w['outcome']} ({w['reducedPolynomial']}, slope {w['slope']})")
    r = report["restrictionCheck"]
    if r is not None:
        out.append(f"restriction along ({', '.join(r['covector'])}): dims {_fmt(r['restrictedDims'])}, "
                   f"degree {r['restrictedInvolutivityDegree']}, equal: {_fmt(r['equal'])}")
    for w in report["warnings"]:
        out.append(f"warning: {w}")
    return "\n".join(out) + "\n"
