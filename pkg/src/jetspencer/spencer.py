"""delta-Spencer complexes, cohomology tables, involutivity and Cartan's test,
the Koszul-dual cross-check, the fiberwise jet-Spencer complex and
symbol-level compatibility sequences.

Bidegree convention: ``h[q][p]`` is the cohomology at the term
N^{q-p} (x) Λ^p V*, so q is the total symbol level and p the exterior
position.  The differential is

    delta(omega (x) c) = (-1)^p sum_i (omega ∧ dx_i) (x) d_i c,

with d_i the Taylor-coefficient shift.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb

import flint

from . import linalg
from .jets import JetSystem, monomial_index, monomials, sym_dim
from .linalg import RatMatrix, Subspace
from .symbols import (GenericityBudgetExhausted, SymbolFamily, WindowTooSmall,
                      shift_table, symbol_rows)

__all__ = [
    "DeltaComplexLevel",
    "SpencerTable",
    "CartanResult",
    "CompatibilityStep",
    "NotStabilized",
    "delta_complex",
    "spencer_table",
    "involutivity_degree",
    "cartan_test",
    "koszul_dual_dims",
    "jet_spencer_exactness",
    "compatibility_sequence",
]

CARTAN_BUDGET = 8


class NotStabilized(RuntimeError):
    """Zero rows of the Spencer table are not confirmed inside the window."""


@lru_cache(maxsize=None)
def exterior_basis(n: int, p: int) -> tuple[tuple[int, ...], ...]:
    if p < 0 or p > n:
        return ()
    return tuple(combinations(range(n), p))


@lru_cache(maxsize=None)
def _exterior_index(n: int, p: int) -> dict[tuple[int, ...], int]:
    return {I: k for k, I in enumerate(exterior_basis(n, p))}


def wedge_right(I: tuple[int, ...], i: int) -> tuple[int, tuple[int, ...]] | None:
    """omega_I ∧ dx_i = sign * omega_J, or None when i is in I."""
    if i in I:
        return None
    greater = sum(1 for t in I if t > i)
    return (-1 if greater % 2 else 1), tuple(sorted(I + (i,)))


def _is_zero_product(A: RatMatrix, B: RatMatrix) -> bool:
    if A.ncols() == 0 or A.nrows() == 0 or B.ncols() == 0:
        return True
    a, _ = A.numer_denom()
    b, _ = B.numer_denom()
    return (a * b).is_zero()


@dataclass(frozen=True)
class DeltaComplexLevel:
    """Level q of the delta complex: terms N^{q-p} (x) Λ^p for p = 0..n.

    ``maps[p]`` is the matrix of delta from term p to term p+1 acting on
    column vectors (shape dim(term p+1) x dim(term p)).
    """

    level: int
    n: int
    terms: tuple[int, ...]
    maps: tuple[RatMatrix, ...]

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(linalg.rank(M) for M in self.maps)

    def cohomology(self) -> tuple[int, ...]:
        r = self.ranks
        out = []
        for p, dim in enumerate(self.terms):
            incoming = r[p - 1] if p > 0 else 0
            outgoing = r[p] if p < len(r) else 0
            out.append(dim - outgoing - incoming)
        return tuple(out)

    def squares_to_zero(self) -> bool:
        return all(_is_zero_product(self.maps[p + 1], self.maps[p]) for p in range(len(self.maps) - 1))


def delta_complex(f: SymbolFamily, q: int, check: bool = True) -> DeltaComplexLevel:
    if q > f.qmax:
        raise WindowTooSmall(f"level {q} needs N^{q}, family stops at {f.qmax}")
    n, m = f.n, f.m
    spaces = [f.component(q - p).space if q - p >= 0 else None for p in range(n + 1)]
    dims = [(s.dim if s is not None else 0) for s in spaces]
    terms = tuple(dims[p] * comb(n, p) for p in range(n + 1))
    maps = []
    for p in range(n):
        j = q - p  # symbol degree of the source term
        rows, cols = terms[p + 1], terms[p]
        M = flint.fmpq_mat(rows, cols)
        if rows and cols and j >= 1:
            src, dst = spaces[p], spaces[p + 1]
            d_src, d_dst = dims[p], dims[p + 1]
            tables = [shift_table(n, m, j, i) for i in range(n)]
            target_index = _exterior_index(n, p + 1)
            base_sign = -1 if p % 2 else 1
            # coordinates of d_i b_k in the basis of N^{j-1}
            shifted = []
            for row in src.sparse_rows:
                per_dir = []
                for i in range(n):
                    t = tables[i]
                    vec = {t[c]: v for c, v in row.items() if t[c] >= 0}
                    per_dir.append(dst.coordinates(vec))
                shifted.append(per_dir)
            for a, I in enumerate(exterior_basis(n, p)):
                for i in range(n):
                    w = wedge_right(I, i)
                    if w is None:
                        continue
                    sign, J = w
                    b = target_index[J]
                    s = sign * base_sign
                    for k in range(d_src):
                        for kk, v in shifted[k][i].items():
                            M[b * d_dst + kk, a * d_src + k] += s * v
        maps.append(M)
    level = DeltaComplexLevel(q, n, terms, tuple(maps))
    if check and not level.squares_to_zero():
        raise ArithmeticError(f"delta∘delta != 0 at level {q}")
    return level


@dataclass(frozen=True)
class SpencerTable:
    """h[q][p] for q = 0..qmax (rows) and p = 0..n (columns)."""

    n: int
    rows: tuple[tuple[int, ...], ...]
    qmin: int = 0

    @property
    def qmax(self) -> int:
        return self.qmin + len(self.rows) - 1

    def __getitem__(self, q: int) -> tuple[int, ...]:
        if q < self.qmin or q > self.qmax:
            raise WindowTooSmall(f"level {q} outside table window [{self.qmin}, {self.qmax}]")
        return self.rows[q - self.qmin]

    def entry(self, q: int, p: int) -> int:
        if p < 0 or p > self.n:
            return 0
        return self[q][p]

    def nonzero(self) -> dict[tuple[int, int], int]:
        return {(self.qmin + i, p): h for i, row in enumerate(self.rows)
                for p, h in enumerate(row) if h}

    def zero_from(self) -> int:
        """First level from which every row up to qmax is zero."""
        q0 = self.qmax + 1
        while q0 - 1 >= self.qmin and not any(self[q0 - 1]):
            q0 -= 1
        return q0

    def as_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]


def spencer_table(f: SymbolFamily, check: bool = False, strict: bool = False) -> SpencerTable:
    """Cohomology dims of every level 0..qmax.

    With ``strict`` the family must span at least order + n + 1 degrees.
    """
    if strict and f.qmax < f.order + f.n:
        raise WindowTooSmall(f"window 0..{f.qmax} shorter than order + n + 1 degrees")
    rows = tuple(delta_complex(f, q, check=check).cohomology() for q in range(f.qmax + 1))
    return SpencerTable(f.n, rows)


def involutivity_degree(f: SymbolFamily | SpencerTable) -> int:
    """Least q0 with zero rows from q0 to the top, confirmed on n+1 levels."""
    table = f if isinstance(f, SpencerTable) else spencer_table(f)
    q0 = table.zero_from()
    if table.qmax - q0 + 1 < table.n + 1:
        raise NotStabilized(
            f"only {table.qmax - q0 + 1} trailing zero rows (need {table.n + 1}); raise the window")
    return q0


@dataclass(frozen=True)
class CartanResult:
    q: int
    involutive: bool
    characters: tuple[int, ...]
    dim_next: int
    bound: int
    coordinates: tuple[tuple[int, ...], ...]
    attempts: int


def _random_basis(n: int, rng: random.Random) -> list[list[int]] | None:
    A = [[rng.randint(-10, 10) for _ in range(n)] for _ in range(n)]
    if n and linalg.rank(linalg.matrix(A, n)) < n:
        return None
    return A


def _characters(f: SymbolFamily, q: int, A: list[list[int]]) -> tuple[int, ...]:
    """alpha^(l) = dim N_q^(l-1) - dim N_q^(l), where N_q^(l) is killed by
    the directional derivatives along the first l rows of A."""
    n, m = f.n, f.m
    space = f.component(q).space
    basis = space.sparse_rows
    if q == 0 or not basis:
        dims = [space.dim] * (n + 1)
    else:
        tables = [shift_table(n, m, q, i) for i in range(n)]
        low = m * sym_dim(n, q - 1)
        dims = [space.dim]
        blocks = []
        for ell in range(1, n + 1):
            a = A[ell - 1]
            ent = {}
            for k, row in enumerate(basis):
                for col, v in row.items():
                    for i in range(n):
                        if a[i] and tables[i][col] >= 0:
                            key = (tables[i][col], k)
                            ent[key] = ent.get(key, 0) + a[i] * v
            blocks.append(linalg.sparse_matrix(low, len(basis), ent))
            stacked = linalg.vstack(blocks, len(basis))
            dims.append(len(basis) - linalg.rank(stacked))
    return tuple(dims[ell - 1] - dims[ell] for ell in range(1, n + 1))


def cartan_test(f: SymbolFamily, q: int, seed: int = 0, budget: int = CARTAN_BUDGET) -> CartanResult:
    """Cartan's test at degree q in seeded generic coordinates.

    The inequality dim N^{q+1} <= sum_l l * alpha^(l) holds in any
    coordinates; equality in some coordinate system certifies involution.
    Each attempt draws an invertible integer matrix with entries in
    [-10, 10]; a failed equality triggers a redraw until the budget is spent.
    """
    if q + 1 > f.qmax:
        raise WindowTooSmall(f"Cartan test at q={q} needs N^{q + 1}")
    rng = random.Random(seed)
    dim_next = f.component(q + 1).dim
    last = None
    invertible_seen = 0
    for attempt in range(1, budget + 1):
        A = _random_basis(f.n, rng)
        if A is None:
            continue
        invertible_seen += 1
        chars = _characters(f, q, A)
        bound = sum(ell * a for ell, a in enumerate(chars, start=1))
        last = CartanResult(q, dim_next == bound, chars, dim_next, bound,
                            tuple(tuple(r) for r in A), attempt)
        if last.involutive:
            return last
    if last is None:
        raise GenericityBudgetExhausted(f"no invertible coordinate change in {budget} draws")
    return last


def koszul_dual_dims(f: SymbolFamily, q: int, p: int) -> int:
    """Koszul homology of the dual symbol module at M_{q-p} (x) Λ^p V.

    M = (Sym V (x) W*) / I with I generated by the principal symbols of the
    system (or, for a family without a system, by the annihilators of its
    components).  Nothing here touches the comodule bases used by
    :func:`delta_complex`.
    """
    n = f.n
    if p < 0 or p > n:
        return 0
    d = q - p
    if d < 0:
        return 0
    dim_here = _koszul_term_dim(f, d, p)
    if dim_here == 0:
        return 0
    out_rank = _koszul_rank(f, d, p)  # M_d Λ^p -> M_{d+1} Λ^{p-1}
    in_rank = _koszul_rank(f, d - 1, p + 1)  # M_{d-1} Λ^{p+1} -> M_d Λ^p
    return dim_here - out_rank - in_rank


def _ideal_degree_part(f: SymbolFamily, d: int) -> Subspace:
    """I_d inside Sym^d V (x) W* (same column layout as the symbols)."""
    n, m = f.n, f.m
    amb = m * sym_dim(n, d)
    if d < 0:
        return Subspace.zero(0)
    if f.system is not None:
        rows = symbol_rows(f.system, d)
        M = linalg.sparse_matrix(len(rows), amb,
                                 (((r, j), c) for r, row in enumerate(rows) for j, c in row.items()))
        return linalg.row_space(M)
    return linalg.annihilator(f.component(d).space)


@lru_cache(maxsize=256)
def _quotient_data(f: SymbolFamily, d: int):
    I = _ideal_degree_part(f, d)
    amb = f.m * sym_dim(f.n, d)
    return I, amb - I.dim


def _koszul_term_dim(f: SymbolFamily, d: int, p: int) -> int:
    if d < 0 or p < 0 or p > f.n:
        return 0
    return _quotient_data(f, d)[1] * comb(f.n, p)


def _koszul_rank(f: SymbolFamily, d: int, p: int) -> int:
    """Rank of the induced map M_d (x) Λ^p -> M_{d+1} (x) Λ^{p-1}.

    e_I (x) g  ->  sum_t (-1)^t e_{I minus i_t} (x) xi_{i_t} g.  With
    S1 = I_d, S2 = I_{d+1} the induced rank is
    dim(f(A1) + S2 (x) Λ^{p-1}) - dim(S2 (x) Λ^{p-1}).
    """
    n, m = f.n, f.m
    if d < 0 or p < 1 or p > n:
        return 0
    if _koszul_term_dim(f, d, p) == 0 or _koszul_term_dim(f, d + 1, p - 1) == 0:
        return 0
    I_next, _ = _quotient_data(f, d + 1)
    src_mons = monomials(n, d)
    tgt_size = sym_dim(n, d + 1)
    tgt_index = monomial_index(n, d + 1)
    tgt_block = m * tgt_size
    src_ext = exterior_basis(n, p)
    tgt_ext = _exterior_index(n, p - 1)
    n_tgt = tgt_block * len(tgt_ext)
    rows = []
    for I in src_ext:
        for alpha in range(m):
            for sigma in src_mons:
                vec = {}
                for t, i in enumerate(I):
                    J = I[:t] + I[t + 1:]
                    col = tgt_ext[J] * tgt_block + alpha * tgt_size + tgt_index[sigma.raised(i)]
                    vec[col] = -1 if t % 2 else 1
                rows.append(vec)
    ent = {}
    r = 0
    for vec in rows:
        for c, v in vec.items():
            ent[(r, c)] = v
        r += 1
    # S2 (x) Λ^{p-1}
    s2_rows = 0
    for b in range(len(tgt_ext)):
        for row in I_next.sparse_rows:
            for c, v in row.items():
                ent[(r, b * tgt_block + c)] = v
            r += 1
            s2_rows += 1
    M = linalg.sparse_matrix(r, n_tgt, ent)
    return linalg.rank(M) - I_next.dim * len(tgt_ext)


def jet_spencer_exactness(s: JetSystem | tuple[int, int], k: int) -> dict:
    """Fiberwise truncated complex J^k -> V*⊗J^{k-1} -> Λ²V*⊗J^{k-2} -> ...

    Built for the free module (no equations) on polynomial jets of bounded
    degree, independently of the symbol machinery.  Position 0 has kernel
    E (the constant jets), every later position should be exact.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n, m = (s.n, s.m) if isinstance(s, JetSystem) else s

    def jet_cols(order):
        # (alpha, sigma) with |sigma| <= order
        cols = {}
        for q in range(order + 1):
            for alpha in range(m):
                for sigma in monomials(n, q):
                    cols[(alpha, sigma)] = len(cols)
        return cols

    top = min(n, k)
    spaces = [jet_cols(k - p) for p in range(top + 1)]
    terms = [len(spaces[p]) * comb(n, p) for p in range(top + 1)]
    maps = []
    for p in range(top):
        src, dst = spaces[p], spaces[p + 1]
        dsrc, ddst = len(src), len(dst)
        tidx = _exterior_index(n, p + 1)
        M = flint.fmpq_mat(terms[p + 1], terms[p])
        base = -1 if p % 2 else 1
        for a, I in enumerate(exterior_basis(n, p)):
            for (alpha, sigma), c in src.items():
                for i in range(n):
                    if sigma[i] == 0:
                        continue
                    w = wedge_right(I, i)
                    if w is None:
                        continue
                    sign, J = w
                    lowered = (alpha, sigma.raised(i, -1))
                    M[tidx[J] * ddst + dst[lowered], a * dsrc + c] += sign * base
        maps.append(M)
    ranks = [linalg.rank(M) for M in maps]
    coh = []
    for p in range(top + 1):
        incoming = ranks[p - 1] if p > 0 else 0
        outgoing = ranks[p] if p < len(ranks) else 0
        coh.append(terms[p] - incoming - outgoing)
    squares = all(_is_zero_product(maps[p + 1], maps[p]) for p in range(len(maps) - 1))
    return {
        "n": n, "m": m, "k": k,
        "terms": terms,
        "ranks": ranks,
        "cohomology": coh,
        "kernel_at_start": coh[0],
        "interior_exact": all(h == 0 for h in coh[1:]),
        "squares_to_zero": squares,
    }


@dataclass(frozen=True)
class CompatibilityStep:
    """One operator of the symbol-level compatibility sequence.

    ``generators`` are the rows of the new operator's symbol: each is a
    tuple of homogeneous polynomials (dict monomial -> coefficient), one per
    component of the previous operator's target.  ``module_dims[D]`` is the
    dimension in total degree D of the cokernel of the previous operator,
    i.e. of the module this step presents; ``exact`` records the rank
    identity checked at each degree of the window.
    """

    step_index: int
    rank: int
    orders: tuple[int, ...]
    generators: tuple[tuple[dict, ...], ...]
    module_dims: dict[int, int]
    induced_symbol_maps: dict[int, RatMatrix] = field(repr=False)
    exact: dict[int, bool] = field(default_factory=dict)


class _GradedOperator:
    """Right multiplication by a matrix of homogeneous polynomials between
    graded free modules F_src -> F_tgt (rows = source generators)."""

    def __init__(self, n, rows, row_shifts, tgt_shifts):
        self.n = n
        self.rows = rows            # list of tuples of dicts (MultiIndex -> Fraction)
        self.row_shifts = row_shifts
        self.tgt_shifts = tgt_shifts

    @staticmethod
    def layout(n, shifts, D):
        offs, total = [], 0
        for s in shifts:
            offs.append(total)
            total += sym_dim(n, D - s)
        return offs, total

    def matrix(self, D) -> RatMatrix:
        n = self.n
        s_offs, s_tot = self.layout(n, self.row_shifts, D)
        t_offs, t_tot = self.layout(n, self.tgt_shifts, D)
        ent = {}
        for j, (row, sh) in enumerate(zip(self.rows, self.row_shifts)):
            for r_i, tau in enumerate(monomials(n, D - sh)):
                src = s_offs[j] + r_i
                for b, poly in enumerate(row):
                    if not poly:
                        continue
                    tidx = monomial_index(n, D - self.tgt_shifts[b])
                    for mono, c in poly.items():
                        col = t_offs[b] + tidx[mono + tau]
                        ent[(src, col)] = ent.get((src, col), 0) + c
        return linalg.sparse_matrix(s_tot, t_tot, ent)


def _left_syzygies(op: _GradedOperator, tgt_count: int, window: int):
    """Minimal generators (by degree) of the kernel of op, up to degree window."""
    n = op.n
    shifts = op.row_shifts
    gens, gen_degrees = [], []
    for D in range(min(shifts, default=0), window + 1):
        if not shifts:
            break
        M = op.matrix(D)
        if M.nrows() == 0:
            continue
        K = linalg.kernel_basis(M.transpose())  # row vectors y with y M = 0
        if K.dim == 0:
            continue
        # part generated by earlier generators
        if gens:
            prev = _GradedOperator(n, gens, gen_degrees, shifts).matrix(D)
            have = linalg.row_space(prev)
        else:
            have = Subspace.zero(K.ambient_dim)
        offs, _ = _GradedOperator.layout(n, shifts, D)
        for row in K.rows_as_fractions():
            if have.contains(row):
                continue
            polys = []
            for j, sh in enumerate(shifts):
                mons = monomials(n, D - sh)
                polys.append({mu: row[offs[j] + t] for t, mu in enumerate(mons) if row[offs[j] + t] != 0})
            gens.append(tuple(polys))
            gen_degrees.append(D)
            have = linalg.span_sum(have, linalg.row_space(linalg.matrix([row], K.ambient_dim)))
    return gens, gen_degrees


def _system_operator(s: JetSystem) -> _GradedOperator:
    rows, shifts = [], []
    for F in s.equations:
        if F.order < 0:
            continue
        row = [dict() for _ in range(s.m)]
        for v, c in F.top_part().items():
            row[v.dependent][v.index] = c
        rows.append(tuple(row))
        shifts.append(F.order)
    return _GradedOperator(s.n, rows, shifts, [0] * s.m)


def compatibility_sequence(s: JetSystem, steps: int, window: int) -> tuple[list[CompatibilityStep], bool]:
    """Iterated symbol-level compatibility operators P_1, P_2, ... of the system.

    Step i collects the minimal syzygies (up to total degree ``window``)
    among the rows of the previous operator's symbol; an empty step means
    the sequence has terminated.  Returns ``(steps, involutive)``; when the
    input is not involutive within the window the construction still runs
    but exactness is not asserted.
    """
    from .symbols import symbol_family

    try:
        probe = max(window, s.order + s.n + 4)
        involutive = involutivity_degree(symbol_family(s, probe)) <= window
    except (NotStabilized, WindowTooSmall):
        involutive = False
    op = _system_operator(s)
    out = []
    for idx in range(1, steps + 1):
        gens, degs = _left_syzygies(op, len(op.tgt_shifts), window)
        nxt = _GradedOperator(s.n, gens, degs, op.row_shifts)
        module_dims, maps, exact = {}, {}, {}
        for D in range(window + 1):
            A = op.matrix(D)  # F_{i-1} degree D -> F_{i-2}
            r_prev = linalg.rank(A)
            module_dims[D] = A.nrows() - r_prev
            maps[D] = A
            if involutive or not gens:
                B = nxt.matrix(D)
                # image of the new operator equals the kernel of the old one
                exact[D] = linalg.rank(B) == A.nrows() - r_prev and _is_zero_product(B, A)
        step = CompatibilityStep(idx, len(gens), tuple(d for d in degs),
                                 tuple(gens), module_dims, maps, exact)
        out.append(step)
        if not gens:
            break
        op = nxt
    return out, involutive
