"""Border prebases: multiplication matrices, border division, the commuting
border basis test, and the border basis of a zero-dimensional ideal."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .groebner import NotZeroDimensional, TermOrdering, buchberger, normal_form, quotient_basis
from .orderideal import Border, OrderIdeal, border, border_web, o_index
from .ring import (DEGREVLEX, Context, Polynomial, PolyMatrix, Term,
                   default_main_names, term_div, term_divides)


class DimensionMismatch(ValueError):
    """The quotient basis has a different size than the order ideal."""


class NotABasis(ValueError):
    """The order ideal is not a vector space basis of P/I."""


@dataclass(frozen=True)
class BorderPrebasis:
    """g_j = b_j - sum_i coeffs[i][j] * t_i with main-variable-free coefficients."""

    order_ideal: OrderIdeal
    border: Border
    ctx: Context
    coeffs: tuple[tuple[Polynomial, ...], ...]

    def __post_init__(self) -> None:
        mu, nu = self.order_ideal.mu, self.border.nu
        if len(self.coeffs) != mu or any(len(row) != nu for row in self.coeffs):
            raise ValueError("coefficient matrix must be mu x nu")
        for row in self.coeffs:
            for entry in row:
                if entry.ctx != self.ctx:
                    raise ValueError("coefficient entries must share the context")
                if not all(not any(m[: self.ctx.n]) for m in entry.terms):
                    raise ValueError("coefficients may not involve main variables")

    @property
    def mu(self) -> int:
        return self.order_ideal.mu

    @property
    def nu(self) -> int:
        return self.border.nu

    def coefficient_kind(self) -> str:
        """constant, deform (z only), param (c only), or mixed."""
        uses_z = any(e.uses_deform() for row in self.coeffs for e in row)
        uses_c = any(not e.param_free() for row in self.coeffs for e in row)
        if uses_z and uses_c:
            return "mixed"
        if uses_z:
            return "deform"
        if uses_c:
            return "param"
        return "constant"

    def generator(self, j: int) -> Polynomial:
        """The j-th prebasis element (0-based column index)."""
        g = Polynomial.from_term(self.ctx, self.border.terms[j])
        for i, t in enumerate(self.order_ideal.terms):
            a = self.coeffs[i][j]
            if a:
                g = g - a * Polynomial.from_term(self.ctx, t)
        return g

    def generators(self) -> list[Polynomial]:
        return [self.generator(j) for j in range(self.nu)]

    def specialize(self, assignment: Mapping[str, Polynomial | Fraction | int],
                   target: Context | None = None) -> "BorderPrebasis":
        tgt = target if target is not None else self.ctx
        rows = tuple(tuple(e.substitute(assignment, tgt) for e in row)
                     for row in self.coeffs)
        return BorderPrebasis(self.order_ideal, self.border, tgt, rows)

    def map_context(self, target: Context) -> "BorderPrebasis":
        rows = tuple(tuple(e.map_context(target) for e in row) for row in self.coeffs)
        return BorderPrebasis(self.order_ideal, self.border, target, rows)

    @staticmethod
    def from_constant_rows(oi: OrderIdeal, rows: Sequence[Sequence[Fraction | int]],
                           ctx: Context | None = None) -> "BorderPrebasis":
        bd = border(oi)
        if ctx is None:
            ctx = Context(main=default_main_names(oi.n))
        coeffs = tuple(tuple(Polynomial.constant(ctx, v) for v in row) for row in rows)
        return BorderPrebasis(oi, bd, ctx, coeffs)

    @staticmethod
    def border_term_prebasis(oi: OrderIdeal, ctx: Context | None = None) -> "BorderPrebasis":
        """All coefficients zero: the prebasis of the border term ideal."""
        bd = border(oi)
        if ctx is None:
            ctx = Context(main=default_main_names(oi.n))
        zero = Polynomial.zero(ctx)
        coeffs = tuple(tuple(zero for _ in range(bd.nu)) for _ in range(oi.mu))
        return BorderPrebasis(oi, bd, ctx, coeffs)


def multiplication_matrices(g: BorderPrebasis) -> list[PolyMatrix]:
    """The formal multiplication matrices A_1..A_n of the prebasis.

    Column s of A_k holds the coordinates of x_k * t_s: a unit vector when the
    product stays in the order ideal, the j-th coefficient column when the
    product is the border term b_j.
    """
    oi, bd, ctx = g.order_ideal, g.border, g.ctx
    opos = oi.index_map()
    bpos = bd.index_map()
    zero = Polynomial.zero(ctx)
    one = Polynomial.one(ctx)
    mats = []
    for k in range(oi.n):
        cols = []
        for t in oi.terms:
            prod = t[:k] + (t[k] + 1,) + t[k + 1:]
            if prod in opos:
                r = opos[prod] - 1
                cols.append([one if i == r else zero for i in range(oi.mu)])
            else:
                j = bpos[prod] - 1
                cols.append([g.coeffs[i][j] for i in range(oi.mu)])
        mats.append(PolyMatrix(ctx, [[cols[s][r] for s in range(oi.mu)]
                                     for r in range(oi.mu)]))
    return mats


@dataclass(frozen=True)
class CommuteCertificate:
    pair: tuple[int, int]      # 1-based variable indices (k, l)
    position: tuple[int, int]  # 0-based matrix entry
    entry: Polynomial

    def __str__(self) -> str:
        k, l = self.pair
        r, c = self.position
        return (f"commutator A_{k}A_{l} - A_{l}A_{k} has nonzero entry "
                f"({r + 1},{c + 1}): {self.entry}")


@dataclass(frozen=True)
class CommuteVerdict:
    ok: bool
    certificate: CommuteCertificate | None = None

    def __bool__(self) -> bool:
        return self.ok


def _worker_count() -> int:
    raw = os.environ.get("BORDERBASES_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def commutators_vanish(mats: Sequence[PolyMatrix]) -> CommuteVerdict:
    """Check all pairwise commutators; the first nonzero entry is the certificate."""
    n = len(mats)
    pairs = [(k, l) for k in range(n) for l in range(k + 1, n)]

    def check(pair: tuple[int, int]) -> CommuteCertificate | None:
        k, l = pair
        comm = mats[k] * mats[l] - mats[l] * mats[k]
        for r in range(comm.rows):
            for c in range(comm.cols):
                if comm[r, c]:
                    return CommuteCertificate((k + 1, l + 1), (r, c), comm[r, c])
        return None

    workers = _worker_count()
    if workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(check, pairs))
    else:
        results = [check(p) for p in pairs]
    for cert in results:  # joined in pair-index order
        if cert is not None:
            return CommuteVerdict(False, cert)
    return CommuteVerdict(True)


def is_border_basis(g: BorderPrebasis) -> CommuteVerdict:
    """Commuting-matrices border basis test (also valid over Q[z] coefficients)."""
    return commutators_vanish(multiplication_matrices(g))


def border_divide(f: Polynomial, g: BorderPrebasis) -> tuple[list[Polynomial], Polynomial]:
    """Border division: f = sum_j q_j g_j + r with r supported in the order ideal.

    Ties: among support terms of maximal index, the degrevlex-largest goes
    first; among minimal-length factorizations u = t' * b_j, the smallest j.
    """
    if not f.main_only():
        raise ValueError("border division needs a main-variable polynomial")
    if g.coefficient_kind() != "constant":
        raise ValueError("border division needs a constant-coefficient prebasis")
    ctx = f.ctx
    oi, bd = g.order_ideal, g.border
    if ctx.n != oi.n:
        raise ValueError("variable count mismatch")
    gens = [p.map_context(ctx) if p.ctx != ctx else p for p in g.generators()]
    quotients = [Polynomial.zero(ctx) for _ in range(g.nu)]
    remainder = Polynomial.zero(ctx)
    work = f
    index_cache: dict[Term, int] = {}

    def index_of(t: Term) -> int:
        got = index_cache.get(t)
        if got is None:
            got = o_index(oi, t)
            index_cache[t] = got
        return got

    while work:
        n = ctx.n
        by_index: dict[Term, int] = {m[:n]: index_of(m[:n]) for m in work.terms}
        top = max(by_index.values())
        if top == 0:
            remainder = remainder + work
            break
        u = DEGREVLEX.max([t for t, i in by_index.items() if i == top])
        coeff = work.coefficient(ctx.monomial(main=u))
        choice = None
        for j, b in enumerate(bd.terms):
            if term_divides(b, u) and index_of(term_div(u, b)) == top - 1:
                choice = j
                break
        if choice is None:  # pragma: no cover - impossible for valid borders
            raise RuntimeError("no border factorization found")
        cof = term_div(u, bd.terms[choice])
        step = Polynomial.from_term(ctx, cof, coeff)
        quotients[choice] = quotients[choice] + step
        work = work - step * gens[choice]
    return quotients, remainder


def is_border_basis_via_division(g: BorderPrebasis) -> bool:
    """Independent route: all neighbor S-polynomials divide to remainder zero."""
    if g.coefficient_kind() != "constant":
        raise ValueError("division route needs a constant-coefficient prebasis")
    ctx = g.ctx
    web = border_web(g.order_ideal)
    gens = g.generators()

    def xvar(k: int) -> Polynomial:
        return Polynomial.variable(ctx, ctx.main[k - 1])

    for e in web.edges:
        gi, gj = gens[e.i - 1], gens[e.j - 1]
        if e.kind == "ND":
            s = gi - xvar(e.var_k) * gj
        else:
            s = xvar(e.var_k) * gi - xvar(e.var_l) * gj
        if s.is_zero():
            continue
        _, r = border_divide(s, g)
        if not r.is_zero():
            return False
    return True


def _solve_exact(m: list[list[Fraction]], rhs: list[list[Fraction]]) -> list[list[Fraction]] | None:
    """Solve M X = RHS by exact Gaussian elimination; None when M is singular."""
    size = len(m)
    width = len(rhs[0]) if rhs else 0
    a = [list(m[r]) + list(rhs[r]) for r in range(size)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if a[r][col]), None)
        if pivot is None:
            return None
        a[col], a[pivot] = a[pivot], a[col]
        pv = a[col][col]
        a[col] = [v / pv for v in a[col]]
        for r in range(size):
            if r != col and a[r][col]:
                factor = a[r][col]
                a[r] = [v - factor * w for v, w in zip(a[r], a[col])]
    return [[a[r][size + c] for c in range(width)] for r in range(size)]


def border_basis_of_ideal(gens: Sequence[Polynomial], oi: OrderIdeal,
                          ordering: TermOrdering = DEGREVLEX) -> BorderPrebasis:
    """The unique O-border basis of the ideal, via a Groebner quotient basis.

    Raises :class:`NotZeroDimensional`, :class:`DimensionMismatch` when the
    quotient has the wrong vector space dimension, and :class:`NotABasis`
    when the order ideal fails to be a basis of P/I.
    """
    if not gens:
        raise ValueError("need generators")
    ctx = gens[0].ctx
    for p in gens:
        if p.ctx != ctx:
            raise ValueError("generators live in different contexts")
        if not p.main_only():
            raise ValueError("ideal generators must use main variables only")
    plain = Context(main=ctx.main)
    plain_gens = [p.map_context(plain) for p in gens]
    gb = buchberger(plain_gens, ordering)
    qb = quotient_basis(gb)
    if qb.mu != oi.mu:
        raise DimensionMismatch(
            f"quotient basis has {qb.mu} elements, order ideal has {oi.mu}")
    qpos = qb.index_map()

    def coords(t: Term) -> list[Fraction]:
        nf = normal_form(Polynomial.from_term(plain, t), gb)
        vec = [Fraction(0)] * qb.mu
        for mono, c in nf.terms.items():
            vec[qpos[mono[: plain.n]] - 1] = c
        return vec

    mcols = [coords(t) for t in oi.terms]
    m = [[mcols[c][r] for c in range(oi.mu)] for r in range(oi.mu)]
    bd = border(oi)
    ncols = [coords(b) for b in bd.terms]
    rhs = [[ncols[c][r] for c in range(bd.nu)] for r in range(oi.mu)]
    solution = _solve_exact(m, rhs)
    if solution is None:
        raise NotABasis("the order ideal is not a vector space basis of P/I")
    coeff_rows = tuple(tuple(Polynomial.constant(ctx, solution[i][j])
                             for j in range(bd.nu)) for i in range(oi.mu))
    result = BorderPrebasis(oi, bd, ctx, coeff_rows)
    verdict = is_border_basis(result)
    if not verdict:  # pragma: no cover - guaranteed by construction
        raise NotABasis(f"constructed prebasis fails the commuting test: "
                        f"{verdict.certificate}")
    return result
