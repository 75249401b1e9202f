"""Generators of the border basis scheme ideal and its structure.

Two constructions of the vanishing ideal: entries of commutators of the
generic multiplication matrices, and lifted neighbor syzygies (next-door /
across-the-street blocks).  On top of that: equivalence checking between the
two, removal of provably redundant blocks, linear-parameter elimination for
affine-cell detection, and minimal generator counts under a grading.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .borderbasis import BorderPrebasis, multiplication_matrices
from .groebner import interreduce
from .orderideal import Border, BorderWeb, OrderIdeal, WebEdge, border, border_web
from .ring import (Context, Polynomial, PolyMatrix, Term, Weights, check_weights,
                   default_main_names, term_degree)


class NotHomogeneous(ValueError):
    """A generator fails to be homogeneous under the given grading."""


class IdentityFailed(ValueError):
    """An exact polynomial identity expected to hold did not."""


def scheme_context(oi: OrderIdeal, *, homogeneous: bool = False,
                   weights: Weights | None = None,
                   names: Sequence[str] | None = None,
                   deform: str | None = None) -> Context:
    """Context with one parameter c_ij per coefficient slot of the generic prebasis.

    In the homogeneous case only slots with matching weighted degrees exist.
    """
    main = tuple(names) if names is not None else default_main_names(oi.n)
    bd = border(oi)
    mu, nu = oi.mu, bd.nu
    compact = mu <= 9 and nu <= 9
    pairs: list[tuple[int, int]] = []
    pnames: list[str] = []
    if homogeneous:
        if weights is None:
            raise ValueError("homogeneous scheme needs a weight vector")
        w = check_weights(weights, oi.n)
    for i, t in enumerate(oi.terms, start=1):
        for j, b in enumerate(bd.terms, start=1):
            if homogeneous and term_degree(t, w) != term_degree(b, w):
                continue
            pairs.append((i, j))
            pnames.append(f"c{i}{j}" if compact else f"c{i}_{j}")
    return Context(main=main, params=tuple(pnames), deform=deform,
                   param_pairs=tuple(pairs))


def generic_prebasis(oi: OrderIdeal, *, homogeneous: bool = False,
                     weights: Weights | None = None,
                     names: Sequence[str] | None = None,
                     deform: str | None = None) -> BorderPrebasis:
    """g_j = b_j - sum c_ij t_i, restricted to matching degrees when homogeneous."""
    ctx = scheme_context(oi, homogeneous=homogeneous, weights=weights,
                         names=names, deform=deform)
    bd = border(oi)
    zero = Polynomial.zero(ctx)
    rows = []
    allowed = set(ctx.param_pairs)
    for i in range(1, oi.mu + 1):
        row = []
        for j in range(1, bd.nu + 1):
            if (i, j) in allowed:
                row.append(Polynomial.variable(ctx, ctx.param_name(i, j)))
            else:
                row.append(zero)
        rows.append(tuple(row))
    return BorderPrebasis(oi, bd, ctx, tuple(rows))


def generic_matrices(oi: OrderIdeal, *, homogeneous: bool = False,
                     weights: Weights | None = None,
                     names: Sequence[str] | None = None) -> list[PolyMatrix]:
    return multiplication_matrices(
        generic_prebasis(oi, homogeneous=homogeneous, weights=weights, names=names))


@dataclass(frozen=True)
class GeneratorBlock:
    """A labeled batch of scheme-ideal generators (c-variable polynomials)."""

    kind: str                      # "COMM" | "ND" | "AS"
    indices: tuple[int, int]
    polys: tuple[Polynomial, ...]
    corner: bool = False

    @property
    def label(self) -> str:
        return f"{self.kind}({self.indices[0]},{self.indices[1]})"


def commutator_blocks(oi: OrderIdeal, *, homogeneous: bool = False,
                      weights: Weights | None = None,
                      names: Sequence[str] | None = None) -> list[GeneratorBlock]:
    """One block per variable pair k < l with the nonzero commutator entries."""
    mats = generic_matrices(oi, homogeneous=homogeneous, weights=weights, names=names)
    blocks = []
    for k in range(len(mats)):
        for l in range(k + 1, len(mats)):
            comm = mats[k] * mats[l] - mats[l] * mats[k]
            polys = [comm[r, c] for r in range(comm.rows) for c in range(comm.cols)
                     if comm[r, c]]
            blocks.append(GeneratorBlock("COMM", (k + 1, l + 1), tuple(polys)))
    return blocks


def _column(g: BorderPrebasis, j: int) -> list[Polynomial]:
    return [g.coeffs[i][j] for i in range(g.mu)]


def _sub_vec(a: Sequence[Polynomial], b: Sequence[Polynomial]) -> list[Polynomial]:
    return [x - y for x, y in zip(a, b)]


def _edge_vector(e: WebEdge, mats: Sequence[PolyMatrix], g: BorderPrebasis) -> list[Polynomial]:
    """ND(i,j): c_i - A_k c_j.  AS(i,j): A_k c_i - A_l c_j."""
    if e.kind == "ND":
        return _sub_vec(_column(g, e.i - 1),
                        mats[e.var_k - 1].mul_vector(_column(g, e.j - 1)))
    return _sub_vec(mats[e.var_k - 1].mul_vector(_column(g, e.i - 1)),
                    mats[e.var_l - 1].mul_vector(_column(g, e.j - 1)))


def syzygy_blocks(oi: OrderIdeal, *, names: Sequence[str] | None = None
                  ) -> list[GeneratorBlock]:
    """One ND/AS block per border web edge (plain, non-homogeneous case)."""
    g = generic_prebasis(oi, names=names)
    mats = multiplication_matrices(g)
    web = border_web(oi)
    blocks = []
    for e in web.edges:
        vec = _edge_vector(e, mats, g)
        polys = tuple(p for p in vec if p)
        blocks.append(GeneratorBlock(e.kind, (e.i, e.j), polys, corner=e.corner))
    return blocks


def block_polynomials(blocks: Iterable[GeneratorBlock]) -> list[Polynomial]:
    return [p for b in blocks for p in b.polys]


def coefficient_ring_context(ctx: Context) -> Context:
    """The polynomial ring in the parameters alone (parameters become main variables)."""
    return Context(main=ctx.params)


def to_coefficient_ring(polys: Iterable[Polynomial]) -> list[Polynomial]:
    out = []
    target: Context | None = None
    for p in polys:
        if target is None:
            target = coefficient_ring_context(p.ctx)
        out.append(p.map_context(target))
    return out


# ---------------------------------------------------------------------------
# equivalence of the two constructions


@dataclass(frozen=True)
class EquivalenceReport:
    commutator_count: int
    syzygy_count: int
    contained: bool
    equal_after_corner_removal: bool
    missing_from_syzygies: tuple[Polynomial, ...]
    extra_after_removal: tuple[Polynomial, ...]

    @property
    def ok(self) -> bool:
        return self.contained and self.equal_after_corner_removal


def check_generation_equivalence(oi: OrderIdeal, *,
                                 names: Sequence[str] | None = None) -> EquivalenceReport:
    """Compare commutator entries and neighbor-syzygy entries up to sign.

    The commutator entries must all occur among the ND/AS polynomials, and
    after deleting the across-the-corner AS blocks the two sets coincide.
    """
    comm = {p.sign_normalized() for p in block_polynomials(commutator_blocks(oi, names=names))}
    syz_blocks = syzygy_blocks(oi, names=names)
    syz = {p.sign_normalized() for p in block_polynomials(syz_blocks)}
    kept = {p.sign_normalized()
            for b in syz_blocks if not b.corner for p in b.polys}
    missing = tuple(sorted(comm - syz, key=str))
    extra = tuple(sorted(kept.symmetric_difference(comm), key=str))
    return EquivalenceReport(
        commutator_count=len(comm),
        syzygy_count=len(syz),
        contained=not missing,
        equal_after_corner_removal=not extra,
        missing_from_syzygies=missing,
        extra_after_removal=extra,
    )


def corner_certificate(oi: OrderIdeal, edge: WebEdge, *,
                       names: Sequence[str] | None = None) -> bool:
    """Verify the exact identity expressing a corner AS vector through its witness:

    A_k c_i - A_l c_j = A_k (c_i - A_l c_m) + (A_k A_l - A_l A_k) c_m
                        - A_l (c_j - A_k c_m)
    entrywise over the parameter ring.
    """
    if edge.kind != "AS" or not edge.corner or edge.witness is None:
        raise ValueError("corner certificate needs a corner-flagged AS edge")
    g = generic_prebasis(oi, names=names)
    mats = multiplication_matrices(g)
    ak = mats[edge.var_k - 1]
    al = mats[edge.var_l - 1]
    ci = _column(g, edge.i - 1)
    cj = _column(g, edge.j - 1)
    cm = _column(g, edge.witness - 1)
    lhs = _sub_vec(ak.mul_vector(ci), al.mul_vector(cj))
    term1 = ak.mul_vector(_sub_vec(ci, al.mul_vector(cm)))
    term2 = (ak * al - al * ak).mul_vector(cm)
    term3 = al.mul_vector(_sub_vec(cj, ak.mul_vector(cm)))
    rhs = [a + b - c for a, b, c in zip(term1, term2, term3)]
    for r, (x, y) in enumerate(zip(lhs, rhs)):
        if x != y:
            raise IdentityFailed(f"corner identity fails in entry {r + 1}")
    return True


# ---------------------------------------------------------------------------
# removing redundant blocks


@dataclass(frozen=True)
class BlockRemoval:
    rule: str                  # "corner" | "nd-triple" | "as-triple"
    removed: str
    related: tuple[str, ...]
    alternatives: tuple[str, ...]


def minimalize_blocks(oi: OrderIdeal, blocks: Sequence[GeneratorBlock], *,
                      names: Sequence[str] | None = None
                      ) -> tuple[list[GeneratorBlock], list[BlockRemoval]]:
    """Drop provably redundant ND/AS blocks; every removal is identity-checked.

    Corner AS blocks go first.  Then, for b_k = x_l b_i = x_m b_j, the block
    AS(i,j) is dropped after verifying AS(i,j) = ND(k,j) - ND(k,i); for
    x_a b_i = x_b b_j = x_c b_k, the last AS block of the triple is dropped
    after verifying AS(i,j) = AS(i,k) - AS(j,k).
    """
    g = generic_prebasis(oi, names=names)
    mats = multiplication_matrices(g)
    web = border_web(oi)
    edge_by_label = {e.label(): e for e in web.edges}
    kept: dict[str, GeneratorBlock] = {b.label: b for b in blocks}
    log: list[BlockRemoval] = []

    def vec(label: str) -> list[Polynomial]:
        return _edge_vector(edge_by_label[label], mats, g)

    # corner blocks are redundant outright
    for b in list(blocks):
        if b.kind == "AS" and b.corner and b.label in kept:
            corner_certificate(oi, edge_by_label[b.label], names=names)
            del kept[b.label]
            log.append(BlockRemoval("corner", b.label, (), ()))

    bpos = web.border.index_map()
    terms = web.border.terms

    # rule a: a border term with two next-door parents
    nd_edges = [e for e in web.edges if e.kind == "ND"]
    triples_a = []
    for a in nd_edges:
        for b in nd_edges:
            if a.i == b.i and a.j < b.j:
                triples_a.append((a.i, a.j, b.j, a, b))
    for k, i, j, e1, e2 in sorted(triples_a, key=lambda t: t[:3]):
        as_label = f"AS({min(i, j)},{max(i, j)})"
        nd1, nd2 = e1.label(), e2.label()
        if as_label in kept and nd1 in kept and nd2 in kept and as_label in edge_by_label:
            # AS(i,j) = ND(k,j) - ND(k,i) entrywise
            lhs = vec(as_label)
            rhs = _sub_vec(vec(nd2), vec(nd1))
            if lhs != rhs:
                rhs = _sub_vec(vec(nd1), vec(nd2))
                if lhs != rhs:
                    raise IdentityFailed(
                        f"{as_label} is not the difference of {nd1} and {nd2}")
            del kept[as_label]
            log.append(BlockRemoval("nd-triple", as_label, (nd1, nd2),
                                    (nd1, nd2)))

    # rule b: three border terms sharing one product
    products: dict[Term, list[WebEdge]] = {}
    for e in web.edges:
        if e.kind != "AS":
            continue
        b_i = terms[e.i - 1]
        prod = tuple(x + (1 if v == e.var_k - 1 else 0) for v, x in enumerate(b_i))
        products.setdefault(prod, []).append(e)
    for prod in sorted(products):
        group = products[prod]
        if len(group) < 3:
            continue
        idxs = sorted({e.i for e in group} | {e.j for e in group})
        for a_pos in range(len(idxs)):
            for b_pos in range(a_pos + 1, len(idxs)):
                for c_pos in range(b_pos + 1, len(idxs)):
                    i, j, k = idxs[a_pos], idxs[b_pos], idxs[c_pos]
                    l_ij, l_ik, l_jk = f"AS({i},{j})", f"AS({i},{k})", f"AS({j},{k})"
                    if all(lbl in kept and lbl in edge_by_label
                           for lbl in (l_ij, l_ik, l_jk)):
                        lhs = vec(l_ij)
                        rhs = _sub_vec(vec(l_ik), vec(l_jk))
                        if lhs != rhs:
                            raise IdentityFailed(
                                f"{l_ij} is not the difference of {l_ik} and {l_jk}")
                        del kept[l_jk]
                        log.append(BlockRemoval("as-triple", l_jk,
                                                (l_ij, l_ik),
                                                (l_ij, l_ik, l_jk)))
    return [b for b in blocks if b.label in kept], log


# ---------------------------------------------------------------------------
# affine cells by linear parameter elimination


@dataclass(frozen=True)
class CellSolution:
    """Result of eliminating linearly occurring parameters.

    ``bound`` maps eliminated parameters to polynomials in the free ones;
    an empty ``residual`` certifies an affine cell of dimension ``len(free)``.
    """

    ctx: Context
    free: tuple[str, ...]
    bound: dict[str, Polynomial] = field(default_factory=dict)
    residual: tuple[Polynomial, ...] = ()
    prebasis: BorderPrebasis | None = None

    @property
    def is_affine_cell(self) -> bool:
        return not self.residual

    @property
    def dimension(self) -> int:
        return len(self.free)


def _linear_candidates(p: Polynomial) -> list[int]:
    """Parameter slots occurring as a lone linear monomial and nowhere else in p."""
    ctx = p.ctx
    n = ctx.n
    np_ = len(ctx.params)
    seen_alone: set[int] = set()
    seen_elsewhere: set[int] = set()
    for mono in p.terms:
        par = mono[n : n + np_]
        z = mono[-1] if ctx.deform else 0
        if not any(mono[:n]) and not z and sum(par) == 1:
            slot = par.index(1)
            seen_alone.add(slot)
            continue
        for slot, e in enumerate(par):
            if e:
                seen_elsewhere.add(slot)
    return sorted(seen_alone - seen_elsewhere)


def eliminate_linear_parameters(blocks: Sequence[GeneratorBlock] | Sequence[Polynomial],
                                ctx: Context | None = None,
                                prebasis: BorderPrebasis | None = None) -> CellSolution:
    """Iteratively solve for parameters that occur linearly with a unit coefficient.

    Deterministic policy: among all eligible (generator, parameter) pairs,
    bind the parameter with the smallest grid position, breaking ties by the
    generator's position in the list; substitute everywhere; repeat to a
    fixpoint.  Bound images are back-substituted so they only mention free
    parameters; the residual generators are interreduced.
    """
    polys: list[Polynomial] = []
    for item in blocks:
        if isinstance(item, GeneratorBlock):
            polys.extend(item.polys)
        else:
            polys.append(item)
    if ctx is None:
        if not polys:
            raise ValueError("cannot infer the context from an empty system")
        ctx = polys[0].ctx
    gens = [p for p in polys if not p.is_zero()]
    bound: dict[str, Polynomial] = {}
    order: list[str] = []

    while True:
        best: tuple[int, int] | None = None
        for gi, p in enumerate(gens):
            for slot in _linear_candidates(p):
                cand = (slot, gi)
                if best is None or cand < best:
                    best = cand
        if best is None:
            break
        slot, gi = best
        name = ctx.params[slot]
        p = gens[gi]
        coeff = p.coefficient(ctx.monomial(param=tuple(
            1 if s == slot else 0 for s in range(len(ctx.params)))))
        image = Polynomial.variable(ctx, name) - p.scale(Fraction(1) / coeff)
        bound[name] = image
        order.append(name)
        gens = [q.substitute({name: image}) for q in gens]
        gens = [q for q in gens if not q.is_zero()]

    solved: dict[str, Polynomial] = {}
    for name in reversed(order):
        image = bound[name]
        pending = {v: solved[v] for v in image.variables_used() if v in solved}
        if pending:
            image = image.substitute(pending)
        solved[name] = image
    bound = {name: solved[name] for name in order}
    free = tuple(nm for nm in ctx.params if nm not in bound)
    residual = tuple(interreduce(gens)) if gens else ()
    return CellSolution(ctx=ctx, free=free, bound=bound, residual=residual,
                        prebasis=prebasis)


def affine_cell(oi: OrderIdeal, *, homogeneous: bool = False,
                weights: Weights | None = None,
                names: Sequence[str] | None = None) -> CellSolution:
    """Eliminate linear parameters from the commutator generators of the scheme."""
    g = generic_prebasis(oi, homogeneous=homogeneous, weights=weights, names=names)
    blocks = commutator_blocks(oi, homogeneous=homogeneous, weights=weights, names=names)
    return eliminate_linear_parameters(blocks, ctx=g.ctx, prebasis=g)


# ---------------------------------------------------------------------------
# minimal generator counts under a grading


def _monomials_of_weight(names: Sequence[str], weights: Sequence[int], target: int,
                         min_total: int = 0) -> Iterable[dict[str, int]]:
    """All exponent dictionaries with sum(w_i e_i) == target (and >= min_total vars)."""

    def rec(pos: int, remaining: int, current: dict[str, int]):
        if pos == len(names):
            if remaining == 0 and sum(current.values()) >= min_total:
                yield dict(current)
            return
        w = weights[pos]
        for e in range(remaining // w + 1):
            if e:
                current[names[pos]] = e
            yield from rec(pos + 1, remaining - w * e, current)
            current.pop(names[pos], None)

    yield from rec(0, target, {})


def _rank(rows: list[dict], existing: dict | None = None) -> tuple[int, dict]:
    """Sparse exact row reduction; returns (added rank, pivot store)."""
    pivots = dict(existing) if existing else {}
    added = 0
    for row in rows:
        row = dict(row)
        while row:
            lead = max(row)
            if lead not in pivots:
                c = row[lead]
                pivots[lead] = {m: v / c for m, v in row.items()}
                added += 1
                break
            piv = pivots[lead]
            c = row[lead]
            for m, v in piv.items():
                s = row.get(m, Fraction(0)) - c * v
                if s:
                    row[m] = s
                else:
                    row.pop(m, None)
    return added, pivots


def minimal_generator_count(gens: Sequence[Polynomial],
                            grading: Mapping[str, int]) -> int:
    """Number of elements in a minimal homogeneous generating system.

    Degree by degree: the new generators in degree d are those independent of
    the span of (monomial multiples of) lower-degree generators, computed by
    exact linear algebra.
    """
    live = [p for p in gens if not p.is_zero()]
    if not live:
        return 0
    ctx = live[0].ctx
    for name, value in grading.items():
        if value < 1:
            raise ValueError("grading values must be positive")
    widx: dict[int, int] = {}
    for name, value in grading.items():
        widx[ctx.index_of(name)] = value

    def weight(mono) -> int:
        total = 0
        for k, e in enumerate(mono):
            if e:
                if k not in widx:
                    raise NotHomogeneous(f"variable {ctx.names[k]!r} has no grading")
                total += widx[k] * e
        return total

    by_degree: dict[int, list[Polynomial]] = {}
    for p in live:
        degs = {weight(m) for m in p.terms}
        if len(degs) != 1:
            raise NotHomogeneous(f"generator {p} is not homogeneous")
        by_degree.setdefault(degs.pop(), []).append(p)

    graded_names = sorted(grading, key=ctx.index_of)
    graded_weights = [grading[nm] for nm in graded_names]
    count = 0
    degrees = sorted(by_degree)
    for d in degrees:
        lower_rows: list[dict] = []
        for d0 in degrees:
            if d0 >= d:
                break
            for p in by_degree[d0]:
                for expdict in _monomials_of_weight(graded_names, graded_weights,
                                                    d - d0, min_total=1):
                    mult = Polynomial.one(ctx)
                    for nm, e in expdict.items():
                        mult = mult * Polynomial.variable(ctx, nm) ** e
                    lower_rows.append(dict((mult * p).terms))
        base_rank, pivots = _rank(lower_rows)
        new_rank, _ = _rank([dict(p.terms) for p in by_degree[d]], pivots)
        count += new_rank
    return count
