"""Buchberger engine: reduced Groebner bases, normal forms, quotient bases,
ideal comparison, Krull dimension, and exact weight-vector search.

The engine works on an integer representation: monomials become tuples whose
leading components are an order key (additive under multiplication) and whose
last component packs the exponent vector into one integer, so divisibility is
two big-integer operations.  Coefficients stay integers via pseudo-reduction;
results are converted back to monic rational polynomials at the end.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from operator import add, sub
from typing import Iterable, Sequence

from .orderideal import OrderIdeal
from .ring import (DEGREVLEX, Context, Polynomial, Term, TermOrdering, Weights,
                   check_weights)


class NotZeroDimensional(ValueError):
    """The ideal does not have a finite quotient basis."""


class InfeasibleWeights(ValueError):
    """The weight inequality system has no solution."""


_FIELD_BITS = 8
_FIELD_MAX = (1 << (_FIELD_BITS - 1)) - 1  # 127


class _Flat:
    """Monomial packing and ordering for one context/ordering pair."""

    def __init__(self, ctx: Context, ordering: TermOrdering):
        self.ctx = ctx
        self.ordering = ordering
        self.nv = ctx.nvars
        self.n = ctx.n
        self.np = len(ctx.params)
        self.has_z = ctx.deform is not None
        self.guards = 0
        for k in range(self.nv):
            self.guards |= 1 << (_FIELD_BITS * k + _FIELD_BITS - 1)

    # packing ---------------------------------------------------------------

    def pack(self, exps: Sequence[int]) -> int:
        p = 0
        for k, e in enumerate(exps):
            if e > _FIELD_MAX:
                raise OverflowError("exponent too large for packed monomials")
            p |= e << (_FIELD_BITS * k)
        return p

    def unpack(self, p: int) -> tuple[int, ...]:
        mask = (1 << _FIELD_BITS) - 1
        return tuple((p >> (_FIELD_BITS * k)) & mask for k in range(self.nv))

    def support_mask(self, p: int) -> int:
        mask = 0
        for k in range(self.nv):
            if (p >> (_FIELD_BITS * k)) & ((1 << _FIELD_BITS) - 1):
                mask |= 1 << k
        return mask

    def divides(self, pa: int, pb: int) -> bool:
        """True when the monomial packed as pa divides the one packed as pb."""
        return ((pb | self.guards) - pa) & self.guards == self.guards

    # order keys ------------------------------------------------------------

    def key(self, exps: Sequence[int]) -> tuple[int, ...]:
        """Additive order key: main ordering, then parameter degrevlex, then z."""
        n, np_ = self.n, self.np
        parts = list(self.ordering.key(tuple(exps[:n])))
        if np_:
            par = tuple(exps[n : n + np_])
            parts.append(sum(par))
            parts.extend(-e for e in reversed(par))
        if self.has_z:
            parts.append(exps[-1])
        return tuple(parts)

    def mono(self, exps: Sequence[int]) -> tuple[int, ...]:
        return self.key(exps) + (self.pack(exps),)

    def mono_of_pack(self, p: int) -> tuple[int, ...]:
        return self.mono(self.unpack(p))

    def pack_divides(self, pa: int, pb: int) -> bool:
        return ((pb | self.guards) - pa) & self.guards == self.guards

    def pack_lcm(self, pa: int, pb: int) -> int:
        """Fieldwise maximum of two packed exponent vectors."""
        d = (pa | self.guards) - pb
        spread = ((d & self.guards) >> (_FIELD_BITS - 1)) * ((1 << (_FIELD_BITS - 1)) - 1)
        return pb + (d & spread)

    # conversions ------------------------------------------------------------

    def from_poly(self, p: Polynomial) -> dict[tuple[int, ...], int]:
        if not p.terms:
            return {}
        denom = 1
        for c in p.terms.values():
            denom = denom * c.denominator // gcd(denom, c.denominator)
        out = {}
        for mono, c in p.terms.items():
            out[self.mono(mono)] = int(c * denom)
        return out

    def from_poly_exact(self, p: Polynomial) -> dict[tuple[int, ...], Fraction]:
        return {self.mono(m): c for m, c in p.terms.items()}

    def to_poly(self, f: dict[tuple[int, ...], int], scale: int = 1) -> Polynomial:
        terms = {self.unpack(m[-1]): Fraction(c, scale) for m, c in f.items()}
        return Polynomial(self.ctx, terms)


def _content(f: dict) -> int:
    g = 0
    for c in f.values():
        g = gcd(g, c)
        if g == 1:
            return 1
    return g


def _primitive(f: dict) -> dict:
    """Divide out the integer content and normalize the leading sign."""
    if not f:
        return f
    g = _content(f)
    if f[max(f)] < 0:
        g = -g
    if g != 1:
        f = {m: c // g for m, c in f.items()}
    return f


def _fractions_to_primitive(f: dict[tuple[int, ...], Fraction]) -> dict[tuple[int, ...], int]:
    """Scale a rational dict to a primitive integer dict with positive lead."""
    if not f:
        return {}
    denom = 1
    for c in f.values():
        denom = denom * c.denominator // gcd(denom, c.denominator)
    ints = {m: int(c * denom) for m, c in f.items()}
    return _primitive(ints)


def _axpy(a: int, f: dict, b: int, shift: tuple[int, ...], g: dict) -> dict:
    """a*f - b*(shift * g), all integer."""
    if a == 1:
        out = dict(f)
    else:
        out = {m: a * c for m, c in f.items()}
    for m, c in g.items():
        mm = tuple(map(add, m, shift))
        s = out.get(mm, 0) - b * c
        if s:
            out[mm] = s
        else:
            out.pop(mm, None)
    return out


class _Engine:
    """Shared reduction machinery over a list of basis polynomials.

    Elements can be deactivated (when a later leading term divides theirs);
    dead elements stay indexable for pending pairs but are skipped as
    reducers and in future pair formation.
    """

    def __init__(self, flat: _Flat, basis: list[dict]):
        self.flat = flat
        self.basis: list[dict] = []
        self.lts: list[tuple[int, ...]] = []
        self.lt_packs: list[int] = []
        self.masks: list[int] = []
        self.alive: list[bool] = []
        self._red_idx: list[int] = []
        self._red_packs: list[int] = []
        self._red_masks: list[int] = []
        for f in basis:
            self.add(f)

    def add(self, f: dict) -> int:
        lt = max(f)
        idx = len(self.basis)
        self.basis.append(f)
        self.lts.append(lt)
        self.lt_packs.append(lt[-1])
        self.masks.append(self.flat.support_mask(lt[-1]))
        self.alive.append(True)
        self._red_idx.append(idx)
        self._red_packs.append(lt[-1])
        self._red_masks.append(self.masks[idx])
        return idx

    def replace(self, idx: int, f: dict) -> None:
        self.basis[idx] = f
        lt = max(f)
        self.lts[idx] = lt
        self.lt_packs[idx] = lt[-1]
        self.masks[idx] = self.flat.support_mask(lt[-1])
        self._rebuild()

    def deactivate(self, idx: int) -> None:
        if self.alive[idx]:
            self.alive[idx] = False
            self._rebuild()

    def _rebuild(self) -> None:
        self._red_idx = [k for k in range(len(self.basis)) if self.alive[k]]
        self._red_packs = [self.lt_packs[k] for k in self._red_idx]
        self._red_masks = [self.masks[k] for k in self._red_idx]

    def active(self) -> list[int]:
        return [k for k in range(len(self.basis)) if self.alive[k]]

    def find_reducer(self, mono: tuple[int, ...], mono_mask: int, skip: int = -1) -> int:
        pm = mono[-1]
        guards = self.flat.guards
        base = pm | guards
        inv = ~mono_mask
        for pos, mask in enumerate(self._red_masks):
            if mask & inv:
                continue
            if (base - self._red_packs[pos]) & guards == guards:
                idx = self._red_idx[pos]
                if idx != skip:
                    return idx
        return -1

    def full_reduce(self, f: dict, skip: int = -1) -> dict[tuple[int, ...], Fraction]:
        """Full reduction modulo the basis, exact over Q.

        The working polynomial lives in a dict with a monomial max-heap on
        the side (lazy deletion), so each reduction step only touches the
        reducer's support.
        """
        work: dict[tuple[int, ...], Fraction] = {m: Fraction(c) for m, c in f.items()}
        heap = [tuple(-x for x in m) for m in work]
        heapq.heapify(heap)
        result: dict[tuple[int, ...], Fraction] = {}
        find = self.find_reducer
        support_mask = self.flat.support_mask
        while heap:
            neg = heapq.heappop(heap)
            m = tuple(-x for x in neg)
            c = work.pop(m, None)
            if c is None:
                continue
            idx = find(m, support_mask(m[-1]), skip)
            if idx < 0:
                result[m] = c
                continue
            g = self.basis[idx]
            ltg = self.lts[idx]
            factor = c / g[ltg]
            shift = tuple(map(sub, m, ltg))
            for mm, cc in g.items():
                if mm == ltg:
                    continue
                key = tuple(map(add, mm, shift))
                prev = work.get(key)
                if prev is None:
                    work[key] = -factor * cc
                    heapq.heappush(heap, tuple(-x for x in key))
                else:
                    s = prev - factor * cc
                    if s:
                        work[key] = s
                    else:
                        del work[key]
        return result

    def normal_form_exact(self, p: "Polynomial") -> "Polynomial":
        """Exact rational normal form of a polynomial against the basis."""
        flat = self.flat
        return flat.to_poly(self.full_reduce(flat.from_poly_exact(p)))


def _buchberger_int(flat: _Flat, gens: list[dict]) -> list[dict]:
    """Integer Buchberger loop with Gebauer-Moeller pair pruning.

    New basis elements are tail-reduced on arrival and supersede active
    elements whose leading term they divide.
    """
    eng = _Engine(flat, [])
    alive_pairs: dict[tuple[int, int], int] = {}  # (i, j) -> packed lcm
    heap: list = []
    counter = 0
    divides = flat.pack_divides
    pack_lcm = flat.pack_lcm

    def update(new_idx: int) -> None:
        nonlocal counter
        h_pack = eng.lt_packs[new_idx]
        h_mask = eng.masks[new_idx]
        cand = [(g, pack_lcm(eng.lt_packs[g], h_pack))
                for g in eng.active() if g != new_idx]
        kept: list[tuple[int, int]] = []
        while cand:
            g, l = cand.pop()
            coprime = not (eng.masks[g] & h_mask)
            if coprime or (
                not any(divides(l2, l) and l2 != l for _, l2 in cand)
                and not any(divides(l2, l) for _, l2 in kept)
            ):
                kept.append((g, l))
        for (i, j), l_old in list(alive_pairs.items()):
            if (divides(h_pack, l_old)
                    and pack_lcm(eng.lt_packs[i], h_pack) != l_old
                    and pack_lcm(eng.lt_packs[j], h_pack) != l_old):
                del alive_pairs[(i, j)]
        for g, l in kept:
            if eng.masks[g] & h_mask:  # drop coprime pairs (product criterion)
                alive_pairs[(g, new_idx)] = l
                counter += 1
                heapq.heappush(heap, (flat.mono_of_pack(l), counter, g, new_idx))
        # elements whose leading term the newcomer divides are now redundant
        for g in eng.active():
            if g != new_idx and divides(h_pack, eng.lt_packs[g]):
                eng.deactivate(g)

    def absorb(f: dict) -> None:
        r = _fractions_to_primitive(eng.full_reduce(f))
        if r:
            update(eng.add(r))

    for f in gens:
        absorb(f)

    while heap:
        lmono, _, i, j = heapq.heappop(heap)
        if alive_pairs.get((i, j)) != lmono[-1]:
            continue
        del alive_pairs[(i, j)]
        s = _spoly(flat, eng.basis[i], eng.basis[j], eng.lts[i], eng.lts[j], lmono)
        if s:
            absorb(s)

    return _interreduce_int(flat, eng)


def _spoly(flat: _Flat, f: dict, g: dict, ltf, ltg, l) -> dict:
    cf, cg = f[ltf], g[ltg]
    d = gcd(cf, cg)
    a, b = cg // d, cf // d
    uf = tuple(map(sub, l, ltf))
    ug = tuple(map(sub, l, ltg))
    out: dict = {}
    for m, c in f.items():
        out[tuple(map(add, m, uf))] = a * c
    for m, c in g.items():
        mm = tuple(map(add, m, ug))
        s = out.get(mm, 0) - b * c
        if s:
            out[mm] = s
        else:
            out.pop(mm, None)
    return out


def _interreduce_int(flat: _Flat, eng: _Engine) -> list[dict]:
    """Minimalize leading terms, then tail-reduce each survivor."""
    order = sorted(eng.active(), key=lambda k: eng.lts[k])
    minimal: list[int] = []
    for k in order:
        if not any(flat.pack_divides(eng.lt_packs[m], eng.lt_packs[k])
                   for m in minimal):
            minimal.append(k)
    sub_eng = _Engine(flat, [eng.basis[k] for k in minimal])
    out: list[dict] = []
    for idx in range(len(minimal)):
        r = _fractions_to_primitive(sub_eng.full_reduce(sub_eng.basis[idx], skip=idx))
        if r:
            out.append(r)
            sub_eng.replace(idx, r)
    out.sort(key=max)
    return out


# ---------------------------------------------------------------------------
# public interface


@dataclass(frozen=True)
class GroebnerBasis:
    ctx: Context
    ordering: TermOrdering
    elements: tuple[Polynomial, ...]

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def contains_one(self) -> bool:
        return any(p.is_constant() and not p.is_zero() for p in self.elements)


def buchberger(gens: Sequence[Polynomial], ordering: TermOrdering = DEGREVLEX) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``."""
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise ValueError("need at least one nonzero generator")
    ctx = gens[0].ctx
    for g in gens:
        if g.ctx != ctx:
            raise ValueError("generators live in different contexts")
    flat = _Flat(ctx, ordering)
    raw = _buchberger_int(flat, [flat.from_poly(g) for g in gens])
    elements = []
    for f in raw:
        lc = f[max(f)]
        elements.append(flat.to_poly(f, scale=lc))
    return GroebnerBasis(ctx, ordering, tuple(elements))


def normal_form(f: Polynomial, gb: GroebnerBasis) -> Polynomial:
    """Remainder of full reduction; zero iff f lies in the ideal."""
    if f.ctx != gb.ctx:
        raise ValueError("context mismatch")
    if f.is_zero():
        return f
    flat = _Flat(gb.ctx, gb.ordering)
    eng = _Engine(flat, [flat.from_poly(g) for g in gb.elements])
    return eng.normal_form_exact(f)


def ideal_member(f: Polynomial, gens: Sequence[Polynomial] | GroebnerBasis,
                 ordering: TermOrdering = DEGREVLEX) -> bool:
    gb = gens if isinstance(gens, GroebnerBasis) else buchberger(gens, ordering)
    return normal_form(f, gb).is_zero()


def ideal_equal(a: Sequence[Polynomial], b: Sequence[Polynomial],
                ordering: TermOrdering = DEGREVLEX) -> bool:
    """Exact ideal equality via mutual normal-form vanishing."""
    gb_a = buchberger(a, ordering)
    if not all(normal_form(g, gb_a).is_zero() for g in b):
        return False
    gb_b = buchberger(b, ordering)
    return all(normal_form(g, gb_b).is_zero() for g in a)


def interreduce(polys: Sequence[Polynomial], ordering: TermOrdering = DEGREVLEX) -> list[Polynomial]:
    """Mutually reduce a list of polynomials (no S-pairs); monic survivors."""
    live = [p for p in polys if not p.is_zero()]
    if not live:
        return []
    ctx = live[0].ctx
    flat = _Flat(ctx, ordering)
    basis = [_primitive(flat.from_poly(p)) for p in live]
    changed = True
    while changed:
        changed = False
        basis = [f for f in basis if f]
        eng = _Engine(flat, basis)
        for idx in range(len(basis)):
            if not eng.basis[idx]:
                continue
            r = _fractions_to_primitive(eng.full_reduce(eng.basis[idx], skip=idx))
            if r != eng.basis[idx]:
                changed = True
                if r:
                    eng.replace(idx, r)
                else:
                    eng.basis[idx] = {}
                    eng.deactivate(idx)
        basis = [f for f in eng.basis if f]
    basis.sort(key=max)
    out = []
    for f in basis:
        lc = f[max(f)]
        out.append(flat.to_poly(f, scale=lc))
    return out


def quotient_basis(gb: GroebnerBasis) -> OrderIdeal:
    """The order ideal of terms outside the leading term ideal."""
    ctx = gb.ctx
    if ctx.params or ctx.deform:
        raise ValueError("quotient basis needs a main-variables-only context")
    n = ctx.n
    lts = [g.leading_term(gb.ordering) for g in gb.elements]
    for k in range(n):
        if not any(all(e == 0 for i, e in enumerate(lt) if i != k) and lt[k] > 0
                   for lt in lts):
            if not any(all(e == 0 for e in lt) for lt in lts):
                raise NotZeroDimensional(
                    f"no pure power of {ctx.main[k]} among the leading terms")
    basis: list[Term] = []
    frontier = [(0,) * n]
    seen = {(0,) * n}
    while frontier:
        t = frontier.pop()
        if any(all(a <= b for a, b in zip(lt, t)) for lt in lts):
            continue
        basis.append(t)
        for k in range(n):
            up = t[:k] + (t[k] + 1,) + t[k + 1:]
            if up not in seen:
                seen.add(up)
                frontier.append(up)
    if not basis:
        raise NotZeroDimensional("the ideal is the unit ideal")
    return OrderIdeal.from_terms(basis)


def krull_dimension(gb: GroebnerBasis) -> int:
    """Dimension of the quotient ring, combinatorially from the leading terms."""
    if gb.contains_one():
        return -1
    flat = _Flat(gb.ctx, gb.ordering)
    nv = gb.ctx.nvars
    supports = []
    for g in gb.elements:
        mono = max(flat.from_poly(g))
        exps = flat.unpack(mono[-1])
        supports.append(frozenset(k for k, e in enumerate(exps) if e))
    supports = sorted(set(supports), key=len)
    full = frozenset(range(nv))
    cache: dict[frozenset, int] = {}

    def best(avail: frozenset) -> int:
        got = cache.get(avail)
        if got is not None:
            return got
        blocker = None
        for s in supports:
            if s <= avail:
                blocker = s
                break
        if blocker is None:
            res = len(avail)
        else:
            res = max(best(avail - {v}) for v in blocker)
        cache[avail] = res
        return res

    return best(full)


# ---------------------------------------------------------------------------
# weight vectors via Fourier-Motzkin elimination


def _eliminate_var(cons: list[tuple[list[Fraction], Fraction]], k: int):
    """Project away variable k from constraints sum(a_i w_i) >= r."""
    keep, lower, upper = [], [], []
    for coeffs, rhs in cons:
        a = coeffs[k]
        rest = coeffs[:k] + coeffs[k + 1:]
        if a == 0:
            keep.append((rest, rhs))
        elif a > 0:
            lower.append((a, rest, rhs))   # w_k >= (rhs - rest.w)/a
        else:
            upper.append((a, rest, rhs))   # w_k <= (rhs - rest.w)/a
    for a, rest_l, rhs_l in lower:
        for b, rest_u, rhs_u in upper:
            # (rhs_l - rest_l.w)/a <= (rhs_u - rest_u.w)/b   with a>0, b<0
            coeffs = [(-b) * cl + a * cu for cl, cu in zip(rest_l, rest_u)]
            rhs = (-b) * rhs_l + a * rhs_u
            keep.append((coeffs, rhs))
    return keep, lower, upper


def solve_weight_inequalities(diffs: Iterable[Term], n: int) -> Weights:
    """Find positive integers W with <W, d> >= 1 for every difference d.

    Solved exactly by Fourier-Motzkin elimination with back-substitution,
    then denominator clearing; raises :class:`InfeasibleWeights` otherwise.
    """
    cons: list[tuple[list[Fraction], Fraction]] = []
    for d in diffs:
        cons.append(([Fraction(v) for v in d], Fraction(1)))
    for k in range(n):
        row = [Fraction(0)] * n
        row[k] = Fraction(1)
        cons.append((row, Fraction(1)))
    levels = []
    work = cons
    for k in range(n - 1, -1, -1):
        work, lower, upper = _eliminate_var(work, k)
        levels.append((k, lower, upper))
    for coeffs, rhs in work:
        if rhs > 0:
            raise InfeasibleWeights("weight system admits no solution")
    values: list[Fraction] = [Fraction(0)] * n
    for k, lower, upper in reversed(levels):
        partial = values[:k] + values[k + 1:]
        lo = None
        for a, rest, rhs in lower:
            bound = (rhs - sum(c * v for c, v in zip(rest, partial))) / a
            lo = bound if lo is None or bound > lo else lo
        hi = None
        for a, rest, rhs in upper:
            bound = (rhs - sum(c * v for c, v in zip(rest, partial))) / a
            hi = bound if hi is None or bound < hi else hi
        if lo is None:
            lo = Fraction(1)
        if hi is not None and lo > hi:
            raise InfeasibleWeights("weight system admits no solution")
        values[k] = lo
    denom = 1
    for v in values:
        denom = denom * v.denominator // gcd(denom, v.denominator)
    w = tuple(int(v * denom) for v in values)
    return check_weights(w, n)


def find_weight_vector(prebasis, leading: Sequence[Term] | None = None) -> Weights:
    """A weight vector making each border term the degree form of its generator.

    Accepts a border prebasis; the returned W satisfies
    ``<W, exp(b_j) - exp(t)> >= 1`` for every generator g_j and every
    support term t != b_j, and is re-checked before returning.
    """
    n = prebasis.order_ideal.n
    borders = list(prebasis.border.terms) if leading is None else list(leading)
    diffs: list[Term] = []
    for j, b in enumerate(borders):
        for i, t in enumerate(prebasis.order_ideal.terms):
            if not prebasis.coeffs[i][j].is_zero():
                diffs.append(tuple(x - y for x, y in zip(b, t)))
    w = solve_weight_inequalities(diffs, n)
    for d in diffs:
        if sum(a * b for a, b in zip(w, d)) < 1:
            raise InfeasibleWeights("computed weights fail the inequality recheck")
    return w
