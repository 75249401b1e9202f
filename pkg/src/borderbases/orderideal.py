"""Order ideals, borders, O-indices, border forms, and the border web."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .ring import (DEGREVLEX, Polynomial, Term, Weights, check_weights,
                   term_degree, term_divides, term_divisors, term_string)


def is_order_ideal(terms: Iterable[Term]) -> bool:
    """True when the set is nonempty and closed under taking divisors."""
    pool = set(terms)
    if not pool:
        return False
    lengths = {len(t) for t in pool}
    if len(lengths) != 1:
        raise ValueError("terms must share one variable count")
    for t in pool:
        for k, e in enumerate(t):
            if e:
                below = t[:k] + (e - 1,) + t[k + 1:]
                if below not in pool:
                    return False
    return True


@dataclass(frozen=True)
class OrderIdeal:
    """A finite divisor-closed set of terms, canonically sorted (degrevlex ascending)."""

    n: int
    terms: tuple[Term, ...]

    def __post_init__(self) -> None:
        if not is_order_ideal(self.terms):
            raise ValueError("not an order ideal")
        if any(len(t) != self.n for t in self.terms):
            raise ValueError("term width does not match the variable count")

    @staticmethod
    def from_terms(terms: Iterable[Term]) -> "OrderIdeal":
        pool = list(terms)
        if not pool:
            raise ValueError("an order ideal is nonempty")
        n = len(pool[0])
        return OrderIdeal(n, tuple(DEGREVLEX.sort(set(pool))))

    @property
    def mu(self) -> int:
        return len(self.terms)

    def __contains__(self, t: Term) -> bool:
        return t in set(self.terms)

    def index_map(self) -> dict[Term, int]:
        """Term -> 1-based position in the canonical numbering."""
        return {t: i + 1 for i, t in enumerate(self.terms)}

    def max_degree(self, weights: Weights | None = None) -> int:
        return max(term_degree(t, weights) for t in self.terms)

    def describe(self, names: Sequence[str]) -> str:
        return "{" + ", ".join(term_string(t, names) for t in self.terms) + "}"


@dataclass(frozen=True)
class Border:
    """The border of an order ideal, canonically sorted (degrevlex ascending)."""

    n: int
    terms: tuple[Term, ...]

    @property
    def nu(self) -> int:
        return len(self.terms)

    def __contains__(self, t: Term) -> bool:
        return t in set(self.terms)

    def index_map(self) -> dict[Term, int]:
        return {t: i + 1 for i, t in enumerate(self.terms)}

    def min_degree(self, weights: Weights | None = None) -> int:
        return min(term_degree(t, weights) for t in self.terms)

    def describe(self, names: Sequence[str]) -> str:
        return "{" + ", ".join(term_string(t, names) for t in self.terms) + "}"


def _expand(terms: set[Term], n: int) -> set[Term]:
    out: set[Term] = set()
    for t in terms:
        for k in range(n):
            out.add(t[:k] + (t[k] + 1,) + t[k + 1:])
    return out


def border_of_set(terms: set[Term], n: int) -> set[Term]:
    return _expand(terms, n) - terms


def border(oi: OrderIdeal) -> Border:
    raw = border_of_set(set(oi.terms), oi.n)
    return Border(oi.n, tuple(DEGREVLEX.sort(raw)))


def higher_border(oi: OrderIdeal, i: int) -> frozenset[Term]:
    """The i-th border shell; shell 0 is the order ideal itself."""
    if i < 0:
        raise ValueError("border index must be non-negative")
    shell = set(oi.terms)
    if i == 0:
        return frozenset(shell)
    region = set(oi.terms)
    for _ in range(i):
        shell = border_of_set(region, oi.n)
        region |= shell
    return frozenset(shell)


def o_index(oi: OrderIdeal, t: Term) -> int:
    """min{i >= 0 : t lies in the i-th border shell}, by frontier expansion."""
    if len(t) != oi.n:
        raise ValueError("term width does not match")
    region = set(oi.terms)
    if t in region:
        return 0
    i = 0
    while True:
        i += 1
        shell = border_of_set(region, oi.n)
        if t in shell:
            return i
        region |= shell


def border_form(f: Polynomial, oi: OrderIdeal) -> Polynomial:
    """The part of f supported on terms of maximal O-index."""
    if f.is_zero():
        raise ValueError("zero polynomial has no border form")
    if not f.main_only():
        raise ValueError("border form needs a main-variable polynomial")
    n = f.ctx.n
    if n != oi.n:
        raise ValueError("variable count mismatch")
    indices = {m: o_index(oi, m[:n]) for m in f.terms}
    top = max(indices.values())
    return Polynomial(f.ctx, {m: c for m, c in f.terms.items() if indices[m] == top})


# ---------------------------------------------------------------------------
# border web


@dataclass(frozen=True)
class WebEdge:
    """A neighbor relation between border terms b_i and b_j (1-based indices).

    Next-door: ``b_i = x_k * b_j`` (kind "ND", ``var_l`` unused).
    Across-the-street: ``x_k * b_i = x_l * b_j`` (kind "AS"); ``corner`` marks
    across-the-corner pairs and ``witness`` is the common border divisor m
    with ``b_i = x_l * b_m`` and ``b_j = x_k * b_m``.
    """

    kind: str
    i: int
    j: int
    var_k: int
    var_l: int | None = None
    corner: bool = False
    witness: int | None = None

    def label(self) -> str:
        return f"{self.kind}({self.i},{self.j})"


@dataclass(frozen=True)
class BorderWeb:
    order_ideal: OrderIdeal
    border: Border
    edges: tuple[WebEdge, ...]

    def next_door(self) -> list[WebEdge]:
        return [e for e in self.edges if e.kind == "ND"]

    def across_street(self) -> list[WebEdge]:
        return [e for e in self.edges if e.kind == "AS"]

    def corners(self) -> list[WebEdge]:
        return [e for e in self.edges if e.corner]

    def adjacency_listing(self, names: Sequence[str]) -> str:
        bterms = self.border.terms
        lines = []
        for e in self.edges:
            bi = term_string(bterms[e.i - 1], names)
            bj = term_string(bterms[e.j - 1], names)
            if e.kind == "ND":
                lines.append(f"ND({e.i},{e.j}): {bi} = {names[e.var_k - 1]}*{bj}")
            else:
                tag = ""
                if e.corner:
                    tag = f"  [corner, witness {term_string(bterms[e.witness - 1], names)}]"
                lines.append(f"AS({e.i},{e.j}): {names[e.var_k - 1]}*{bi} = "
                             f"{names[e.var_l - 1]}*{bj}{tag}")
        return "\n".join(lines)


def border_web(oi: OrderIdeal) -> BorderWeb:
    """All next-door and across-the-street relations, with corner flags."""
    bd = border(oi)
    terms = bd.terms
    pos = bd.index_map()
    n = oi.n
    edges: list[WebEdge] = []
    # next-door: the larger term gets the first slot
    for a_idx, a in enumerate(terms, start=1):
        for k in range(n):
            if a[k] == 0:
                continue
            below = a[:k] + (a[k] - 1,) + a[k + 1:]
            j = pos.get(below)
            if j is not None:
                edges.append(WebEdge("ND", a_idx, j, var_k=k + 1))
    # across-the-street, enumerated once per unordered pair i < j
    for i_idx in range(1, bd.nu + 1):
        for j_idx in range(i_idx + 1, bd.nu + 1):
            a, b = terms[i_idx - 1], terms[j_idx - 1]
            witness_kl = None
            for k in range(n):
                for l in range(n):
                    if k == l:
                        continue
                    lhs = a[:k] + (a[k] + 1,) + a[k + 1:]
                    rhs = b[:l] + (b[l] + 1,) + b[l + 1:]
                    if lhs == rhs:
                        witness_kl = (k + 1, l + 1)
                        break
                if witness_kl:
                    break
            if witness_kl is None:
                continue
            k, l = witness_kl
            corner = False
            witness = None
            # corner: b_i = x_l * b_m and b_j = x_k * b_m for some border term m
            if a[l - 1] > 0 and b[k - 1] > 0:
                m1 = a[: l - 1] + (a[l - 1] - 1,) + a[l:]
                m2 = b[: k - 1] + (b[k - 1] - 1,) + b[k:]
                if m1 == m2 and m1 in pos:
                    corner = True
                    witness = pos[m1]
            edges.append(WebEdge("AS", i_idx, j_idx, var_k=k, var_l=l,
                                 corner=corner, witness=witness))
    edges.sort(key=lambda e: (e.kind, e.i, e.j))
    return BorderWeb(oi, bd, tuple(edges))


def has_maxdeg_border(oi: OrderIdeal, weights: Weights) -> bool:
    """True when no term of the order ideal out-weighs any border term."""
    w = check_weights(weights, oi.n)
    return border(oi).min_degree(w) >= oi.max_degree(w)


def maxdeg_dimension_data(oi: OrderIdeal, weights: Weights) -> tuple[int, int, int]:
    """(d, r, s): top weight d in the order ideal, and the counts of order
    ideal resp. border terms of weight exactly d."""
    w = check_weights(weights, oi.n)
    d = oi.max_degree(w)
    r = sum(1 for t in oi.terms if term_degree(t, w) == d)
    s = sum(1 for t in border(oi).terms if term_degree(t, w) == d)
    return d, r, s


def random_order_ideal(rng, n: int, max_size: int) -> OrderIdeal:
    """Grow a random order ideal by repeatedly absorbing a border term."""
    terms = {(0,) * n}
    size = rng.randint(1, max_size)
    while len(terms) < size:
        choices = sorted(border_of_set(terms, n))
        terms.add(choices[rng.randrange(len(choices))])
    return OrderIdeal.from_terms(terms)


def parse_term(text: str, names: Sequence[str]) -> Term:
    """Parse a single power product like ``x^2*y`` over the given names."""
    from .parsing import parse_polynomial
    from .ring import Context

    ctx = Context(main=tuple(names))
    p = parse_polynomial(text, ctx)
    if len(p.terms) != 1:
        raise ValueError(f"{text!r} is not a single term")
    (mono, coeff), = p.terms.items()
    if coeff != 1:
        raise ValueError(f"{text!r} has a coefficient; expected a bare term")
    return mono[: len(names)]


def term_set(texts: Iterable[str], names: Sequence[str]) -> list[Term]:
    return [parse_term(t, names) for t in texts]
