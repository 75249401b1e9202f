"""Exact sparse polynomial arithmetic over Q with main/parameter/deformation variables.

A :class:`Context` fixes three groups of variables: the main variables
``x_1..x_n``, an optional grid of parameters ``c_ij``, and an optional
deformation variable ``z`` (which doubles as the homogenizing variable).
Monomials are dense exponent tuples over the full variable list, in the
order main ++ params ++ deform.  Coefficients are ``fractions.Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Term = tuple[int, ...]          # exponents over main variables only
Monomial = tuple[int, ...]      # exponents over all context variables
Weights = tuple[int, ...]
Coefficient = Union[Fraction, int]


def check_weights(weights: Sequence[int], n: int) -> Weights:
    w = tuple(int(v) for v in weights)
    if len(w) != n:
        raise ValueError(f"weight vector has {len(w)} entries, expected {n}")
    if any(v < 1 for v in w):
        raise ValueError("weight vector entries must be positive integers")
    return w


@dataclass(frozen=True)
class Context:
    """Variable context: main variables, parameter variables, deformation variable.

    ``param_pairs`` records which (row, column) position of the coefficient
    grid each parameter name occupies (1-based), so that specialization maps
    and matrix constructions can address parameters by grid position.
    """

    main: tuple[str, ...]
    params: tuple[str, ...] = ()
    deform: str | None = None
    param_pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if not self.main:
            raise ValueError("a context needs at least one main variable")
        names = list(self.main) + list(self.params)
        if self.deform is not None:
            names.append(self.deform)
        if len(set(names)) != len(names):
            raise ValueError("variable names must be distinct")
        if self.param_pairs and len(self.param_pairs) != len(self.params):
            raise ValueError("param_pairs must align with params")
        if len(set(self.param_pairs)) != len(self.param_pairs):
            raise ValueError("parameter grid positions must be distinct")

    @property
    def n(self) -> int:
        return len(self.main)

    @property
    def nvars(self) -> int:
        return len(self.main) + len(self.params) + (1 if self.deform else 0)

    @property
    def names(self) -> tuple[str, ...]:
        out = self.main + self.params
        if self.deform:
            out = out + (self.deform,)
        return out

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def has_var(self, name: str) -> bool:
        return name in self.names

    def param_position(self, i: int, j: int) -> int:
        """Flat index (into ``params``) of the grid parameter at (i, j), 1-based."""
        try:
            return self.param_pairs.index((i, j))
        except ValueError:
            raise KeyError(f"no parameter at grid position ({i}, {j})") from None

    def param_name(self, i: int, j: int) -> str:
        return self.params[self.param_position(i, j)]

    def zero_monomial(self) -> Monomial:
        return (0,) * self.nvars

    def main_part(self, mono: Monomial) -> Term:
        return mono[: self.n]

    def param_part(self, mono: Monomial) -> tuple[int, ...]:
        return mono[self.n : self.n + len(self.params)]

    def deform_exponent(self, mono: Monomial) -> int:
        return mono[-1] if self.deform else 0

    def monomial(self, main: Term | None = None,
                 param: tuple[int, ...] | None = None, z: int = 0) -> Monomial:
        m = main if main is not None else (0,) * self.n
        p = param if param is not None else (0,) * len(self.params)
        if len(m) != self.n or len(p) != len(self.params):
            raise ValueError("exponent block of wrong length")
        if self.deform is None:
            if z:
                raise ValueError("context has no deformation variable")
            return tuple(m) + tuple(p)
        return tuple(m) + tuple(p) + (z,)


def grid_param_names(mu: int, nu: int, stem: str = "c") -> tuple[tuple[str, ...], tuple[tuple[int, int], ...]]:
    """Row-major parameter names c_ij for a mu x nu grid.

    Uses the compact form ``c11`` when both indices fit in one digit,
    ``c10_2`` style otherwise.
    """
    names, pairs = [], []
    compact = mu <= 9 and nu <= 9
    for i in range(1, mu + 1):
        for j in range(1, nu + 1):
            names.append(f"{stem}{i}{j}" if compact else f"{stem}{i}_{j}")
            pairs.append((i, j))
    return tuple(names), tuple(pairs)


def default_main_names(n: int) -> tuple[str, ...]:
    if n <= 3:
        return ("x", "y", "z")[:n]
    return tuple(f"x{i}" for i in range(1, n + 1))


# ---------------------------------------------------------------------------
# term orderings


@dataclass(frozen=True)
class TermOrdering:
    """A term ordering on main-variable exponent tuples.

    ``key`` maps an exponent tuple to an integer tuple that is additive under
    exponent addition and whose natural order realizes the term ordering.
    """

    kind: str
    weights: Weights | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("lex", "deglex", "degrevlex", "wdegrevlex"):
            raise ValueError(f"unknown ordering kind {self.kind!r}")
        if self.kind == "wdegrevlex":
            if self.weights is None:
                raise ValueError("weighted ordering needs weights")
            if any(w < 1 for w in self.weights):
                raise ValueError("ordering weights must be positive")

    def key(self, exps: Term) -> tuple[int, ...]:
        if self.kind == "lex":
            return exps
        if self.kind == "deglex":
            return (sum(exps),) + exps
        if self.kind == "degrevlex":
            return (sum(exps),) + tuple(-e for e in reversed(exps))
        wd = sum(w * e for w, e in zip(self.weights, exps))
        return (wd, sum(exps)) + tuple(-e for e in reversed(exps))

    def sort(self, terms: Iterable[Term], reverse: bool = False) -> list[Term]:
        return sorted(terms, key=self.key, reverse=reverse)

    def max(self, terms: Iterable[Term]) -> Term:
        return max(terms, key=self.key)


LEX = TermOrdering("lex")
DEGLEX = TermOrdering("deglex")
DEGREVLEX = TermOrdering("degrevlex")


def wdegrevlex(weights: Sequence[int]) -> TermOrdering:
    return TermOrdering("wdegrevlex", tuple(int(w) for w in weights))


def ordering_from_name(name: str) -> TermOrdering:
    name = name.strip().lower()
    if name in ("lex", "deglex", "degrevlex"):
        return TermOrdering(name)
    if name.startswith("w:"):
        return wdegrevlex([int(v) for v in name[2:].split(",")])
    raise ValueError(f"unknown ordering {name!r}")


# ---------------------------------------------------------------------------
# term helpers (main-variable exponent tuples)


def term_mul(a: Term, b: Term) -> Term:
    return tuple(x + y for x, y in zip(a, b))


def term_divides(a: Term, b: Term) -> bool:
    """True when a | b."""
    return all(x <= y for x, y in zip(a, b))


def term_div(a: Term, b: Term) -> Term:
    """a / b, assuming b | a."""
    return tuple(x - y for x, y in zip(a, b))


def term_degree(a: Term, weights: Weights | None = None) -> int:
    if weights is None:
        return sum(a)
    return sum(w * e for w, e in zip(weights, a))


def term_divisors(a: Term) -> Iterable[Term]:
    """All divisors of a term, the term itself included."""
    if not a:
        yield ()
        return
    head, rest = a[0], a[1:]
    for tail in term_divisors(rest):
        for e in range(head + 1):
            yield (e,) + tail


def term_string(t: Term, names: Sequence[str]) -> str:
    parts = []
    for e, name in zip(t, names):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts) if parts else "1"


# ---------------------------------------------------------------------------
# polynomials


def _as_fraction(c: Coefficient) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


class Polynomial:
    """Immutable sparse polynomial over Q in a fixed :class:`Context`."""

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: Context, terms: Mapping[Monomial, Coefficient]):
        cleaned: dict[Monomial, Fraction] = {}
        for mono, coeff in terms.items():
            c = _as_fraction(coeff)
            if c:
                cleaned[mono] = c
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "terms", cleaned)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # pragma: no cover - guard rail
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(ctx: Context) -> "Polynomial":
        return Polynomial(ctx, {})

    @staticmethod
    def constant(ctx: Context, c: Coefficient) -> "Polynomial":
        return Polynomial(ctx, {ctx.zero_monomial(): _as_fraction(c)})

    @staticmethod
    def one(ctx: Context) -> "Polynomial":
        return Polynomial.constant(ctx, 1)

    @staticmethod
    def variable(ctx: Context, name: str) -> "Polynomial":
        idx = ctx.index_of(name)
        mono = tuple(1 if k == idx else 0 for k in range(ctx.nvars))
        return Polynomial(ctx, {mono: Fraction(1)})

    @staticmethod
    def from_term(ctx: Context, term: Term, coeff: Coefficient = 1) -> "Polynomial":
        return Polynomial(ctx, {ctx.monomial(main=term): _as_fraction(coeff)})

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        zero = self.ctx.zero_monomial()
        return all(m == zero for m in self.terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get(self.ctx.zero_monomial(), Fraction(0))

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    def main_only(self) -> bool:
        """True when no parameter or deformation variable occurs."""
        n = self.ctx.n
        return all(not any(m[n:]) for m in self.terms)

    def param_free(self) -> bool:
        ctx = self.ctx
        lo, hi = ctx.n, ctx.n + len(ctx.params)
        return all(not any(m[lo:hi]) for m in self.terms)

    def uses_deform(self) -> bool:
        return self.ctx.deform is not None and any(m[-1] for m in self.terms)

    def main_support(self) -> set[Term]:
        n = self.ctx.n
        return {m[:n] for m in self.terms}

    def variables_used(self) -> set[str]:
        names = self.ctx.names
        used: set[str] = set()
        for mono in self.terms:
            for k, e in enumerate(mono):
                if e:
                    used.add(names[k])
        return used

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if self.ctx != other.ctx:
            raise ValueError("context mismatch")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono)
            if s is None:
                out[mono] = c
            else:
                s = s + c
                if s:
                    out[mono] = s
                else:
                    del out[mono]
        return Polynomial(self.ctx, out)

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono)
            if s is None:
                out[mono] = -c
            else:
                s = s - c
                if s:
                    out[mono] = s
                else:
                    del out[mono]
        return Polynomial(self.ctx, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.ctx, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other: Union["Polynomial", Coefficient]) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                c = c1 * c2
                s = out.get(mono)
                if s is None:
                    out[mono] = c
                else:
                    s = s + c
                    if s:
                        out[mono] = s
                    else:
                        del out[mono]
        return Polynomial(self.ctx, out)

    __rmul__ = __mul__

    def scale(self, c: Coefficient) -> "Polynomial":
        c = _as_fraction(c)
        if not c:
            return Polynomial.zero(self.ctx)
        return Polynomial(self.ctx, {m: v * c for m, v in self.terms.items()})

    def __pow__(self, e: int) -> "Polynomial":
        if e < 0:
            raise ValueError("negative power")
        result = Polynomial.one(self.ctx)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.ctx, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    # -- degrees, degree forms, homogenization ------------------------------

    def total_degree(self) -> int:
        """Total degree in the main variables (parameters and z count zero)."""
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        n = self.ctx.n
        return max(sum(m[:n]) for m in self.terms)

    def degree_w(self, weights: Weights) -> int:
        if not self.terms:
            raise ValueError("zero polynomial has no degree")
        w = check_weights(weights, self.ctx.n)
        return max(sum(a * b for a, b in zip(w, m)) for m in self.terms)

    def degree_form(self, weights: Weights) -> "Polynomial":
        d = self.degree_w(weights)
        w = check_weights(weights, self.ctx.n)
        keep = {m: c for m, c in self.terms.items()
                if sum(a * b for a, b in zip(w, m)) == d}
        return Polynomial(self.ctx, keep)

    def is_homogeneous(self, weights: Weights) -> bool:
        if not self.terms:
            return True
        w = check_weights(weights, self.ctx.n)
        degs = {sum(a * b for a, b in zip(w, m)) for m in self.terms}
        return len(degs) == 1

    def homogenize(self, weights: Weights) -> "Polynomial":
        """Homogenize with the deformation variable in degree one.

        The monomial of W-degree e picks up the factor z^(deg_W(f) - e), so
        the result is homogeneous of degree deg_W(f) for (1, w_1, ..., w_n)
        and substituting z = 1 recovers the input.
        """
        if self.ctx.deform is None:
            raise ValueError("context has no homogenizing variable")
        if not self.terms:
            raise ValueError("cannot homogenize the zero polynomial")
        if self.uses_deform():
            raise ValueError("polynomial already involves the homogenizing variable")
        w = check_weights(weights, self.ctx.n)
        d = self.degree_w(w)
        out = {}
        for mono, c in self.terms.items():
            gap = d - sum(a * b for a, b in zip(w, mono))
            out[mono[:-1] + (mono[-1] + gap,)] = c
        return Polynomial(self.ctx, out)

    # -- substitution -------------------------------------------------------

    def substitute(self, assignment: Mapping[str, Union["Polynomial", Coefficient]],
                   target: Context | None = None) -> "Polynomial":
        """Ring-homomorphic image; unassigned variables map to themselves.

        Values may be polynomials over ``target`` (default: this context) or
        plain rationals.
        """
        ctx = self.ctx
        tgt = target if target is not None else ctx
        for name in assignment:
            if not ctx.has_var(name):
                raise KeyError(f"unknown variable {name!r}")
        images: dict[int, Polynomial] = {}
        for name, value in assignment.items():
            if isinstance(value, Polynomial):
                if value.ctx != tgt:
                    raise ValueError(f"image of {name!r} lives in the wrong context")
                img = value
            else:
                img = Polynomial.constant(tgt, value)
            images[ctx.index_of(name)] = img
        passthrough: dict[int, int] = {}
        for k, name in enumerate(ctx.names):
            if k not in images:
                if not tgt.has_var(name):
                    raise KeyError(f"target context is missing variable {name!r}")
                passthrough[k] = tgt.index_of(name)

        power_cache: dict[tuple[int, int], Polynomial] = {}

        def var_power(k: int, e: int) -> Polynomial:
            got = power_cache.get((k, e))
            if got is None:
                got = images[k] ** e
                power_cache[(k, e)] = got
            return got

        result = Polynomial.zero(tgt)
        for mono, coeff in self.terms.items():
            fixed = [0] * tgt.nvars
            piece: Polynomial | None = None
            for k, e in enumerate(mono):
                if not e:
                    continue
                if k in passthrough:
                    fixed[passthrough[k]] += e
                else:
                    p = var_power(k, e)
                    piece = p if piece is None else piece * p
            base = Polynomial(tgt, {tuple(fixed): coeff})
            result = result + (base if piece is None else base * piece)
        return result

    def map_context(self, target: Context, rename: Mapping[str, str] | None = None) -> "Polynomial":
        """Transport monomials to another context by variable name (or rename map)."""
        rename = rename or {}
        slots = []
        for name in self.ctx.names:
            new = rename.get(name, name)
            slots.append(target.index_of(new) if target.has_var(new) else None)
        out: dict[Monomial, Fraction] = {}
        for mono, coeff in self.terms.items():
            fixed = [0] * target.nvars
            for k, e in enumerate(mono):
                if not e:
                    continue
                pos = slots[k]
                if pos is None:
                    raise KeyError(f"target context is missing variable "
                                   f"{rename.get(self.ctx.names[k], self.ctx.names[k])!r}")
                fixed[pos] += e
            key = tuple(fixed)
            out[key] = out.get(key, Fraction(0)) + coeff
        return Polynomial(target, out)

    # -- canonical form ------------------------------------------------------

    def _canon_key(self):
        ctx = self.ctx
        n = ctx.n

        def key(mono: Monomial):
            main = mono[:n]
            par = ctx.param_part(mono)
            return (DEGREVLEX.key(main), DEGREVLEX.key(par) if par else (),
                    ctx.deform_exponent(mono))

        return key

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        """Terms in canonical order, largest first."""
        key = self._canon_key()
        return sorted(self.terms.items(), key=lambda item: key(item[0]), reverse=True)

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise ValueError("zero polynomial")
        key = self._canon_key()
        return max(self.terms, key=key)

    def sign_normalized(self) -> "Polynomial":
        """The polynomial scaled by +-1 so its canonical leading coefficient is positive."""
        if not self.terms:
            return self
        if self.terms[self.leading_monomial()] < 0:
            return -self
        return self

    def leading_term(self, ordering: TermOrdering) -> Term:
        """Leading main term under ``ordering``; requires a main-only polynomial."""
        if not self.terms:
            raise ValueError("zero polynomial")
        if not self.main_only():
            raise ValueError("leading_term needs a main-variable polynomial")
        n = self.ctx.n
        return max((m[:n] for m in self.terms), key=ordering.key)

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Polynomial({format_polynomial(self)})"


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def format_polynomial(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    ctx = p.ctx
    names = ctx.names
    parts: list[str] = []
    for mono, coeff in p.sorted_terms():
        var = term_string(mono, names)
        mag = abs(coeff)
        if var == "1":
            body = str(mag)
        elif mag == 1:
            body = var
        else:
            body = f"{mag}*{var}"
        if not parts:
            parts.append(body if coeff > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if coeff > 0 else f"- {body}")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# matrices of polynomials


class PolyMatrix:
    """Dense matrix with Polynomial entries sharing one context."""

    __slots__ = ("ctx", "rows", "cols", "entries")

    def __init__(self, ctx: Context, entries: Sequence[Sequence[Polynomial]]):
        self.ctx = ctx
        self.entries = [list(row) for row in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("ragged matrix")
            for e in row:
                if e.ctx != ctx:
                    raise ValueError("matrix entries must share one context")

    @staticmethod
    def zero(ctx: Context, rows: int, cols: int) -> "PolyMatrix":
        z = Polynomial.zero(ctx)
        return PolyMatrix(ctx, [[z] * cols for _ in range(rows)])

    @staticmethod
    def identity(ctx: Context, size: int) -> "PolyMatrix":
        one = Polynomial.one(ctx)
        zero = Polynomial.zero(ctx)
        return PolyMatrix(ctx, [[one if i == j else zero for j in range(size)]
                                for i in range(size)])

    def __getitem__(self, rc: tuple[int, int]) -> Polynomial:
        r, c = rc
        return self.entries[r][c]

    def column(self, c: int) -> list[Polynomial]:
        return [self.entries[r][c] for r in range(self.rows)]

    def __mul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        out = []
        for r in range(self.rows):
            row = []
            for c in range(other.cols):
                acc = Polynomial.zero(self.ctx)
                for k in range(self.cols):
                    e = self.entries[r][k]
                    f = other.entries[k][c]
                    if e and f:
                        acc = acc + e * f
                row.append(acc)
            out.append(row)
        return PolyMatrix(self.ctx, out)

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")
        return PolyMatrix(self.ctx, [[a - b for a, b in zip(r1, r2)]
                                     for r1, r2 in zip(self.entries, other.entries)])

    def mul_vector(self, vec: Sequence[Polynomial]) -> list[Polynomial]:
        if len(vec) != self.cols:
            raise ValueError("dimension mismatch")
        out = []
        for r in range(self.rows):
            acc = Polynomial.zero(self.ctx)
            for k in range(self.cols):
                e = self.entries[r][k]
                v = vec[k]
                if e and v:
                    acc = acc + e * v
            out.append(acc)
        return out

    def is_zero(self) -> bool:
        return all(not e for row in self.entries for e in row)

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix(self.ctx, [[fn(e) for e in row] for row in self.entries])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.ctx == other.ctx and self.entries == other.entries

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(e) for e in row) for row in self.entries)
        return f"PolyMatrix[{body}]"
