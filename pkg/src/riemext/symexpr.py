"""Exact multivariate rational functions with rational coefficients.

Polynomial arithmetic and gcd are delegated to FLINT through ``python-flint``.
This module owns the canonical form, the text grammar, substitution and the
numeric evaluation rules used by the rest of the package.

Canonical form of a :class:`RationalExpr` ``num/den``:

* ``num`` and ``den`` have integer coefficients and ``gcd(num, den) = 1``
  (this includes the integer content, so the contents are coprime);
* the leading coefficient of ``den`` in graded-lex order is positive;
* the zero function is ``0/1``.

Terms are ordered graded-lexicographically with respect to the declared
symbol order, so printed forms are reproducible byte for byte.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

import flint

__all__ = [
    "Rational",
    "MultiPoly",
    "RationalExpr",
    "SymExprError",
    "ParseError",
    "UndeclaredSymbolError",
    "ZeroDenominatorError",
    "PoleError",
    "NearPoleError",
    "parse",
    "differentiate",
    "substitute",
    "evaluate",
    "is_zero",
    "merge_symbols",
]

Rational = Fraction

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")


class SymExprError(Exception):
    """Base class for errors raised by the expression kernel."""


class ParseError(SymExprError):
    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        pointer = f"\n  {text}\n  {' ' * position}^"
        super().__init__(f"{message} at position {position}{pointer}")


class UndeclaredSymbolError(SymExprError):
    pass


class ZeroDenominatorError(SymExprError, ZeroDivisionError):
    pass


class PoleError(SymExprError):
    """Substitution made the denominator vanish identically."""


class NearPoleError(SymExprError):
    """Numeric evaluation too close to a zero of the denominator."""


@lru_cache(maxsize=None)
def _zctx(names: tuple[str, ...]):
    return flint.fmpz_mpoly_ctx.get(names, "deglex")


@lru_cache(maxsize=None)
def _qctx(names: tuple[str, ...]):
    return flint.fmpq_mpoly_ctx.get(names, "deglex")


def _check_names(names: Iterable[str]) -> tuple[str, ...]:
    out = tuple(names)
    for n in out:
        if not isinstance(n, str) or not _NAME_RE.match(n):
            raise SymExprError(f"invalid symbol name {n!r}")
    if len(set(out)) != len(out):
        raise SymExprError(f"duplicate symbol names in {out}")
    return out


def merge_symbols(a: Sequence[str], b: Sequence[str]) -> tuple[str, ...]:
    """Smallest symbol tuple containing both; a superset keeps its own order."""
    a, b = tuple(a), tuple(b)
    if a == b:
        return a
    sa, sb = set(a), set(b)
    if sb <= sa:
        return a
    if sa <= sb:
        return b
    return a + tuple(s for s in b if s not in sa)


def _to_fraction(c) -> Fraction:
    if isinstance(c, flint.fmpq):
        return Fraction(int(c.p), int(c.q))
    return Fraction(int(c))


# ---------------------------------------------------------------------------
# printing helpers shared by MultiPoly and RationalExpr


def _monomial_str(names: Sequence[str], exps: Sequence[int]) -> str:
    parts = []
    for n, e in zip(names, exps):
        if e == 1:
            parts.append(n)
        elif e > 1:
            parts.append(f"{n}^{e}")
    return "*".join(parts)


def _terms_str(names: Sequence[str], terms: Iterable[tuple[tuple[int, ...], Fraction]]) -> str:
    out: list[str] = []
    for exps, c in terms:
        mono = _monomial_str(names, exps)
        neg = c < 0
        mag = -c if neg else c
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        if not out:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out) if out else "0"


def _poly_body(p, args: Sequence[str], target: str, chunk: int = 64) -> list[str]:
    """Statements accumulating a polynomial into ``target``, in bounded-size chunks."""
    terms = []
    for exps, c in p.terms():
        factors = []
        for a, e in zip(args, exps):
            if e == 1:
                factors.append(a)
            elif e > 1:
                factors.append(f"{a}**{e}")
        coeff = float(int(c))
        if not factors:
            terms.append(repr(coeff))
        elif coeff == 1.0:
            terms.append("*".join(factors))
        else:
            terms.append(f"{coeff!r}*" + "*".join(factors))
    lines = [f"{target} = 0.0"]
    for k in range(0, len(terms), chunk):
        lines.append(f"{target} = {target} + (" + " + ".join(terms[k:k + chunk]) + ")")
    return lines


# ---------------------------------------------------------------------------


class MultiPoly:
    """Polynomial with rational coefficients over an ordered tuple of symbols."""

    __slots__ = ("_p", "_symbols")

    def __init__(self, terms: Mapping[tuple[int, ...], object] | None = None, symbols: Sequence[str] = ()):
        symbols = _check_names(symbols)
        ctx = _qctx(symbols)
        clean = {}
        for exps, c in (terms or {}).items():
            if len(exps) != len(symbols):
                raise SymExprError(f"exponent vector {exps} does not match symbols {symbols}")
            c = Fraction(c)
            if c:
                clean[tuple(int(e) for e in exps)] = flint.fmpq(c.numerator, c.denominator)
        self._p = ctx.from_dict(clean)
        self._symbols = symbols

    @classmethod
    def _wrap(cls, p, symbols):
        obj = cls.__new__(cls)
        obj._p = p
        obj._symbols = symbols
        return obj

    @property
    def symbols(self) -> tuple[str, ...]:
        return self._symbols

    def terms(self) -> dict[tuple[int, ...], Fraction]:
        """Exponent vector -> coefficient, in graded-lex (descending) order."""
        return {tuple(e): _to_fraction(c) for e, c in self._p.terms()}

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def total_degree(self) -> int:
        return -1 if self._p.is_zero() else int(self._p.total_degree())

    def degree(self, var: str) -> int:
        if self._p.is_zero():
            return -1
        return int(self._p.degrees()[self._symbols.index(var)])

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other._symbols != self._symbols:
                names = merge_symbols(self._symbols, other._symbols)
                return self.with_symbols(names), other.with_symbols(names)
            return self, other
        if isinstance(other, (int, Fraction)):
            return self, MultiPoly({(0,) * len(self._symbols): other}, self._symbols)
        return NotImplemented

    def with_symbols(self, symbols: Sequence[str]) -> "MultiPoly":
        symbols = tuple(symbols)
        if symbols == self._symbols:
            return self
        missing = set(self.used_symbols()) - set(symbols)
        if missing:
            raise UndeclaredSymbolError(f"symbols {sorted(missing)} not in {symbols}")
        return MultiPoly._wrap(self._p.project_to_context(_qctx(symbols)), symbols)

    def used_symbols(self) -> tuple[str, ...]:
        if self._p.is_zero():
            return ()
        return tuple(n for n, d in zip(self._symbols, self._p.degrees()) if d > 0)

    def __add__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        a, b = c
        return MultiPoly._wrap(a._p + b._p, a._symbols)

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        a, b = c
        return MultiPoly._wrap(a._p - b._p, a._symbols)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return MultiPoly._wrap(-self._p, self._symbols)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        a, b = c
        return MultiPoly._wrap(a._p * b._p, a._symbols)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise SymExprError("polynomial powers must be nonnegative integers")
        return MultiPoly._wrap(self._p ** k, self._symbols)

    def __eq__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return NotImplemented
        a, b = c
        return a._p == b._p

    def __hash__(self):
        return hash(RationalExpr.from_polys(self))

    def __str__(self):
        return _terms_str(self._symbols, self.terms().items())

    def __repr__(self):
        return f"MultiPoly({str(self)!r}, symbols={self._symbols})"


Scalar = Union[int, Fraction]


class RationalExpr:
    """Immutable exact rational function ``num/den`` in canonical form."""

    __slots__ = ("_num", "_den", "_symbols", "_compiled")

    def __init__(self, num, den=None, symbols: Sequence[str] = (), *, _canonical: bool = False):
        # internal: num/den are fmpz_mpoly in _zctx(symbols)
        ctx = _zctx(tuple(symbols))
        if den is None:
            den = ctx.constant(1)
        if not _canonical:
            num, den = _canonicalize(num, den)
        self._num = num
        self._den = den
        self._symbols = tuple(symbols)
        self._compiled = {}

    # -- construction -----------------------------------------------------

    @classmethod
    def constant(cls, value: Scalar, symbols: Sequence[str] = ()) -> "RationalExpr":
        symbols = _check_names(symbols)
        value = Fraction(value)
        ctx = _zctx(symbols)
        return cls(ctx.constant(value.numerator), ctx.constant(value.denominator), symbols, _canonical=True)

    @classmethod
    def symbol(cls, name: str, symbols: Sequence[str] | None = None) -> "RationalExpr":
        symbols = _check_names(symbols if symbols is not None else (name,))
        if name not in symbols:
            raise UndeclaredSymbolError(f"symbol {name!r} not in {symbols}")
        ctx = _zctx(symbols)
        return cls(ctx.gen(symbols.index(name)), ctx.constant(1), symbols, _canonical=True)

    @classmethod
    def from_polys(cls, num: MultiPoly, den: MultiPoly | None = None) -> "RationalExpr":
        if den is not None and den.symbols != num.symbols:
            names = merge_symbols(num.symbols, den.symbols)
            num, den = num.with_symbols(names), den.with_symbols(names)
        symbols = num.symbols
        n_int, n_scale = _clear_denominators(num)
        if den is None:
            d_int, d_scale = _zctx(symbols).constant(1), Fraction(1)
        else:
            d_int, d_scale = _clear_denominators(den)
        if d_int.is_zero():
            raise ZeroDenominatorError("division by the zero polynomial")
        # num/den = (n_int/n_scale) / (d_int/d_scale)
        return cls(n_int * d_scale.numerator * n_scale.denominator,
                   d_int * n_scale.numerator * d_scale.denominator, symbols)

    @classmethod
    def _from(cls, num, den, symbols) -> "RationalExpr":
        return cls(num, den, symbols)

    # -- basic properties -------------------------------------------------

    @property
    def symbols(self) -> tuple[str, ...]:
        return self._symbols

    @property
    def num(self) -> MultiPoly:
        return _fmpz_to_multipoly(self._num, self._symbols)

    @property
    def den(self) -> MultiPoly:
        return _fmpz_to_multipoly(self._den, self._symbols)

    def numerator(self) -> "RationalExpr":
        return RationalExpr(self._num, None, self._symbols, _canonical=True)

    def denominator(self) -> "RationalExpr":
        return RationalExpr(self._den, None, self._symbols, _canonical=True)

    def is_zero(self) -> bool:
        return self._num.is_zero()

    def is_polynomial(self) -> bool:
        return self._den.is_constant()

    def is_constant(self) -> bool:
        return self._num.is_constant() and self._den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise SymExprError(f"{self} is not constant")
        n = int(self._num.leading_coefficient()) if not self._num.is_zero() else 0
        return Fraction(n, int(self._den.leading_coefficient()))

    def free_symbols(self) -> tuple[str, ...]:
        used = set()
        for p in (self._num, self._den):
            if not p.is_zero():
                used.update(n for n, d in zip(self._symbols, p.degrees()) if d > 0)
        return tuple(n for n in self._symbols if n in used)

    def degree(self, var: str) -> int:
        """Degree of the numerator in ``var`` (the denominator must not involve it)."""
        i = self._index(var)
        if self._den.degrees()[i] if not self._den.is_constant() else 0:
            raise SymExprError(f"denominator of {self} depends on {var}")
        if self._num.is_zero():
            return -1
        return int(self._num.degrees()[i])

    def n_terms(self) -> int:
        return len(self._num) + len(self._den)

    def _index(self, var: str) -> int:
        try:
            return self._symbols.index(var)
        except ValueError:
            raise UndeclaredSymbolError(f"symbol {var!r} not declared in {self._symbols}") from None

    # -- context handling ---------------------------------------------------

    def with_symbols(self, symbols: Sequence[str]) -> "RationalExpr":
        symbols = tuple(symbols)
        if symbols == self._symbols:
            return self
        missing = set(self.free_symbols()) - set(symbols)
        if missing:
            raise UndeclaredSymbolError(f"symbols {sorted(missing)} not in {symbols}")
        _check_names(symbols)
        ctx = _zctx(symbols)
        return RationalExpr(self._num.project_to_context(ctx), self._den.project_to_context(ctx),
                            symbols, _canonical=True)

    def _coerce(self, other):
        if isinstance(other, RationalExpr):
            if other._symbols == self._symbols:
                return self, other
            names = merge_symbols(self._symbols, other._symbols)
            return self.with_symbols(names), other.with_symbols(names)
        if isinstance(other, (int, Fraction)):
            return self, RationalExpr.constant(other, self._symbols)
        if isinstance(other, MultiPoly):
            return self._coerce(RationalExpr.from_polys(other))
        return None

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return _add(a, b)

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return _add(a, -b)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return RationalExpr(-self._num, self._den, self._symbols, _canonical=True)

    def __pos__(self):
        return self

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return _mul(a, b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return _mul(a, b.reciprocal())

    def __rtruediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return _mul(b, a.reciprocal())

    def reciprocal(self) -> "RationalExpr":
        if self._num.is_zero():
            raise ZeroDenominatorError("division by the zero polynomial")
        n, d = self._den, self._num
        if d.leading_coefficient() < 0:
            n, d = -n, -d
        return RationalExpr(n, d, self._symbols, _canonical=True)

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise SymExprError("only integer powers are supported")
        if k < 0:
            return self.reciprocal() ** (-k)
        return RationalExpr(self._num ** k, self._den ** k, self._symbols, _canonical=True)

    def __eq__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return a._num == b._num and a._den == b._den

    def __hash__(self):
        return hash((_named_terms(self._num, self._symbols), _named_terms(self._den, self._symbols)))

    def __bool__(self):
        return not self._num.is_zero()

    # -- calculus and substitution ------------------------------------------

    def diff(self, var: str) -> "RationalExpr":
        i = self._index(var)
        n, d = self._num, self._den
        dn = n.derivative(i)
        if d.is_constant():
            return RationalExpr(dn, d, self._symbols)
        dd = d.derivative(i)
        if dd.is_zero():
            return RationalExpr(dn, d, self._symbols)
        return RationalExpr(dn * d - n * dd, d * d, self._symbols)

    def subs(self, bindings: Mapping[str, object]) -> "RationalExpr":
        return substitute(self, bindings)

    def evaluate(self, point: Mapping[str, float], eps_den: float = 1e-12) -> float:
        return evaluate(self, point, eps_den)

    def coefficients(self, var: str) -> dict[int, "RationalExpr"]:
        """Coefficients of the expansion in powers of ``var`` (denominator free of ``var``)."""
        i = self._index(var)
        if not self._den.is_constant() and self._den.degrees()[i] > 0:
            raise SymExprError(f"denominator depends on {var}; not a polynomial in it")
        groups: dict[int, dict] = {}
        for exps, c in self._num.terms():
            k = exps[i]
            e = list(exps)
            e[i] = 0
            groups.setdefault(k, {})[tuple(e)] = c
        ctx = _zctx(self._symbols)
        return {k: RationalExpr(ctx.from_dict(t), self._den, self._symbols)
                for k, t in sorted(groups.items(), reverse=True)}

    # -- numerics ------------------------------------------------------------

    def compile(self, args: Sequence[str]):
        """Return a fast Python callable ``f(*values)`` in the order of ``args``.

        Works elementwise on numpy arrays. No pole guard: callers check the
        denominator themselves via :meth:`compile_parts` when they need to.
        """
        key = ("full", tuple(args))
        fn = self._compiled.get(key)
        if fn is None:
            num_fn, den_fn = self.compile_parts(args)
            if self._den.is_constant():
                c = 1.0 / float(int(self._den.leading_coefficient()))
                fn = lambda *v: num_fn(*v) * c  # noqa: E731
            else:
                fn = lambda *v: num_fn(*v) / den_fn(*v)  # noqa: E731
            self._compiled[key] = fn
        return fn

    def compile_parts(self, args: Sequence[str]):
        """Callables for the numerator and denominator polynomials separately."""
        key = ("parts", tuple(args))
        fns = self._compiled.get(key)
        if fns is None:
            args = tuple(args)
            missing = set(self.free_symbols()) - set(args)
            if missing:
                raise UndeclaredSymbolError(f"unbound symbols {sorted(missing)}")
            local = {n: f"_a{j}" for j, n in enumerate(args)}
            gen_args = [local.get(n, "0") for n in self._symbols]
            params = ", ".join(local[n] for n in args)
            body_n = "\n    ".join(_poly_body(self._num, gen_args, "_s"))
            body_d = "\n    ".join(_poly_body(self._den, gen_args, "_s"))
            ns: dict = {}
            exec(f"def _n({params}):\n    {body_n}\n    return _s\n"
                 f"def _d({params}):\n    {body_d}\n    return _s\n", ns)
            fns = (ns["_n"], ns["_d"])
            self._compiled[key] = fns
        return fns

    # -- printing --------------------------------------------------------------

    def __str__(self):
        names = self._symbols
        num_terms = [(tuple(e), Fraction(int(c))) for e, c in self._num.terms()]
        num_s = _terms_str(names, num_terms)
        if self._den.is_one():
            return num_s
        den_terms = [(tuple(e), Fraction(int(c))) for e, c in self._den.terms()]
        den_s = _terms_str(names, den_terms)
        if len(num_terms) > 1:
            num_s = f"({num_s})"
        if len(den_terms) > 1 or "*" in den_s:
            den_s = f"({den_s})"
        return f"{num_s}/{den_s}"

    def __repr__(self):
        return f"RationalExpr({str(self)!r}, symbols={self._symbols})"


def _named_terms(p, names):
    out = []
    for exps, c in p.terms():
        out.append((tuple((n, e) for n, e in zip(names, exps) if e), int(c)))
    return frozenset(out)


def _fmpz_to_multipoly(p, symbols) -> MultiPoly:
    return MultiPoly({tuple(e): int(c) for e, c in p.terms()}, symbols)


def _clear_denominators(p: MultiPoly):
    """Integer polynomial q and scale s with p = q / s."""
    terms = p.terms()
    lcm = 1
    for c in terms.values():
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ctx = _zctx(p.symbols)
    q = ctx.from_dict({e: int(c * lcm) for e, c in terms.items()})
    return q, Fraction(lcm)


def _canonicalize(num, den):
    if den.is_zero():
        raise ZeroDenominatorError("division by the zero polynomial")
    if num.is_zero():
        return num, den.context().constant(1)
    if not den.is_one():
        g = num.gcd(den)
        if not g.is_one():
            num = num / g
            den = den / g
    if den.leading_coefficient() < 0:
        num, den = -num, -den
    return num, den


def _fix_sign(num, den):
    if den.leading_coefficient() < 0:
        return -num, -den
    return num, den


def _add(a: RationalExpr, b: RationalExpr) -> RationalExpr:
    # Henrici: only gcds with the shared part of the denominators are needed.
    n1, d1, n2, d2 = a._num, a._den, b._num, b._den
    if n1.is_zero():
        return b
    if n2.is_zero():
        return a
    if d1 == d2:
        return RationalExpr(n1 + n2, d1, a._symbols)
    if d1.is_one():
        return RationalExpr(n1 * d2 + n2, d2, a._symbols, _canonical=True)
    if d2.is_one():
        return RationalExpr(n1 + n2 * d1, d1, a._symbols, _canonical=True)
    g = d1.gcd(d2)
    if g.is_one():
        n, d = _fix_sign(n1 * d2 + n2 * d1, d1 * d2)
        return RationalExpr(n, d, a._symbols, _canonical=True)
    d1g, d2g = d1 / g, d2 / g
    t = n1 * d2g + n2 * d1g
    if t.is_zero():
        return RationalExpr(t, None, a._symbols, _canonical=True)
    g2 = t.gcd(g)
    if not g2.is_one():
        t = t / g2
        d = d1g * (d2 / g2)
    else:
        d = d1g * d2
    n, d = _fix_sign(t, d)
    return RationalExpr(n, d, a._symbols, _canonical=True)


def _mul(a: RationalExpr, b: RationalExpr) -> RationalExpr:
    n1, d1, n2, d2 = a._num, a._den, b._num, b._den
    if n1.is_zero() or n2.is_zero():
        return RationalExpr(n1 * 0, None, a._symbols, _canonical=True)
    g1 = n1.gcd(d2) if not d2.is_one() else None
    g2 = n2.gcd(d1) if not d1.is_one() else None
    if g1 is not None and not g1.is_one():
        n1, d2 = n1 / g1, d2 / g1
    if g2 is not None and not g2.is_one():
        n2, d1 = n2 / g2, d1 / g2
    n, d = _fix_sign(n1 * n2, d1 * d2)
    return RationalExpr(n, d, a._symbols, _canonical=True)


# ---------------------------------------------------------------------------
# parsing


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>\*\*|[-+*/^()−]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "op":
            if value == "**":
                value = "^"
            elif value == "−":
                value = "-"
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text: str, symbols: tuple[str, ...]):
        self.text = text
        self.symbols = symbols
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def parse(self) -> RationalExpr:
        if self.peek()[0] == "end":
            self.error("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "*":
                e = e * rhs
            else:
                if rhs.is_zero():
                    raise ZeroDenominatorError(
                        f"division by the zero polynomial at position {tok[2]}")
                e = e / rhs
        return e

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            e = self.unary()
            return -e if tok[1] == "-" else e
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.peek()
            paren = False
            if tok[0] == "op" and tok[1] == "(":
                self.take()
                paren = True
                tok = self.peek()
            if tok[0] == "op" and tok[1] == "-":
                self.error("negative exponents are not allowed")
            if tok[0] != "num":
                self.error("exponent must be a nonnegative integer literal")
            self.take()
            if paren:
                if self.peek()[1] != ")":
                    self.error("expected ')'")
                self.take()
            return base ** int(tok[1])
        return base

    def atom(self):
        tok = self.take()
        kind, value, _ = tok
        if kind == "num":
            return RationalExpr.constant(int(value), self.symbols)
        if kind == "name":
            if value not in self.symbols:
                raise UndeclaredSymbolError(
                    f"undeclared symbol {value!r} at position {tok[2]}\n  {self.text}\n  {' ' * tok[2]}^")
            return RationalExpr.symbol(value, self.symbols)
        if kind == "op" and value == "(":
            e = self.expr()
            if self.peek()[1] != ")":
                self.error("expected ')'")
            self.take()
            return e
        self.error(f"unexpected token {value!r}" if value is not None else "unexpected end of input", tok)


def parse(text: str, variables: Sequence[str] = (), parameters: Sequence[str] = ()) -> RationalExpr:
    """Parse ``text`` into a canonical expression over ``variables + parameters``.

    The grammar accepts ``+ - * / ^`` (``**`` as a synonym), parentheses,
    integer literals and declared symbol names; exponents are nonnegative
    integer literals.
    """
    symbols = _check_names(tuple(variables) + tuple(parameters))
    return _Parser(text, symbols).parse()


# ---------------------------------------------------------------------------
# module-level operations


def _as_expr(value, symbols) -> RationalExpr:
    if isinstance(value, RationalExpr):
        return value
    if isinstance(value, (int, Fraction)):
        return RationalExpr.constant(value, symbols)
    if isinstance(value, str):
        return parse(value, symbols)
    raise TypeError(f"cannot use {value!r} as an expression")


def differentiate(e: RationalExpr, v: str) -> RationalExpr:
    return e.diff(v)


def substitute(e: RationalExpr, bindings: Mapping[str, object]) -> RationalExpr:
    """Simultaneous substitution ``symbol -> expression``.

    Raises :class:`PoleError` when the resulting denominator vanishes
    identically.
    """
    if not bindings:
        return e
    for name in bindings:
        e._index(name)
    values = {k: _as_expr(v, e.symbols) for k, v in bindings.items()}
    target = e.symbols
    for v in values.values():
        target = merge_symbols(target, v.symbols)
    values = {k: v.with_symbols(target) for k, v in values.items()}
    tctx = _zctx(target)

    def apply(p):
        # homogenize in every substituted symbol, then compose once
        if p.is_zero():
            return p, {}
        degs = p.degrees()
        subs_idx = [e.symbols.index(k) for k in values]
        dmax = {i: int(degs[i]) for i in subs_idx}
        rational = [i for i in subs_idx if not values[e.symbols[i]]._den.is_one() and dmax[i] > 0]
        hnames = tuple(f"__h{j}" for j in range(len(rational)))
        aug = e.symbols + hnames
        actx = _zctx(aug)
        terms = {}
        for exps, c in p.terms():
            extra = tuple(dmax[i] - exps[i] for i in rational)
            terms[tuple(exps) + extra] = c
        pa = actx.from_dict(terms)
        args = []
        for j, name in enumerate(e.symbols):
            if name in values:
                args.append(values[name]._num)
            else:
                args.append(tctx.gen(target.index(name)))
        for i in rational:
            args.append(values[e.symbols[i]]._den)
        composed = pa.compose(*args, ctx=tctx) if aug else tctx.constant(int(p.leading_coefficient()))
        scale = {i: dmax[i] for i in rational}
        return composed, scale

    n, sn = apply(e._num)
    d, sd = apply(e._den)
    if d.is_zero():
        raise PoleError(f"substitution {dict((k, str(v)) for k, v in values.items())} makes the denominator of {e} vanish")
    # value = (n / prod den_i^sn_i) / (d / prod den_i^sd_i)
    num, den = n, d
    for i in set(sn) | set(sd):
        dv = values[e.symbols[i]]._den
        k = sd.get(i, 0) - sn.get(i, 0)
        if k > 0:
            num = num * dv ** k
        elif k < 0:
            den = den * dv ** (-k)
    return RationalExpr(num, den, target)


def evaluate(e: RationalExpr, point: Mapping[str, float], eps_den: float = 1e-12) -> float:
    """Float value at ``point``; raises :class:`NearPoleError` if ``|den| <= eps_den``."""
    names = e.free_symbols()
    missing = [n for n in names if n not in point]
    if missing:
        raise UndeclaredSymbolError(f"unbound symbols {missing}")
    num_fn, den_fn = e.compile_parts(names)
    args = [float(point[n]) for n in names]
    den = den_fn(*args)
    if abs(den) <= eps_den:
        raise NearPoleError(f"|denominator| = {abs(den):.3e} <= {eps_den:g} for {e}")
    return num_fn(*args) / den


def is_zero(e: RationalExpr) -> bool:
    return e.is_zero()
