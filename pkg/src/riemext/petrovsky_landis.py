"""Cubic second-order ODEs carrying a planar system and dy/dx = −y(y−1)/(x(x−1)),
the solution family y = C(x−1)/(x−C), and the conditions it imposes on C."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .connection import DegenerateInputError, VectorField, connection_pl, pl_denominator
from .symexpr import RationalExpr, merge_symbols, parse

__all__ = [
    "QuadraticSystem",
    "CubicODE",
    "CPolynomial",
    "PoleOrderError",
    "cubic_ode",
    "substitute_family",
    "boundary_conditions",
    "residue_conditions",
    "verify_particular_integral",
    "invariant_curve_check",
    "proportional",
    "residue_consistency",
    "BOUNDARY_LABELS",
    "generic_quadratic_ode",
    "strip_content",
]

QUAD_A = ("a0", "a1", "a2", "a11", "a12", "a22")
QUAD_B = ("b0", "b1", "b2", "b11", "b12", "b22")
_MONOMIALS = ("1", "x", "y", "x^2", "x*y", "y^2")

BOUNDARY_LABELS = ("x=0", "x=1", "x=C,y=1-C", "y=1-x,x=1,C=1/C1", "y=1-x,x=0,C=1/C1")


class PoleOrderError(ValueError):
    pass


@dataclass
class QuadraticSystem:
    """dy/dx = (a0 + a1 x + a2 y + a11 x² + a12 xy + a22 y²) / (b0 + b1 x + ... + b22 y²).

    Coefficients may be numbers or parameter names; unnamed ones default to
    their own symbol, so ``QuadraticSystem()`` is the fully generic system.
    """

    coefficients: Mapping[str, object] | None = None

    def __post_init__(self):
        given = dict(self.coefficients or {})
        unknown = set(given) - set(QUAD_A + QUAD_B)
        if unknown:
            raise KeyError(f"unknown quadratic coefficients {sorted(unknown)}")
        self.values = {k: given.get(k, k) for k in QUAD_A + QUAD_B}
        params = []
        for v in self.values.values():
            if isinstance(v, str):
                params.extend(s for s in _identifiers(v) if s not in ("x", "y") and s not in params)
        self.parameters = tuple(params)

    def _form(self, names) -> str:
        return " + ".join(f"({self.values[n]})*{m}" for n, m in zip(names, _MONOMIALS))

    @property
    def numerator_text(self) -> str:
        return self._form(QUAD_A)

    @property
    def denominator_text(self) -> str:
        return self._form(QUAD_B)

    def vector_field(self) -> VectorField:
        """ẋ = b-form, ẏ = a-form, so that dy/dx is the stated ratio."""
        vf = VectorField([self.denominator_text, self.numerator_text], ("x", "y"), self.parameters,
                         name="quadratic")
        if vf.components[0].is_zero():
            raise DegenerateInputError("denominator polynomial of dy/dx is identically zero")
        return vf


def _identifiers(text: str):
    import re
    return re.findall(r"[A-Za-z_][A-Za-z_0-9]*", text)


@dataclass
class CubicODE:
    """lead·y'' + n3·y'³ + n2·y'² + n1·y' + n0 = 0, all polynomial in (x, y).

    ``lead`` is the Petrovsky–Landis denominator y²P − yP + Qx² − Qx.
    """

    lead: RationalExpr
    n3: RationalExpr
    n2: RationalExpr
    n1: RationalExpr
    n0: RationalExpr

    @property
    def symbols(self):
        return self.lead.symbols

    @property
    def numerators(self) -> tuple[RationalExpr, ...]:
        return self.n3, self.n2, self.n1, self.n0

    def normalized(self) -> tuple[RationalExpr, ...]:
        """(c3, c2, c1, c0) of y'' + c3 y'³ + c2 y'² + c1 y' + c0 = 0."""
        return tuple(n / self.lead for n in self.numerators)

    def specialize(self, values: Mapping[str, object]) -> "CubicODE":
        return CubicODE(*(e.subs(values) for e in (self.lead, *self.numerators)))

    def residual(self, yp: RationalExpr, ypp: RationalExpr) -> RationalExpr:
        return self.lead * ypp + self.n3 * yp ** 3 + self.n2 * yp ** 2 + self.n1 * yp + self.n0

    def __str__(self):
        parts = [f"({self.lead})*y''"]
        for k, n in zip((3, 2, 1), self.numerators):
            if not n.is_zero():
                parts.append(f"({n})*y'^{k}" if k > 1 else f"({n})*y'")
        if not self.n0.is_zero():
            parts.append(f"({self.n0})")
        return " + ".join(parts) + " = 0"


@dataclass
class CPolynomial:
    """Polynomial in the marker ``var`` with rational-function coefficients."""

    var: str
    coeffs: dict[int, RationalExpr]

    @classmethod
    def from_expr(cls, expr: RationalExpr, var: str) -> "CPolynomial":
        if var not in expr.free_symbols():
            return cls(var, {0: expr} if not expr.is_zero() else {})
        return cls(var, {int(k): v for k, v in expr.coefficients(var).items() if not v.is_zero()})

    @property
    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int) -> RationalExpr:
        if k in self.coeffs:
            return self.coeffs[k]
        syms = next(iter(self.coeffs.values())).symbols if self.coeffs else (self.var,)
        return RationalExpr.constant(0, syms)

    def to_json(self) -> dict[str, str]:
        return {str(k): str(v) for k, v in sorted(self.coeffs.items(), reverse=True)}

    def to_expr(self) -> RationalExpr:
        return _recombine(self)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs, reverse=True):
            c = str(self.coeffs[k])
            if k == 0:
                parts.append(f"({c})" if len(self.coeffs) > 1 else c)
            else:
                mon = self.var if k == 1 else f"{self.var}^{k}"
                parts.append(mon if c == "1" else f"({c})*{mon}")
        return " + ".join(parts)


# ---------------------------------------------------------------------------------


def cubic_ode(vf: VectorField) -> CubicODE:
    """Cubic-in-y' ODE: the geodesic y-equation of the Petrovsky–Landis connection.

    With Π the connection, y'' = −Π^2_11 − (2Π^2_12 − Π^1_11) y' − (Π^2_22 − 2Π^1_12) y'² + Π^1_22 y'³.
    """
    if vf.dim != 2:
        raise ValueError("cubic_ode needs a planar field")
    lead = pl_denominator(vf)
    if lead.is_zero():
        raise DegenerateInputError("y²P − yP + Qx² − Qx vanishes identically")
    conn = connection_pl(vf)
    G = conn.__getitem__
    c3 = -G((0, 1, 1))
    c2 = G((1, 1, 1)) - 2 * G((0, 0, 1))
    c1 = 2 * G((1, 0, 1)) - G((0, 0, 0))
    c0 = G((1, 0, 0))
    nums = [c * lead for c in (c3, c2, c1, c0)]
    for n in nums:
        if not n.is_polynomial():
            raise ArithmeticError("coefficient does not clear against the PL denominator")
    return CubicODE(lead, *nums)


def _family_symbols(ode_symbols: Sequence[str]) -> tuple[str, ...]:
    return merge_symbols(ode_symbols, ("C",))


def substitute_family(ode: CubicODE) -> tuple[CPolynomial, CPolynomial]:
    """C-polynomials (coefficients in x, y; then in x alone) for y = C(x−1)/(x−C).

    y' and y'' are expressed through (x, C) only, the result is cleared by
    (x−C)⁶ and reduced by the family factor xy − C(x+y−1); then y itself is
    substituted and the numerator taken.
    """
    syms = _family_symbols(ode.symbols)
    x, y, C = (RationalExpr.symbol(s, syms) for s in ("x", "y", "C"))
    e = [c.with_symbols(syms) for c in (ode.lead, *ode.numerators)]
    yp = C * (1 - C) / (x - C) ** 2
    ypp = -2 * C * (1 - C) / (x - C) ** 3
    expr = (e[0] * ypp + e[1] * yp ** 3 + e[2] * yp ** 2 + e[3] * yp + e[4]) * (x - C) ** 6
    fam = x * y - C * (x + y - 1)
    stage26 = expr / fam
    if not stage26.is_polynomial():
        # family factor absent (e.g. the expression vanishes); keep the undivided form
        stage26 = expr
    stage27 = stage26.subs({"y": C * (x - 1) / (x - C)}).numerator()
    return CPolynomial.from_expr(stage26, "C"), CPolynomial.from_expr(stage27, "C")


def _recombine(cp: CPolynomial) -> RationalExpr:
    if cp.is_zero():
        return RationalExpr.constant(0, (cp.var,))
    syms = ()
    for v in cp.coeffs.values():
        syms = merge_symbols(syms, v.symbols)
    syms = merge_symbols(syms, (cp.var,))
    C = RationalExpr.symbol(cp.var, syms)
    acc = RationalExpr.constant(0, syms)
    for k, v in cp.coeffs.items():
        acc = acc + v.with_symbols(syms) * C ** k
    return acc


def _gcd(a: RationalExpr, b: RationalExpr) -> RationalExpr:
    """Polynomial gcd up to a constant, via canonical cancellation of a/b."""
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    return a / (a / b).numerator()


def strip_content(expr: RationalExpr, keep: Sequence[str]) -> tuple[RationalExpr, RationalExpr]:
    """Split a polynomial into (content, primitive part) with respect to ``keep``.

    The content is the gcd of the coefficients of ``expr`` viewed as a polynomial
    in ``keep`` (the parameters); it depends only on the remaining variables.
    The primitive part is made integral with coprime coefficients.
    """
    syms = expr.symbols
    idx = [syms.index(s) for s in keep if s in syms]
    groups: dict[tuple[int, ...], dict[tuple[int, ...], Fraction]] = {}
    for exps, c in expr.num.terms().items():
        key = tuple(exps[i] for i in idx)
        rest = tuple(0 if i in idx else e for i, e in enumerate(exps))
        groups.setdefault(key, {})[rest] = c
    content = RationalExpr.constant(0, syms)
    from .symexpr import MultiPoly
    for terms in groups.values():
        content = _gcd(content, RationalExpr.from_polys(MultiPoly(terms, syms)))
    if content.is_zero():
        return RationalExpr.constant(1, syms), expr
    prim = expr / content
    # integral primitive part with coprime coefficients
    prim = prim.numerator()
    return expr / prim, prim


def _clean(expr: RationalExpr, params: Sequence[str]) -> RationalExpr:
    num = expr.numerator()
    if num.is_zero():
        return num
    return strip_content(num, params)[1]


def boundary_conditions(stage26: CPolynomial, stage27: CPolynomial, parameters: Sequence[str]) -> dict[str, CPolynomial]:
    """The five condition polynomials keyed by ``BOUNDARY_LABELS``.

    x=0 and x=1 act on the one-variable stage; (x=C, y=1−C) and the two y=1−x
    substitutions act on the two-variable stage. C = 1/C1 is followed by clearing
    powers of C1. Each result has its factors free of the parameters removed.
    """
    e26 = _recombine(stage26)
    e27 = _recombine(stage27)
    syms = merge_symbols(merge_symbols(e26.symbols, e27.symbols), ("C1",))
    e26, e27 = e26.with_symbols(syms), e27.with_symbols(syms)
    C, C1 = RationalExpr.symbol("C", syms), RationalExpr.symbol("C1", syms)
    x = RationalExpr.symbol("x", syms)
    out = {}
    out["x=0"] = CPolynomial.from_expr(_clean(e27.subs({"x": 0}), parameters), "C")
    out["x=1"] = CPolynomial.from_expr(_clean(e27.subs({"x": 1}), parameters), "C")
    out["x=C,y=1-C"] = CPolynomial.from_expr(_clean(e26.subs({"x": C, "y": 1 - C}), parameters), "C")
    diag = e26.subs({"y": 1 - x})
    for label, x0 in (("y=1-x,x=1,C=1/C1", 1), ("y=1-x,x=0,C=1/C1", 0)):
        at = diag.subs({"x": x0})
        deg = at.degree("C") if not at.is_zero() else 0
        inv = at.subs({"C": 1 / C1}) * C1 ** deg
        out[label] = CPolynomial.from_expr(_clean(inv, parameters), "C1")
    return out


def _pole_order(den: RationalExpr, x: str, x0: RationalExpr) -> int:
    X = RationalExpr.symbol(x, den.symbols)
    lin = X - x0.with_symbols(den.symbols)
    order = 0
    cur = den
    while not cur.is_zero() and cur.subs({x: x0}).is_zero():
        cur = cur / lin
        order += 1
        if order > 10:
            break
    return order


def residue_conditions(system: QuadraticSystem | VectorField, max_order: int = 3) -> dict[str, CPolynomial]:
    """Residues of (x−C)²[x(x−1)Q + y(y−1)P]/(x³(x−1)³) along the family at x = 0, 1, C."""
    vf = system.vector_field() if isinstance(system, QuadraticSystem) else system
    params = tuple(s for s in vf.symbols if s not in vf.variables)
    syms = merge_symbols(vf.symbols, ("C",))
    P, Q = (c.with_symbols(syms) for c in vf.components)
    x, y, C = (RationalExpr.symbol(s, syms) for s in ("x", "y", "C"))
    integrand = (x - C) ** 2 * (x * (x - 1) * Q + y * (y - 1) * P) / (x ** 3 * (x - 1) ** 3)
    f = integrand.subs({"y": C * (x - 1) / (x - C)})
    out = {}
    for label, x0 in (("x=0", RationalExpr.constant(0, syms)), ("x=1", RationalExpr.constant(1, syms)),
                      ("x=C", C)):
        if f.is_zero():
            out[label] = CPolynomial("C", {})
            continue
        m = _pole_order(f.denominator(), "x", x0)
        if m > max_order:
            raise PoleOrderError(f"pole of order {m} at {label}")
        if m == 0:
            res = RationalExpr.constant(0, syms)
        else:
            g = f * (x - x0) ** m
            for _ in range(m - 1):
                g = g.diff("x")
            fact = 1
            for k in range(2, m):
                fact *= k
            res = g.subs({"x": x0}) / fact
        out[label] = CPolynomial.from_expr(_clean(res, params), "C")
    return out


def verify_particular_integral(ode: CubicODE, m: RationalExpr, n: RationalExpr,
                               on_curve: RationalExpr | None = None) -> bool:
    """True when y' = m/n (with y'' = (∂x + y'∂y) y') solves the ODE identically.

    With ``on_curve`` = F the test is weakened to "solves the ODE on F = 0":
    the cleared residual numerator must be divisible by F.
    """
    if n.is_zero():
        raise ZeroDivisionError("n is identically zero")
    syms = merge_symbols(ode.symbols, merge_symbols(m.symbols, n.symbols))
    if on_curve is not None:
        syms = merge_symbols(syms, on_curve.symbols)
    yp = m.with_symbols(syms) / n.with_symbols(syms)
    ypp = yp.diff("x") + yp * yp.diff("y")
    o = CubicODE(*(e.with_symbols(syms) for e in (ode.lead, *ode.numerators)))
    r = o.residual(yp, ypp)
    if r.is_zero() or on_curve is None:
        return r.is_zero()
    return (r.numerator() / on_curve.with_symbols(syms)).is_polynomial()


def invariant_curve_check(F: RationalExpr, vf: VectorField) -> tuple[bool, RationalExpr | None]:
    """Whether F = 0 is invariant: F_x P + F_y Q (+ F_z R) = λF with λ polynomial in the variables."""
    if not F.is_polynomial():
        raise ValueError("F must be a polynomial")
    syms = merge_symbols(vf.symbols, F.symbols)
    F = F.with_symbols(syms)
    L = RationalExpr.constant(0, syms)
    for v, c in zip(vf.variables, vf.components):
        L = L + F.diff(v) * c.with_symbols(syms)
    if F.is_zero():
        return L.is_zero(), None
    lam = L / F
    den_vars = set(lam.denominator().free_symbols()) & set(vf.variables)
    if den_vars:
        return False, None
    return True, lam


def proportional(a: RationalExpr, b: RationalExpr) -> Fraction | None:
    """The constant r with a = r·b, or None (both zero gives 1)."""
    if a.is_zero() and b.is_zero():
        return Fraction(1)
    if a.is_zero() or b.is_zero():
        return None
    syms = merge_symbols(a.symbols, b.symbols)
    r = a.with_symbols(syms) / b.with_symbols(syms)
    return r.constant_value() if r.is_constant() else None


def residue_consistency(n_draws: int = 50, seed: int = 0, low: int = -9, high: int = 9) -> list[dict]:
    """Compare residue conditions with the x=0, x=1, (x=C, y=1−C) boundary
    conditions at random integer parameter draws; records the proportionality constants."""
    rng = random.Random(seed)
    rows = []
    pairs = (("x=0", "x=0"), ("x=1", "x=1"), ("x=C", "x=C,y=1-C"))
    for _ in range(n_draws):
        draw = {k: rng.randint(low, high) for k in QUAD_A + QUAD_B}
        qs = QuadraticSystem(draw)
        try:
            ode = cubic_ode(qs.vector_field())
        except DegenerateInputError:
            continue
        s26, s27 = substitute_family(ode)
        bc = boundary_conditions(s26, s27, ())
        rc = residue_conditions(qs)
        row = {"draw": draw}
        for rl, bl in pairs:
            row[rl] = proportional(_recombine(rc[rl]), _recombine(bc[bl]))
        rows.append(row)
    return rows


def generic_quadratic_ode() -> tuple[QuadraticSystem, CubicODE]:
    qs = QuadraticSystem()
    return qs, cubic_ode(qs.vector_field())


def parse_slope(m: str, n: str, parameters: Sequence[str] = ()) -> tuple[RationalExpr, RationalExpr]:
    return parse(m, ("x", "y"), parameters), parse(n, ("x", "y"), parameters)
