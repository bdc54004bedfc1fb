"""Chern–Simons density ε^{ijk}(Γ^p_{iq}Γ^q_{kp;j} + ⅔Γ^p_{iq}Γ^q_{jr}Γ^r_{kp}) of 3D connections."""
from __future__ import annotations

import random
from fractions import Fraction
from dataclasses import dataclass, field
from itertools import permutations

from .closed_forms import (LORENZ_PARAMETERS, LORENZ_VARIABLES, lorenz_cs_blocks, lorenz_cs_diagonal,
                           lorenz_cs_prefactor)
from .connection import AffineConnection, VectorField, connection_lorenz_normalized
from .extension import christoffel_symbols, riemann_extension
from .symexpr import RationalExpr

__all__ = ["CSDensity", "cs_density", "cs_parts", "levi_civita", "lorenz_field", "lorenz_cs_check",
           "READINGS", "TRACES"]

READINGS = ("partial", "covariant")
TRACES = ("base", "extension")


def levi_civita(i: int, j: int, k: int) -> int:
    p = (i, j, k)
    if len(set(p)) < 3:
        return 0
    inv = sum(1 for a in range(3) for b in range(a + 1, 3) if p[a] > p[b])
    return -1 if inv % 2 else 1


@dataclass
class CSDensity:
    value: RationalExpr
    reading: str = "partial"
    trace: str = "base"
    parts: dict[str, RationalExpr] = field(default_factory=dict)

    def __str__(self):
        return str(self.value)


def _gamma_table(conn: AffineConnection, trace: str):
    """(Γ lookup (p, i, q) -> expr or None, index range for p, q, r, coordinate names, symbols)."""
    if trace == "base":
        n = conn.dim

        def G(c, a, b):
            e = conn[c, a, b]
            return None if e.is_zero() else e
        return G, range(n), conn.variables, conn.symbols
    if trace == "extension":
        metric = riemann_extension(conn)
        gam = christoffel_symbols(metric)

        def G(c, a, b):
            e = gam[c, a, b] if a <= b else gam[c, b, a]
            return None if e.is_zero() else e
        return G, range(metric.dim), metric.coords, metric.symbols
    raise ValueError(f"trace must be one of {TRACES}")


def cs_parts(conn: AffineConnection, trace: str = "base") -> dict[str, RationalExpr]:
    """The three ε-contractions the density is assembled from.

    ``d``: ε Γ^p_{iq} ∂_j Γ^q_{kp};  ``c``: ε Γ^p_{iq} Γ^q_{jr} Γ^r_{kp};
    ``k``: ε Γ^p_{iq} (Γ^q_{jm}Γ^m_{kp} − Γ^m_{jk}Γ^q_{mp} − Γ^m_{jp}Γ^q_{km}),
    the connection terms of a formal covariant derivative.
    """
    if conn.dim != 3:
        raise ValueError("the Chern–Simons density needs a 3-dimensional connection")
    G, rng, coords, syms = _gamma_table(conn, trace)
    zero = RationalExpr.constant(0, syms)
    d = c = k = zero
    derivs: dict[tuple[int, int, int, int], RationalExpr] = {}

    def dG(q, a, b, j):
        key = (q, a, b, j)
        if key not in derivs:
            e = G(q, a, b)
            derivs[key] = e.diff(coords[j]) if e is not None else zero
        return derivs[key]

    for i, j, kk in permutations(range(3)):
        eps = levi_civita(i, j, kk)
        for p in rng:
            for q in rng:
                g1 = G(p, i, q)
                if g1 is None:
                    continue
                t = dG(q, kk, p, j)
                if not t.is_zero():
                    d = d + eps * g1 * t
                for r in rng:
                    g2, g3 = G(q, j, r), G(r, kk, p)
                    if g2 is not None and g3 is not None:
                        c = c + eps * g1 * g2 * g3
                # connection part of Γ^q_{kp;j}; m runs over the same range
                acc = zero
                for m in rng:
                    a1, a2 = G(q, j, m), G(m, kk, p)
                    if a1 is not None and a2 is not None:
                        acc = acc + a1 * a2
                    b1, b2 = G(m, j, kk), G(q, m, p)
                    if b1 is not None and b2 is not None:
                        acc = acc - b1 * b2
                    c1, c2 = G(m, j, p), G(q, kk, m)
                    if c1 is not None and c2 is not None:
                        acc = acc - c1 * c2
                if not acc.is_zero():
                    k = k + eps * g1 * acc
    return {"d": d, "c": c, "k": k}


def cs_density(conn: AffineConnection, reading: str = "partial", trace: str = "base") -> CSDensity:
    """Chern–Simons density; ``reading`` fixes how ";j" is taken.

    ``partial``: Γ∂Γ + ⅔ΓΓΓ (Chern–Weil form). ``covariant``: ";j" as a formal
    covariant derivative of the components. ``trace="extension"`` runs p, q, r
    over the indices of the Riemann extension instead of the base.
    """
    if reading not in READINGS:
        raise ValueError(f"reading must be one of {READINGS}")
    parts = cs_parts(conn, trace)
    value = parts["d"] + parts["c"] * RationalExpr.constant(2, parts["c"].symbols) / 3
    if reading == "covariant":
        value = value + parts["k"]
    return CSDensity(value, reading, trace, parts)


def lorenz_field() -> VectorField:
    return VectorField(["sigma*(y - x)", "r*x - y - x*z", "x*y - b*z"], LORENZ_VARIABLES, LORENZ_PARAMETERS,
                       name="lorenz")


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300) if b != 0 else abs(a)


def lorenz_cs_check(reading: str = "covariant", trace: str = "extension", n_draws: int = 50,
                    seed: int = 0, tol: float = 1e-8) -> dict:
    """Compare the prefactored Lorenz density with the displayed z⁵, z⁴, z³ blocks and the x=y form.

    The x=y comparison substitutes x=y into the prefactored polynomial, where
    the (x−y)⁴ factor has already cancelled, so no limit needs to be taken.
    """
    conn = connection_lorenz_normalized(lorenz_field())
    dens = cs_density(conn, reading, trace)
    syms = dens.value.symbols
    pref = lorenz_cs_prefactor().with_symbols(syms)
    lhs = pref * dens.value
    report: dict = {"reading": reading, "trace": trace, "density": dens.value, "prefactored": lhs,
                    "polynomial": lhs.is_polynomial()}
    blocks = {}
    if lhs.is_polynomial():
        coeffs = lhs.coefficients("z")
        for k, shown in lorenz_cs_blocks().items():
            got = coeffs.get(k, RationalExpr.constant(0, syms))
            diff = got - shown.with_symbols(syms)
            blocks[k] = {"match": diff.is_zero(), "computed": got, "displayed": shown}
        report["degree_z"] = max(coeffs)
    report["blocks"] = blocks

    diag = lhs.subs({"x": RationalExpr.symbol("y", syms)})
    shown = lorenz_cs_diagonal().with_symbols(syms)
    report["diagonal_symbolic"] = (diag - shown).is_zero()
    report["diagonal_ratio"] = (diag / shown) if not shown.is_zero() and not diag.is_zero() else None
    rng = random.Random(seed)
    rows = []
    f_diag = diag.compile(("y", "z", "sigma", "r", "b"))
    f_shown = shown.compile(("y", "z", "sigma", "r", "b"))
    for _ in range(n_draws):
        pt = [rng.uniform(-2, 2) for _ in range(2)] + [rng.uniform(0.5, 3) for _ in range(3)]
        a, b = f_diag(*pt), f_shown(*pt)
        rows.append({"point": pt, "displayed": b, "pipeline": a, "rel_error": _rel(a, b)})
    report["diagonal_samples"] = rows
    report["diagonal_max_rel"] = max(r["rel_error"] for r in rows) if rows else 0.0
    example = (1.0, 0.0, 1.0, 2.0, 1.0)  # (y, z, sigma, r, b)
    report["diagonal_example"] = {"point": example, "displayed": f_shown(*example), "pipeline": f_diag(*example)}

    # stationary points z = r−1, y² = b(r−1): exact, by eliminating b
    R_, Y_ = RationalExpr.symbol("r", syms), RationalExpr.symbol("y", syms)
    on_stat = diag.subs({"z": R_ - 1, "b": Y_ ** 2 / (R_ - 1)})
    report["stationary_symbolic"] = on_stat.is_zero()
    stationary = []
    # random stationary points with rational y, r; b = y²/(r−1) > 0, evaluated exactly
    for _ in range(10):
        r_ = Fraction(rng.randint(11, 400), 10)
        y_ = Fraction(rng.choice((-1, 1)) * rng.randint(1, 60), 7)
        b_ = y_ ** 2 / (r_ - 1)
        pt = {"y": y_, "z": r_ - 1, "sigma": Fraction(rng.randint(1, 200), 10), "r": r_, "b": b_}
        stationary.append({"r": r_, "b": b_, "y": y_, "displayed": shown.subs(pt).constant_value(),
                           "pipeline": diag.subs(pt).constant_value()})
    report["stationary"] = stationary
    report["ok"] = (bool(blocks) and all(v["match"] for v in blocks.values()) and report["diagonal_max_rel"] < tol
                    and report["stationary_symbolic"] and all(st["pipeline"] == 0 for st in stationary))
    return report
