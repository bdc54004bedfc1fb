"""Riemann extensions of affine connections and their curvature.

Coordinates are ordered (x^1..x^n, Ψ_1..Ψ_n). Curvature convention:

    R^a_{bcd} = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + Γ^a_{ce} Γ^e_{db} − Γ^a_{de} Γ^e_{cb},
    R_{bd} = R^a_{bad}.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .connection import AffineConnection, Covector, VectorField, connection_direct
from .linalg import inverse
from .symexpr import RationalExpr, SymExprError

__all__ = [
    "ExtendedMetric",
    "CurvatureBundle",
    "SwellError",
    "riemann_extension",
    "metric_from_base_block",
    "curvature",
    "scalar_invariants",
    "numeric_invariants",
    "sample_points",
    "verify_ricci_closed_forms",
    "second_killing_residual",
    "DEFAULT_FIBER_NAMES",
]

DEFAULT_FIBER_NAMES = {1: ("w",), 2: ("z", "t"), 3: ("U", "V", "W")}


class SwellError(SymExprError):
    """Expression growth exceeded the configured budget."""


@dataclass
class ExtendedMetric:
    """Symmetric 2n×2n metric with rational entries over coords + parameters."""

    base_dim: int
    coords: tuple[str, ...]
    symbols: tuple[str, ...]
    g: list[list[RationalExpr]]
    ginv: list[list[RationalExpr]] | None = None
    name: str = ""

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def fiber_symbols(self) -> tuple[str, ...]:
        return self.coords[self.base_dim:]

    @property
    def base_variables(self) -> tuple[str, ...]:
        return self.coords[:self.base_dim]

    def inverse(self) -> list[list[RationalExpr]]:
        if self.ginv is None:
            self.ginv = inverse(self.g, self.symbols)
        return self.ginv

    def to_json(self) -> dict:
        entries = {}
        for a in range(self.dim):
            for b in range(a, self.dim):
                if not self.g[a][b].is_zero():
                    entries[f"{a + 1},{b + 1}"] = str(self.g[a][b])
        return {"name": self.name, "coords": list(self.coords), "symbols": list(self.symbols),
                "g": entries}

    def line_element(self) -> str:
        """ds² written as a sum of coefficient * dX dY terms."""
        parts = []
        for a in range(self.dim):
            for b in range(a, self.dim):
                e = self.g[a][b] if a == b else self.g[a][b] * 2
                if e.is_zero():
                    continue
                da, db = self.coords[a], self.coords[b]
                diff = f"d{da}^2" if a == b else f"d{da}*d{db}"
                parts.append(f"({e})*{diff}")
        return " + ".join(parts) if parts else "0"


def _fiber_names(n: int, fiber: Sequence[str] | None, taken: Sequence[str]) -> tuple[str, ...]:
    names = tuple(fiber) if fiber is not None else DEFAULT_FIBER_NAMES.get(n, tuple(f"psi{k + 1}" for k in range(n)))
    if len(names) != n:
        raise ValueError(f"need {n} fiber names, got {names}")
    clash = set(names) & set(taken)
    if clash:
        raise ValueError(f"fiber names {sorted(clash)} collide with existing symbols")
    return names


def metric_from_base_block(base: Mapping[tuple[int, int], RationalExpr], n: int,
                           coords: Sequence[str], symbols: Sequence[str], name: str = "") -> ExtendedMetric:
    """Metric [[A, I], [I, 0]] for a symmetric base block A (keys i <= j)."""
    coords, symbols = tuple(coords), tuple(symbols)
    zero = RationalExpr.constant(0, symbols)
    one = RationalExpr.constant(1, symbols)
    N = 2 * n
    g = [[zero] * N for _ in range(N)]
    for (i, j), v in base.items():
        v = v.with_symbols(symbols)
        g[i][j] = v
        g[j][i] = v
    for k in range(n):
        g[k][n + k] = one
        g[n + k][k] = one
    # inverse of [[A, I], [I, 0]] is [[0, I], [I, -A]]
    ginv = [[zero] * N for _ in range(N)]
    for k in range(n):
        ginv[k][n + k] = one
        ginv[n + k][k] = one
    for i in range(n):
        for j in range(n):
            if not g[i][j].is_zero():
                ginv[n + i][n + j] = -g[i][j]
    return ExtendedMetric(n, coords, symbols, g, ginv, name)


def riemann_extension(conn: AffineConnection, fiber: Sequence[str] | None = None) -> ExtendedMetric:
    """g_ij = −2 Γ^k_ij Ψ_k, g_{i, n+k} = δ_ik, fiber block zero."""
    n = conn.dim
    names = _fiber_names(n, fiber, conn.symbols)
    symbols = conn.symbols + names
    coords = conn.variables + names
    psi = [RationalExpr.symbol(s, symbols) for s in names]
    zero = RationalExpr.constant(0, symbols)
    base = {}
    for i in range(n):
        for j in range(i, n):
            acc = zero
            for k in range(n):
                c = conn[k, i, j]
                if not c.is_zero():
                    acc = acc + c.with_symbols(symbols) * psi[k]
            base[i, j] = acc * -2
    return metric_from_base_block(base, n, coords, symbols, name=f"ext({conn.name})")


@dataclass
class CurvatureBundle:
    christoffel: dict[tuple[int, int, int], RationalExpr]  # (c, a, b) with a <= b
    riemann: dict[tuple[int, int, int, int], RationalExpr]  # (a, b, c, d) with c < d, nonzero only
    ricci: dict[tuple[int, int], RationalExpr]  # (a, b) with a <= b
    dim: int
    symbols: tuple[str, ...]
    invariants: tuple[RationalExpr, RationalExpr] | None = None

    def gamma(self, c, a, b) -> RationalExpr:
        if a > b:
            a, b = b, a
        return self.christoffel[c, a, b]

    def R(self, a, b, c, d) -> RationalExpr:
        if c == d:
            return RationalExpr.constant(0, self.symbols)
        if c < d:
            return self.riemann.get((a, b, c, d), RationalExpr.constant(0, self.symbols))
        return -self.riemann.get((a, b, d, c), RationalExpr.constant(0, self.symbols))

    def Ric(self, a, b) -> RationalExpr:
        if a > b:
            a, b = b, a
        return self.ricci[a, b]

    def ricci_is_zero(self) -> bool:
        return all(v.is_zero() for v in self.ricci.values())


def _check_budget(e: RationalExpr, budget: int | None, where: str):
    if budget is not None and e.n_terms() > budget:
        raise SwellError(f"expression for {where} has {e.n_terms()} terms (budget {budget}); "
                         "fall back to numeric verification")


def christoffel_symbols(metric: ExtendedMetric, budget: int | None = None):
    N = metric.dim
    X = metric.coords
    g = metric.g
    ginv = metric.inverse()
    zero = RationalExpr.constant(0, metric.symbols)
    dg = {}
    for a in range(N):
        for b in range(a, N):
            if g[a][b].is_constant():
                continue
            for c in range(N):
                d = g[a][b].diff(X[c])
                if not d.is_zero():
                    dg[a, b, c] = d

    def dG(a, b, c):  # ∂_c g_ab
        if a > b:
            a, b = b, a
        return dg.get((a, b, c))

    lower = {}
    for d in range(N):
        for a in range(N):
            for b in range(a, N):
                acc = zero
                for t in (dG(d, b, a), dG(d, a, b)):
                    if t is not None:
                        acc = acc + t
                t = dG(a, b, d)
                if t is not None:
                    acc = acc - t
                if not acc.is_zero():
                    lower[d, a, b] = acc / 2
    gamma = {}
    for c in range(N):
        for a in range(N):
            for b in range(a, N):
                acc = zero
                for d in range(N):
                    if ginv[c][d].is_zero():
                        continue
                    low = lower.get((d, a, b))
                    if low is not None:
                        acc = acc + ginv[c][d] * low
                _check_budget(acc, budget, f"Γ^{c + 1}_{a + 1}{b + 1}")
                gamma[c, a, b] = acc
    return gamma


def curvature(metric: ExtendedMetric, budget: int | None = 200_000) -> CurvatureBundle:
    """Christoffel symbols, Riemann and Ricci tensors of ``metric``."""
    N = metric.dim
    X = metric.coords
    zero = RationalExpr.constant(0, metric.symbols)
    gamma = christoffel_symbols(metric, budget)

    def G(c, a, b):
        return gamma[c, a, b] if a <= b else gamma[c, b, a]

    nz = {key for key, v in gamma.items() if not v.is_zero()}

    def nonzero(c, a, b):
        return ((c, a, b) if a <= b else (c, b, a)) in nz

    dgam = {}
    for (c, a, b) in nz:
        for e in range(N):
            d = gamma[c, a, b].diff(X[e])
            if not d.is_zero():
                dgam[c, a, b, e] = d

    def dG(a, d, b, c):  # ∂_c Γ^a_{db}
        key = (a, d, b, c) if d <= b else (a, b, d, c)
        return dgam.get(key)

    riemann = {}
    for a in range(N):
        for b in range(N):
            for c in range(N):
                for d in range(c + 1, N):
                    acc = zero
                    t = dG(a, d, b, c)
                    if t is not None:
                        acc = acc + t
                    t = dG(a, c, b, d)
                    if t is not None:
                        acc = acc - t
                    for e in range(N):
                        if nonzero(a, c, e) and nonzero(e, d, b):
                            acc = acc + G(a, c, e) * G(e, d, b)
                        if nonzero(a, d, e) and nonzero(e, c, b):
                            acc = acc - G(a, d, e) * G(e, c, b)
                    if not acc.is_zero():
                        _check_budget(acc, budget, f"R^{a + 1}_{b + 1}{c + 1}{d + 1}")
                        riemann[a, b, c, d] = acc
    bundle = CurvatureBundle(gamma, riemann, {}, N, metric.symbols)
    for b in range(N):
        for d in range(b, N):
            acc = zero
            for a in range(N):
                if a != d:
                    acc = acc + bundle.R(a, b, a, d)
            bundle.ricci[b, d] = acc
    return bundle


def scalar_invariants(bundle: CurvatureBundle, metric: ExtendedMetric) -> tuple[RationalExpr, RationalExpr]:
    """p = R_ab R^ab and q = R_abcd R^abcd, computed exactly."""
    N = metric.dim
    gi = metric.inverse()
    zero = RationalExpr.constant(0, metric.symbols)
    nzi = [[not gi[a][b].is_zero() for b in range(N)] for a in range(N)]
    # raised Ricci R^{ab} = g^{ac} g^{bd} R_cd
    ric = [[bundle.Ric(a, b) for b in range(N)] for a in range(N)]
    half = [[sum((gi[a][c] * ric[c][d] for c in range(N) if nzi[a][c] and not ric[c][d].is_zero()), zero)
             for d in range(N)] for a in range(N)]
    p = zero
    for a in range(N):
        for b in range(N):
            if ric[a][b].is_zero():
                continue
            up = sum((half[a][d] * gi[b][d] for d in range(N) if nzi[b][d] and not half[a][d].is_zero()), zero)
            p = p + ric[a][b] * up
    # q = −R^a_{bcd} R^b_{aef} g^{ce} g^{df}
    raised = {}
    for (a, b, c, d), v in bundle.riemann.items():
        for cc, dd, sign in ((c, d, 1), (d, c, -1)):
            raised.setdefault((a, b, cc, dd), zero)
            raised[a, b, cc, dd] = raised[a, b, cc, dd] + (v if sign == 1 else -v)
    # R^a_b^{ef} = R^a_{bcd} g^{ce} g^{df}
    up = {}
    for (a, b, c, d), v in raised.items():
        for e in range(N):
            if not nzi[c][e]:
                continue
            for f in range(N):
                if not nzi[d][f]:
                    continue
                key = (a, b, e, f)
                up[key] = up.get(key, zero) + v * gi[c][e] * gi[d][f]
    q = zero
    for (a, b, e, f), v in up.items():
        other = raised.get((b, a, e, f))
        if other is not None and not v.is_zero():
            q = q - other * v
    bundle.invariants = (p, q)
    return p, q


def sample_points(exprs: Sequence[RationalExpr], names: Sequence[str], n: int, rng: random.Random,
                  low: float = -2.0, high: float = 2.0, min_den: float = 1e-3,
                  fixed: Mapping[str, float] | None = None, max_tries: int = 100_000) -> list[dict[str, float]]:
    """Rejection-sample points where every denominator has magnitude > ``min_den``."""
    fixed = dict(fixed or {})
    free = [s for s in names if s not in fixed]
    dens = []
    for e in exprs:
        if not e.is_polynomial():
            dens.append(e.denominator().compile(tuple(names)))
    out = []
    tries = 0
    while len(out) < n:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not find enough non-singular sample points")
        pt = dict(fixed)
        for s in free:
            pt[s] = rng.uniform(low, high)
        vals = [pt[s] for s in names]
        if all(abs(d(*vals)) > min_den for d in dens):
            out.append(pt)
    return out


def numeric_invariants(bundle: CurvatureBundle, metric: ExtendedMetric, points: Sequence[Mapping[str, float]]):
    """Max |p| and |q| over ``points``, from numeric contraction of the symbolic tensors."""
    import numpy as np

    N = metric.dim
    names = metric.symbols
    gi_f = [[metric.inverse()[a][b].compile(names) for b in range(N)] for a in range(N)]
    ric_f = {k: v.compile(names) for k, v in bundle.ricci.items() if not v.is_zero()}
    rie_f = {k: v.compile(names) for k, v in bundle.riemann.items()}
    max_p = max_q = 0.0
    for pt in points:
        args = [pt[s] for s in names]
        gi = np.array([[f(*args) for f in row] for row in gi_f], dtype=float)
        ric = np.zeros((N, N))
        for (a, b), f in ric_f.items():
            ric[a, b] = ric[b, a] = f(*args)
        R = np.zeros((N, N, N, N))
        for (a, b, c, d), f in rie_f.items():
            v = f(*args)
            R[a, b, c, d] = v
            R[a, b, d, c] = -v
        p = float(np.einsum("ab,ac,bd,cd->", ric, gi, gi, ric))
        q = float(-np.einsum("abcd,baef,ce,df->", R, R, gi, gi))
        max_p = max(max_p, abs(p))
        max_q = max(max_q, abs(q))
    return max_p, max_q


def _base_ricci(vf_metric: ExtendedMetric) -> dict[tuple[int, int], RationalExpr]:
    b = curvature(vf_metric)
    n = vf_metric.base_dim
    return {(i, j): b.Ric(i, j) for i in range(n) for j in range(i, n)}, b


def verify_ricci_closed_forms(vf: VectorField, include_literal: bool = True) -> list[dict]:
    """Compare the extension Ricci tensor with the displayed R_11, R_12, R_22.

    Rows report per-component agreement for the metric assembled from the
    direct connection; optionally also for the metric read literally from
    the printed line element (whose dx dy coefficient differs).
    """
    from .closed_forms import literal_cross_term_metric_base, ricci_closed_forms

    rows = []
    closed = ricci_closed_forms(vf)
    metric = riemann_extension(connection_direct(vf))
    ric, bundle = _base_ricci(metric)
    others_zero = all(v.is_zero() for (a, b), v in bundle.ricci.items() if b >= 2)
    for key, formula in closed.items():
        diff = ric[key] - formula.with_symbols(metric.symbols)
        rows.append({"metric": "extension", "component": f"R_{key[0] + 1}{key[1] + 1}",
                     "match": diff.is_zero(), "computed": str(ric[key]), "formula": str(formula),
                     "fiber_components_zero": others_zero})
    if include_literal:
        base = literal_cross_term_metric_base(vf)
        syms = base[0, 0].symbols
        lit = metric_from_base_block(base, 2, vf.variables + ("z", "t"), syms, name="literal")
        ric2, _ = _base_ricci(lit)
        for key, formula in closed.items():
            diff = ric2[key] - formula.with_symbols(lit.symbols)
            rows.append({"metric": "literal", "component": f"R_{key[0] + 1}{key[1] + 1}",
                         "match": diff.is_zero(), "computed": str(ric2[key]), "formula": str(formula)})
    return rows


def covariant_derivative_covector(a: Sequence[RationalExpr], bundle: CurvatureBundle, coords: Sequence[str]):
    """a_{i;j} = ∂_j a_i − Γ^m_{ij} a_m as a dense N×N list."""
    N = bundle.dim
    zero = RationalExpr.constant(0, bundle.symbols)
    out = [[zero] * N for _ in range(N)]
    for i in range(N):
        for j in range(N):
            acc = a[i].diff(coords[j])
            for m in range(N):
                if a[m].is_zero():
                    continue
                gm = bundle.gamma(m, i, j)
                if not gm.is_zero():
                    acc = acc - gm * a[m]
            out[i][j] = acc
    return out


def second_killing_residual(a: Covector, bundle: CurvatureBundle, metric: ExtendedMetric):
    """Residual a_{i;j;k} + R^m_{kij} a_m (dense, N×N×N) for a covector padded with zeros."""
    N = bundle.dim
    coords = metric.coords
    comps = [c.with_symbols(bundle.symbols) for c in a.padded(N).components]
    a1 = covariant_derivative_covector(comps, bundle, coords)
    res = {}
    for i in range(N):
        for j in range(N):
            for k in range(N):
                acc = a1[i][j].diff(coords[k])
                for m in range(N):
                    gki = bundle.gamma(m, k, i)
                    if not gki.is_zero() and not a1[m][j].is_zero():
                        acc = acc - gki * a1[m][j]
                    gkj = bundle.gamma(m, k, j)
                    if not gkj.is_zero() and not a1[i][m].is_zero():
                        acc = acc - gkj * a1[i][m]
                    if not comps[m].is_zero():
                        r = bundle.R(m, k, i, j)
                        if not r.is_zero():
                            acc = acc + r * comps[m]
                res[i, j, k] = acc
    return res
