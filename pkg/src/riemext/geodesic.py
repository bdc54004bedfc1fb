"""Numerical geodesic flow of affine connections and their Riemann extensions."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .connection import AffineConnection, VectorField
from .extension import ExtendedMetric, christoffel_symbols, riemann_extension

__all__ = [
    "SingularityError",
    "IntegrationError",
    "GeodesicState",
    "GeodesicTrajectory",
    "FiberLinearSystem",
    "integrate_base",
    "integrate_fiber",
    "integrate_extended",
    "first_integral_monitor",
    "fiber_linear_system",
    "embedding_residual",
    "decouple_fiber",
    "rk4",
]

SINGULAR_EPS = 1e-9


class SingularityError(RuntimeError):
    def __init__(self, s: float, detail: str):
        self.s = s
        super().__init__(f"singularity approached at s = {s:.6g}: {detail}")


class IntegrationError(RuntimeError):
    pass


@dataclass
class GeodesicState:
    s: float
    x: np.ndarray
    xdot: np.ndarray
    psi: np.ndarray | None = None
    psidot: np.ndarray | None = None


@dataclass
class GeodesicTrajectory:
    s: np.ndarray
    x: np.ndarray  # (m, n)
    xdot: np.ndarray
    psi: np.ndarray | None = None
    psidot: np.ndarray | None = None
    monitors: dict[str, np.ndarray] = field(default_factory=dict)
    variables: tuple[str, ...] = ()
    fiber: tuple[str, ...] = ()

    @property
    def dim(self) -> int:
        return self.x.shape[1]

    def __len__(self):
        return len(self.s)

    def state(self, idx: int) -> GeodesicState:
        return GeodesicState(float(self.s[idx]), self.x[idx], self.xdot[idx],
                             None if self.psi is None else self.psi[idx],
                             None if self.psidot is None else self.psidot[idx])

    def states(self) -> list[GeodesicState]:
        return [self.state(i) for i in range(len(self.s))]

    def header(self) -> list[str]:
        names = list(self.variables or [f"x{i + 1}" for i in range(self.dim)])
        cols = ["s"] + names + [f"d{v}" for v in names]
        if self.psi is not None:
            fib = list(self.fiber or [f"psi{i + 1}" for i in range(self.dim)])
            cols += fib + [f"d{v}" for v in fib]
        return cols + list(self.monitors)

    def rows(self):
        for i in range(len(self.s)):
            row = [self.s[i], *self.x[i], *self.xdot[i]]
            if self.psi is not None:
                row += [*self.psi[i], *self.psidot[i]]
            row += [self.monitors[k][i] for k in self.monitors]
            yield row

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.header())
            for row in self.rows():
                w.writerow([repr(float(v)) for v in row])


@dataclass
class FiberLinearSystem:
    """Ψ̈ + A(s) Ψ̇ + B(s) Ψ = 0 sampled along a base trajectory."""

    s: np.ndarray
    A: np.ndarray  # (m, n, n)
    B: np.ndarray


# ---------------------------------------------------------------------------------
# compiled right-hand sides


class _QuadraticForm:
    """Compiled table of Γ^k_ij, evaluated as Γ^k_ij v^i v^j with a pole guard."""

    def __init__(self, entries, dim: int, args: Sequence[str]):
        self.dim = dim
        self.terms = []
        for (k, i, j), e in entries:
            if e.is_zero():
                continue
            nf, df = e.compile_parts(args)
            self.terms.append((k, i, j, nf, df, 1.0 if i == j else 2.0))

    def __call__(self, point: Sequence[float], v: np.ndarray, s: float = float("nan"),
                 eps: float = SINGULAR_EPS) -> np.ndarray:
        out = np.zeros(self.dim)
        for k, i, j, nf, df, w in self.terms:
            d = df(*point)
            if abs(d) < eps:
                raise SingularityError(s, f"|denominator| = {abs(d):.3e} < {eps:g}")
            out[k] += w * (nf(*point) / d) * v[i] * v[j]
        return out


def _param_values(symbols: Sequence[str], variables: Sequence[str], params: Mapping[str, float] | None):
    params = dict(params or {})
    names = [s for s in symbols if s not in variables]
    missing = [s for s in names if s not in params]
    if missing:
        raise ValueError(f"numeric values required for parameters {missing}")
    return [float(params[s]) for s in names]


def rk4(f, y0: np.ndarray, s_grid: np.ndarray) -> np.ndarray:
    """Classical fixed-step RK4 on the given grid."""
    ys = np.empty((len(s_grid), len(y0)))
    ys[0] = y0
    y = np.asarray(y0, dtype=float)
    for n in range(len(s_grid) - 1):
        s, h = s_grid[n], s_grid[n + 1] - s_grid[n]
        k1 = f(s, y)
        k2 = f(s + h / 2, y + h / 2 * k1)
        k3 = f(s + h / 2, y + h / 2 * k2)
        k4 = f(s + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[n + 1] = y
    return ys


def _integrate(rhs, y0, s_span, tol, s_eval, method, rk4_steps):
    s0, s1 = map(float, s_span)
    if s_eval is None:
        s_eval = np.linspace(s0, s1, 201)
    s_eval = np.asarray(s_eval, dtype=float)
    if method.upper() == "RK4":
        grid = np.linspace(s0, s1, rk4_steps + 1)
        ys = rk4(rhs, np.asarray(y0, float), grid)
        # sample on the requested grid by linear interpolation of the fixed-step solution
        out = np.column_stack([np.interp(s_eval, grid, ys[:, c]) for c in range(ys.shape[1])])
        return s_eval, out
    sol = solve_ivp(rhs, (s0, s1), np.asarray(y0, float), method="RK45", rtol=tol,
                    atol=tol * 1e-2, t_eval=s_eval, dense_output=False)
    if sol.status != 0:
        raise IntegrationError(sol.message)
    return sol.t, sol.y.T


def integrate_base(conn: AffineConnection, init: tuple[Sequence[float], Sequence[float]],
                   s_span: tuple[float, float], tol: float = 1e-10,
                   params: Mapping[str, float] | None = None, s_eval=None,
                   method: str = "RK45", rk4_steps: int = 4000) -> GeodesicTrajectory:
    """Integrate ẍ^k + Γ^k_ij ẋ^i ẋ^j = 0 (adaptive Dormand-Prince 5(4) or fixed RK4)."""
    n = conn.dim
    pv = _param_values(conn.symbols, conn.variables, params)
    form = _QuadraticForm(conn.items(), n, conn.symbols)

    def rhs(s, y):
        x, v = y[:n], y[n:]
        return np.concatenate([v, -form(list(x) + pv, v, s)])

    y0 = np.concatenate([np.asarray(init[0], float), np.asarray(init[1], float)])
    s, ys = _integrate(rhs, y0, s_span, tol, s_eval, method, rk4_steps)
    traj = GeodesicTrajectory(s, ys[:, :n], ys[:, n:], variables=conn.variables)
    res = np.empty(len(s))
    for idx in range(len(s)):
        acc = -form(list(ys[idx, :n]) + pv, ys[idx, n:], s[idx])
        res[idx] = np.linalg.norm(acc)
    traj.monitors["acceleration_norm"] = res
    return traj


class _ExtendedRHS:
    """Geodesic equations of the full 2n-dimensional extension metric."""

    def __init__(self, metric: ExtendedMetric, params: Mapping[str, float] | None):
        self.metric = metric
        self.N = metric.dim
        self.n = metric.base_dim
        self.gamma = christoffel_symbols(metric)
        self.pv = _param_values(metric.symbols, metric.coords, params)
        # coords come first in metric.symbols? reorder arguments explicitly
        self.args = tuple(metric.coords) + tuple(s for s in metric.symbols if s not in metric.coords)
        self.form = _QuadraticForm(self.gamma.items(), self.N, self.args)

    def point(self, X):
        return list(X) + self.pv

    def accel(self, X, V, s=float("nan")):
        return -self.form(self.point(X), V, s)

    def __call__(self, s, y):
        N = self.N
        X, V = y[:N], y[N:]
        return np.concatenate([V, self.accel(X, V, s)])


def integrate_extended(conn: AffineConnection, init_x, init_xdot, init_psi, init_psidot,
                       s_span, tol: float = 1e-10, params=None, s_eval=None,
                       fiber: Sequence[str] | None = None, method: str = "RK45",
                       rk4_steps: int = 4000) -> GeodesicTrajectory:
    """Integrate the whole extension geodesic system from explicit initial data."""
    metric = riemann_extension(conn, fiber)
    rhs = _ExtendedRHS(metric, params)
    n = conn.dim
    y0 = np.concatenate([init_x, init_psi, init_xdot, init_psidot]).astype(float)
    s, ys = _integrate(rhs, y0, s_span, tol, s_eval, method, rk4_steps)
    N = 2 * n
    traj = GeodesicTrajectory(s, ys[:, :n], ys[:, N:N + n], ys[:, n:N], ys[:, N + n:],
                              variables=conn.variables, fiber=metric.fiber_symbols)
    traj.monitors["first_integral_value"] = 2 * np.einsum("ij,ij->i", traj.psi, traj.xdot)
    traj.monitors["quadratic_integral"] = _quadratic_integral(rhs, ys)
    return traj


def _quadratic_integral(rhs: _ExtendedRHS, ys: np.ndarray) -> np.ndarray:
    """g_ab Ẋ^a Ẋ^b, constant along affinely parametrized geodesics."""
    N = rhs.N
    g = [[e.compile(rhs.args) for e in row] for row in rhs.metric.g]
    out = np.empty(len(ys))
    for idx, y in enumerate(ys):
        pt = rhs.point(y[:N])
        G = np.array([[f(*pt) for f in row] for row in g])
        V = y[N:]
        out[idx] = V @ G @ V
    return out


def integrate_fiber(conn: AffineConnection, base: GeodesicTrajectory, init: tuple[Sequence[float], Sequence[float]],
                    tol: float = 1e-10, params=None, fiber: Sequence[str] | None = None,
                    method: str = "RK45") -> GeodesicTrajectory:
    """Solve the fiber equations along ``base``, recording the full 2n-dimensional state.

    The fiber system is linear in Ψ with coefficients evaluated exactly from
    the symbolic Christoffel symbols at each stage; the base is re-integrated
    alongside it so the coefficients are never interpolated.
    """
    s = base.s
    traj = integrate_extended(conn, base.x[0], base.xdot[0], np.asarray(init[0], float),
                              np.asarray(init[1], float), (s[0], s[-1]), tol, params, s_eval=s,
                              fiber=fiber, method=method)
    drift = float(np.max(np.abs(traj.x - base.x)))
    traj.monitors["base_drift"] = np.full(len(s), drift)
    return traj


def first_integral_monitor(traj: GeodesicTrajectory) -> tuple[float, float, float]:
    """Least-squares line through 2Ψ_k ẋ^k versus s: (slope, intercept, max deviation)."""
    if traj.psi is None:
        raise ValueError("trajectory has no fiber part")
    w = 2 * np.einsum("ij,ij->i", traj.psi, traj.xdot)
    A = np.column_stack([traj.s, np.ones_like(traj.s)])
    (nu, mu), *_ = np.linalg.lstsq(A, w, rcond=None)
    dev = float(np.max(np.abs(w - (nu * traj.s + mu)))) if len(w) else 0.0
    return float(nu), float(mu), dev


def fiber_linear_system(conn: AffineConnection, base: GeodesicTrajectory, params=None,
                        fiber: Sequence[str] | None = None) -> FiberLinearSystem:
    """A(s), B(s) with Ψ̈ + AΨ̇ + BΨ = 0, read off the extension Christoffel symbols."""
    metric = riemann_extension(conn, fiber)
    n = conn.dim
    gamma = christoffel_symbols(metric)
    args = tuple(metric.coords) + tuple(s for s in metric.symbols if s not in metric.coords)
    pv = _param_values(metric.symbols, metric.coords, params)
    fib = metric.fiber_symbols
    # Γ^{n+k}_{i,n+l} (Ψ-free) and ∂Γ^{n+k}_{ij}/∂Ψ_l
    a_terms = []
    b_terms = []
    for k in range(n):
        for l in range(n):
            for i in range(n):
                e = gamma[n + k, i, n + l]
                if not e.is_zero():
                    a_terms.append((k, l, i, e.compile(args)))
                for j in range(i, n):
                    d = gamma[n + k, i, j].diff(fib[l])
                    if not d.is_zero():
                        b_terms.append((k, l, i, j, d.compile(args)))
    m = len(base.s)
    A = np.zeros((m, n, n))
    B = np.zeros((m, n, n))
    zeros = [0.0] * n
    for idx in range(m):
        pt = list(base.x[idx]) + zeros + pv
        v = base.xdot[idx]
        for k, l, i, f in a_terms:
            A[idx, k, l] += 2 * f(*pt) * v[i]
        for k, l, i, j, f in b_terms:
            w = 1.0 if i == j else 2.0
            B[idx, k, l] += w * f(*pt) * v[i] * v[j]
    return FiberLinearSystem(base.s.copy(), A, B)


def embedding_residual(vf: VectorField, conn: AffineConnection, init: tuple[Sequence[float], Sequence[float]],
                       s_span: tuple[float, float], tol: float = 1e-10, params=None,
                       mode: str = "affine", n_samples: int = 201) -> dict[str, float]:
    """How well first-order trajectories of ``vf`` solve the geodesic equations of ``conn``.

    The first-order system is integrated from ``init[0]``. Along it the
    pointwise residual r = ẍ + Γ(ẋ, ẋ) is formed with ẋ = F and ẍ = DF·F;
    ``relative`` divides it by the larger of |ẍ|, |Γ(ẋ, ẋ)| (floored at 1).
    ``mode="projective"`` keeps only the part of r orthogonal to ẋ
    (reparametrized geodesics). In affine mode a geodesic is also launched
    from ``init`` and compared with the first-order curve, which exposes
    initial velocities that violate ẋ = F.
    """
    variables = vf.variables
    pv_names = [s for s in vf.symbols if s not in variables]
    pv = [float((params or {})[s]) for s in pv_names]
    args = vf.symbols
    F = [c.compile(args) for c in vf.components]
    J = [[c.diff(v).compile(args) for v in variables] for c in vf.components]
    form = _QuadraticForm(conn.items(), conn.dim, conn.symbols)
    conn_pv = _param_values(conn.symbols, conn.variables, params)

    def field_(s, x):
        pt = list(x) + pv
        return np.array([f(*pt) for f in F])

    s_eval = np.linspace(float(s_span[0]), float(s_span[1]), n_samples)
    sol = solve_ivp(field_, s_span, np.asarray(init[0], float), method="RK45", rtol=tol,
                    atol=tol * 1e-2, t_eval=s_eval)
    if sol.status != 0:
        raise IntegrationError(sol.message)
    pointwise = relative = 0.0
    for idx, s in enumerate(sol.t):
        x = sol.y[:, idx]
        pt = list(x) + pv
        v = np.array([f(*pt) for f in F])
        a = np.array([[f(*pt) for f in row] for row in J]) @ v
        gvv = form(list(x) + conn_pv, v, s)
        r = a + gvv
        if mode == "projective":
            r = r - (r @ v) / (v @ v) * v
        elif mode != "affine":
            raise ValueError("mode must be 'affine' or 'projective'")
        err = float(np.max(np.abs(r)))
        pointwise = max(pointwise, err)
        # relative to the size of the two cancelling terms
        relative = max(relative, err / max(float(np.max(np.abs(a))), float(np.max(np.abs(gvv))), 1.0))
    out = {"pointwise": pointwise, "relative": relative}
    if mode == "affine":
        geo = integrate_base(conn, init, s_span, tol, params, s_eval=sol.t)
        out["state_mismatch"] = float(max(np.max(np.abs(geo.x - sol.y.T)),
                                          np.max(np.abs(geo.xdot - np.array([field_(0, x) for x in sol.y.T])))))
        out["max"] = max(pointwise, out["state_mismatch"])
    else:
        out["max"] = pointwise
    return out


def decouple_fiber(conn: AffineConnection, traj: GeodesicTrajectory, nu: float, mu: float,
                   params=None, eps: float = 1e-12) -> dict[str, np.ndarray]:
    """Scalar fiber equations for a planar base using 2(zẋ + tẏ) = νs + μ.

    Returns samples of (M, N, Fz) and (U, V, Ft) with
    z'' + M z' + N z + Fz = 0 and t'' + U t' + V t + Ft = 0.
    """
    if conn.dim != 2:
        raise ValueError("decoupling is defined for planar connections")
    lin = fiber_linear_system(conn, traj, params)
    pv = _param_values(conn.symbols, conn.variables, params)
    form = _QuadraticForm(conn.items(), 2, conn.symbols)
    s = traj.s
    xd, yd = traj.xdot[:, 0], traj.xdot[:, 1]
    bad = np.where((np.abs(xd) < eps) | (np.abs(yd) < eps))[0]
    if len(bad):
        raise SingularityError(float(s[bad[0]]), "a base velocity component vanishes")
    acc = np.array([-form(list(traj.x[i]) + pv, traj.xdot[i], s[i]) for i in range(len(s))])
    xdd, ydd = acc[:, 0], acc[:, 1]
    A, B = lin.A, lin.B
    w = (nu * s + mu) / 2
    # t = c0 + c1 z,  t' = d0 + d1 z + d2 z'
    c0, c1 = w / yd, -xd / yd
    d2 = -xd / yd
    d1 = -xdd / yd + xd * ydd / yd ** 2
    d0 = nu / (2 * yd) - w * ydd / yd ** 2
    M = A[:, 0, 0] + A[:, 0, 1] * d2
    N = B[:, 0, 0] + A[:, 0, 1] * d1 + B[:, 0, 1] * c1
    Fz = A[:, 0, 1] * d0 + B[:, 0, 1] * c0
    # z = e0 + e1 t,  z' = f0 + f1 t + f2 t'
    e0, e1 = w / xd, -yd / xd
    f2 = -yd / xd
    f1 = -ydd / xd + yd * xdd / xd ** 2
    f0 = nu / (2 * xd) - w * xdd / xd ** 2
    U = A[:, 1, 1] + A[:, 1, 0] * f2
    V = B[:, 1, 1] + A[:, 1, 0] * f1 + B[:, 1, 0] * e1
    Ft = A[:, 1, 0] * f0 + B[:, 1, 0] * e0
    return {"s": s, "M": M, "N": N, "Fz": Fz, "U": U, "V": V, "Ft": Ft}
