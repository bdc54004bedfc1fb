"""Affine connections built from first-order polynomial systems.

Index convention: Python APIs are 0-based (``conn[k, i, j]`` is
Γ^{k+1}_{i+1,j+1}); the JSON form uses 1-based ``"k,i,j"`` keys.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .linalg import solve_linear
from .symexpr import MultiPoly, RationalExpr, SymExprError, merge_symbols, parse

__all__ = [
    "VectorField",
    "AffineConnection",
    "Covector",
    "ConnectionError_",
    "UnderdeterminedError",
    "DegenerateInputError",
    "connection_direct",
    "connection_log",
    "solve_connection_from_integrals",
    "killing_residual",
    "connection_pl",
    "pl_denominator",
    "connection_spatial",
    "connection_spatial_alt",
    "connection_lorenz_normalized",
    "lorenz_normalization",
    "projectivize",
]


class ConnectionError_(SymExprError):
    """Base class for connection construction failures."""


class UnderdeterminedError(ConnectionError_):
    def __init__(self, rank: int, n_unknowns: int, free: list[str]):
        self.rank = rank
        self.n_unknowns = n_unknowns
        self.free = free
        super().__init__(f"connection underdetermined: rank {rank} of {n_unknowns}; free unknowns {free}")


class DegenerateInputError(ConnectionError_):
    pass


class VectorField:
    """Polynomial/rational vector field (P, Q[, R]) over ordered coordinates."""

    def __init__(self, components: Sequence[RationalExpr | str], variables: Sequence[str],
                 parameters: Sequence[str] = (), name: str = ""):
        self.variables = tuple(variables)
        self.parameters = tuple(parameters)
        self.symbols = self.variables + self.parameters
        if len(components) != len(self.variables):
            raise ValueError(f"{len(components)} components for {len(self.variables)} variables")
        comps = []
        for c in components:
            e = parse(c, self.variables, self.parameters) if isinstance(c, str) else c
            comps.append(e.with_symbols(self.symbols))
        self.components = tuple(comps)
        self.name = name

    @property
    def dim(self) -> int:
        return len(self.variables)

    def __getitem__(self, i: int) -> RationalExpr:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def var(self, name: str) -> RationalExpr:
        return RationalExpr.symbol(name, self.symbols)

    def const(self, value) -> RationalExpr:
        return RationalExpr.constant(value, self.symbols)

    def expr(self, text: str) -> RationalExpr:
        return parse(text, self.variables, self.parameters)

    def bind(self, values: Mapping[str, object]) -> "VectorField":
        """Substitute numeric (exact) parameter values; bound names are dropped."""
        comps = [c.subs(values) for c in self.components]
        params = tuple(p for p in self.parameters if p not in values)
        return VectorField([c.with_symbols(self.variables + params) for c in comps],
                           self.variables, params, self.name)

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.components)

    def __repr__(self):
        body = ", ".join(str(c) for c in self.components)
        return f"VectorField({self.name or '?'}: [{body}] over {self.variables}; params {self.parameters})"


@dataclass(frozen=True)
class Covector:
    """Components a_i of a 1-form ``a_i dx^i``."""

    components: tuple[RationalExpr, ...]

    def __init__(self, components: Iterable[RationalExpr]):
        object.__setattr__(self, "components", tuple(components))

    @property
    def dim(self) -> int:
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def padded(self, n: int) -> "Covector":
        if n < self.dim:
            raise ValueError("cannot pad to a smaller dimension")
        zero = self.components[0] * 0
        return Covector(self.components + (zero,) * (n - self.dim))

    def __str__(self):
        return "[" + ", ".join(str(c) for c in self.components) + "]"


class AffineConnection:
    """Symmetric connection coefficients Γ^k_{ij} with rational entries."""

    def __init__(self, variables: Sequence[str], symbols: Sequence[str],
                 entries: Mapping[tuple[int, int, int], RationalExpr] | None = None, name: str = ""):
        self.variables = tuple(variables)
        self.symbols = tuple(symbols)
        self.dim = len(self.variables)
        self.name = name
        zero = RationalExpr.constant(0, self.symbols)
        self._g: dict[tuple[int, int, int], RationalExpr] = {}
        n = self.dim
        for k in range(n):
            for i in range(n):
                for j in range(i, n):
                    self._g[k, i, j] = zero
        for (k, i, j), v in (entries or {}).items():
            if i > j:
                i, j = j, i
            if (k, i, j) not in self._g:
                raise IndexError(f"index {(k, i, j)} out of range for dim {n}")
            self._g[k, i, j] = v.with_symbols(self.symbols)

    def __getitem__(self, idx) -> RationalExpr:
        k, i, j = idx
        if i > j:
            i, j = j, i
        return self._g[k, i, j]

    def items(self):
        """Stored entries (i <= j)."""
        return self._g.items()

    def nonzero(self) -> dict[tuple[int, int, int], RationalExpr]:
        return {key: v for key, v in self._g.items() if not v.is_zero()}

    def is_flat_table(self) -> bool:
        return all(v.is_zero() for v in self._g.values())

    def to_json(self) -> dict[str, str]:
        return {f"{k + 1},{i + 1},{j + 1}": str(v) for (k, i, j), v in self._g.items() if not v.is_zero()}

    def dumps(self) -> str:
        return json.dumps({"name": self.name, "variables": list(self.variables),
                           "symbols": list(self.symbols), "gamma": self.to_json()}, indent=2)

    @classmethod
    def from_json(cls, data: Mapping) -> "AffineConnection":
        variables = tuple(data["variables"])
        symbols = tuple(data["symbols"])
        params = tuple(s for s in symbols if s not in variables)
        entries = {}
        for key, text in data["gamma"].items():
            k, i, j = (int(t) - 1 for t in key.split(","))
            entries[k, i, j] = parse(text, variables, params)
        return cls(variables, symbols, entries, data.get("name", ""))

    def equals(self, other: "AffineConnection") -> bool:
        if self.dim != other.dim:
            return False
        return all((self._g[key] - other[key]).is_zero() for key in self._g)

    def difference(self, other: "AffineConnection") -> dict[tuple[int, int, int], RationalExpr]:
        out = {}
        for key, v in self._g.items():
            d = v - other[key]
            if not d.is_zero():
                out[key] = d
        return out

    def geodesic_acceleration(self):
        """Compiled map (x, v) -> ẍ = -Γ^k_ij v^i v^j, with the denominators for the pole guard."""
        n = self.dim
        args = self.variables
        entries = [(k, i, j, v.compile_parts(args)) for (k, i, j), v in self._g.items() if not v.is_zero()]

        def accel(x, v):
            out = [0.0] * n
            min_den = float("inf")
            for k, i, j, (nf, df) in entries:
                d = df(*x)
                ad = abs(d)
                if ad < min_den:
                    min_den = ad
                c = nf(*x) / d if d != 0 else float("inf")
                w = 1.0 if i == j else 2.0
                out[k] -= w * c * v[i] * v[j]
            return out, min_den

        return accel

    def __repr__(self):
        return f"AffineConnection({self.name or '?'}, dim={self.dim}, nonzero={len(self.nonzero())})"


def _require_nonzero(vf: VectorField, which: Iterable[int]):
    for i in which:
        if vf[i].is_zero():
            raise DegenerateInputError(f"component {i + 1} of {vf.name or 'vector field'} is identically zero")


def connection_direct(vf: VectorField) -> AffineConnection:
    """Connection whose geodesics are the differentiated planar system."""
    if vf.dim != 2:
        raise ValueError("connection_direct needs a planar field")
    _require_nonzero(vf, (0, 1))
    x, y = vf.variables
    P, Q = vf.components
    half = RationalExpr.constant(1, vf.symbols) / 2
    entries = {
        (0, 0, 0): -P.diff(x) / P,
        (0, 0, 1): -half * P.diff(y) / P,
        (1, 0, 1): -half * Q.diff(x) / Q,
        (1, 1, 1): -Q.diff(y) / Q,
    }
    return AffineConnection(vf.variables, vf.symbols, entries, name=f"direct({vf.name})")


def log_derivatives(vf: VectorField) -> tuple[RationalExpr, RationalExpr]:
    """K_x and K_y for K = ln(Q/P); K itself is never represented."""
    _require_nonzero(vf, (0, 1))
    x, y = vf.variables
    P, Q = vf.components
    return Q.diff(x) / Q - P.diff(x) / P, Q.diff(y) / Q - P.diff(y) / P


def connection_log(vf: VectorField) -> AffineConnection:
    """Diagonal connection with Π^1_11 = K_x, Π^2_22 = -K_y."""
    if vf.dim != 2:
        raise ValueError("connection_log needs a planar field")
    kx, ky = log_derivatives(vf)
    return AffineConnection(vf.variables, vf.symbols, {(0, 0, 0): kx, (1, 1, 1): -ky},
                            name=f"log({vf.name})")


def killing_residual(conn: AffineConnection, a: Covector) -> dict[tuple[int, int], RationalExpr]:
    """½(∂_i a_j + ∂_j a_i) - a_k Γ^k_ij for i <= j."""
    n = conn.dim
    xs = conn.variables
    out = {}
    for i in range(n):
        for j in range(i, n):
            lhs = (a[j].diff(xs[i]) + a[i].diff(xs[j])) / 2
            rhs = sum((a[k] * conn[k, i, j] for k in range(n)), RationalExpr.constant(0, conn.symbols))
            out[i, j] = (lhs - rhs).with_symbols(conn.symbols)
    return out


def _label(k, i, j):
    return f"G^{k + 1}_{i + 1}{j + 1}"


def solve_connection_from_integrals(integrals: Sequence[Covector], dim: int, variables: Sequence[str],
                                    symbols: Sequence[str] | None = None,
                                    constraints: Sequence[tuple[Mapping[tuple[int, int, int], object], object]] = (),
                                    name: str = "") -> AffineConnection:
    """Unique symmetric connection admitting every covector as a linear integral.

    Each covector a contributes ½(∂_i a_j + ∂_j a_i) = a_k Γ^k_ij for i <= j.
    ``constraints`` adds linear equations ``sum c * Γ^k_ij = rhs`` (e.g.
    gauge normalizations or pinned entries). Underdetermined systems raise
    :class:`UnderdeterminedError` with rank and free unknowns; inconsistent
    ones raise :class:`~riemext.linalg.InconsistentSystemError`.
    """
    variables = tuple(variables)
    if symbols is None:
        symbols = variables
        for a in integrals:
            for c in a.components:
                symbols = merge_symbols(symbols, c.symbols)
    symbols = tuple(symbols)
    n = dim
    keys = [(k, i, j) for k in range(n) for i in range(n) for j in range(i, n)]
    index = {key: u for u, key in enumerate(keys)}
    zero = RationalExpr.constant(0, symbols)
    rows, rhs = [], []
    for a in integrals:
        if a.dim < n:
            raise ValueError("covector shorter than the connection dimension")
        comps = [c.with_symbols(symbols) for c in a.components[:n]]
        for i in range(n):
            for j in range(i, n):
                row = {index[k, i, j]: comps[k] for k in range(n) if not comps[k].is_zero()}
                rows.append(row)
                rhs.append((comps[j].diff(variables[i]) + comps[i].diff(variables[j])) / 2)
    for coeffs, value in constraints:
        row = {}
        for (k, i, j), c in coeffs.items():
            if i > j:
                i, j = j, i
            c = c if isinstance(c, RationalExpr) else RationalExpr.constant(c, symbols)
            row[index[k, i, j]] = row.get(index[k, i, j], zero) + c.with_symbols(symbols)
        rows.append(row)
        rhs.append(value.with_symbols(symbols) if isinstance(value, RationalExpr)
                   else RationalExpr.constant(value, symbols))
    sol = solve_linear(rows, rhs, len(keys), symbols)
    if sol.free:
        raise UnderdeterminedError(sol.rank, len(keys), [_label(*keys[u]) for u in sol.free])
    entries = {keys[u]: v for u, v in sol.values.items()}
    return AffineConnection(variables, symbols, entries, name=name)


def pl_denominator(vf: VectorField) -> RationalExpr:
    """y²P − yP + Qx² − Qx, the common denominator of the PL connection."""
    x, y = (vf.var(v) for v in vf.variables)
    P, Q = vf.components
    return y * y * P - y * P + Q * x * x - Q * x


def pl_integrals(vf: VectorField) -> list[Covector]:
    x, y = (vf.var(v) for v in vf.variables)
    P, Q = vf.components
    return [Covector([Q, -P]), Covector([y * (y - 1), x * (x - 1)])]


def connection_pl(vf: VectorField) -> AffineConnection:
    """Connection carrying both dy/dx = Q/P and dy/dx = −y(y−1)/(x(x−1)) as integrals."""
    if vf.dim != 2:
        raise ValueError("connection_pl needs a planar field")
    if pl_denominator(vf).is_zero():
        raise DegenerateInputError("y^2*P - y*P + Q*x^2 - Q*x vanishes identically")
    return solve_connection_from_integrals(pl_integrals(vf), 2, vf.variables, vf.symbols,
                                           name=f"pl({vf.name})")


def spatial_integrals(vf: VectorField) -> list[Covector]:
    x, y, z = (vf.var(v) for v in vf.variables)
    zero = vf.const(0)
    return [Covector(vf.components),
            Covector([y * (y - 1), x * (x - 1), zero]),
            Covector([z * (z - 1), zero, x * (x - 1)])]


def connection_spatial(vf: VectorField) -> AffineConnection:
    """Orthogonal-trajectory form P dx + Q dy + R dz plus the two auxiliary PL-type forms."""
    if vf.dim != 3:
        raise ValueError("connection_spatial needs a spatial field")
    return solve_connection_from_integrals(spatial_integrals(vf), 3, vf.variables, vf.symbols,
                                           name=f"spatial({vf.name})")


def spatial_alt_integrals(vf: VectorField) -> list[Covector]:
    x, y, z = (vf.var(v) for v in vf.variables)
    P, Q, R = vf.components
    zero = vf.const(0)
    return [Covector([Q, -P, zero]), Covector([R, zero, -P]), Covector([x, y, z])]


def connection_spatial_alt(vf: VectorField) -> AffineConnection:
    """Integrals Q dx − P dy, R dx − P dz and the sphere form x dx + y dy + z dz."""
    if vf.dim != 3:
        raise ValueError("connection_spatial_alt needs a spatial field")
    _require_nonzero(vf, (0,))
    return solve_connection_from_integrals(spatial_alt_integrals(vf), 3, vf.variables, vf.symbols,
                                           name=f"spatial-alt({vf.name})")


def lorenz_normalization() -> list[tuple[dict, int]]:
    """Gauge: Γ^1_11 = Γ^2_22 = Γ^3_33 = 0, Γ^1_12 = −Γ^3_23, Γ^2_12 = −Γ^3_13, Γ^1_13 = −Γ^2_23."""
    return [
        ({(0, 0, 0): 1}, 0),
        ({(1, 1, 1): 1}, 0),
        ({(2, 2, 2): 1}, 0),
        ({(0, 0, 1): 1, (2, 1, 2): 1}, 0),
        ({(1, 0, 1): 1, (2, 0, 2): 1}, 0),
        ({(0, 0, 2): 1, (1, 1, 2): 1}, 0),
    ]


def trace_conditions(conn: AffineConnection) -> list[RationalExpr]:
    """Γ^1_{i1} + Γ^2_{i2} + Γ^3_{i3} for i = 1..3."""
    n = conn.dim
    zero = RationalExpr.constant(0, conn.symbols)
    return [sum((conn[k, i, k] for k in range(n)), zero) for i in range(n)]


def connection_lorenz_normalized(vf: VectorField) -> AffineConnection:
    """Integrals Q dx − P dy and R dx − P dz under the six-condition coordinate gauge."""
    if vf.dim != 3:
        raise ValueError("connection_lorenz_normalized needs a spatial field")
    _require_nonzero(vf, (0, 1, 2))
    x, y, z = (vf.var(v) for v in vf.variables)
    P, Q, R = vf.components
    zero = vf.const(0)
    integrals = [Covector([Q, -P, zero]), Covector([R, zero, -P])]
    return solve_connection_from_integrals(integrals, 3, vf.variables, vf.symbols,
                                           constraints=lorenz_normalization(),
                                           name=f"lorenz-normalized({vf.name})")


def projectivize(vf: VectorField, new_var: str = "z") -> Covector:
    """Pfaff form (−zQ̃, zP̃, xQ̃ − yP̃) of the planar field on the projective plane.

    P̃, Q̃ are p, q homogenized with ``new_var`` to the common degree
    max(deg p, deg q, 1).
    """
    if vf.dim != 2 or not vf.is_polynomial():
        raise ValueError("projectivize needs a planar polynomial field")
    if new_var in vf.symbols:
        raise ValueError(f"{new_var!r} already used")
    variables = vf.variables + (new_var,)
    symbols = variables + vf.parameters
    polys = [c.with_symbols(symbols) for c in vf.components]
    nx = len(vf.variables)

    def total_degree_in_vars(e: RationalExpr) -> int:
        deg = 0
        for exps, _ in e.num.terms().items():
            deg = max(deg, sum(exps[:nx]))
        return deg

    d = max(1, *(total_degree_in_vars(p) for p in polys))
    homog = []
    for p in polys:
        terms = p.num.terms()
        scale = p.den  # constant in the variables only when the field is polynomial
        new = {}
        zi = symbols.index(new_var)
        for exps, c in terms.items():
            e = list(exps)
            e[zi] = d - sum(exps[:nx])
            new[tuple(e)] = c
        homog.append(RationalExpr.from_polys(MultiPoly(new, symbols), scale))
    Pt, Qt = homog
    x = RationalExpr.symbol(vf.variables[0], symbols)
    y = RationalExpr.symbol(vf.variables[1], symbols)
    z = RationalExpr.symbol(new_var, symbols)
    return Covector([-z * Qt, z * Pt, x * Qt - y * Pt])
