"""Finite-difference curvature, independent of the symbolic Christoffel/Riemann code.

Only numeric metric values g(X) are used: Christoffel symbols come from a
fourth-order central difference of g and a numeric inverse, the Riemann
tensor from a second fourth-order difference of those.
"""
from __future__ import annotations

from typing import Callable, Mapping, Sequence

import numpy as np

from .extension import CurvatureBundle, ExtendedMetric

__all__ = ["metric_function", "fd_christoffel", "fd_riemann", "compare_curvature"]

_W = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0
_OFF = (-2, -1, 1, 2)


def metric_function(metric: ExtendedMetric, params: Mapping[str, float] | None = None) -> Callable:
    params = dict(params or {})
    rest = [s for s in metric.symbols if s not in metric.coords]
    pv = [float(params[s]) for s in rest]
    fns = [[e.compile(tuple(metric.coords) + tuple(rest)) for e in row] for row in metric.g]

    def g(X):
        a = list(X) + pv
        return np.array([[f(*a) for f in row] for row in fns])
    return g


def _d(fun: Callable, X: np.ndarray, h: float) -> np.ndarray:
    """Stack of ∂_c fun(X) along a new last axis."""
    out = []
    for c in range(len(X)):
        acc = 0.0
        for w, o in zip(_W, _OFF):
            Y = X.copy()
            Y[c] += o * h
            acc = acc + w * fun(Y)
        out.append(acc / h)
    return np.stack(out, axis=-1)


def fd_christoffel(g: Callable, X: Sequence[float], h: float = 1e-3) -> np.ndarray:
    """Γ[c, a, b] = ½ g^{cd}(∂_a g_db + ∂_b g_da − ∂_d g_ab)."""
    X = np.asarray(X, dtype=float)
    dg = _d(g, X, h)  # dg[a, b, c] = ∂_c g_ab
    ginv = np.linalg.inv(g(X))
    low = 0.5 * (np.einsum("dba->dab", dg) + np.einsum("dab->dab", dg) - np.einsum("abd->dab", dg))
    return np.einsum("cd,dab->cab", ginv, low)


def fd_riemann(g: Callable, X: Sequence[float], h: float = 1e-3, h2: float = 1e-3) -> np.ndarray:
    """R[a, b, c, d] = ∂_c Γ^a_{db} − ∂_d Γ^a_{cb} + Γ^a_{ce}Γ^e_{db} − Γ^a_{de}Γ^e_{cb}."""
    X = np.asarray(X, dtype=float)
    G = fd_christoffel(g, X, h)
    dG = _d(lambda Y: fd_christoffel(g, Y, h), X, h2)  # dG[a, d, b, c] = ∂_c Γ^a_{db}
    R = (np.einsum("adbc->abcd", dG) - np.einsum("acbd->abcd", dG)
         + np.einsum("ace,edb->abcd", G, G) - np.einsum("ade,ecb->abcd", G, G))
    return R


def _symbolic_riemann(bundle: CurvatureBundle, metric: ExtendedMetric, X, params) -> np.ndarray:
    N = metric.dim
    point = dict(zip(metric.coords, map(float, X)))
    point.update(params or {})
    R = np.zeros((N, N, N, N))
    for (a, b, c, d), e in bundle.riemann.items():
        v = e.evaluate(point)
        R[a, b, c, d] = v
        R[a, b, d, c] = -v
    return R


def compare_curvature(bundle: CurvatureBundle, metric: ExtendedMetric, points: Sequence[Sequence[float]],
                      params: Mapping[str, float] | None = None, h: float = 1e-3) -> list[float]:
    """Per point: max |R_sym − R_fd| / max |R_sym| (absolute when R_sym vanishes)."""
    g = metric_function(metric, params)
    out = []
    for X in points:
        Rs = _symbolic_riemann(bundle, metric, X, params)
        Rf = fd_riemann(g, X, h, h)
        scale = np.max(np.abs(Rs))
        err = np.max(np.abs(Rs - Rf))
        out.append(float(err / scale) if scale > 0 else float(err))
    return out
