import numpy as np

from riemext.connection import AffineConnection, VectorField, connection_direct
from riemext.extension import curvature, riemann_extension
from riemext.oracle import compare_curvature, fd_christoffel, fd_riemann, metric_function

XY = ("x", "y")


def test_flat_metric_has_zero_fd_curvature():
    m = riemann_extension(AffineConnection(XY, XY, {}))
    g = metric_function(m)
    X = [0.3, -0.2, 1.1, 0.5]
    assert np.max(np.abs(fd_christoffel(g, X))) < 1e-12
    assert np.max(np.abs(fd_riemann(g, X))) < 1e-9


def test_fd_christoffel_matches_symbolic():
    m = riemann_extension(connection_direct(VectorField(["-y", "x"], XY)))
    from riemext.extension import christoffel_symbols
    gam = christoffel_symbols(m)
    X = [1.1, 0.7, 0.3, -0.4]
    G = fd_christoffel(metric_function(m), X)
    pt = dict(zip(m.coords, X))
    for (c, a, b), e in gam.items():
        assert abs(G[c, a, b] - e.evaluate(pt)) < 1e-9


def test_compare_curvature_circle():
    m = riemann_extension(connection_direct(VectorField(["-y", "x"], XY)))
    errs = compare_curvature(curvature(m), m, [[1.1, 0.7, 0.3, -0.4], [0.8, 1.3, -0.2, 0.6]])
    assert max(errs) < 1e-5


def test_oracle_detects_a_wrong_tensor():
    m = riemann_extension(connection_direct(VectorField(["-y", "x"], XY)))
    b = curvature(m)
    key = next(iter(b.riemann))
    b.riemann[key] = b.riemann[key] * 2
    errs = compare_curvature(b, m, [[1.1, 0.7, 0.3, -0.4]])
    assert errs[0] > 1e-2
