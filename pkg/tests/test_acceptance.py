"""The thirteen acceptance criteria, one test each.

Every test records a PASS/FAIL line; ``conftest.py`` prints them at the end of
the pytest run, and ``python3 tests/test_acceptance.py`` prints them directly.
"""
import functools
import random
import sys
import time

import numpy as np
import pytest

from riemext import closed_forms as cf
from riemext.chern_simons import lorenz_cs_check
from riemext.conformance import run_conformance
from riemext.connection import (VectorField, connection_direct, connection_log, connection_lorenz_normalized,
                                connection_pl, connection_spatial, connection_spatial_alt)
from riemext.extension import (curvature, numeric_invariants, riemann_extension, sample_points,
                               scalar_invariants, verify_ricci_closed_forms)
from riemext.geodesic import embedding_residual, first_integral_monitor, integrate_extended
from riemext.oracle import compare_curvature
from riemext.petrovsky_landis import cubic_ode, invariant_curve_check, verify_particular_integral
from riemext.symexpr import parse
from riemext.sysfile import load_fixture

RESULTS: dict[int, str] = {}
PLANAR = ("circle", "example1", "example2", "example3")


def criterion(num, title, budget=None):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kw):
            t0 = time.perf_counter()
            try:
                fn(*args, **kw)
                dt = time.perf_counter() - t0
                if budget is not None:
                    assert dt < budget, f"took {dt:.1f} s, budget {budget} s"
            except BaseException as exc:
                RESULTS[num] = f"criterion {num:2d} FAIL  {title} ({time.perf_counter() - t0:.1f} s): " \
                               f"{str(exc).splitlines()[0] if str(exc) else type(exc).__name__}"
                raise
            RESULTS[num] = f"criterion {num:2d} PASS  {title} ({dt:.1f} s)"
        return run
    return wrap


@pytest.fixture(scope="module")
def lorenz_report():
    return run_conformance("lorenz")


@pytest.fixture(scope="module")
def quad_report():
    return run_conformance("quad_generic")


@criterion(1, "circle connection reproduces the second-order system", budget=1.0)
def test_criterion_01_circle_connection():
    vf = load_fixture("circle").vector_field()
    conn = connection_direct(vf)
    x, y = vf.var("x"), vf.var("y")
    want = {(0, 0, 1): -1 / (2 * y), (0, 1, 0): -1 / (2 * y), (1, 0, 1): -1 / (2 * x), (1, 1, 0): -1 / (2 * x)}
    for k in range(2):
        for i in range(2):
            for j in range(2):
                assert (conn[k, i, j] - want.get((k, i, j), vf.const(0))).is_zero(), (k, i, j)


@criterion(2, "extension Ricci matches the closed forms", budget=60.0)
def test_criterion_02_ricci_closed_forms():
    for name in PLANAR:
        for row in verify_ricci_closed_forms(load_fixture(name).vector_field()):
            if row["metric"] == "extension":
                assert row["match"], (name, row["component"])


@criterion(3, "scalar invariants vanish", budget=300.0)
def test_criterion_03_invariants():
    for name in PLANAR:
        vf = load_fixture(name).vector_field()
        for conn in (connection_direct(vf), connection_log(vf)):
            m = riemann_extension(conn)
            p, q = scalar_invariants(curvature(m), m)
            assert p.is_zero() and q.is_zero(), name
    vf = load_fixture("lorenz").vector_field(bind=True)
    m = riemann_extension(connection_lorenz_normalized(vf))
    b = curvature(m)
    exprs = [e for row in m.g for e in row] + [e for row in m.inverse() for e in row] + list(b.riemann.values())
    pts = sample_points(exprs, m.symbols, 100, random.Random(3), min_den=1e-3)
    p, q = numeric_invariants(b, m, pts)
    assert p < 1e-8 and q < 1e-8, (p, q)


@criterion(4, "log-built metrics are Ricci-flat", budget=30.0)
def test_criterion_04_log_ricci_flat():
    for name in PLANAR + ("reference",):
        spec = load_fixture(name)
        vf = spec.quadratic().vector_field() if name == "reference" else spec.vector_field()
        assert curvature(riemann_extension(connection_log(vf))).ricci_is_zero(), name


@criterion(5, "first integral is linear along circle geodesics")
def test_criterion_05_first_integral():
    conn = connection_direct(load_fixture("circle").vector_field())
    rng = np.random.default_rng(5)
    s_eval = np.linspace(0, 10, 401)
    worst = 0.0
    for _ in range(10):
        x0 = rng.uniform(0.5, 2, 2)
        v0 = rng.uniform(0.05, 0.2, 2)
        psi0 = rng.uniform(-1, 1, 2)
        dpsi0 = rng.uniform(-0.2, 0.2, 2)
        tr = integrate_extended(conn, x0, v0, psi0, dpsi0, (0, 10), tol=1e-10, s_eval=s_eval)
        worst = max(worst, first_integral_monitor(tr)[2])
    assert worst < 1e-6, worst
    tr.psi[:, 0] += 0.01 * (tr.s - 5) ** 2
    assert first_integral_monitor(tr)[2] > 1e-2


@criterion(6, "first-order trajectories are geodesics")
def test_criterion_06_embedding():
    cases = [("circle", (0.6, 0.8), (0, 2)), ("example1", (0.3, 0.2), (0, 0.05)),
             ("example2", (0.2, 0.3), (0, 0.05)), ("example3", (0.3, 0.4), (0, 0.05)),
             ("reference", (0.3, 0.6), (0, 0.5))]
    for name, x0, span in cases:
        spec = load_fixture(name)
        vf = spec.quadratic().vector_field() if name == "reference" else spec.vector_field(bind=True)
        r = embedding_residual(vf, connection_direct(vf), (x0, (0.0, 0.0)), span)
        assert r["pointwise"] < 1e-8, (name, r)
    vf = load_fixture("lorenz").vector_field(bind=True)
    conn = connection_spatial_alt(vf)
    rng = np.random.default_rng(6)
    for _ in range(5):
        x0 = rng.uniform(-10, 10, 3) + np.array([0, 0, 25])
        r = embedding_residual(vf, conn, (x0, (0, 0, 0)), (0, 0.2), mode="projective")
        assert r["relative"] < 1e-8, r


def _generic2():
    mons = ("1", "x", "y", "x^2", "x*y", "y^2")
    names = [f"{f}{m}" for f in ("p", "q") for m in ("0", "1", "2", "11", "12", "22")]
    comps = [" + ".join(f"{f}{m}*{mon}" for m, mon in zip(("0", "1", "2", "11", "12", "22"), mons)) for f in "pq"]
    return VectorField(comps, ("x", "y"), names, name="generic2")


@criterion(7, "solver reproduces the listed first-row entries for generic P, Q")
def test_criterion_07_pl_solver():
    vf = _generic2()
    conn = connection_pl(vf)
    for key, want in cf.pl_pi1_closed_forms(vf).items():
        assert (conn[key] - want).is_zero(), key


@criterion(8, "family substitution and conditions on C")
def test_criterion_08_pl_conditions(quad_report):
    rel = [e for e in quad_report.entries
           if e.check.startswith(("family", "two-variable", "one-variable", "boundary", "residue", "cubic ODE"))]
    assert len(rel) > 20
    bad = [e.check for e in rel if e.status == "mismatch" and not e.documented]
    assert not bad, bad
    # every tolerated difference comes with the derivation shown
    for e in rel:
        if e.documented:
            assert e.computed and e.displayed


@criterion(9, "stated particular integrals and invariant curves")
def test_criterion_09_particular_integrals():
    curves = []
    failing = []
    for name in ("example1", "example2"):
        vf = load_fixture(name).vector_field()
        ode = cubic_ode(vf)
        for m, n in cf.EXAMPLE_INTEGRALS[name]:
            mm, nn = parse(m, ("x", "y"), ("a",)), parse(n, ("x", "y"), ("a",))
            if not verify_particular_integral(ode, mm, nn):
                failing.append(f"{name}: y' = ({m})/({n})")
        curves.append(invariant_curve_check(parse(cf.EXAMPLE_CURVES[name], ("x", "y"), ("a",)), vf)[0])
    assert all(curves)
    assert len(sum((cf.EXAMPLE_INTEGRALS[n] for n in ("example1", "example2")), [])) == 5
    assert not failing, f"{len(failing)} of 5 integrals hold only on their invariant curve: {failing}"


@criterion(10, "listed spatial entries for generic P, Q, R")
def test_criterion_10_spatial():
    mons = ("1", "x", "y", "z", "x^2", "x*y", "x*z", "y^2", "y*z", "z^2")
    comps, params = [], []
    for f in "pqr":
        names = [f"{f}{i}" for i in range(len(mons))]
        params += names
        comps.append(" + ".join(f"{c}*{m}" for c, m in zip(names, mons)))
    vf = VectorField(comps, ("x", "y", "z"), params, name="generic3")
    conn = connection_spatial(vf)
    listed = cf.spatial_gamma_closed_forms(vf)
    assert listed
    for key, want in listed.items():
        assert (conn[key] - want).is_zero(), key


@criterion(11, "normalized Lorenz connection, R_zz and second Killing equations")
def test_criterion_11_lorenz(lorenz_report):
    groups = ("normalized", "trace condition", "normalization condition", "Ricci R_zz")
    rel = [e for e in lorenz_report.entries if e.check.startswith(groups)]
    assert len(rel) > 5 and all(e.status == "match" for e in rel), [e.check for e in rel if e.status != "match"]
    killing = [e for e in lorenz_report.entries if e.check.startswith("second Killing") and e.gate]
    assert len(killing) == 2
    bad = [f"{e.check}: {e.detail}" for e in killing if e.status != "match"]
    assert not bad, bad


@criterion(12, "Chern-Simons x=y reduction and stationary points", budget=120.0)
def test_criterion_12_chern_simons():
    rep = lorenz_cs_check(n_draws=50, seed=12)
    assert len(rep["diagonal_samples"]) == 50
    assert rep["diagonal_max_rel"] < 1e-8, rep["diagonal_max_rel"]
    assert len(rep["stationary"]) == 10
    for st in rep["stationary"]:
        assert st["r"] > 1 and st["b"] > 0 and st["pipeline"] == 0


@criterion(13, "symbolic curvature agrees with the finite-difference oracle")
def test_criterion_13_oracle():
    rng = random.Random(13)
    for name in ("circle", "example1", "example2"):
        vf = load_fixture(name).vector_field(bind=True)
        m = riemann_extension(connection_direct(vf))
        b = curvature(m)
        exprs = [e for row in m.g for e in row] + list(b.riemann.values())
        pts = sample_points(exprs, m.coords, 20, rng, low=0.3, high=1.5, min_den=0.2)
        pts = [[p[c] for c in m.coords] for p in pts]
        errs = compare_curvature(b, m, pts)
        assert max(errs) < 1e-5, (name, max(errs))


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)
