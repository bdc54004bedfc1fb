import random

import pytest

from riemext.closed_forms import ricci_closed_forms
from riemext.connection import AffineConnection, Covector, VectorField, connection_direct, connection_log
from riemext.extension import (curvature, numeric_invariants, riemann_extension, sample_points, scalar_invariants,
                               second_killing_residual, verify_ricci_closed_forms)
from riemext.symexpr import RationalExpr, parse

XY = ("x", "y")
EXAMPLE1 = ("2 + 4*x - 4*a*x^2 + 12*x*y", "8 - 3*a - 14*a*x - 2*a*x*y - 8*y^2")


def flat(n=2):
    names = XY if n == 2 else ("x", "y", "w")
    return AffineConnection(names, names, {}, "flat")


def test_zero_connection_gives_flat_pairing():
    m = riemann_extension(flat())
    assert m.coords == ("x", "y", "z", "t")
    for a in range(4):
        for b in range(4):
            want = 1 if abs(a - b) == 2 else 0
            assert m.g[a][b].is_constant() and m.g[a][b].constant_value() == want


def test_inverse_is_exact():
    vf = VectorField(list(EXAMPLE1), XY, ("a",))
    m = riemann_extension(connection_direct(vf))
    g, gi = m.g, m.inverse()
    zero = RationalExpr.constant(0, m.symbols)
    for a in range(4):
        for c in range(4):
            acc = sum((g[a][b] * gi[b][c] for b in range(4)), zero)
            assert (acc - (1 if a == c else 0)).is_zero()


def test_circle_metric_cross_terms():
    m = riemann_extension(connection_direct(VectorField(["-y", "x"], XY)))
    assert m.g[0][0].is_zero() and m.g[1][1].is_zero()
    assert m.g[0][1] == parse("z/y + t/x", m.symbols)


def test_log_metric_is_diagonal_in_the_base():
    m = riemann_extension(connection_log(VectorField(["-y", "x"], XY)))
    assert m.g[0][1].is_zero()
    assert not m.g[0][0].is_zero() and not m.g[1][1].is_zero()


def test_flat_curvature_and_invariants_vanish():
    m = riemann_extension(flat())
    b = curvature(m)
    assert not b.riemann and b.ricci_is_zero()
    p, q = scalar_invariants(b, m)
    assert p.is_zero() and q.is_zero()


def test_circle_ricci():
    vf = VectorField(["-y", "x"], XY)
    b = curvature(riemann_extension(connection_direct(vf)))
    assert b.Ric(0, 0) == parse("-3/(2*x^2)", b.symbols)
    for key, want in ricci_closed_forms(vf).items():
        assert (b.Ric(*key) - want.with_symbols(b.symbols)).is_zero()


def test_constant_field_ricci_rows():
    rows = verify_ricci_closed_forms(VectorField(["1", "1"], XY), include_literal=False)
    assert rows and all(r["match"] and r["computed"] == "0" for r in rows)


@pytest.mark.parametrize("fields", [("-y", "x"), EXAMPLE1, ("x + y^2", "x*y - 1")])
def test_log_connection_is_ricci_flat(fields):
    vf = VectorField(list(fields), XY, ("a",))
    assert curvature(riemann_extension(connection_log(vf))).ricci_is_zero()


def test_example1_invariants_vanish_symbolically():
    vf = VectorField(list(EXAMPLE1), XY, ("a",))
    m = riemann_extension(connection_direct(vf))
    p, q = scalar_invariants(curvature(m), m)
    assert p.is_zero() and q.is_zero()


def test_numeric_invariants_agree_with_symbolic_zero():
    vf = VectorField(["x + y^2", "x*y - 1"], XY)
    m = riemann_extension(connection_direct(vf))
    b = curvature(m)
    exprs = [e for row in m.inverse() for e in row] + list(b.riemann.values())
    pts = sample_points(exprs, m.symbols, 20, random.Random(0))
    mp, mq = numeric_invariants(b, m, pts)
    assert mp < 1e-10 and mq < 1e-10


def test_second_killing_zero_covector():
    m = riemann_extension(connection_direct(VectorField(["-y", "x"], XY)))
    b = curvature(m)
    zero = RationalExpr.constant(0, m.symbols)
    res = second_killing_residual(Covector([zero, zero]), b, m)
    assert all(v.is_zero() for v in res.values())


def test_second_killing_flat_reduces_to_second_partials():
    m = riemann_extension(flat())
    b = curvature(m)
    a = [parse(s, m.symbols) for s in ("x^2*y", "y^3")]
    res = second_killing_residual(Covector(a), b, m)
    # with Γ = 0 and R = 0 the residual is ∂_k ½(∂_i a_j + ∂_j a_i)
    assert res[0, 0, 1] == parse("2*x", m.symbols)
    assert res[1, 1, 1] == parse("6*y", m.symbols)
    assert any(not v.is_zero() for v in res.values())
