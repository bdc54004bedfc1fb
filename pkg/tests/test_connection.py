import json

import pytest
from hypothesis import given, settings, strategies as st

from riemext import closed_forms as cf
from riemext.connection import (AffineConnection, Covector, DegenerateInputError, VectorField, connection_direct,
                                connection_log, connection_lorenz_normalized, connection_pl, connection_spatial,
                                connection_spatial_alt, killing_residual, pl_integrals, projectivize,
                                solve_connection_from_integrals, spatial_integrals, trace_conditions)
from riemext.symexpr import parse

XY = ("x", "y")


def vf2(p, q, params=()):
    return VectorField([p, q], XY, params)


def quad_generic():
    mons = ("1", "x", "y", "x^2", "x*y", "y^2")
    names = ("0", "1", "2", "11", "12", "22")
    P = " + ".join(f"b{n}*{m}" for n, m in zip(names, mons))
    Q = " + ".join(f"a{n}*{m}" for n, m in zip(names, mons))
    return vf2(P, Q, cf.QUAD_PARAMS)


def lorenz():
    return VectorField(["sigma*(y - x)", "r*x - y - x*z", "x*y - b*z"], ("x", "y", "z"), ("sigma", "r", "b"))


def E(text, vf):
    return parse(text, vf.variables, vf.parameters)


def test_direct_circle():
    vf = vf2("-y", "x")
    c = connection_direct(vf)
    assert c[0, 0, 1] == E("-1/(2*y)", vf)
    assert c[1, 0, 1] == E("-1/(2*x)", vf)
    assert c[0, 0, 0].is_zero() and c[1, 1, 1].is_zero()
    assert c.to_json() == {"1,1,2": "-1/(2*y)", "2,1,2": "-1/(2*x)"}


def test_direct_constant_field_is_flat():
    assert connection_direct(vf2("1", "1")).is_flat_table()


def test_direct_euler_field():
    vf = vf2("x", "y")
    c = connection_direct(vf)
    assert c[0, 0, 0] == E("-1/x", vf)
    assert c[1, 1, 1] == E("-1/y", vf)
    assert c[0, 0, 1].is_zero() and c[1, 0, 1].is_zero()


def test_direct_restates_first_row():
    vf = quad_generic()
    c = connection_direct(vf)
    P = vf.components[0]
    assert (c[0, 0, 0] * P + P.diff("x")).is_zero()


def test_log_examples():
    vf = vf2("-y", "x")
    c = connection_log(vf)
    assert c[0, 0, 0] == E("1/x", vf)
    assert c[1, 1, 1] == E("1/y", vf)
    assert connection_log(vf2("x^2 + y", "x^2 + y")).is_flat_table()
    c = connection_log(vf2("1", "x"))
    assert c[0, 0, 0] == E("1/x", vf) and c[1, 1, 1].is_zero()


def test_pl_first_row_matches_listed_formulas():
    vf = quad_generic()
    c = connection_pl(vf)
    for key, want in cf.pl_pi1_closed_forms(vf).items():
        assert (c[key] - want).is_zero(), key


def test_pl_constant_field():
    vf = vf2("1", "1")
    c = connection_pl(vf)
    assert c[0, 0, 0].is_zero()
    assert c[0, 0, 1] == E("(2*y - 2 + 2*x)/(2*(y^2 - y + x^2 - x))", vf)


def test_pl_rejects_degenerate_denominator():
    with pytest.raises(DegenerateInputError):
        connection_pl(vf2("x*(x - 1)", "-y*(y - 1)"))


def test_solver_single_integral_with_pins():
    vf = vf2("-y", "x")
    one, zero = vf.const(1), vf.const(0)
    pins = [({key: 1}, 0) for key in [(1, 0, 0), (1, 0, 1), (1, 1, 1)]]
    c = solve_connection_from_integrals([Covector([one, zero])], 2, XY, vf.symbols, constraints=pins)
    assert c.is_flat_table()


def test_solver_admits_each_integral_as_killing_form():
    vf = quad_generic()
    c = connection_pl(vf)
    for a in pl_integrals(vf):
        assert all(v.is_zero() for v in killing_residual(c, a).values())


def test_spatial_alt_lorenz_x_equation_coefficient():
    vf = lorenz()
    c = connection_spatial_alt(vf)
    P, Q, R = vf.components
    x, y, z = (vf.var(v) for v in vf.variables)
    want = (R.diff("x") * z + P + y * Q.diff("x")) / (y * Q + R * z + P * x)
    assert (c[0, 0, 0] - want).is_zero()


def test_spatial_admits_its_three_integrals():
    vf = lorenz()
    c = connection_spatial(vf)
    for a in spatial_integrals(vf):
        assert all(v.is_zero() for v in killing_residual(c, a).values())


def test_lorenz_normalized_entries():
    vf = lorenz()
    c = connection_lorenz_normalized(vf)
    assert c[1, 0, 0] == E("-(r - z)/(sigma*(y - x))", vf)
    assert c[0, 2, 2].is_zero()
    for t in trace_conditions(c):
        assert t.is_zero()
    for key, want in cf.lorenz_gamma_closed_forms(vf).items():
        assert (c[key] - want).is_zero(), key


def test_projectivize_examples():
    vf = vf2("x", "y")
    cov = projectivize(vf)
    assert [str(c) for c in cov.components] == ["-y*z", "x*z", "0"]
    cov = projectivize(vf2("1", "0"))
    assert [str(c) for c in cov.components] == ["0", "z^2", "-y*z"]
    (p, q), params, shown = cf.projectivization_example()
    cov = projectivize(VectorField([p, q], XY, params))
    for got, want in zip(cov.components, shown):
        assert (got - want).is_zero()


def test_json_round_trip():
    c = connection_spatial_alt(lorenz())
    back = AffineConnection.from_json(json.loads(c.dumps()))
    assert back.equals(c)


@st.composite
def planar_fields(draw):
    mons = ["1", "x", "y", "x^2", "x*y", "y^2"]
    comps = []
    for _ in range(2):
        cs = draw(st.lists(st.integers(-3, 3), min_size=6, max_size=6))
        comps.append(" + ".join(f"({c})*{m}" for c, m in zip(cs, mons)))
    return comps


@settings(max_examples=25, deadline=None)
@given(planar_fields())
def test_every_constructed_connection_is_symmetric_and_admits_its_integral(comps):
    vf = vf2(*comps)
    P, Q = vf.components
    if P.is_zero() or Q.is_zero():
        return
    for build in (connection_direct, connection_log):
        c = build(vf)
        for (k, i, j), v in c.items():
            assert (c[k, j, i] - v).is_zero()
    try:
        c = connection_pl(vf)
    except DegenerateInputError:
        return
    for a in pl_integrals(vf):
        assert all(v.is_zero() for v in killing_residual(c, a).values())
