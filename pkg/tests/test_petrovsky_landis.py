from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from riemext import closed_forms as cf
from riemext.connection import DegenerateInputError, VectorField
from riemext.petrovsky_landis import (BOUNDARY_LABELS, QuadraticSystem, boundary_conditions, cubic_ode,
                                      generic_quadratic_ode, invariant_curve_check, parse_slope, proportional,
                                      residue_conditions, residue_consistency, substitute_family,
                                      verify_particular_integral)
from riemext.symexpr import parse

XY = ("x", "y")
EX1 = VectorField(["2 + 4*x - 4*a*x^2 + 12*x*y", "8 - 3*a - 14*a*x - 2*a*x*y - 8*y^2"], XY, ("a",))
EX2 = VectorField(["5*x + 6*x^2 + 4*(1 + a)*x*y + a*y^2", "x + 2*y + 4*x*y + (2 + 3*a)*y^2"], XY, ("a",))


@pytest.fixture(scope="module")
def generic():
    return generic_quadratic_ode()


@pytest.fixture(scope="module")
def generic_conditions(generic):
    qs, ode = generic
    s26, s27 = substitute_family(ode)
    return s26, s27, boundary_conditions(s26, s27, qs.parameters)


def test_own_slope_and_reference_slope_solve_the_ode():
    ode = cubic_ode(EX1)
    P, Q = EX1.components
    assert verify_particular_integral(ode, Q, P)
    m, n = parse_slope("-y*(y - 1)", "x*(x - 1)", ("a",))
    assert verify_particular_integral(ode, m, n)


def test_example1_limit_cycle_slope():
    ode = cubic_ode(EX1)
    m, n = parse_slope("2*x - 3*a*x^2 - 1 - y - 2*x*y^2", "x + 2*x^2*y", ("a",))
    F = parse(cf.EXAMPLE_CURVES["example1"], XY, ("a",))
    # the slope is the implicit derivative of F = 0; it solves the ODE on that curve, not identically
    assert ((m / n) + F.diff("x") / F.diff("y")).is_zero()
    assert not verify_particular_integral(ode, m, n)
    assert verify_particular_integral(ode, m, n, on_curve=F)


def test_example2_second_slope_on_curve():
    ode = cubic_ode(EX2)
    m, n = parse_slope(*cf.EXAMPLE_INTEGRALS["example2"][1], ("a",))
    F = parse(cf.EXAMPLE_CURVES["example2"], XY, ("a",))
    assert verify_particular_integral(ode, m, n, on_curve=F)
    assert verify_particular_integral(ode, *parse_slope(*cf.EXAMPLE_INTEGRALS["example2"][0], ("a",)))


def test_invariant_curves():
    ok, lam = invariant_curve_check(parse("x", XY), VectorField(["x", "y"], XY))
    assert ok and lam.constant_value() == 1
    for vf, name in ((EX1, "example1"), (EX2, "example2")):
        ok, lam = invariant_curve_check(parse(cf.EXAMPLE_CURVES[name], XY, ("a",)), vf)
        assert ok and lam.is_polynomial()
    ok, _ = invariant_curve_check(parse("x + y", XY), VectorField(["-y", "x"], XY))
    assert not ok


def test_cubic_ode_matches_closed_form_for_generic_system(generic):
    qs, ode = generic
    want = cf.cubic_ode_closed_form(qs.vector_field())
    got = (ode.lead, *ode.numerators)
    r = proportional(got[0], want[0])
    assert r is not None
    for g, w in zip(got, want):
        assert (g - w * r).is_zero()


def test_reference_system_is_degenerate():
    with pytest.raises(DegenerateInputError):
        cubic_ode(VectorField(["x*(x - 1)", "-y*(y - 1)"], XY))


def test_family_coefficients(generic_conditions):
    s26, s27, _ = generic_conditions
    alpha = cf.family_xy_coefficients()[5]
    assert proportional(s26[5], alpha) is not None
    L = cf.family_x_coefficients()[0]
    assert proportional(s27[0], L) is not None


def test_boundary_condition_x_c(generic_conditions):
    conds = generic_conditions[2]
    assert set(conds) == set(BOUNDARY_LABELS)
    eq = conds["x=C,y=1-C"]
    shown = parse("(b12 - 2*b22)*C + 2*b22 + b2", ("C",), cf.QUAD_PARAMS)
    assert proportional(eq.to_expr(), shown) is not None


def test_boundary_condition_c_squared_coefficient(generic_conditions):
    eq = generic_conditions[2]["x=0"]
    want = parse("a2 + a12 + b1 + b12 + b2 + 2*a0 + a1 + 2*b0", (), cf.QUAD_PARAMS)
    assert proportional(eq[2], want) is not None


def test_zero_field_gives_zero_residues():
    res = residue_conditions(VectorField(["0", "0"], XY))
    assert all(v.is_zero() for v in res.values())
    with pytest.raises(DegenerateInputError):
        QuadraticSystem({k: "0" for k in cf.QUAD_PARAMS}).vector_field()


def test_reference_residues_vanish():
    res = residue_conditions(VectorField(["x*(x - 1)", "-y*(y - 1)"], XY))
    assert all(str(v) == "0" for v in res.values())


def test_residues_imply_boundary_conditions():
    rows = residue_consistency(n_draws=20, seed=1)
    assert rows
    for row in rows:
        for label in ("x=0", "x=1", "x=C"):
            assert row[label] is not None, (label, row["draw"])


def test_proportional():
    a, b = parse("2*x + 4", XY), parse("x + 2", XY)
    assert proportional(a, b) == Fraction(2)
    assert proportional(a, parse("x + 3", XY)) is None


@st.composite
def small_fields(draw):
    mons = ["1", "x", "y", "x^2", "x*y", "y^2"]
    out = []
    for _ in range(2):
        cs = draw(st.lists(st.integers(-3, 3), min_size=6, max_size=6))
        out.append(" + ".join(f"({c})*{m}" for c, m in zip(cs, mons)))
    return out


@settings(max_examples=25, deadline=None)
@given(small_fields())
def test_cubic_ode_has_both_defining_integrals(comps):
    vf = VectorField(comps, XY)
    P, Q = vf.components
    if P.is_zero():
        return
    try:
        ode = cubic_ode(vf)
    except DegenerateInputError:
        return
    assert verify_particular_integral(ode, Q, P)
    assert verify_particular_integral(ode, *parse_slope("-y*(y - 1)", "x*(x - 1)"))
