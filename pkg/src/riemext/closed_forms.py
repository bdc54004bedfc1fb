"""Displayed closed-form formulas used as conformance anchors.

Each function transcribes a printed formula as literally as the source
allows. Formulas written for generic P, Q (, R) take a :class:`VectorField`
and are built from its components and their partial derivatives. The
pipelines never call into this module; it only feeds checks and reports.
"""
from __future__ import annotations

from .connection import VectorField
from .symexpr import RationalExpr, parse

QUAD_A = ("a0", "a1", "a2", "a11", "a12", "a22")
QUAD_B = ("b0", "b1", "b2", "b11", "b12", "b22")
QUAD_PARAMS = QUAD_A + QUAD_B


def _d(vf: VectorField):
    x, y = vf.variables[:2]
    P, Q = vf.components[:2]
    return x, y, P, Q


# -- Ricci components of the four-dimensional extension ----------------------------


def ricci_closed_forms(vf: VectorField) -> dict[tuple[int, int], RationalExpr]:
    """R_11, R_12, R_22 as displayed for the direct connection of (P, Q)."""
    x, y, P, Q = _d(vf)
    Px, Py, Qx, Qy = P.diff(x), P.diff(y), Q.diff(x), Q.diff(y)
    R11 = (-3 * Qx ** 2 * P + 2 * Qx.diff(x) * P * Q + 2 * Px * Q * Qx) / (2 * P * Q ** 2)
    R12 = (-(-(Px.diff(y)) * P * Q ** 2 - Qx * Py * P * Q) / (2 * P ** 2 * Q ** 2)
           - (Px * Py * Q ** 2 - Qx.diff(y) * P ** 2 * Q) / (2 * P ** 2 * Q ** 2)
           - Qx * Qy / (2 * Q ** 2))
    R22 = (-3 * Py ** 2 * Q + 2 * Py.diff(y) * P * Q + 2 * Qy * P * Py) / (2 * Q * P ** 2)
    return {(0, 0): R11, (0, 1): R12, (1, 1): R22}


def literal_cross_term_metric_base(vf: VectorField, fiber=("z", "t")):
    """Base block of the printed four-dimensional metric, read as a quadratic form.

    ds² = 2zP_x/P dx² + (2zP_y/P + tQ_x/Q) dx dy + 2tQ_y/Q dy² + ..., so
    g_11, g_12 (half the dx dy coefficient) and g_22.
    """
    x, y, P, Q = _d(vf)
    syms = vf.symbols + tuple(fiber)
    z = RationalExpr.symbol(fiber[0], syms)
    t = RationalExpr.symbol(fiber[1], syms)
    P, Q = P.with_symbols(syms), Q.with_symbols(syms)
    g11 = 2 * z * P.diff(x) / P
    g12 = (2 * z * P.diff(y) / P + t * Q.diff(x) / Q) / 2
    g22 = 2 * t * Q.diff(y) / Q
    return {(0, 0): g11, (0, 1): g12, (1, 1): g22}


# -- circle system: decoupled fiber equations ---------------------------------------


def circle_z_equation(x: float, y: float, slope: float):
    """Coefficients (z', z, forcing) of z'' + a z' + b z + f = 0 for dx/ds = −y, dy/ds = x.

    ``slope`` is ν in 2Ψ·ẋ = νs + μ; the printed forcing calls it μ.
    """
    return (x * x + y * y) / (x * y), -(x * x) / (y * y), slope / (2 * x)


def circle_t_equation(x: float, y: float, slope: float):
    """Coefficients (t', t, forcing) of t'' + a t' + b t + f = 0 for the same system."""
    return -(x * x + y * y) / (x * y), -(y * y) / (x * x), slope / (2 * y)


# -- PL connection, first row --------------------------------------------------------


def pl_pi1_closed_forms(vf: VectorField) -> dict[tuple[int, int, int], RationalExpr]:
    x, y, P, Q = _d(vf)
    X, Y = vf.var(x), vf.var(y)
    D = Y ** 2 * P - Y * P + Q * X ** 2 - Q * X
    Px, Py, Qx, Qy = P.diff(x), P.diff(y), Q.diff(x), Q.diff(y)
    return {
        (0, 0, 0): Qx * X * (X - 1) / D,
        (0, 0, 1): (2 * Y * P - 2 * P + 2 * X * P + Qy * X ** 2 - Qy * X - Px * X ** 2 + Px * X) / (2 * D),
        (0, 1, 1): -Py * X * (X - 1) / D,
    }


def pl_geodesic_y_coefficients(vf: VectorField) -> dict[tuple[int, int], RationalExpr]:
    """Coefficients of ẋ², ẋẏ, ẏ² in the printed ÿ equation of the PL paths."""
    x, y, P, Q = _d(vf)
    X, Y = vf.var(x), vf.var(y)
    D = Y ** 2 * P - Y * P + Q * X ** 2 - Q * X
    Px, Py, Qx, Qy = P.diff(x), P.diff(y), Q.diff(x), Q.diff(y)
    return {
        (0, 0): -Qx * Y * (Y - 1) / D,
        (0, 1): (-Qy * Y ** 2 + Qy * Y + 2 * Q * Y - 2 * Q + 2 * Q * X + Y ** 2 * Px - Y * Px) / D,
        (1, 1): Py * Y * (Y - 1) / D,
    }


def cubic_ode_closed_form(vf: VectorField) -> tuple[RationalExpr, ...]:
    """(D, N3, N2, N1, N0) with D·y'' + N3 y'³ + N2 y'² + N1 y' + N0 = 0."""
    x, y, P, Q = _d(vf)
    X, Y = vf.var(x), vf.var(y)
    Px, Py, Qx, Qy = P.diff(x), P.diff(y), Q.diff(x), Q.diff(y)
    D = Y ** 2 * P - Y * P + Q * X ** 2 - Q * X
    N3 = Py * X ** 2 - Py * X
    N2 = (Px - Qy) * X ** 2 + (Qy - Px - 2 * P) * X + Py * Y ** 2 + (-2 * P - Py) * Y + 2 * P
    N1 = -Qx * X ** 2 + (Qx + 2 * Q) * X + (Px - Qy) * Y ** 2 + (2 * Q - Px + Qy) * Y - 2 * Q
    N0 = -Qx * Y ** 2 + Qx * Y
    return D, N3, N2, N1, N0


# -- the three worked examples ---------------------------------------------------------


def _xa(text: str) -> RationalExpr:
    return parse(text, ("x", "y"), ("a",))


def example1_ode_coefficients() -> tuple[RationalExpr, ...]:
    """(lead, c3, c2, c1, c0): lead·y'' + c3 y'³ + c2 y'² + c1 y' + c0 = 0."""
    lead = _xa("-12*y^3*x + (-2 + 4*a*x^2 + 8*x^2)*y^2 + (2*a*x^3 + 2 - 6*a*x^2 + 4*x)*y"
               " - 3*a*x - 8*x^2 + 8*x - 11*a*x^2 + 14*a*x^3")
    c3 = _xa("-12*x^3 + 12*x^2")
    c2 = _xa("-4*y*x^2 - 4 + 4*x^2 + 2*a*x^2 + 24*y*x - 8*a*x^2*y - 2*a*x^3 + 12*y^2*x + 4*y")
    c1 = _xa("-12*y^3 + (10*a*x + 16*x + 8)*y^2 + (6*a + 20*a*x + 2*a*x^2 - 12)*y"
             " + 16 - 8*a*x + 14*a*x^2 - 6*a - 16*x")
    c0 = _xa("14*a*y - 12*a*y^2 - 2*a*y^3")
    return lead, c3, c2, c1, c0


def example2_ode_coefficients() -> tuple[RationalExpr, ...]:
    delta = _xa("y^4*a + (-a + 4*x + 4*x*a)*y^3 + (-7*x*a - x + 3*x^2*a + 8*x^2)*y^2"
                " + (-8*x^2 - 7*x + 4*x^3)*y - x^2 + x^3")
    c3 = _xa("2*x^2*a*y - 4*x^2*a - 2*x*a*y + 4*x^3*a + 4*x^3 - 4*x^2")
    c2 = _xa("-6*x*y - 20*y*x^2 - 6*x*y^2*a - 3*x^2 - 10*x^2*a*y - 4*y^2*x - 4*x^3 + 7*x + 6*x*a*y")
    c1 = _xa("6*x*y^2*a - 4*a*y^2 - 7*y + 3*y^2 + 20*y^2*x - x + x^2 + 4*y^3 - 6*x*y + 4*y*x^2 + 4*a*y^3")
    c0 = _xa("y + 3*y^2 - 4*y^3")
    return delta, c3, c2, c1, c0


def example3_ode_coefficients() -> tuple[RationalExpr, ...]:
    delta = _xa("(2 + 12*x)*y^3 + (-22*x + 4*x^2 - 2 - 6*a*x^2 + 6*x*a)*y^2"
                " + (-10*x^3*a - 18*x^3 + 31*a*x^2 - 21*x*a + 45*x^2 - 21*x)*y"
                " - 3*x^3*a - 3*x^3*a^2 + 3*x^4*a + 3*x^4*a^2")
    c3 = _xa("-2*x + 12*x^3 - 10*x^2")
    c2 = _xa("16*x*y - 20*y*x^2 + 18*x^3 - 39*x^2 - 2*y^2 - 12*y^2*x + 21*x - 12*y*x*a + 10*x^3*a"
             " - 31*a*x^2 + 12*y*x^2*a + 21*x*a + 2*y")
    c1 = _xa("6*y*x^2*a^2 - 18*y*x^2 - 21*y + 21*y^2*a - 10*y^2*x + 12*y^3 - 21*y*a - 22*y^2*x*a"
             " + 9*y^2 - 4*y*x^2*a + 54*x*y + 42*y*x*a")
    c0 = _xa("18*y^3 - 18*y^2 + 6*x*a^2*y - 10*y^2*a - 6*x*a^2*y^2 + 10*y^3*a - 6*y^2*x*a + 6*y*x*a")
    return delta, c3, c2, c1, c0


EXAMPLE_INTEGRALS = {
    # slope functions m/n of dy/dx claimed to solve the cubic ODEs
    "example1": [
        ("8 - 3*a - 14*a*x - 2*a*x*y - 8*y^2", "2 + 4*x - 4*a*x^2 + 12*x*y"),
        ("-y*(y - 1)", "x*(x - 1)"),
        ("2*x - 3*a*x^2 - 1 - y - 2*x*y^2", "x + 2*x^2*y"),
    ],
    "example2": [
        ("x + 2*y + 4*x*y + (2 + 3*a)*y^2", "5*x + 6*x^2 + 4*(1 + a)*x*y + a*y^2"),
        ("-(2*x + 3*x^2 + 2*x*y + 2*a*y^2 + 2*a*y^3)", "x^2 + 4*a*x*y + 6*a*x*y^2 + 4*a^2*y^3"),
    ],
}

EXAMPLE_CURVES = {
    "example1": "1/4 + x - x^2 + a*x^3 + x*y + x^2*y^2",
    "example2": "x^2 + x^3 + x^2*y + 2*a*x*y^2 + 2*a*x*y^3 + a^2*y^4",
}


# -- the C-polynomials for a generic quadratic system -----------------------------------


def _q(text: str, extra=()) -> RationalExpr:
    return parse(text, ("x", "y") + tuple(extra), QUAD_PARAMS)


def family_xy_coefficients(restore_beta_factor: bool = False) -> dict[int, RationalExpr]:
    """C-power -> coefficient (α at C⁵ ... μ at C⁰) of the printed two-variable family polynomial.

    ``restore_beta_factor`` multiplies the bracket ``((...)x − a2)`` in β by y,
    the reading under which the printed β is consistent with its neighbours.
    """
    alpha = _q("(a12 + b12)*y^2 + (b1 + b2 + (2*a22 + 2*a11 + 2*b22 + 2*b11)*x + a2 + a1)*y"
               " + (a12 + b12)*x^2 + (a1 + b2 + b1 + a2)*x + 2*a0 + 2*b0")
    group = "((-4*a22 - 3*b2 - 5*a1 - 3*a2 - 2*b11 - 6*b22 - b1)*x - a2)"
    if restore_beta_factor:
        group += "*y"
    beta = _q("2*b22*y^3 + ((-5*a12 - b12 - 2*b22)*x + 2*b2 - b12)*y^2 + " + group +
              " + ((-4*b11 + a12 - 10*a11 - b12 - 4*a22)*x^2 + 2*b0 - 2*b2 - b1)*y"
              " + (-2*a12 + 2*a11)*x^3 + (-2*a12 - 2*b1 - 2*a1 - 3*b12 - 2*a2)*x^2 - 4*b0"
              " + (-6*a0 - 2*b1 - 4*b0 - 3*b2 - a1 - 2*a2)*x - 2*a0")
    gamma = _q("(-4*x*b22 - 2*b22)*y^3 + ((-b12 + 2*b22 + 10*a12)*x^2 - 2*b2 + (b12 + 4*b22 - 4*b2)*x)*y^2"
               " + (b2 + (-3*a12 + 2*a22 + 2*b11 + b12 + 20*a11)*x^3"
               " + (6*b22 + 2*a22 + b1 + 3*a2 - 4*b0 + 6*b2)*x)*y"
               " + ((-b1 + 10*a1 + 3*a2 + 2*b2 + 4*b11 + 2*b12 - a12 + 8*a22)*x^2 - 2*b0)*y"
               " + (a12 - 6*a11)*x^4 + (4*a12 + a2 - 2*a11 + b1)*x^3 + (b1 + 6*a0 + 3*b2 + a2 + 8*b0)*x"
               " + (a12 + 6*a0 + 4*b1 + 2*a1 + 2*b0 + 3*b12 + 4*a2)*x^2 + 2*b0")
    delta = _q("(2*x^2*b22 + 4*x*b22)*y^3 + ((b12 - 10*a12)*x^3 + (2*b2 - 4*b22 + b12)*x^2"
               " + (4*b2 - 2*b22)*x)*y^2"
               " + ((b1 - 4*a22 + 3*a12 - 2*b11 - a2 - 10*a1 - 2*b12)*x^3"
               " + (-b12 - 4*b2 - 4*a22 - 3*a2 + b1 + 2*b0)*x^2)*y"
               " + ((3*a12 - 20*a11)*x^4 + (-3*b2 + 4*b0 - 2*b22)*x)*y"
               " + 6*x^5*a11 + (6*a11 + 2*a1 - 2*a12)*x^4 + (-4*b0 - b12 - 2*b1 - 2*a2 - 6*a0)*x^2"
               " + (-2*a12 - 2*a0 - 2*a2 - 2*b1)*x^3 + (-4*b0 - b2)*x")
    epsilon = _q("-2*y^3*x^2*b22 + (-x^3*b12 + 5*x^4*a12 + (-2*b2 + 2*b22)*x^2)*y^2"
                 " + ((5*a1 - 3*a12)*x^4 + (10*a11 - a12)*x^5 + (-b1 + b12 + a2 + 2*a22)*x^3"
                 " + (2*b2 - 2*b0)*x^2)*y"
                 " - 2*x^6*a11 + (-a1 - 6*a11)*x^5 + (b1 + 2*a0 + a2)*x^3 + (a12 - 2*a1)*x^4 + 2*x^2*b0")
    mu = _q("-y^2*x^5*a12 + (-2*x^6*a11 + (a12 - a1)*x^5)*y + 2*x^6*a11 + x^5*a1")
    return {5: alpha, 4: beta, 3: gamma, 2: delta, 1: epsilon, 0: mu}


FAMILY_XY_NAMES = {5: "alpha", 4: "beta", 3: "gamma", 2: "delta", 1: "epsilon", 0: "mu"}
FAMILY_X_NAMES = {6: "A", 5: "B", 4: "E", 3: "F", 2: "H", 1: "K", 0: "L"}


def family_x_coefficients() -> dict[int, RationalExpr]:
    """C-power -> coefficient (A at C⁶ ... L at C⁰)."""
    A = _q("(2*b12 - 2*b22 - 2*b11 + 2*a12 - 2*a22 - 2*a11)*x^2"
           " + (2*b22 - 2*b12 - 2*a12 + 2*a11 + 2*a22 + 2*b11)*x"
           " + a2 + a12 + b1 + b12 + b2 + 2*a0 + a1 + 2*b0")
    B = _q("(-8*a12 + 12*a11 + 4*b11 - 4*b22 + 4*a22)*x^3"
           " + (-2*b1 + 7*a12 + 16*b22 + 2*a1 + 4*b2 - 2*b11 - 10*a11 - 5*b12)*x^2"
           " + (-2*b1 - 8*b2 - 8*a0 - 4*a22 - 4*a2 + 2*b12 - 4*a12 - 14*b22 - 8*b0 - 6*a1 - 2*b11)*x"
           " - 2*b0 - 2*a0 - b1 - a2 - b12 + 2*b22")
    E = _q("(-28*a11 - 2*b11 - 2*a22 - 2*b12 + 12*a12)*x^4"
           " + (-8*a1 + 18*a11 + 6*b22 + 4*b1 - 2*b11 + 4*b12 - 6*a22 - 8*a12 - 4*b2)*x^3"
           " + (4*b1 + 12*a0 + 6*a2 + 13*a1 + b2 + 6*a12 + 6*a22 + 4*b11 + 4*b12 - 20*b22 + 10*b0)*x^2"
           " + (4*a2 + 2*b1 + 10*b0 + 10*b2 + 2*a22 + 16*b22 + 8*a0)*x - b2 - 2*b22")
    F = _q("(32*a11 - 8*a12)*x^5 + (-2*b1 + 4*a22 + 12*a1 + 3*b12 + 2*b11 + 2*a12 - 12*a11)*x^4"
           " + (-4*a2 - 6*b1 - 12*a1 - 4*a12 - 6*b12 - 8*a0 - 2*b22 - 2*b11 - 4*b0 + 6*b2)*x^3"
           " + (-2*b1 - 8*b2 - 14*b0 - 12*a0 - b12 - 6*a2 - 4*a22 + 6*b22)*x^2"
           " + (-4*b22 - 2*b0 - 2*b2)*x")
    H = _q("(2*a12 - 18*a11)*x^6 + (2*a12 - 2*a11 - 8*a1)*x^5"
           " + (-2*a22 + 2*a0 - b12 + a2 + 3*b1 + 3*a1 + a12)*x^4"
           " + (2*b1 + 2*b12 + 6*b0 + 4*a2 - 2*b2 + 8*a0 + 2*a22)*x^3 + (3*b2 + 4*b0)*x^2")
    K = _q("4*x^7*a11 + (6*a11 + 2*a1 - a12)*x^6 + 2*x^5*a1 + (-2*a0 - a2 - b1)*x^4 - 2*x^3*b0")
    L = _q("-2*x^7*a11 - x^6*a1")
    return {6: A, 5: B, 4: E, 3: F, 2: H, 1: K, 0: L}


def boundary_condition_closed_forms() -> dict[str, RationalExpr]:
    """Printed condition polynomials; the first three in C, the last two in C1."""
    def c(text, var):
        return parse(text, (var,), QUAD_PARAMS)
    return {
        "x=0": c("(a2 + a12 + b1 + b12 + b2 + 2*a0 + a1 + 2*b0)*C^2"
                 " + (-2*b0 - 2*a0 - b1 - a2 - b12 + 2*b22)*C - b2 - 2*b22", "C"),
        "x=1": c("(a2 + a12 + b1 + b12 + b2 + 2*a0 + a1 + 2*b0)*C^2"
                 " + (2*a11 - 2*b0 - b1 - 2*a0 - a12 - a2)*C - 2*a11 - a1", "C"),
        "x=C,y=1-C": c("(b12 - 2*b22)*C + 2*b22 + b2", "C"),
        "y=1-x,x=1,C=1/C1": c("(a1 + 2*a11)*C1^2 + (a12 - 2*a11 + b1 + a2 + 2*a0 + 2*b0)*C1"
                              " - a1 - a2 - a12 - 2*b0 - b12 - b1 - b2 - 2*a0", "C1"),
        "y=1-x,x=0,C=1/C1": c("(-2*b22 - b2)*C1^2 + (-2*b0 - b12 - b1 - a2 - 2*a0 + 2*b22)*C1"
                              " + a1 + a2 + a12 + 2*b0 + b12 + b1 + b2 + 2*a0", "C1"),
    }


# -- spatial connections -------------------------------------------------------------------


def spatial_gamma_closed_forms(vf: VectorField) -> dict[tuple[int, int, int], RationalExpr]:
    """The listed subset of the orthogonal-trajectory connection (0-based keys)."""
    x, y, z = vf.variables
    X, Y, Z = vf.var(x), vf.var(y), vf.var(z)
    P, Q, R = vf.components
    D = P * X ** 2 - P * X - Q * Y ** 2 + Q * Y - R * Z ** 2 + R * Z
    Px, Pz, Qy, Qz, Rx, Ry, Rz = P.diff(x), P.diff(z), Q.diff(y), Q.diff(z), R.diff(x), R.diff(y), R.diff(z)
    return {
        (0, 0, 0): Px * X * (X - 1) / D,
        (1, 0, 0): -Y * (Y - 1) * Px / D,
        (2, 0, 0): -Px * Z * (Z - 1) / D,
        (1, 0, 2): Y * (Y - 1) * (Rx * (X - X ** 2) + 2 * R * (X - 1 + Z) - Pz * (X ** 2 - X))
        / (2 * D * X * (X - 1)),
        (0, 1, 1): Qy * X * (X - 1) / D,
        (1, 1, 1): -Y * (Y - 1) * Qy / D,
        (2, 1, 1): -Z * (Z - 1) * Qy / D,
        (0, 1, 2): X * (X - 1) * (Ry + Qz) / (2 * D),
        (1, 1, 2): -(Ry + Qz) * Y * (Y - 1) / (2 * D),
        (2, 1, 2): -Z * (Ry * Z - Ry + Qz * Z - Qz) / (2 * D),
        (0, 2, 2): X * (X - 1) * Rz / D,
        (1, 2, 2): -Rz * Y * (Y - 1) / D,
        (2, 2, 2): -Z * (Z - 1) * Rz / D,
    }


def spatial_alt_x_equation(vf: VectorField) -> dict[tuple[int, int], RationalExpr]:
    """Printed ẍ-equation coefficients of the sphere-integral connection.

    Keys (i, j) are velocity products ẋ^i ẋ^j; values include the factor 2
    for i != j, so Γ^1_ij = value / (1 or 2).
    """
    x, y, z = vf.variables
    X, Y, Z = vf.var(x), vf.var(y), vf.var(z)
    P, Q, R = vf.components
    D = Y * Q + R * Z + P * X
    Px, Py, Pz = P.diff(x), P.diff(y), P.diff(z)
    return {
        (0, 0): (R.diff(x) * Z + P + Y * Q.diff(x)) / D,
        (0, 1): (-Px * Y + Q.diff(y) * Y + R.diff(y) * Z) / D,
        (1, 1): -(Py * Y - P) / D,
        (0, 2): -(Px * Z - R.diff(z) * Z - Q.diff(z) * Y) / D,
        (1, 2): -(Py * Z + Y * Pz) / D,
        (2, 2): -(Py * Y - P) / D,
    }


def lorenz_gamma_closed_forms(vf: VectorField) -> dict[tuple[int, int, int], RationalExpr]:
    """Displayed entries of the normalized connection for generic P, Q, R."""
    x, y, z = vf.variables
    P, Q, R = vf.components
    Px, Py, Pz = P.diff(x), P.diff(y), P.diff(z)
    Qx, Qy, Qz = Q.diff(x), Q.diff(y), Q.diff(z)
    Rx, Ry, Rz = R.diff(x), R.diff(y), R.diff(z)
    q = RationalExpr.constant(1, vf.symbols) / 4
    return {
        (2, 1, 2): -q * (-Q * Py + R * Pz + P * Rz - 2 * P * Px + P * Qy) / (P * Q),
        (1, 2, 2): -Q * Pz / (P * R),
        (2, 0, 1): q * (-R * Q * Py + R ** 2 * Pz + P * R * Rz - 2 * Q * P * Ry - 2 * P * R * Px + P * R * Qy)
        / (Q * P ** 2),
        (1, 0, 2): -q * (2 * Q * P * Px - Q * P * Qy - Q ** 2 * Py + Q * R * Pz - Q * P * Rz + 2 * Qz * R * P)
        / (P ** 2 * R),
        (0, 1, 1): -Py / Q,
        (2, 1, 1): -R * Py / (P * Q),
        (0, 1, 2): -q * (-2 * P * Px + P * Qy + Q * Py + R * Pz + P * Rz) / (R * Q),
        (0, 2, 2): -Pz / R,
        (1, 0, 0): -Qx / P,
        (2, 0, 0): -Rx / P,
        (1, 1, 2): q * (2 * P * Px - P * Qy - Q * Py + R * Pz - P * Rz) / (P * R),
        (2, 0, 2): -q * (-P * Qy - Q * Py + R * Pz + P * Rz) / P ** 2,
    }


LORENZ_VARIABLES = ("x", "y", "z")
LORENZ_PARAMETERS = ("sigma", "r", "b")


def _lz(text: str) -> RationalExpr:
    return parse(text, LORENZ_VARIABLES, LORENZ_PARAMETERS)


def lorenz_rzz_closed_form() -> RationalExpr:
    return _lz("-1/2*x*(-z*x + (2*sigma - b - 2)*y + (1 + b - 2*sigma + r)*x)"
               "/((-x*y + b*z)*(-y + x)*(-r*x + y + z*x))")


def lorenz_cs_prefactor() -> RationalExpr:
    return _lz("4*sigma*(-y + x)^4*(-r*x + y + z*x)^2*(-x*y + b*z)^2")


def lorenz_cs_blocks() -> dict[int, RationalExpr]:
    """z-power -> displayed coefficient of the prefactored density (z⁵, z⁴, z³ only)."""
    return {
        5: _lz("-9*x^4*b"),
        4: _lz("(10*x^5 + (11*b^2 + 48*sigma*b - 40*b)*x^3)*y + (-11*b^2 + 4*b + 36*r*b - 25*sigma*b)*x^4"
               " - 23*sigma*y^2*x^2*b - x^6"),
        3: _lz("(4*r - 2*sigma)*x^6 + (18*b - 40*r - 8 + 32*sigma)*y*x^5"
               " + ((-18*b + 44 - 56*sigma)*y^2 - 14*sigma*b^2 - 54*b*r^2 + 12*b^2 + 7*b - 18*sigma^2*b"
               " - 4*sigma*b + 75*sigma*r*b + 5*b^3 - 12*r*b + 26*r*b^2)*x^4"
               " + (26*sigma*y^3 + (-144*sigma*r*b - 2*b + 80*sigma^2*b + 120*r*b - 66*sigma*b - 10*b^3"
               " - 50*b^2 - 26*r*b^2 + 14*sigma*b^2)*y)*x^3"
               " + (-106*sigma^2*b + 14*sigma*b^2 + 5*b^3 + 38*b^2 + 69*sigma*r*b - 59*b + 138*sigma*b)*y^2*x^2"
               " + (44*sigma^2*b - 68*sigma*b - 14*sigma*b^2)*y^3*x"),
    }


def lorenz_cs_diagonal() -> RationalExpr:
    """Right side of the prefactored density restricted to x = y."""
    return _lz("-9*y^4*(z + 1 - r)^4*(b*z - y^2)")


def projectivization_example() -> tuple[tuple[str, str], tuple[str, str], tuple[RationalExpr, ...]]:
    """(p, q), parameter names and the printed Pfaff coefficients (dx, dy, dz)."""
    p = "lam*x - y - 10*x^2 + (5 + delta)*x*y + y^2"
    q = "x + x^2 + (eps - 25)*x*y"
    params = ("lam", "delta", "eps")

    def e(t):
        return parse(t, ("x", "y", "z"), params)
    dz = e("-y^2*x*delta - y*lam*x*z + z*y^2 - 5*y^2*x + z*x^2 + x^3 + x^2*y*eps - 15*x^2*y - y^3")
    dy = e("z^2*lam*x - z^2*y + 5*z*x*y + z*x*y*delta + z*y^2 - 10*z*x^2")
    dx = e("-z*x*y*eps + 25*z*x*y - z^2*x - z*x^2")
    return (p, q), params, (dx, dy, dz)
