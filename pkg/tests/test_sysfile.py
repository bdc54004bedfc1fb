import pytest
from hypothesis import given, settings, strategies as st

from riemext.sysfile import SpecError, fixture_names, load_fixture, load_system, parse_system


def test_bundled_fixtures_are_present():
    assert {"circle", "example1", "example2", "example3", "lorenz", "rossler", "quad_generic",
            "reference"} <= set(fixture_names())


@pytest.mark.parametrize("name", ["circle", "example1", "example2", "example3", "lorenz", "rossler",
                                  "quad_generic", "reference"])
def test_round_trip(name):
    spec = load_fixture(name)
    again = parse_system(spec.dumps())
    assert again == spec
    assert again.dumps() == spec.dumps()
    vf = spec.vector_field()
    assert vf.dim == spec.dim


def test_load_by_bundled_file_name():
    assert load_system("lorenz.sys").name == "lorenz"


def test_binding_values():
    vf = load_fixture("lorenz").vector_field(bind=True)
    assert vf.parameters == ()
    assert str(vf.components[2]) == "(3*x*y - 8*z)/3"


@pytest.mark.parametrize("text,fragment", [
    ("variables: x, y\nx' = y\ny' = x\n", "missing 'name:'"),
    ("name: a\nvariables: x, y\nx' = y\n", "components must be given"),
    ("name: a\nvariables: x, y\nx' = y +\ny' = x\n", "x'"),
    ("name: a\nvariables: x\nx' = x\n", "need 2 or 3 variables"),
    ("name: a\nvariables: x, y\nx' = y\ny' = x\nvalues: q = 1\n", "undeclared"),
    ("name: a\nvariables: x, y\nx' = y\ny' = x\nfoo: 1\n", "unknown key"),
    ("name: a\nkind: quadratic\nb0 = 0\nb1 = 0\nb2 = 0\nb11 = 0\nb12 = 0\nb22 = 0\n", ""),
])
def test_malformed_specs(text, fragment):
    with pytest.raises(SpecError) as info:
        parse_system(text)
    assert fragment in str(info.value)


def test_missing_file():
    with pytest.raises(SpecError):
        load_system("/nonexistent/nothing.sys")


_coef = st.integers(-9, 9)


@settings(max_examples=30, deadline=None)
@given(st.lists(_coef, min_size=6, max_size=6), st.fractions(min_value=-5, max_value=5, max_denominator=7))
def test_generated_specs_round_trip(cs, value):
    mons = ["1", "x", "y", "x^2", "x*y", "y^2"]
    p = " + ".join(f"({c})*{m}" for c, m in zip(cs, mons))
    text = f"name: gen\nvariables: x, y\nparameters: k\nx' = k*({p})\ny' = x - y\nvalues: k = {value}\n"
    spec = parse_system(text)
    assert parse_system(spec.dumps()) == spec
