from fractions import Fraction

import pytest

from riemext.chern_simons import cs_density, cs_parts, levi_civita, lorenz_cs_check
from riemext.closed_forms import lorenz_cs_diagonal
from riemext.connection import AffineConnection
from riemext.symexpr import RationalExpr

XYZ = ("x", "y", "z")


def const_connection(entries):
    return AffineConnection(XYZ, XYZ, {k: RationalExpr.constant(v, XYZ) for k, v in entries.items()})


def test_levi_civita():
    assert levi_civita(0, 1, 2) == 1
    assert levi_civita(1, 0, 2) == -1
    assert levi_civita(2, 0, 1) == 1
    assert levi_civita(0, 0, 2) == 0


def test_zero_connection():
    assert cs_density(AffineConnection(XYZ, XYZ, {})).value.is_zero()


def test_constant_connection_keeps_only_the_cubic_term():
    conn = const_connection({(0, 0, 1): 1, (1, 1, 2): 2, (2, 0, 2): -1, (0, 1, 2): 3})
    parts = cs_parts(conn)
    assert parts["d"].is_zero()
    dens = cs_density(conn)
    assert dens.value == parts["c"] * Fraction(2, 3)


@pytest.fixture(scope="module")
def report():
    return lorenz_cs_check(n_draws=50, seed=0)


def test_lorenz_blocks_and_reduction(report):
    assert report["polynomial"]
    assert all(b["match"] for b in report["blocks"].values())
    assert report["diagonal_symbolic"]
    assert report["diagonal_max_rel"] < 1e-8
    assert report["ok"]


def test_reduced_formula_examples(report):
    ex = report["diagonal_example"]
    assert ex["displayed"] == pytest.approx(9.0)
    assert ex["pipeline"] == pytest.approx(9.0, rel=1e-8)
    shown = lorenz_cs_diagonal()
    assert shown.subs({"y": 0, "z": 0}).is_zero()
    assert shown.subs({"y": 1, "z": 1, "r": 2, "b": 1}).is_zero()


def test_stationary_points_exact(report):
    assert report["stationary_symbolic"]
    assert len(report["stationary"]) == 10
    for st in report["stationary"]:
        assert st["r"] > 1 and st["b"] > 0
        assert st["pipeline"] == 0 and st["displayed"] == 0


def test_partial_reading_differs_by_a_constant():
    rep = lorenz_cs_check("partial", "base", n_draws=3)
    assert not rep["diagonal_symbolic"]
    assert rep["diagonal_ratio"].is_constant()
