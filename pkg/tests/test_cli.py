import csv
import json
from pathlib import Path

import pytest

from riemext.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_connection_circle(capsys):
    code, out, _ = run(capsys, "connection", "--method", "direct", "circle.sys")
    assert code == 0
    data = json.loads(out)
    assert data["gamma"]["1,1,2"] == "-1/(2*y)"
    assert data["fixture"] == "circle" and data["schema"] == 1


@pytest.mark.parametrize("argv,golden", [
    (["connection", "--method", "direct", "circle.sys"], "connection_circle_direct.json"),
    (["pl", "--conditions", "quad_generic.sys"], "pl_conditions_quad_generic.txt"),
    (["metric", "example1.sys"], "metric_example1_direct.json"),
])
def test_golden_files(capsys, argv, golden):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / golden).read_text()


def test_pl_conditions_contains_the_x_c_line(capsys):
    code, out, _ = run(capsys, "pl", "--conditions", "quad_generic.sys")
    assert "x=C,y=1-C: (b12 - 2*b22)*C + (b2 + 2*b22)" in out


def test_pl_reference_residues_are_zero(capsys):
    code, out, _ = run(capsys, "pl", "--json", "reference.sys")
    data = json.loads(out)
    assert code == 0 and "degenerate" in data
    assert set(data["residues"].values()) == {"0"}


def test_invariants(capsys):
    code, out, _ = run(capsys, "invariants", "circle.sys")
    assert code == 0 and "p: 0 (symbolic)" in out
    code, out, _ = run(capsys, "invariants", "lorenz.sys", "--points", "100")
    assert code == 0
    assert "p: 0 (numeric, max |p| = " in out and "over 100 pts)" in out


def test_ricci_checks(capsys):
    code, out, _ = run(capsys, "ricci", "circle.sys", "--closed-forms")
    assert code == 0
    code, out, _ = run(capsys, "ricci", "--method", "log", "example2.sys", "--expect-flat")
    assert code == 0 and json.loads(out)["ricci_flat"]
    code, _, _ = run(capsys, "ricci", "circle.sys", "--expect-flat")
    assert code == 1


def test_geodesic_csv(capsys, tmp_path):
    out_file = tmp_path / "g.csv"
    code, _, err = run(capsys, "geodesic", "circle.sys", "--init", "1,1,0.1,0.05,0.2,0.1,0,0",
                       "--span", "0,10", "--samples", "11", "-o", str(out_file))
    assert code == 0
    rows = list(csv.reader(out_file.open()))
    assert rows[0][:9] == ["s", "x", "y", "dx", "dy", "z", "t", "dz", "dt"]
    assert len(rows) == 12
    assert "max deviation" in err


def test_geodesic_singularity_exit_code(capsys):
    code, _, err = run(capsys, "geodesic", "circle.sys", "--init", "1,0,0,1")
    assert code == 1 and "singularity" in err


def test_verify_integral_and_curve(capsys):
    args = ["verify-integral", "example1.sys", "--m", "-y*(y - 1)", "--n", "x*(x - 1)"]
    assert run(capsys, *args)[0] == 0
    curve = "1/4 + x - x^2 + a*x^3 + x*y + x^2*y^2"
    args = ["verify-integral", "example1.sys", "--m", "2*x - 3*a*x^2 - 1 - y - 2*x*y^2", "--n", "x + 2*x^2*y"]
    assert run(capsys, *args)[0] == 1
    assert run(capsys, *args, "--on-curve", curve)[0] == 0
    code, out, _ = run(capsys, "curve-check", "example1.sys", "--curve", curve)
    assert code == 0 and "invariant, cofactor" in out


def test_chern_simons_check(capsys):
    code, out, _ = run(capsys, "chern-simons", "--check", "--draws", "10")
    assert code == 0 and out.strip().endswith("OK")


@pytest.mark.parametrize("argv", [
    ["connection", "nosuch.sys"],
    ["connection", "--method", "spatial", "circle.sys"],
    ["bogus"],
    ["geodesic", "circle.sys", "--init", "1,2,3"],
    ["conformance", "nosuch"],
    ["verify-integral", "example1.sys", "--m", "x", "--n", "0"],
])
def test_input_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_malformed_spec_file(capsys, tmp_path):
    bad = tmp_path / "bad.sys"
    bad.write_text("name: bad\nvariables: x, y\nx' = y +\ny' = x\n")
    code, _, err = run(capsys, "metric", str(bad))
    assert code == 2 and "x'" in err


def test_conformance_reports(capsys, tmp_path):
    code, out, _ = run(capsys, "conformance", "circle", "example3")
    assert code == 0 and "conformance: circle" in out and "conformance: example3" in out
    target = tmp_path / "rep.json"
    code, _, _ = run(capsys, "conformance", "example1", "--json", "-o", str(target))
    data = json.loads(target.read_text())
    assert code == 0 and data["fixture"] == "example1" and data["schema"] == 1
    for e in data["entries"]:
        if e["status"] == "mismatch":
            assert e["computed"] and e["displayed"]


def test_output_is_deterministic(capsys):
    a = run(capsys, "metric", "example2.sys")[1]
    b = run(capsys, "metric", "example2.sys")[1]
    assert a == b
