import pytest

from riemext.conformance import SCHEMA_VERSION, ConformanceReport, run_conformance


def test_mismatch_needs_both_expressions():
    rep = ConformanceReport("x")
    with pytest.raises(ValueError):
        rep.add("c", "anchor", "mismatch", computed="1")


def test_documented_and_informational_do_not_fail():
    rep = ConformanceReport("x")
    rep.add("a", "anchor", "mismatch", computed="1", displayed="2", documented="known slip")
    rep.add("b", "anchor", "mismatch", computed="1", displayed="2", gate=False)
    assert rep.ok
    rep.add("c", "anchor", "mismatch", computed="1", displayed="2")
    assert not rep.ok and [e.check for e in rep.failures] == ["c"]


@pytest.mark.parametrize("name", ["circle", "example1", "example2", "example3", "quad_generic", "reference"])
def test_planar_fixtures_conform(name):
    rep = run_conformance(name)
    assert rep.ok, rep.text()
    data = rep.to_json()
    assert data["schema"] == SCHEMA_VERSION and data["fixture"] == name


def test_rossler_is_skipped():
    rep = run_conformance("rossler")
    assert rep.counts() == {"match": 0, "mismatch": 0, "skipped": 1}


def test_lorenz_report_isolates_the_second_killing_covectors():
    rep = run_conformance("lorenz")
    assert {e.check for e in rep.failures} == {"second Killing residual (P, -Q, 0)",
                                                "second Killing residual (P, 0, -R)"}
    swapped = [e for e in rep.entries if e.check.startswith("second Killing residual (Q")
               or e.check.startswith("second Killing residual (R")]
    assert swapped and all(e.status == "match" for e in swapped)
