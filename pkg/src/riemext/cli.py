"""``riemext`` command line.

Exit codes: 0 success, 1 a check failed (or a numeric run hit a singularity),
2 bad input (unreadable system file, unknown option, wrong dimension).
"""
from __future__ import annotations

import argparse
import io
import json
import os
import random
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import connection as cn
from .chern_simons import READINGS, TRACES, cs_density, lorenz_cs_check
from .conformance import run_conformance
from .extension import (curvature, numeric_invariants, riemann_extension, sample_points, scalar_invariants,
                        verify_ricci_closed_forms)
from .geodesic import IntegrationError, SingularityError, first_integral_monitor, integrate_base, integrate_extended
from .petrovsky_landis import (BOUNDARY_LABELS, PoleOrderError, boundary_conditions, cubic_ode, invariant_curve_check,
                               residue_conditions, substitute_family, verify_particular_integral)
from .symexpr import SymExprError, parse
from .sysfile import SpecError, SystemSpec, fixture_names, load_fixture, load_system

__all__ = ["main", "build_parser", "METHODS"]

METHODS = {
    "direct": cn.connection_direct,
    "log": cn.connection_log,
    "pl": cn.connection_pl,
    "spatial": cn.connection_spatial,
    "spatial-alt": cn.connection_spatial_alt,
    "lorenz-normalized": cn.connection_lorenz_normalized,
}
_DIMS = {"direct": (2,), "log": (2,), "pl": (2,), "spatial": (3,), "spatial-alt": (3,), "lorenz-normalized": (3,)}


class InputError(Exception):
    """Raised for anything that should exit with status 2."""


class CheckFailed(Exception):
    """Raised for anything that should exit with status 1."""


def _write(text: str, path: str | None) -> None:
    """To stdout, or atomically to ``path``."""
    if not text.endswith("\n"):
        text += "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".riemext-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, default=str)


def _spec(path: str) -> SystemSpec:
    try:
        return load_system(path)
    except OSError as exc:
        raise InputError(str(exc)) from exc


def _params(spec: SystemSpec, overrides: list[str] | None) -> dict[str, Fraction]:
    vals = dict(spec.parameter_values)
    for item in overrides or []:
        if "=" not in item:
            raise InputError(f"--param expects name=value, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        if k not in spec.parameters:
            raise InputError(f"unknown parameter {k!r}")
        try:
            vals[k] = Fraction(v)
        except (ValueError, ZeroDivisionError):
            raise InputError(f"bad value for {k}: {v!r}") from None
    return vals


def _default_method(spec: SystemSpec) -> str:
    return "direct" if spec.dim == 2 else "spatial"


def _connection(spec: SystemSpec, method: str | None, bind: dict | None = None):
    method = method or _default_method(spec)
    if spec.dim not in _DIMS[method]:
        raise InputError(f"method {method!r} needs a {_DIMS[method][0]}-dimensional system, "
                         f"{spec.name} has dimension {spec.dim}")
    vf = spec.vector_field()
    if bind:
        vf = vf.bind(bind)
    try:
        return METHODS[method](vf)
    except cn.ConnectionError_ as exc:
        raise CheckFailed(f"{method} connection failed: {exc}") from exc


def _floats(text: str, n: int | None, what: str) -> list[float]:
    try:
        vals = [float(Fraction(t.strip())) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise InputError(f"{what}: expected {n} numbers, got {len(vals)}")
    return vals


# -- subcommands -------------------------------------------------------------------------


def cmd_connection(a) -> int:
    spec = _spec(a.system)
    conn = _connection(spec, a.method)
    out = {"schema": 1, "fixture": spec.name, "method": a.method or _default_method(spec),
           "variables": list(conn.variables), "symbols": list(conn.symbols), "gamma": conn.to_json()}
    _write(_dump(out), a.out)
    return 0


def cmd_metric(a) -> int:
    spec = _spec(a.system)
    metric = riemann_extension(_connection(spec, a.method))
    out = {"schema": 1, "fixture": spec.name, "method": a.method or _default_method(spec), **metric.to_json(),
           "line_element": metric.line_element()}
    _write(_dump(out), a.out)
    return 0


def cmd_ricci(a) -> int:
    spec = _spec(a.system)
    metric = riemann_extension(_connection(spec, a.method))
    b = curvature(metric, budget=None)
    nonzero = {f"{i + 1},{j + 1}": str(v) for (i, j), v in b.ricci.items() if not v.is_zero()}
    out = {"schema": 1, "fixture": spec.name, "method": a.method or _default_method(spec),
           "coords": list(metric.coords), "ricci_flat": not nonzero, "ricci": nonzero}
    status = 0
    if a.closed_forms:
        if spec.dim != 2:
            raise InputError("--closed-forms applies to planar systems")
        rows = verify_ricci_closed_forms(spec.vector_field())
        out["closed_forms"] = rows
        if not all(r["match"] for r in rows if r["metric"] == "extension"):
            status = 1
    if a.expect_flat and nonzero:
        status = 1
    _write(_dump(out), a.out)
    return status


def cmd_invariants(a) -> int:
    spec = _spec(a.system)
    metric = riemann_extension(_connection(spec, a.method))
    b = curvature(metric, budget=None)
    lines = [f"invariants: {spec.name} ({a.method or _default_method(spec)}, {metric.dim}-dimensional extension)"]
    ok = True
    if spec.dim == 2 or a.symbolic:
        p, q = scalar_invariants(b, metric)
        for name, v in (("p", p), ("q", q)):
            lines.append(f"{name}: {v} (symbolic)")
            ok = ok and v.is_zero()
    else:
        vals = {k: float(v) for k, v in _params(spec, a.param).items()}
        exprs = [e for row in metric.inverse() for e in row] + list(b.riemann.values()) + list(b.ricci.values())
        pts = sample_points(exprs, metric.symbols, a.points, random.Random(a.seed), fixed=vals, min_den=1e-3)
        mp, mq = numeric_invariants(b, metric, pts)
        for name, m in (("p", mp), ("q", mq)):
            verdict = "0" if m < a.tol else "NONZERO"
            lines.append(f"{name}: {verdict} (numeric, max |{name}| = {m:.1e} over {a.points} pts)")
            ok = ok and m < a.tol
    _write("\n".join(lines), a.out)
    return 0 if ok else 1


def cmd_geodesic(a) -> int:
    spec = _spec(a.system)
    n = spec.dim
    vals = {k: float(v) for k, v in _params(spec, a.param).items()}
    conn = _connection(spec, a.method)
    missing = [s for s in conn.symbols if s not in conn.variables and s not in vals]
    if missing:
        raise InputError(f"numeric values needed for {missing} (use --param or 'values:' in the file)")
    init = _floats(a.init, None, "--init")
    if len(init) not in (2 * n, 4 * n):
        raise InputError(f"--init: give x and dx ({2 * n} numbers) or x, dx, psi, dpsi ({4 * n} numbers)")
    span = _floats(a.span, 2, "--span")
    s_eval = None
    if a.samples:
        import numpy as np
        s_eval = np.linspace(span[0], span[1], a.samples)
    try:
        if len(init) == 2 * n:
            traj = integrate_base(conn, (init[:n], init[n:]), tuple(span), tol=a.tol, params=vals, s_eval=s_eval,
                                  method=a.integrator)
        else:
            traj = integrate_extended(conn, init[:n], init[n:2 * n], init[2 * n:3 * n], init[3 * n:], tuple(span),
                                      tol=a.tol, params=vals, s_eval=s_eval, method=a.integrator)
    except SingularityError as exc:
        sys.stderr.write(f"riemext: singularity: {exc}\n")
        return 1
    except IntegrationError as exc:
        sys.stderr.write(f"riemext: integration failed: {exc}\n")
        return 1
    buf = io.StringIO()
    import csv
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(traj.header())
    for row in traj.rows():
        w.writerow([repr(float(v)) for v in row])
    _write(buf.getvalue(), a.out)
    if traj.psi is not None:
        nu, mu, dev = first_integral_monitor(traj)
        sys.stderr.write(f"first integral 2*psi.dx: slope {nu:.12g}, offset {mu:.12g}, max deviation {dev:.2e}\n")
    return 0


def _planar(spec: SystemSpec):
    if spec.dim != 2:
        raise InputError(f"{spec.name} is not planar")
    return spec.quadratic() if spec.kind == "quadratic" else spec.vector_field()


def cmd_pl(a) -> int:
    spec = _spec(a.system)
    system = _planar(spec)
    vf = system.vector_field() if spec.kind == "quadratic" else system
    params = tuple(s for s in vf.symbols if s not in vf.variables)
    want_c, want_r = a.conditions, a.residues
    if not (want_c or want_r or a.ode):
        want_c = want_r = True
    out: dict = {"schema": 1, "fixture": spec.name}
    lines = [f"pl: {spec.name}"]
    try:
        ode = cubic_ode(vf)
    except cn.DegenerateInputError as exc:
        ode = None
        out["degenerate"] = str(exc)
        lines.append(f"  cubic ODE degenerate: {exc}")
    if a.ode and ode is not None:
        out["ode"] = {k: str(v) for k, v in zip(("lead", "n3", "n2", "n1", "n0"), (ode.lead, *ode.numerators))}
        lines.append("cubic ODE: " + " ".join(f"{k}={v}" for k, v in out["ode"].items()))
    if want_c and ode is not None:
        s26, s27 = substitute_family(ode)
        conds = boundary_conditions(s26, s27, params)
        out["conditions"] = {k: str(conds[k]) for k in BOUNDARY_LABELS}
        lines += [f"  {k}: {conds[k]}" for k in BOUNDARY_LABELS]
    if want_r:
        try:
            res = residue_conditions(system)
        except PoleOrderError as exc:
            sys.stderr.write(f"riemext: {exc}\n")
            return 1
        out["residues"] = {k: str(v) for k, v in res.items()}
        lines += [f"  residue {k}: {v}" for k, v in res.items()]
    _write(_dump(out) if a.json else "\n".join(lines), a.out)
    return 0


def _expr(text: str, spec: SystemSpec, vf):
    params = tuple(s for s in vf.symbols if s not in vf.variables)
    try:
        return parse(text, vf.variables, params)
    except SymExprError as exc:
        raise InputError(f"cannot parse {text!r}: {exc}") from exc


def cmd_verify_integral(a) -> int:
    spec = _spec(a.system)
    vf = _planar(spec)
    vf = vf.vector_field() if spec.kind == "quadratic" else vf
    m, n = _expr(a.m, spec, vf), _expr(a.n, spec, vf)
    if n.is_zero():
        raise InputError("n is identically zero")
    curve = _expr(a.on_curve, spec, vf) if a.on_curve else None
    ok = verify_particular_integral(cubic_ode(vf), m, n, on_curve=curve)
    where = f" on {a.on_curve} = 0" if curve is not None else " identically"
    _write(f"y' = ({a.m})/({a.n}): {'solves' if ok else 'does not solve'} the cubic ODE{where}", a.out)
    return 0 if ok else 1


def cmd_curve_check(a) -> int:
    spec = _spec(a.system)
    vf = spec.vector_field()
    F = _expr(a.curve, spec, vf)
    if not F.is_polynomial():
        raise InputError("the curve must be a polynomial")
    ok, lam = invariant_curve_check(F, vf)
    _write(f"{a.curve} = 0: " + (f"invariant, cofactor {lam}" if ok else "not invariant"), a.out)
    return 0 if ok else 1


def cmd_chern_simons(a) -> int:
    if a.check:
        rep = lorenz_cs_check(a.reading, a.trace, n_draws=a.draws, seed=a.seed)
        lines = [f"chern-simons: lorenz ({a.reading} reading, {a.trace} trace)"]
        for k, v in sorted(rep["blocks"].items(), reverse=True):
            lines.append(f"  z^{k} block: {'match' if v['match'] else 'MISMATCH'}")
        lines.append(f"  x=y reduction: symbolic {'match' if rep['diagonal_symbolic'] else 'MISMATCH'}, "
                     f"max rel error {rep['diagonal_max_rel']:.1e} over {a.draws} draws")
        zero = all(st["pipeline"] == 0 for st in rep["stationary"])
        lines.append(f"  stationary points: {'zero' if zero and rep['stationary_symbolic'] else 'NONZERO'}")
        lines.append("  " + ("OK" if rep["ok"] else "FAILED"))
        _write("\n".join(lines), a.out)
        return 0 if rep["ok"] else 1
    spec = _spec(a.system or "lorenz.sys")
    if spec.dim != 3:
        raise InputError("the Chern–Simons density needs a 3-dimensional system")
    method = a.method or ("lorenz-normalized" if spec.name == "lorenz" else "spatial")
    dens = cs_density(_connection(spec, method), a.reading, a.trace)
    out = {"schema": 1, "fixture": spec.name, "method": method, "reading": a.reading, "trace": a.trace,
           "density": str(dens.value)}
    _write(_dump(out), a.out)
    return 0


def _conformance_one(target: str) -> tuple[str, bool, str, dict]:
    spec = load_fixture(target) if target in fixture_names() else load_system(target)
    rep = run_conformance(spec)
    return spec.name, rep.ok, rep.text(), rep.to_json()


def cmd_conformance(a) -> int:
    targets = a.fixtures or (fixture_names() if a.all else [])
    if not targets:
        raise InputError("name a fixture or system file, or pass --all")
    for t in targets:
        if t not in fixture_names() and not os.path.exists(t):
            raise InputError(f"unknown fixture {t!r}; bundled: {', '.join(fixture_names())}")
    if a.jobs > 1 and len(targets) > 1:
        with ProcessPoolExecutor(max_workers=a.jobs) as ex:
            results = list(ex.map(_conformance_one, targets))
    else:
        results = [_conformance_one(t) for t in targets]
    if a.json:
        body = _dump(results[0][3] if len(results) == 1 else {"schema": 1, "reports": [r[3] for r in results]})
    else:
        body = "\n".join(r[2] for r in results)
    _write(body, a.out)
    return 0 if all(r[1] for r in results) else 1


# -- parser ------------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="riemext", description="Riemann extensions of polynomial ODE systems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_, system=True):
        sp = sub.add_parser(name, help=help_)
        if system:
            sp.add_argument("system", help="system file, or the name of a bundled one (e.g. circle.sys)")
        sp.add_argument("-o", "--out", help="write to this file instead of stdout")
        sp.set_defaults(fn=fn)
        return sp

    def method(sp, default=None):
        sp.add_argument("--method", choices=sorted(METHODS), default=default,
                        help="connection construction (default: direct in 2D, spatial in 3D)")

    method(add("connection", cmd_connection, "affine connection as JSON"))
    method(add("metric", cmd_metric, "Riemann extension metric as JSON"))
    sp = add("ricci", cmd_ricci, "Ricci tensor of the extension")
    method(sp)
    sp.add_argument("--closed-forms", action="store_true", help="compare with the closed-form R_11, R_12, R_22")
    sp.add_argument("--expect-flat", action="store_true", help="exit 1 unless the Ricci tensor vanishes")
    sp = add("invariants", cmd_invariants, "scalar invariants R_ab R^ab and R_abcd R^abcd")
    method(sp)
    sp.add_argument("--points", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--symbolic", action="store_true", help="exact contraction also in 3D")
    sp.add_argument("--param", action="append", metavar="NAME=VALUE")
    sp = add("geodesic", cmd_geodesic, "integrate a geodesic, CSV out")
    method(sp)
    sp.add_argument("--init", required=True, help="x..., dx... (base) or x..., dx..., psi..., dpsi... (extension)")
    sp.add_argument("--span", default="0,10", help="s0,s1")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--samples", type=int, default=201, help="output grid size (0: integrator steps)")
    sp.add_argument("--integrator", choices=("RK45", "rk4"), default="RK45")
    sp.add_argument("--param", action="append", metavar="NAME=VALUE")
    sp = add("pl", cmd_pl, "Petrovsky–Landis conditions on the family parameter C")
    sp.add_argument("--conditions", action="store_true", help="boundary-substitution conditions")
    sp.add_argument("--residues", action="store_true", help="residue conditions at x = 0, 1, C")
    sp.add_argument("--ode", action="store_true", help="also print the cubic second-order ODE")
    sp.add_argument("--json", action="store_true")
    sp = add("verify-integral", cmd_verify_integral, "does y' = m/n solve the cubic ODE")
    sp.add_argument("--m", required=True)
    sp.add_argument("--n", required=True)
    sp.add_argument("--on-curve", help="only require the residual to vanish on this curve")
    sp = add("curve-check", cmd_curve_check, "is F = 0 an invariant algebraic curve")
    sp.add_argument("--curve", required=True)
    sp = sub.add_parser("chern-simons", help="Chern–Simons density of a 3D connection")
    sp.add_argument("system", nargs="?", help="system file (default: bundled lorenz.sys)")
    sp.add_argument("-o", "--out")
    method(sp)
    sp.add_argument("--reading", choices=READINGS, default="covariant")
    sp.add_argument("--trace", choices=TRACES, default="extension")
    sp.add_argument("--check", action="store_true", help="compare the Lorenz density with its closed forms")
    sp.add_argument("--draws", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_chern_simons)
    sp = sub.add_parser("conformance", help="run every closed-form check for fixtures")
    sp.add_argument("fixtures", nargs="*", help="fixture names or system files")
    sp.add_argument("--all", action="store_true")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("-o", "--out")
    sp.set_defaults(fn=cmd_conformance)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args)
    except InputError as exc:
        sys.stderr.write(f"riemext: {exc}\n")
        return 2
    except SpecError as exc:
        sys.stderr.write(f"riemext: {exc}\n")
        return 2
    except CheckFailed as exc:
        sys.stderr.write(f"riemext: {exc}\n")
        return 1
    except SingularityError as exc:
        sys.stderr.write(f"riemext: singularity: {exc}\n")
        return 1
    except cn.ConnectionError_ as exc:
        sys.stderr.write(f"riemext: {exc}\n")
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
