"""Checks of pipeline output against transcribed closed forms, collected in a report."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import closed_forms as cf
from .chern_simons import lorenz_cs_check
from .connection import (Covector, VectorField, connection_direct, connection_lorenz_normalized,
                         connection_pl, connection_spatial, connection_spatial_alt, lorenz_normalization,
                         projectivize, trace_conditions)
from .extension import curvature, riemann_extension, second_killing_residual, verify_ricci_closed_forms
from .geodesic import decouple_fiber, first_integral_monitor, integrate_base, integrate_fiber
from .petrovsky_landis import (BOUNDARY_LABELS, QuadraticSystem, _recombine, boundary_conditions, cubic_ode,
                               invariant_curve_check, proportional, residue_conditions, substitute_family,
                               verify_particular_integral)
from .symexpr import RationalExpr, parse
from .sysfile import SystemSpec, load_fixture

__all__ = ["Entry", "ConformanceReport", "run_conformance", "GROUPS", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1


@dataclass
class Entry:
    check: str
    anchor: str
    status: str  # match | mismatch | skipped
    detail: str = ""
    computed: str | None = None
    displayed: str | None = None
    documented: str | None = None  # known transcription issue explaining a mismatch
    gate: bool = True


@dataclass
class ConformanceReport:
    fixture: str
    entries: list[Entry] = field(default_factory=list)

    def add(self, *args, **kw) -> Entry:
        e = Entry(*args, **kw)
        if e.status == "mismatch" and (e.computed is None or e.displayed is None):
            raise ValueError(f"mismatch entry {e.check} needs both expressions")
        self.entries.append(e)
        return e

    def counts(self) -> dict[str, int]:
        out = {"match": 0, "mismatch": 0, "skipped": 0}
        for e in self.entries:
            out[e.status] += 1
        return out

    @property
    def failures(self) -> list[Entry]:
        return [e for e in self.entries if e.gate and e.status == "mismatch" and not e.documented]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"schema": SCHEMA_VERSION, "fixture": self.fixture, "counts": self.counts(), "ok": self.ok,
                "entries": [asdict(e) for e in self.entries]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False)

    def text(self) -> str:
        lines = [f"conformance: {self.fixture}"]
        for e in self.entries:
            flag = e.status.upper()
            if e.status == "mismatch" and e.documented:
                flag += " (documented)"
            elif not e.gate:
                flag += " (informational)"
            lines.append(f"  [{flag}] {e.check} -- {e.anchor}" + (f": {e.detail}" if e.detail else ""))
            if e.status == "mismatch":
                lines.append(f"      computed:  {_short(e.computed)}")
                lines.append(f"      displayed: {_short(e.displayed)}")
                if e.documented:
                    lines.append(f"      note:      {e.documented}")
        c = self.counts()
        lines.append(f"  {c['match']} match, {c['mismatch']} mismatch, {c['skipped']} skipped; "
                     f"{'OK' if self.ok else 'FAILED'}")
        return "\n".join(lines)


def _short(text: str | None, limit: int = 400) -> str | None:
    if text is None or len(text) <= limit:
        return text
    return text[:limit] + f" ... ({len(text)} chars)"


def _cmp(rep: ConformanceReport, check: str, anchor: str, computed: RationalExpr, displayed: RationalExpr, **kw):
    syms = computed.symbols
    d = displayed.with_symbols(tuple(dict.fromkeys(syms + displayed.symbols)))
    ok = (computed.with_symbols(d.symbols) - d).is_zero()
    if ok:
        return rep.add(check, anchor, "match", **kw)
    return rep.add(check, anchor, "mismatch", computed=str(computed), displayed=str(displayed), **kw)


def _label(k, i, j):
    return f"G^{k + 1}_{i + 1}{j + 1}"


# ---------------------------------------------------------------------------------


def _circle(rep: ConformanceReport, vf: VectorField):
    conn = connection_direct(vf)
    y, x = vf.var("y"), vf.var("x")
    expected = {(0, 0, 1): -1 / (2 * y), (1, 0, 1): -1 / (2 * x)}
    for key, e in conn.items():
        want = expected.get(key, vf.const(0))
        _cmp(rep, f"direct {_label(*key)}", "circle second-order system", e, want)
    # decoupled fiber equations along a circle trajectory
    s0 = 0.3
    base = integrate_base(conn, ([math.cos(s0), math.sin(s0)], [-math.sin(s0), math.cos(s0)]), (0.0, 1.0))
    fib = integrate_fiber(conn, base, ([0.7, -0.2], [0.1, 0.4]))
    nu, mu, _ = first_integral_monitor(fib)
    dec = decouple_fiber(conn, fib, nu, mu)
    X, Y = fib.x[:, 0], fib.x[:, 1]
    for var, keys, fn in (("z", ("M", "N", "Fz"), cf.circle_z_equation), ("t", ("U", "V", "Ft"), cf.circle_t_equation)):
        want = fn(X, Y, nu)
        err = max(float(np.max(np.abs(dec[k] - w))) for k, w in zip(keys, want))
        status = "match" if err < 1e-8 else "mismatch"
        rep.add(f"decoupled {var}-equation", "circle fiber equations", status,
                detail=f"max coefficient deviation {err:.2e} along s in [0, 1]; forcing uses the slope of 2Ψ·ẋ",
                computed=f"max dev {err:.3e}" if status == "mismatch" else None,
                displayed="0" if status == "mismatch" else None)


def _ricci(rep: ConformanceReport, vf: VectorField):
    for row in verify_ricci_closed_forms(vf):
        literal = row["metric"] != "extension"
        check = f"Ricci {row['component']} ({row['metric']} metric)"
        status = "match" if row["match"] else "mismatch"
        rep.add(check, "Ricci components of the four-dimensional metric", status,
                computed=None if row["match"] else str(row["computed"]),
                displayed=None if row["match"] else str(row["formula"]),
                detail="literal reading of the printed dx dy coefficient" if literal else "",
                gate=not literal)


def _example(rep: ConformanceReport, name: str, vf: VectorField):
    ode = cubic_ode(vf)
    shown = {"example1": cf.example1_ode_coefficients, "example2": cf.example2_ode_coefficients,
             "example3": cf.example3_ode_coefficients}[name]()
    ours = (ode.lead, *ode.numerators)
    syms = tuple(dict.fromkeys(ode.symbols + shown[0].symbols))
    ratio = ours[0].with_symbols(syms) / shown[0].with_symbols(syms)
    for idx, (a, b) in enumerate(zip(ours, shown)):
        lab = ("y''", "y'^3", "y'^2", "y'", "1")[idx]
        _cmp(rep, f"cubic ODE coefficient of {lab}", "cubic ODE of the example", a.with_symbols(syms),
             ratio * b.with_symbols(syms), detail=f"common factor {ratio}")
    for m, n in cf.EXAMPLE_INTEGRALS.get(name, []):
        mm, nn = parse(m, ("x", "y"), ("a",)), parse(n, ("x", "y"), ("a",))
        ok = verify_particular_integral(ode, mm, nn)
        doc = None
        if not ok and name in cf.EXAMPLE_CURVES:
            F = parse(cf.EXAMPLE_CURVES[name], ("x", "y"), ("a",))
            if verify_particular_integral(ode, mm, nn, on_curve=F):
                doc = f"implicit derivative of {cf.EXAMPLE_CURVES[name]} = 0; holds on that curve only"
        rep.add(f"particular integral y' = ({m})/({n})", "compatible first-order integrals",
                "match" if ok else "mismatch", computed=None if ok else "nonzero residual",
                displayed=None if ok else "0", documented=doc)
    if name in cf.EXAMPLE_CURVES:
        F = parse(cf.EXAMPLE_CURVES[name], ("x", "y"), ("a",))
        ok, lam = invariant_curve_check(F, vf)
        rep.add(f"invariant curve {cf.EXAMPLE_CURVES[name]}", "invariant algebraic curve",
                "match" if ok else "mismatch", detail=f"cofactor {lam}" if ok else "",
                computed=None if ok else "not divisible", displayed=None if ok else "divisible")


def _quadratic(rep: ConformanceReport, qs: QuadraticSystem):
    vf = qs.vector_field()
    conn = connection_pl(vf)
    for key, want in cf.pl_pi1_closed_forms(vf).items():
        _cmp(rep, f"PL {_label(*key)}", "Petrovsky–Landis connection, first row", conn[key], want)
    ycoef = cf.pl_geodesic_y_coefficients(vf)
    for (i, j), want in ycoef.items():
        got = conn[1, i, j] * (2 if i != j else 1)
        _cmp(rep, f"PL y-equation coefficient ({i + 1},{j + 1})", "Petrovsky–Landis paths, second row", got, want)
    ode = cubic_ode(vf)
    for lab, a, b in zip(("lead", "y'^3", "y'^2", "y'", "1"), (ode.lead, *ode.numerators), cf.cubic_ode_closed_form(vf)):
        _cmp(rep, f"cubic ODE {lab}", "cubic ODE in y'", a, b)

    s26, s27 = substitute_family(ode)
    rep.add("two-variable family polynomial degree", "family substitution", "match" if s26.degree == 5 else "mismatch",
            detail=f"realized degree {s26.degree}", computed=str(s26.degree), displayed="5")
    lit, fixed = cf.family_xy_coefficients(), cf.family_xy_coefficients(restore_beta_factor=True)
    for k in sorted(lit, reverse=True):
        name = cf.FAMILY_XY_NAMES[k]
        got = s26[k]
        if (got - lit[k].with_symbols(got.symbols)).is_zero():
            rep.add(f"family coefficient {name}(x,y)", "family substitution, coefficients in x and y", "match")
        else:
            restored = (got - fixed[k].with_symbols(got.symbols)).is_zero()
            rep.add(f"family coefficient {name}(x,y)", "family substitution, coefficients in x and y", "mismatch",
                    computed=str(got), displayed=str(lit[k]),
                    documented=("printed bracket ((...)x - a2) lost a factor y; with it restored the coefficient "
                                "matches exactly") if restored else None)
    rep.add("one-variable family polynomial degree", "family substitution", "match" if s27.degree == 6 else "mismatch",
            detail=f"realized degree {s27.degree}", computed=str(s27.degree), displayed="6")
    shown27 = cf.family_x_coefficients()
    factors = {}
    for k in sorted(shown27, reverse=True):
        factors[k] = proportional(s27[k], shown27[k].with_symbols(s27[k].symbols))
    uniform = len(set(factors.values())) == 1 and None not in factors.values()
    for k in sorted(shown27, reverse=True):
        name = cf.FAMILY_X_NAMES[k]
        f = factors[k]
        if f == 1:
            rep.add(f"family coefficient {name}(x)", "family substitution, coefficients in x", "match")
        elif uniform:
            rep.add(f"family coefficient {name}(x)", "family substitution, coefficients in x", "match",
                    detail=f"equal up to the overall normalization factor {f} of the whole polynomial")
        else:
            rep.add(f"family coefficient {name}(x)", "family substitution, coefficients in x", "mismatch",
                    computed=str(s27[k]), displayed=str(shown27[k]))

    bc = boundary_conditions(s26, s27, qs.parameters)
    shown_bc = cf.boundary_condition_closed_forms()
    for lab in BOUNDARY_LABELS:
        got = _recombine(bc[lab])
        f = proportional(got, shown_bc[lab])
        if f is None:
            rep.add(f"boundary condition {lab}", "conditions on C", "mismatch", computed=str(bc[lab]),
                    displayed=str(shown_bc[lab]))
        else:
            rep.add(f"boundary condition {lab}", "conditions on C", "match",
                    detail="" if f == 1 else f"equal up to factor {f}")
    rc = residue_conditions(qs)
    for rl, bl in (("x=0", "x=0"), ("x=1", "x=1"), ("x=C", "x=C,y=1-C")):
        f = proportional(_recombine(rc[rl]), _recombine(bc[bl]))
        rep.add(f"residue at {rl} vs boundary {bl}", "residue conditions", "match" if f is not None else "mismatch",
                detail="" if f in (None, 1) else f"factor {f}",
                computed=None if f is not None else str(rc[rl]), displayed=None if f is not None else str(bc[bl]))


def _reference(rep: ConformanceReport, qs: QuadraticSystem):
    from .petrovsky_landis import generic_quadratic_ode
    _, ode = generic_quadratic_ode()
    spec = ode.specialize({k: int(v) for k, v in qs.values.items()})
    s26, s27 = substitute_family(spec)
    ok = s26.is_zero() and s27.is_zero()
    rep.add("family solves the reference equation", "general solution y = C(x-1)/(x-C)", "match" if ok else "mismatch",
            computed=None if ok else str(s26), displayed=None if ok else "0")
    rc = residue_conditions(qs)
    ok = all(v.is_zero() for v in rc.values())
    rep.add("reference residues vanish", "residue conditions", "match" if ok else "mismatch",
            computed=None if ok else str({k: str(v) for k, v in rc.items()}), displayed=None if ok else "0")


def _generic3(name: str = "generic3") -> VectorField:
    mons = ("1", "x", "y", "z", "x^2", "x*y", "x*z", "y^2", "y*z", "z^2")
    comps, params = [], []
    for f in ("p", "q", "r"):
        names = [f"{f}{i}" for i in range(len(mons))]
        params += names
        comps.append(" + ".join(f"{c}*{m}" for c, m in zip(names, mons)))
    return VectorField(comps, ("x", "y", "z"), params, name=name)


def _spatial(rep: ConformanceReport):
    vf = _generic3()
    conn = connection_spatial(vf)
    for key, want in cf.spatial_gamma_closed_forms(vf).items():
        _cmp(rep, f"spatial {_label(*key)}", "spatial connection, listed entries", conn[key], want)
    alt = connection_spatial_alt(vf)
    for (i, j), want in cf.spatial_alt_x_equation(vf).items():
        got = alt[0, i, j] * (2 if i != j else 1)
        e = _cmp(rep, f"alternative spatial x-equation coefficient ({i + 1},{j + 1})",
                 "second spatial connection, x-equation", got, want)
        if e.status == "mismatch" and (i, j) == (2, 2):
            # candidate reading: P_z z in place of the printed P_y y
            P = vf.components[0]
            x, y, z = (vf.var(v) for v in vf.variables)
            Q, R = vf.components[1], vf.components[2]
            D = x * P + y * Q + z * R
            if (got + (P.diff("z") * z - P) / D).is_zero():
                e.documented = "printed (P_y y - P) should read (P_z z - P); the corrected form matches exactly"


def _lorenz(rep: ConformanceReport, vf: VectorField, with_cs: bool = True):
    conn = connection_lorenz_normalized(vf)
    for key, want in cf.lorenz_gamma_closed_forms(vf).items():
        _cmp(rep, f"normalized {_label(*key)}", "normalized Lorenz connection", conn[key], want)
    for idx, t in enumerate(trace_conditions(conn)):
        _cmp(rep, f"trace condition {idx + 1}", "trace conditions", t, vf.const(0))
    for idx, (row, rhs) in enumerate(lorenz_normalization()):
        acc = vf.const(0)
        for key, c in row.items():
            acc = acc + conn[key] * c
        _cmp(rep, f"normalization condition {idx + 1}", "gauge conditions", acc, vf.const(rhs))
    metric = riemann_extension(conn)
    bundle = curvature(metric)
    _cmp(rep, "Ricci R_zz", "Ricci component R_zz", bundle.Ric(2, 2), cf.lorenz_rzz_closed_form())
    P, Q, R = vf.components
    z0 = vf.const(0)
    for lab, comps, gate in (("(P, -Q, 0)", [P, -Q, z0], True), ("(P, 0, -R)", [P, z0, -R], True),
                             ("(Q, -P, 0)", [Q, -P, z0], False), ("(R, 0, -P)", [R, z0, -P], False)):
        res = second_killing_residual(Covector(comps), bundle, metric)
        nz = [k for k, v in res.items() if not v.is_zero()]
        detail = "" if gate else "component-swapped form of the stated covector"
        if not nz:
            rep.add(f"second Killing residual {lab}", "second-order Killing equations", "match", detail=detail,
                    gate=gate)
        else:
            k = nz[0]
            rep.add(f"second Killing residual {lab}", "second-order Killing equations", "mismatch",
                    detail=f"{len(nz)} nonzero components; first at (i,j,k)={tuple(i + 1 for i in k)}",
                    computed=str(res[k]), displayed="0", gate=gate)
    if with_cs:
        r = lorenz_cs_check()
        for k, blk in sorted(r["blocks"].items(), reverse=True):
            rep.add(f"Chern–Simons z^{k} block", "prefactored Chern–Simons density",
                    "match" if blk["match"] else "mismatch", detail="covariant reading, extension trace",
                    computed=None if blk["match"] else str(blk["computed"]),
                    displayed=None if blk["match"] else str(blk["displayed"]))
        rep.add("Chern–Simons x=y reduction", "x=y reduction", "match" if r["diagonal_symbolic"] else "mismatch",
                detail=f"max rel error {r['diagonal_max_rel']:.1e} over {len(r['diagonal_samples'])} draws",
                computed=None if r["diagonal_symbolic"] else str(r["diagonal_ratio"]),
                displayed=None if r["diagonal_symbolic"] else "1")
        partial = lorenz_cs_check("partial", "base", n_draws=5)
        rep.add("Chern–Simons partial-derivative reading", "x=y reduction",
                "match" if partial["diagonal_symbolic"] else "mismatch",
                detail="informational: ratio to the displayed form is " + str(partial["diagonal_ratio"]),
                computed=None if partial["diagonal_symbolic"] else f"{partial['diagonal_ratio']} x displayed",
                displayed=None if partial["diagonal_symbolic"] else "displayed", gate=False)


def _projective(rep: ConformanceReport):
    (p, q), params, shown = cf.projectivization_example()
    vf = VectorField([p, q], ("x", "y"), params)
    cov = projectivize(vf, "z")
    for lab, got, want in zip(("dx", "dy", "dz"), cov.components, shown):
        _cmp(rep, f"Pfaff coefficient of {lab}", "projectivized quadratic system", got, want)


GROUPS = {
    "circle": lambda rep, spec: (_circle(rep, spec.vector_field()), _ricci(rep, spec.vector_field())),
    "example1": lambda rep, spec: (_ricci(rep, spec.vector_field()), _example(rep, "example1", spec.vector_field())),
    "example2": lambda rep, spec: (_ricci(rep, spec.vector_field()), _example(rep, "example2", spec.vector_field())),
    "example3": lambda rep, spec: (_ricci(rep, spec.vector_field()), _example(rep, "example3", spec.vector_field())),
    "quad_generic": lambda rep, spec: _quadratic(rep, spec.quadratic()),
    "reference": lambda rep, spec: _reference(rep, spec.quadratic()),
    "lorenz": lambda rep, spec: (_lorenz(rep, spec.vector_field()), _spatial(rep), _projective(rep)),
}


def run_conformance(spec: SystemSpec | str) -> ConformanceReport:
    if isinstance(spec, str):
        spec = load_fixture(spec)
    rep = ConformanceReport(spec.name)
    fn = GROUPS.get(spec.name)
    if fn is None:
        rep.add("fixture checks", "none", "skipped", detail=f"no transcribed closed forms for {spec.name!r}")
        return rep
    fn(rep, spec)
    return rep
