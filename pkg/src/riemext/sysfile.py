"""System-definition files.

Line-oriented text, ``#`` starts a comment::

    name: lorenz
    variables: x, y, z
    parameters: sigma, r, b
    x' = sigma*(y - x)
    y' = r*x - y - x*z
    z' = x*y - b*z
    values: sigma = 10, r = 28, b = 8/3

A planar quadratic system ``dy/dx = (a0 + ... + a22*y^2)/(b0 + ... + b22*y^2)``
is written with ``kind: quadratic`` and optional ``a12 = 3`` style lines;
coefficients not given stay symbolic.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .connection import VectorField
from .petrovsky_landis import QUAD_A, QUAD_B, QuadraticSystem
from .symexpr import parse

__all__ = ["SpecError", "SystemSpec", "parse_system", "load_system", "load_fixture", "fixture_names"]

_NAME = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


class SpecError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


@dataclass
class SystemSpec:
    name: str
    variables: tuple[str, ...] = ()
    parameters: tuple[str, ...] = ()
    components: tuple[str, ...] = ()
    parameter_values: dict[str, Fraction] = field(default_factory=dict)
    kind: str = "field"
    coefficients: dict[str, str] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return 2 if self.kind == "quadratic" else len(self.variables)

    def quadratic(self) -> QuadraticSystem:
        if self.kind != "quadratic":
            raise SpecError(f"{self.name} is not a quadratic system")
        return QuadraticSystem(self.coefficients)

    def vector_field(self, bind: bool = False) -> VectorField:
        if self.kind == "quadratic":
            vf = self.quadratic().vector_field()
            vf.name = self.name
        else:
            vf = VectorField(list(self.components), self.variables, self.parameters, name=self.name)
        if bind and self.parameter_values:
            vf = vf.bind(self.parameter_values)
        return vf

    def dumps(self) -> str:
        lines = [f"name: {self.name}"]
        if self.kind != "field":
            lines.append(f"kind: {self.kind}")
        if self.variables:
            lines.append("variables: " + ", ".join(self.variables))
        if self.parameters:
            lines.append("parameters: " + ", ".join(self.parameters))
        for v, c in zip(self.variables, self.components):
            lines.append(f"{v}' = {c}")
        for k, c in self.coefficients.items():
            lines.append(f"{k} = {c}")
        if self.parameter_values:
            lines.append("values: " + ", ".join(f"{k} = {v}" for k, v in self.parameter_values.items()))
        return "\n".join(lines) + "\n"


def _names(text: str, lineno: int) -> tuple[str, ...]:
    out = tuple(s.strip() for s in text.split(",") if s.strip())
    for s in out:
        if not _NAME.match(s):
            raise SpecError(f"invalid symbol name {s!r}", lineno)
    if len(set(out)) != len(out):
        raise SpecError("duplicate symbol", lineno)
    return out


def parse_system(text: str) -> SystemSpec:
    header: dict[str, str] = {}
    comps: dict[str, str] = {}
    coeffs: dict[str, str] = {}
    values: dict[str, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"^([A-Za-z_][A-Za-z_0-9]*)'\s*=\s*(.+)$", line)
        if m:
            if m.group(1) in comps:
                raise SpecError(f"component {m.group(1)}' given twice", lineno)
            comps[m.group(1)] = m.group(2).strip()
            continue
        m = re.match(r"^([A-Za-z_]+)\s*:\s*(.*)$", line)
        if m:
            key, val = m.group(1), m.group(2).strip()
            if key == "values":
                for item in val.split(","):
                    if not item.strip():
                        continue
                    if "=" not in item:
                        raise SpecError(f"expected name = number in {item!r}", lineno)
                    k, v = (s.strip() for s in item.split("=", 1))
                    try:
                        values[k] = Fraction(v)
                    except (ValueError, ZeroDivisionError):
                        raise SpecError(f"bad numeric value {v!r}", lineno) from None
            elif key in ("name", "kind", "variables", "parameters", "dim"):
                header[key] = val
            else:
                raise SpecError(f"unknown key {key!r}", lineno)
            continue
        m = re.match(r"^([A-Za-z_][A-Za-z_0-9]*)\s*=\s*(.+)$", line)
        if m and m.group(1) in QUAD_A + QUAD_B:
            coeffs[m.group(1)] = m.group(2).strip()
            continue
        raise SpecError(f"cannot parse {raw.strip()!r}", lineno)

    if "name" not in header:
        raise SpecError("missing 'name:'")
    kind = header.get("kind", "field")
    params = _names(header.get("parameters", ""), None)
    if kind == "quadratic":
        if comps:
            raise SpecError("a quadratic system takes coefficients, not components")
        spec = SystemSpec(header["name"], (), params, (), values, kind, coeffs)
        try:
            spec.vector_field()
        except Exception as exc:
            raise SpecError(str(exc)) from exc
        return spec
    if kind != "field":
        raise SpecError(f"unknown kind {kind!r}")
    if coeffs:
        raise SpecError("quadratic coefficients given without 'kind: quadratic'")
    variables = _names(header.get("variables", ""), None)
    if len(variables) not in (2, 3):
        raise SpecError("need 2 or 3 variables")
    if "dim" in header and int(header["dim"]) != len(variables):
        raise SpecError("dim does not match the number of variables")
    missing = [v for v in variables if v not in comps]
    extra = [v for v in comps if v not in variables]
    if missing or extra:
        raise SpecError(f"components must be given for exactly {list(variables)}")
    components = tuple(comps[v] for v in variables)
    for v, c in zip(variables, components):
        try:
            parse(c, variables, params)
        except Exception as exc:
            raise SpecError(f"{v}': {exc}") from exc
    unknown = set(values) - set(params)
    if unknown:
        raise SpecError(f"values for undeclared parameters {sorted(unknown)}")
    return SystemSpec(header["name"], variables, params, components, values)


def load_system(path) -> SystemSpec:
    p = Path(path)
    if not p.exists():
        bundled = resources.files("riemext") / "data" / p.name
        if bundled.is_file():
            return parse_system(bundled.read_text())
        raise SpecError(f"no such system file: {path}")
    return parse_system(p.read_text())


def fixture_names() -> list[str]:
    return sorted(f.name[:-4] for f in (resources.files("riemext") / "data").iterdir() if f.name.endswith(".sys"))


def load_fixture(name: str) -> SystemSpec:
    return parse_system((resources.files("riemext") / "data" / f"{name}.sys").read_text())
