"""Run configuration from TOML or JSON documents."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .curves import MAX_LENGTH, FlopCurveData
from .errors import DomainError, ParseError, UsageError
from .flop import GeometryConfig
from .serialize import parse_fraction
from .series import ExponentLattice

__all__ = ["COMMANDS", "FORMATS", "RunConfig", "parse_config", "parse_geometry", "load_document"]

COMMANDS = ("expand", "invariants", "flop", "blowup", "check")
FORMATS = ("json", "table", "csv")
VARIANTS = ("behrend", "euler", "fixed-support")
DEFAULT_ORDER = Fraction(4)


@dataclass(frozen=True)
class RunConfig:
    command: str = "check"
    geometry: GeometryConfig | None = None
    input_path: str | None = None
    output_path: str | None = None
    order: Fraction = DEFAULT_ORDER
    format: str = "json"
    seed: int = 0
    variant: str = "behrend"
    float_report: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format!r}")
        if self.variant not in VARIANTS:
            raise UsageError(f"unknown variant {self.variant!r}")
        if self.variant == "euler" and self.geometry is not None and self.geometry.curve.l != 1:
            raise UsageError("the euler variant needs l = 1")


def load_document(text: str) -> dict:
    """Parse JSON when the text looks like an object, TOML otherwise."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError("document", f"invalid JSON: {exc.msg} at line {exc.lineno}")
    else:
        try:
            doc = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ParseError("document", f"invalid TOML: {exc}")
    if not isinstance(doc, dict):
        raise ParseError("document", "top level must be a table/object")
    return doc


def _int(doc: dict, name: str, default=None, minimum=None) -> int | None:
    if name not in doc:
        return default
    v = doc[name]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(name, f"expected an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ParseError(name, f"must be at least {minimum}")
    return v


def parse_geometry(doc: dict, order=None) -> GeometryConfig:
    l = _int(doc, "l")
    if l is None:
        raise ParseError("l", "missing")
    if not 1 <= l <= MAX_LENGTH:
        raise ParseError("l", f"must lie in 1..{MAX_LENGTH}, got {l}")
    n = doc.get("n")
    if not isinstance(n, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in n):
        raise ParseError("n", "expected a list of integers")
    if len(n) != l:
        raise ParseError("n", f"expected {l} entries, got {len(n)}")
    if any(x < 0 for x in n):
        raise ParseError("n", "entries must be non-negative")
    width = _int(doc, "width", minimum=1)
    if width is not None:
        if l != 1:
            raise ParseError("width", "only defined for l = 1")
        if width != n[0]:
            raise ParseError("width", f"must equal n[0] = {n[0]}")
    p_dot_c = _int(doc, "p_dot_c", 0)
    h_dot_c = _int(doc, "h_dot_c", 1, minimum=1)
    lat_doc = doc.get("lattice", {})
    grading = doc.get("grading", {})
    if not isinstance(lat_doc, dict):
        raise ParseError("lattice", "expected a table")
    if not isinstance(grading, dict):
        raise ParseError("grading", "expected a table")
    d_q = _int(lat_doc, "q_denominator", 24, minimum=1)
    d_t = _int(lat_doc, "t_denominator", 2, minimum=1)
    w_q = parse_fraction(grading.get("w_q", 1), "grading.w_q")
    w_c = parse_fraction(grading.get("w_c", f"-1/{2 * l}"), "grading.w_c")
    if w_q <= 0:
        raise ParseError("grading.w_q", "must be positive")
    if order is None:
        raw = doc.get("order", doc.get("lambda", None))
        order = DEFAULT_ORDER if raw is None else parse_fraction(raw, "order")
    curve = FlopCurveData(l, tuple(n), width, h_dot_c, p_dot_c)
    lattice = ExponentLattice(1, d_t, d_q, w_q, (w_c,))
    try:
        return GeometryConfig(curve, lattice, 0, order, str(doc.get("divisor_label", "P")))
    except DomainError:
        raise
    except UsageError as exc:
        raise ParseError("geometry", str(exc))


def parse_config(text: str, **overrides) -> RunConfig:
    """Validated RunConfig; geometry keys may sit at top level or under [geometry]."""
    doc = load_document(text)
    geo_doc = doc.get("geometry", doc if "l" in doc else None)
    raw_order = doc.get("order", doc.get("lambda", None))
    order = DEFAULT_ORDER if raw_order is None else parse_fraction(raw_order, "order")
    if order < 0:
        raise ParseError("order", "must be non-negative")
    geometry = parse_geometry(geo_doc, order) if geo_doc is not None else None
    fields = {
        "command": doc.get("command", "check"),
        "geometry": geometry,
        "input_path": doc.get("input"),
        "output_path": doc.get("output"),
        "order": order,
        "format": doc.get("format", "json"),
        "seed": _int(doc, "seed", 0),
        "variant": doc.get("variant", "behrend"),
        "float_report": bool(doc.get("float_report", False)),
    }
    for name in ("command", "format", "variant"):
        if not isinstance(fields[name], str):
            raise ParseError(name, "expected a string")
    fields.update({k: v for k, v in overrides.items() if v is not None})
    if geometry is not None and fields["order"] != geometry.order:
        fields["geometry"] = replace(geometry, order=Fraction(fields["order"]))
    return RunConfig(**fields)
