"""Exact JSON, CSV and table renderings of series.

Rationals are written as "p/q" strings; the only floats ever emitted
are in the optional approximation column.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from math import lcm

from .cyclotomic import cyc_make
from .errors import ParseError
from .series import INF, ExponentLattice, FormalSeries

__all__ = [
    "fraction_str",
    "parse_fraction",
    "series_to_dict",
    "series_from_dict",
    "dumps",
    "series_to_json",
    "series_from_json",
    "series_rows",
    "render_rows",
]


def fraction_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(text, field: str = "value") -> Fraction:
    if isinstance(text, bool):
        raise ParseError(field, "expected a rational, got a boolean")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise ParseError(field, "floating-point literals are not exact; write a \"p/q\" string")
    if not isinstance(text, str):
        raise ParseError(field, f"expected a rational string, got {type(text).__name__}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(field, f"not a rational: {text!r}")


def _bound_str(v) -> str:
    return "inf" if v == INF else fraction_str(v)


def series_to_dict(a: FormalSeries, divisor_label: str | None = None) -> dict:
    lat = a.lattice
    order = 1
    for c in a.terms.values():
        order = lcm(order, c.order)
    items = sorted(a.terms.items(), key=lambda kv: (lat.gint(kv[0]), kv[0]))
    doc = {
        "q_denominator": lat.q_denominator,
        "t_denominator": lat.t_denominator,
        "lattice_rank": lat.rank,
        "cyclotomic_order": order,
        "grading_weights": {"q": fraction_str(lat.w_q), "t": [fraction_str(w) for w in lat.w_t]},
        "valid_to": _bound_str(a.valid_to),
        "terms": [[k[0], list(k[1:]), [fraction_str(x) for x in c.embed(order)]] for k, c in items],
    }
    if divisor_label is not None:
        doc["divisor_label"] = divisor_label
    return doc


def _int(x, field):
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(field, f"expected an integer, got {x!r}")
    return x


def series_from_dict(doc: dict) -> tuple:
    """(series, divisor_label or None)."""
    if not isinstance(doc, dict):
        raise ParseError("series", "expected a JSON object")
    for name in ("q_denominator", "t_denominator", "lattice_rank", "cyclotomic_order", "grading_weights", "valid_to", "terms"):
        if name not in doc:
            raise ParseError(name, "missing")
    rank = _int(doc["lattice_rank"], "lattice_rank")
    weights = doc["grading_weights"]
    if not isinstance(weights, dict) or "q" not in weights or "t" not in weights:
        raise ParseError("grading_weights", "expected {\"q\": ..., \"t\": [...]}")
    w_t = weights["t"]
    if not isinstance(w_t, list) or len(w_t) != rank:
        raise ParseError("grading_weights.t", f"expected a list of {rank} rationals")
    lat = ExponentLattice(
        rank=rank,
        t_denominator=_int(doc["t_denominator"], "t_denominator"),
        q_denominator=_int(doc["q_denominator"], "q_denominator"),
        w_q=parse_fraction(weights["q"], "grading_weights.q"),
        w_t=tuple(parse_fraction(w, "grading_weights.t") for w in w_t),
    )
    vt = doc["valid_to"]
    valid_to = INF if vt == "inf" else parse_fraction(vt, "valid_to")
    order = _int(doc["cyclotomic_order"], "cyclotomic_order")
    terms = {}
    if not isinstance(doc["terms"], list):
        raise ParseError("terms", "expected a list")
    for i, term in enumerate(doc["terms"]):
        field = f"terms[{i}]"
        if not (isinstance(term, list) and len(term) == 3 and isinstance(term[1], list) and isinstance(term[2], list)):
            raise ParseError(field, "expected [q_num, [t_num...], [coord...]]")
        key = (_int(term[0], field),) + tuple(_int(x, field) for x in term[1])
        if len(key) != rank + 1:
            raise ParseError(field, f"expected {rank} t-exponents")
        if key in terms:
            raise ParseError(field, "duplicate exponent")
        terms[key] = cyc_make(order, [parse_fraction(x, field) for x in term[2]])
    label = doc.get("divisor_label")
    return FormalSeries(lat, terms, valid_to), label


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def series_to_json(a: FormalSeries, divisor_label: str | None = None) -> str:
    return dumps(series_to_dict(a, divisor_label))


def series_from_json(text: str) -> tuple:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("document", f"invalid JSON: {exc.msg} at line {exc.lineno}")
    return series_from_dict(doc)


def _coeff_str(c) -> str:
    if c.is_rational():
        return str(c.to_fraction())
    return "(" + ", ".join(c.coord_strings()) + f")@zeta_{c.order}"


def series_rows(a: FormalSeries, float_report: bool = False) -> tuple:
    """Header and rows, one per term, sorted by grade."""
    lat = a.lattice
    header = ["q"] + [f"t{i}" for i in range(lat.rank)] + ["grade", "coefficient"]
    if float_report:
        header.append("approx")
    rows = []
    for key, g, c in a.items_by_grade():
        row = [str(lat.q_exp(key))] + [str(x) for x in lat.t_exp(key)] + [str(lat.to_grade(g)), _coeff_str(c)]
        if float_report:
            z = complex(c)
            row.append(f"{z.real:.12g}" if abs(z.imag) < 1e-12 else f"{z.real:.12g}{z.imag:+.12g}j")
        rows.append(row)
    return header, rows


def render_rows(header: list, rows: list, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return buf.getvalue()
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)] if rows else [len(h) for h in header]
    lines = ["  ".join(str(x).rjust(w) for x, w in zip(r, widths)) for r in [header] + rows]
    return "\n".join(lines) + "\n"
