"""Command line entry point: ``flopdt {expand|invariants|flop|blowup|check}``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import checks
from .blowup import SurfaceDTSeries, blowup_cells, blowup_error, blowup_transform
from .config import RunConfig, parse_config
from .curves import n_invariant, par_series_behrend, par_series_euler
from .errors import FlopDTError, ParseError, UsageError
from .flop import DTSeries, error_term, flop_transform
from .modular import (
    Q_LATTICE,
    ThetaArgument,
    default_lattice,
    eta_series,
    fn_poly,
    theta_a_series,
    theta_sum,
)
from .series import FormalSeries
from .serialize import (
    dumps,
    fraction_str,
    parse_fraction,
    render_rows,
    series_from_json,
    series_rows,
    series_to_dict,
)

EXPAND_OBJECTS = ("eta", "theta", "theta-a", "fn", "error", "blowup-error")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML or JSON run configuration")
    common.add_argument("--input", help="input series (JSON)")
    common.add_argument("--output", help="write the result here instead of stdout")
    common.add_argument("--order", help="truncation order as P/Q")
    common.add_argument("--variant", choices=("behrend", "euler", "fixed-support"))
    common.add_argument("--format", choices=("json", "table", "csv"))
    common.add_argument("--seed", type=int)
    common.add_argument("--float-report", action="store_true", default=None,
                        help="add a floating-point approximation column")

    p = argparse.ArgumentParser(prog="flopdt", description="Exact flop and blow-up series toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("expand", parents=[common], help="expand a named series")
    e.add_argument("object", choices=EXPAND_OBJECTS)
    e.add_argument("--a", type=int, default=1, help="theta characteristic a")
    e.add_argument("--b", type=int, default=1, help="theta characteristic b")
    e.add_argument("--twist", default="0", help="theta twist c as P/Q")
    e.add_argument("--n", type=int, default=1, help="degree of f_n")
    e.add_argument("--rank", type=int, default=1, help="rank for blowup-error")

    sub.add_parser("invariants", parents=[common], help="N invariants and parabolic series")
    f = sub.add_parser("flop", parents=[common], help="transform a DT series across the flop")
    f.add_argument("--inverse", action="store_true", help="recover the source series from the target one")

    b = sub.add_parser("blowup", parents=[common], help="blow-up transform of a surface series")
    b.add_argument("--rank", type=int, required=True)
    b.add_argument("--cells", nargs=2, metavar=("A_MAX", "S_MAX"), help="restrict the table to |a| <= A_MAX, s <= S_MAX")

    c = sub.add_parser("check", parents=[common], help="run the identity suite")
    c.add_argument("--suite", action="append", choices=sorted(checks.SUITES), help="run only these suites")
    return p


def _run_config(args) -> RunConfig:
    overrides = {
        "command": args.command,
        "input_path": args.input,
        "output_path": args.output,
        "order": parse_fraction(args.order, "--order") if args.order is not None else None,
        "format": args.format,
        "seed": args.seed,
        "variant": args.variant,
        "float_report": args.float_report,
    }
    if args.config:
        text = Path(args.config).read_text()
        return parse_config(text, **overrides)
    return RunConfig(**{k: v for k, v in overrides.items() if v is not None})


def _emit(text: str, cfg: RunConfig):
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_series(series, cfg: RunConfig, label=None):
    if cfg.format == "json":
        doc = series_to_dict(series, label)
        if cfg.float_report:
            doc["approx"] = [row[-1] for row in series_rows(series, True)[1]]
        _emit(dumps(doc), cfg)
    else:
        header, rows = series_rows(series, cfg.float_report)
        _emit(render_rows(header, rows, cfg.format), cfg)


def _read_series(path):
    if path is None:
        raise UsageError("--input is required")
    return series_from_json(Path(path).read_text())


def _need_geometry(cfg: RunConfig):
    if cfg.geometry is None:
        raise UsageError("--config with flop geometry is required")
    return cfg.geometry


def cmd_expand(args, cfg: RunConfig) -> int:
    order = cfg.order
    obj = args.object
    if obj == "eta":
        s = eta_series(order)
    elif obj == "theta":
        arg = ThetaArgument(twist=parse_fraction(args.twist, "--twist"))
        s = theta_sum(args.a, args.b, arg, order, default_lattice())
    elif obj == "theta-a":
        s = theta_a_series(args.a, order)
    elif obj == "fn":
        lat = default_lattice()
        s = fn_poly(args.n, lat.key(0, (1,)), lat)
    elif obj == "blowup-error":
        s = blowup_error(args.rank, order)
    else:
        geo = _need_geometry(cfg)
        s = error_term(geo, cfg.variant.replace("-", "_"), order)
    _emit_series(s, cfg)
    return EXIT_OK


def cmd_invariants(args, cfg: RunConfig) -> int:
    geo = _need_geometry(cfg)
    d = geo.curve
    bound = max(int(cfg.order), 1)
    n_rows = []
    for m in range(1, d.l * bound + 1):
        for n in range(-bound, bound + 1):
            v = n_invariant(n, m, d)
            if v:
                n_rows.append([n, m, fraction_str(v)])
    par = []
    for mu in checks.slope_slices(cfg.order):
        if cfg.variant == "euler":
            s = par_series_euler(d.euler_width(), mu, cfg.order)
        else:
            s = par_series_behrend(d, mu, cfg.order)
        par.append((mu, s))
    if cfg.format == "json":
        doc = {
            "n_invariants": n_rows,
            "par": [{"mu": fraction_str(mu), "series": series_to_dict(s)} for mu, s in par],
            "variant": cfg.variant,
        }
        _emit(dumps(doc), cfg)
    else:
        rows = [["N", n, m, v] for n, m, v in n_rows]
        for mu, s in par:
            lat = s.lattice
            for key, c in sorted(s.terms.items()):
                rows.append(["Par " + str(mu), str(lat.q_exp(key)), str(lat.t_exp(key)[0]), str(c.to_fraction())])
        _emit(render_rows(["kind", "n_or_q", "m_or_t", "value"], rows, cfg.format), cfg)
    return EXIT_OK


def cmd_flop(args, cfg: RunConfig) -> int:
    geo = _need_geometry(cfg)
    series, label = _read_series(cfg.input_path)
    dt = DTSeries(series, label or geo.label)
    # an input without grading information is read on the expected side
    want = geo.lattice if args.inverse else geo.source_lattice
    if series.lattice.same_exponents(want) and series.lattice != want:
        raise UsageError("input grading does not match the configured side of the flop")
    out = flop_transform(dt, geo, cfg.variant.replace("-", "_"), inverse=args.inverse)
    _emit_series(out.series, cfg, out.divisor_label)
    return EXIT_OK


def cmd_blowup(args, cfg: RunConfig) -> int:
    series, label = _read_series(cfg.input_path)
    if not series.lattice.same_exponents(Q_LATTICE):
        raise UsageError(f"blow-up input must be a series in q alone with q_denominator {Q_LATTICE.q_denominator}")
    data = SurfaceDTSeries(args.rank, FormalSeries(Q_LATTICE, series.terms, series.valid_to), label or "l")
    product = blowup_transform(data, cfg.order)
    cells = blowup_cells(product, args.rank)
    if args.cells:
        a_max, s_max = int(args.cells[0]), parse_fraction(args.cells[1], "--cells")
        cells = {k: v for k, v in cells.items() if abs(k[0]) <= a_max and k[1] <= s_max}
    if cfg.format == "json":
        doc = {
            "rank": args.rank,
            "valid_to": fraction_str(product.valid_to),
            "cells": [[a, fraction_str(s), fraction_str(v)] for (a, s), v in cells.items()],
        }
        _emit(dumps(doc), cfg)
    else:
        rows = [[a, str(s), str(v)] for (a, s), v in cells.items()]
        _emit(render_rows(["a", "s", "value"], rows, cfg.format), cfg)
    return EXIT_OK


def cmd_check(args, cfg: RunConfig) -> int:
    results = checks.run_all(cfg.order, cfg.seed, args.suite)
    ok = all(r.passed for r in results)
    if cfg.format == "json":
        doc = {
            "suite_version": checks.SUITE_VERSION,
            "order": fraction_str(cfg.order),
            "seed": cfg.seed,
            "passed": ok,
            "suites": [
                {"name": r.name, "label": r.label, "passed": r.passed, "cases": r.cases, "failure": r.failure}
                for r in results
            ],
        }
        _emit(dumps(doc), cfg)
    else:
        rows = [[r.name, "PASS" if r.passed else "FAIL", r.cases, r.failure or ""] for r in results]
        _emit(render_rows(["suite", "status", "cases", "first_failure"], rows, cfg.format), cfg)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


COMMANDS = {
    "expand": cmd_expand,
    "invariants": cmd_invariants,
    "flop": cmd_flop,
    "blowup": cmd_blowup,
    "check": cmd_check,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _run_config(args)
        return COMMANDS[args.command](args, cfg)
    except (ParseError, UsageError) as exc:
        print(f"flopdt {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FlopDTError as exc:
        print(f"flopdt {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"flopdt {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
