"""Command-line interface: analyze, scan and audit.

Exit codes: 0 ok, 1 audit disagreement, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .catalog import CATALOG_NAMES
from .document import Target, parse_document
from .errors import GeometryError, ParseError
from .report import (
    SCAN_PARAMS, analyze, audit, catalog_targets, render_analysis, render_audit, render_scan, scan,
)

EXIT_OK, EXIT_DISAGREE, EXIT_INPUT = 0, 1, 2


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"expected a rational number, got {text!r}") from exc


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",") if t.strip()]


def _range(text: str) -> list[Fraction]:
    """start:stop:step, stop inclusive; an empty range yields no values."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ParseError(f"range must be start:stop:step, got {text!r}")
    start, stop, step = (_rational(p) for p in parts)
    if step <= 0:
        raise ParseError("range step must be positive")
    out, v = [], start
    while v <= stop:
        out.append(v)
        v += step
    return out


def _load_target(source: str, args) -> Target:
    """A catalog name (with --lambda/--k/--tau) or a path to a JSON document ('-' for stdin)."""
    if source in CATALOG_NAMES:
        doc = {"kind": "catalog", "name": source, "params": {},
               "tau": [str(x) for x in (args.tau or [0, 0, 0, 0])]}
        if source == "g_lambda":
            doc["params"] = {"lambda": str(args.lam), "k": str(args.k)}
        text = json.dumps(doc)
    elif source == "-":
        text = sys.stdin.read()
    else:
        path = Path(source)
        if not path.is_file():
            raise ParseError(f"{source!r} is neither a catalog name ({', '.join(CATALOG_NAMES)}) "
                             f"nor a readable file")
        text = path.read_text()
    target = parse_document(text)
    if args.orientation == "flip":
        if target.kind != "lie":
            raise ParseError("--orientation flip applies to invariant geometries only", field="orientation")
        target = Target("lie", geometry=target.geometry.flipped(),
                        echo={**target.echo, "orientation_flipped": True})
    return target


def _emit(obj, text: str, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(obj, indent=2, sort_keys=False) + "\n")
    else:
        sys.stdout.write(text)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=None, help="residual tolerance (float backends)")
    p.add_argument("--seed", type=int, default=7, help="fiber sampling seed")
    p.add_argument("--samples", type=int, default=26, help="fiber points per twistor factor")
    p.add_argument("--format", choices=("text", "json"), default="text")


def _add_geometry(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lambda", dest="lam", type=_rational, default=Fraction(0))
    p.add_argument("--k", type=_rational, default=Fraction(1))
    p.add_argument("--tau", type=_rational_list, default=None, help="comma-separated, alpha basis")
    p.add_argument("--orientation", choices=("keep", "flip"), default="keep")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="skewtwistor",
                                 description="Integrability of almost complex structures on Z x Z "
                                             "for metrics with skew torsion.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="full report for one geometry")
    pa.add_argument("source", help=f"catalog name ({', '.join(CATALOG_NAMES)}), JSON file, or '-'")
    _add_common(pa)
    _add_geometry(pa)
    pa.add_argument("--no-audit", action="store_true", help="skip the three-way audit")

    ps = sub.add_parser("scan", help="sweep one parameter of the g_lambda family")
    ps.add_argument("param", choices=SCAN_PARAMS)
    grp = ps.add_mutually_exclusive_group(required=True)
    grp.add_argument("--values", type=_rational_list)
    grp.add_argument("--range", dest="rng", type=str, help="start:stop:step (inclusive)")
    _add_common(ps)
    _add_geometry(ps)

    pu = sub.add_parser("audit", help="three-way equivalence audit")
    pu.add_argument("sources", nargs="*", help="geometries to audit; default is the full catalog")
    _add_common(pu)
    _add_geometry(pu)
    pu.add_argument("--fault", action="store_true", help="inject a curvature fault (expects exit 1)")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "analyze":
            target = _load_target(args.source, args)
            rep = analyze(target, args.tol, args.seed, args.samples, with_audit=not args.no_audit)
            _emit(rep, render_analysis(rep), args.format)
            return EXIT_OK if rep.get("audit", {"agree": True})["agree"] else EXIT_DISAGREE

        if args.command == "scan":
            values = args.values if args.values is not None else _range(args.rng)
            tau = args.tau or [0, 0, 0, 0]
            if len(tau) != 4:
                raise ParseError("--tau needs 4 components", field="tau")
            rows = scan(args.param, values, k=args.k, lam=args.lam, tau=tau,
                        tol=args.tol if args.tol is not None else 1e-9)
            _emit({"param": args.param, "rows": rows}, render_scan(args.param, rows), args.format)
            return EXIT_OK

        # audit
        if args.sources:
            targets = [(s, _load_target(s, args)) for s in args.sources]
        else:
            targets = catalog_targets()
        rep = audit(targets, args.samples, args.seed, args.tol, fault=args.fault)
        _emit(rep, render_audit(rep), args.format)
        return EXIT_OK if rep["agree"] else EXIT_DISAGREE
    except (ParseError, GeometryError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
