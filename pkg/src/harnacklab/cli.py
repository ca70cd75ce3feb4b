"""Command line front end.

Subcommands:
  list    catalog of solitons and registered checks
  check   run identity checks on soliton charts (jet route)
  grid    run finite-difference convergence scenarios (grid route)
  report  run both routes and emit a combined document

Exit status: 0 when everything passed or was skipped as not applicable,
1 when any check failed or a convergence run was inconclusive, 2 on usage
errors. JSON output is emitted with sorted keys so two runs with the same
arguments differ only in the timing fields.
"""

import argparse
import csv
import io
import json
import sys

from . import __version__, checks, gridlab
from .solitons import CATALOG, UnknownSolitonError

_FORMATS = ("text", "json", "csv")


def _write(text: str, output: str | None):
    if output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(output, "w") as f:
            f.write(text)


def _json_doc(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2)


def _config_dict(args, keys) -> dict:
    return {k: getattr(args, k) for k in keys}


def _check_rows_text(reports) -> str:
    lines = []
    width = max(len(r.check_id) for r in reports)
    swidth = max(len(r.soliton) for r in reports)
    for r in reports:
        if r.status == checks.STATUS_SKIPPED:
            lines.append(f"[skip] {r.check_id:<{width}} {r.soliton:<{swidth}}")
            continue
        mark = "ok " if r.status == checks.STATUS_PASS else "FAIL"
        lines.append(
            f"[{mark}] {r.check_id:<{width}} {r.soliton:<{swidth}} "
            f"max={r.max_rel_residual:.3e} tol={r.tolerance:.1e} "
            f"({r.millis:.0f} ms)")
    ran = [r for r in reports if r.status != checks.STATUS_SKIPPED]
    n_fail = sum(r.status == checks.STATUS_FAIL for r in ran)
    lines.append(f"{len(ran)} run, {len(reports) - len(ran)} skipped, "
                 f"{n_fail} failed")
    return "\n".join(lines)


def _check_rows_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["check_id", "soliton", "point_index", "residual"])
    for r in reports:
        if r.point_residuals is None:
            continue
        for i, v in enumerate(r.point_residuals):
            w.writerow([r.check_id, r.soliton, i, repr(float(v))])
    return buf.getvalue()


def _grid_rows_text(reports) -> str:
    lines = []
    for r in reports:
        mark = {"pass": "ok ", "fail": "FAIL"}.get(r.status, "????")
        pair = ", ".join(f"{p:.2f}" for p in r.pairwise_orders)
        lines.append(
            f"[{mark}] {r.check_id:<8} grids={list(r.grid_sizes)} "
            f"order={r.fitted_order:.2f} (pairwise {pair}) "
            f"({r.millis:.0f} ms)")
        for n, res in zip(r.grid_sizes, r.residuals):
            lines.append(f"         n={n:<4d} residual={res:.6e}")
    return "\n".join(lines)


def _grid_rows_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["check_id", "n", "residual", "observed_order"])
    for r in reports:
        for n, res in zip(r.grid_sizes, r.residuals):
            w.writerow([r.check_id, n, repr(float(res)),
                        repr(float(r.fitted_order))])
    return buf.getvalue()


def _cmd_list(args) -> int:
    if args.format == "json":
        payload = {
            "version": __version__,
            "solitons": {name: {"kind": spec.kind,
                                "description": spec.description,
                                "grid_only": spec.grid_only}
                         for name, spec in CATALOG.items()},
            "checks": {cid: {"statement": spec.statement,
                             "tolerance": spec.tolerance,
                             "applies_to": list(spec.applies_to)}
                       for cid, spec in checks.REGISTRY.items()},
            "grid_checks": list(gridlab.GRID_CHECKS),
        }
        _write(_json_doc(payload), args.output)
        return 0
    lines = ["solitons:"]
    for name, spec in CATALOG.items():
        suffix = " (grid only)" if spec.grid_only else ""
        lines.append(f"  {name:<20} {spec.kind:<9} {spec.description}{suffix}")
    lines.append("checks:")
    for cid in sorted(checks.REGISTRY):
        spec = checks.REGISTRY[cid]
        grid = " [grid]" if cid in gridlab.GRID_CHECKS else ""
        lines.append(f"  {cid:<9} tol={spec.tolerance:.0e}{grid}  {spec.statement}")
    _write("\n".join(lines), args.output)
    return 0


def _cmd_check(args) -> int:
    check_ids = args.checks or None
    if args.suite:
        check_ids = None
    solitons = args.soliton or None
    try:
        reports = checks.run_suite(
            checks=check_ids, solitons=solitons, seed=args.seed,
            n_points=args.points, order=args.order, tolerance=args.tolerance)
    except (checks.UnknownCheckError, UnknownSolitonError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.format == "json":
        payload = {
            "version": __version__,
            "seed": args.seed,
            "config": _config_dict(args, ("points", "order", "tolerance")),
            "reports": [r.to_dict() for r in reports],
        }
        _write(_json_doc(payload), args.output)
    elif args.format == "csv":
        _write(_check_rows_csv(reports), args.output)
    else:
        _write(_check_rows_text(reports), args.output)
    return 1 if any(r.status == checks.STATUS_FAIL for r in reports) else 0


def _cmd_grid(args) -> int:
    check_ids = args.checks or list(gridlab.GRID_CHECKS)
    sizes = tuple(args.sizes)
    try:
        reports = [gridlab.run_grid_check(c, seed=args.seed, grid_sizes=sizes)
                   for c in check_ids]
    except (KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if args.format == "json":
        payload = {
            "version": __version__,
            "seed": args.seed,
            "config": {"sizes": list(sizes)},
            "reports": [r.to_dict() for r in reports],
        }
        _write(_json_doc(payload), args.output)
    elif args.format == "csv":
        _write(_grid_rows_csv(reports), args.output)
    else:
        _write(_grid_rows_text(reports), args.output)
    return 0 if all(r.status == gridlab.STATUS_PASS for r in reports) else 1


def _cmd_report(args) -> int:
    srep = checks.run_suite(seed=args.seed, n_points=args.points,
                            order=args.order)
    grep = gridlab.run_grid_suite(seed=args.seed)
    ran = [r for r in srep if r.status != checks.STATUS_SKIPPED]
    n_fail = (sum(r.status == checks.STATUS_FAIL for r in srep)
              + sum(r.status != gridlab.STATUS_PASS for r in grep))
    if args.format == "json":
        payload = {
            "version": __version__,
            "seed": args.seed,
            "config": _config_dict(args, ("points", "order")),
            "checks": [r.to_dict() for r in srep],
            "grid": [r.to_dict() for r in grep],
            "summary": {
                "checks_run": len(ran),
                "checks_skipped": len(srep) - len(ran),
                "failures": n_fail,
            },
        }
        _write(_json_doc(payload), args.output)
    else:
        text = (_check_rows_text(srep) + "\n\n" + _grid_rows_text(grep)
                + f"\n\ntotal failures: {n_fail}")
        _write(text, args.output)
    return 1 if n_fail else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="harnacklab",
        description="Identity checks for Harnack quantities on Ricci solitons.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    pl = sub.add_parser("list", help="list solitons and checks")
    pl.add_argument("--format", choices=("text", "json"), default="text")
    pl.add_argument("--output", default=None)
    pl.set_defaults(fn=_cmd_list)

    pc = sub.add_parser("check", help="run identity checks on soliton charts")
    pc.add_argument("checks", nargs="*", metavar="CHECK_ID",
                    help="check ids to run (default: whole registry)")
    pc.add_argument("--suite", action="store_true",
                    help="run the whole registry even if ids are given")
    pc.add_argument("--soliton", action="append",
                    help="restrict to this soliton (repeatable)")
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--points", type=int, default=32)
    pc.add_argument("--order", type=int, default=6)
    pc.add_argument("--tolerance", type=float, default=None)
    pc.add_argument("--format", choices=_FORMATS, default="text")
    pc.add_argument("--output", default=None)
    pc.set_defaults(fn=_cmd_check)

    pg = sub.add_parser("grid", help="run grid convergence scenarios")
    pg.add_argument("checks", nargs="*", metavar="CHECK_ID",
                    help="grid scenario ids (default: all)")
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--sizes", type=int, nargs="+", default=[32, 64, 128])
    pg.add_argument("--format", choices=_FORMATS, default="text")
    pg.add_argument("--output", default=None)
    pg.set_defaults(fn=_cmd_grid)

    pr = sub.add_parser("report", help="run both routes, emit a combined report")
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--points", type=int, default=32)
    pr.add_argument("--order", type=int, default=6)
    pr.add_argument("--format", choices=("text", "json"), default="json")
    pr.add_argument("--output", default=None)
    pr.set_defaults(fn=_cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
