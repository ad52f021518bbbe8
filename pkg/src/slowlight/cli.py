"""Command line entry point.

    slowlight exact    [--scenario FILE] [--out DIR] [--set key=value ...] [--frame lab|retarded]
    slowlight simulate ...
    slowlight verify   ...
    slowlight summary  ...

Exit status: 0 success, 1 verification failure, 2 configuration error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import verify as verify_mod
from .errors import ConfigError, OutputError, SlowLightError
from .scenario import (
    QUANTITIES,
    apply_overrides,
    build_summary,
    emit_outputs,
    parse_scenario,
    residual_norms,
    sample,
)

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("slowlight")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="slowlight",
        description="Exact and numerical stopped slow-light soliton in a Lambda medium.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "exact": "sample the analytic solution and write CSV grids",
        "simulate": "integrate the Maxwell-Bloch equations from analytic boundary data",
        "verify": "run the consistency checks; exit 1 if any fails",
        "summary": "write the derived quantities only",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--scenario", type=Path, help="JSON scenario file (defaults if omitted)")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE", help="dotted override, e.g. control.alpha=2")
        p.add_argument("--frame", choices=("retarded", "lab"), help="coordinate frame of the grids")
    return parser


def load_scenario(args):
    doc = {}
    if args.scenario is not None:
        try:
            doc = json.loads(args.scenario.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"scenario file not found: {args.scenario}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.scenario}: invalid JSON: {exc}") from None
    overrides = list(args.overrides)
    if args.frame:
        overrides.append(f"frame={json.dumps(args.frame)}")
    return parse_scenario(apply_overrides(doc, overrides))


def _grid_run(scn, source, out):
    data = sample(scn, source)
    quantities = [q for kind in ("fields", "populations") if kind in scn.outputs
                  for q in QUANTITIES[kind]]
    docs = {}
    residuals = residual_norms(data.solution, scn.medium) if "residuals" in scn.outputs else None
    if "summary" in scn.outputs:
        docs["summary"] = build_summary(scn, residuals).as_dict()
    elif residuals is not None:
        docs["residuals"] = residuals
    return emit_outputs(data, out, quantities, docs)


def run(args):
    scn = load_scenario(args)
    if args.command in ("exact", "simulate"):
        manifest = _grid_run(scn, "exact" if args.command == "exact" else "numeric", args.out)
        for entry in manifest["files"]:
            print(f"wrote {args.out / entry['name']}")
        return EXIT_OK
    if args.command == "summary":
        summary = build_summary(scn).as_dict()
        emit_outputs(None, args.out, (), {"summary": summary})
        print(json.dumps({k: summary[k] for k in
                          ("w0", "stopping_distance", "stopping_distance_instant", "memory_width")},
                         indent=2))
        return EXIT_OK
    checks = verify_mod.run_checks(scn)
    emit_outputs(None, args.out, (), {"verify": verify_mod.report(scn, checks)})
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.value:.4g} (limit {c.limit})")
    failed = [c.name for c in checks if not c.passed]
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except OutputError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, SlowLightError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
