"""Command-line interface.

Subcommands map one-to-one onto the task types:

    chiralqed spectrum      --config run.json [--out DIR]
    chiralqed transmission  --config run.json [--k-span A B] [--points N] [--mode markov|exact]
    chiralqed winding       --config run.json [--k-span A B] [--points N]
    chiralqed boundstates   --config run.json [--z-span A B] [--points N]
    chiralqed g2            --config run.json [--tau-span A B] [--points N] [--normalization ...]
    chiralqed sweep         --config run.json --parameter P --range A B [--steps N]
    chiralqed reproduce     {fig3a|fig3b|figS1} [--out DIR]

The configuration document supplies the physical scene (see `runspec`);
the subcommand supplies the task, overriding any "tasks" list the document
carries.  Output directory precedence: --out, then the document's
"output_dir", then $CHIRALQED_OUTDIR, then ./chiralqed-out.

Exit codes: 0 all tasks succeeded, 1 configuration could not be parsed or
validated, 2 at least one task failed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import runner
from .errors import ParseError, ValidationError
from .runspec import load_runspec, task_from_dict
from .twophoton import ASYMPTOTIC_UNIT, RAW
from .version import __version__


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chiralqed",
        description=(
            "Bound states, transmission spectra, winding-number checks and "
            "photon correlations for emitters chirally coupled to a 1D channel."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to the JSON run document")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--tol-real", type=float, default=None,
                        help="override the real-axis classification tolerance")
    common.add_argument("--tol-match", type=float, default=None,
                        help="override the BIC eigenvalue-matching tolerance")

    sub.add_parser("spectrum", parents=[common],
                   help="classify the spin-matrix spectrum into bound states and zeros")

    p = sub.add_parser("transmission", parents=[common], help="sample t_k over a frequency span")
    p.add_argument("--k-span", nargs=2, type=float, metavar=("MIN", "MAX"), default=None)
    p.add_argument("--points", type=int, default=2048)
    p.add_argument("--mode", choices=["markov", "exact"], default="markov")

    p = sub.add_parser("winding", parents=[common],
                       help="winding number of t_k with the Levinson consistency check")
    p.add_argument("--k-span", nargs=2, type=float, metavar=("MIN", "MAX"), default=None)
    p.add_argument("--points", type=int, default=2048)

    p = sub.add_parser("boundstates", parents=[common],
                       help="sample the bound-state wavefunctions on a position grid")
    p.add_argument("--z-span", nargs=2, type=float, metavar=("MIN", "MAX"), default=None)
    p.add_argument("--points", type=int, default=2001)

    p = sub.add_parser("g2", parents=[common],
                       help="second-order photon correlation versus delay (single emitter)")
    p.add_argument("--tau-span", nargs=2, type=float, metavar=("MIN", "MAX"), default=(0.0, 10.0))
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--normalization", choices=[ASYMPTOTIC_UNIT, RAW], default=ASYMPTOTIC_UNIT)

    p = sub.add_parser("sweep", parents=[common],
                       help="scan a preset parameter with automatic threshold bisection")
    p.add_argument("--parameter", required=True,
                   choices=["gamma_ratio", "gamma", "gamma_prime", "separation"])
    p.add_argument("--range", nargs=2, type=float, metavar=("MIN", "MAX"), required=True)
    p.add_argument("--steps", type=int, default=101)

    p = sub.add_parser("reproduce", help="run a bundled reference scenario")
    p.add_argument("recipe", choices=list(runner.RECIPES))
    p.add_argument("--out", default=None, help="output directory")
    return parser


def _task_dict(args) -> dict | None:
    if args.command == "spectrum":
        return {"type": "spectrum"}
    if args.command == "transmission":
        task = {"type": "transmission", "points": args.points, "mode": args.mode}
        if args.k_span is not None:
            task["k_span"] = list(args.k_span)
        return task
    if args.command == "winding":
        task = {"type": "winding", "points": args.points}
        if args.k_span is not None:
            task["k_span"] = list(args.k_span)
        return task
    if args.command == "boundstates":
        task = {"type": "boundstates", "points": args.points}
        if args.z_span is not None:
            task["z_span"] = list(args.z_span)
        return task
    if args.command == "g2":
        return {
            "type": "g2",
            "tau_span": list(args.tau_span),
            "points": args.points,
            "normalization": args.normalization,
        }
    if args.command == "sweep":
        return {
            "type": "sweep",
            "parameter": args.parameter,
            "range": list(args.range),
            "steps": args.steps,
        }
    return None


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "reproduce":
            manifest = runner.reproduce(args.recipe, out_dir=args.out)
        else:
            try:
                text = Path(args.config).read_text()
            except OSError as exc:
                print(f"cannot read config: {exc}", file=sys.stderr)
                return 1
            spec = load_runspec(text)
            task = task_from_dict(
                _task_dict(args), n_emitters=spec.config.n_emitters, preset=spec.preset
            )
            spec = replace(spec, tasks=(task,))
            if args.tol_real is not None:
                spec = replace(spec, tol_real=args.tol_real)
            if args.tol_match is not None:
                spec = replace(spec, tol_match=args.tol_match)
            manifest = runner.run(spec, out_dir=args.out)
    except (ParseError, ValidationError) as exc:
        print(str(exc), file=sys.stderr)
        return 1

    failed = False
    for report in manifest["tasks"]:
        if report["status"] == "ok":
            print(f"{report['task']}: ok ({', '.join(report['files'])})")
        else:
            failed = True
            print(f"{report['task']}: FAILED — {report['error']}", file=sys.stderr)
    return 2 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
