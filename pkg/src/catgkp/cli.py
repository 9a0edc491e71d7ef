"""Command line: ``catgkp prepare|breed|analyze``.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 CutoffExceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml
from pydantic import ValidationError

from . import experiment as ex
from .analysis import fit_cat, phase_distribution, wigner, write_phase_csv, write_wigner_csv
from .fock import CutoffExceeded, load_state

EXIT_OK, EXIT_CONFIG, EXIT_CUTOFF = 0, 2, 3


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="YAML experiment file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override ensemble.master_seed")
    p.add_argument("--runs", type=int, help="override ensemble.runs")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a dotted config key (repeatable)")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catgkp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    prep = sub.add_parser("prepare", help="run a seeded ensemble and write summary.csv")
    _common(prep)

    br = sub.add_parser("breed", help="prepare cats and breed them in a tree")
    _common(br)
    br.add_argument("--depth", type=int, help="override breeding.depth")
    br.add_argument("--states", nargs="+", help="breed saved state files instead of generating")

    an = sub.add_parser("analyze", help="Wigner, phase distribution and cat fit of a saved state")
    an.add_argument("state", help="state file")
    an.add_argument("--out", default=".", help="output directory")
    an.add_argument("--wigner", action="store_true")
    an.add_argument("--extent", type=float, default=6.0)
    an.add_argument("--step", type=float, default=0.05)
    an.add_argument("--phase", action="store_true")
    an.add_argument("--resolution", type=int, default=512)
    an.add_argument("--fit", action="store_true")
    return parser


def _overrides(args) -> list:
    items = [ex.parse_override(s) for s in args.set]
    if args.seed is not None:
        items.append(("ensemble.master_seed", args.seed))
    if args.runs is not None:
        items.append(("ensemble.runs", args.runs))
    if getattr(args, "depth", None) is not None:
        items.append(("breeding.depth", args.depth))
    return items


def _describe(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        key = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{key}: {e['msg']}")
    return "invalid configuration:\n  " + "\n  ".join(lines)


def _jobs(args) -> int:
    return args.jobs if args.jobs is not None else ex.default_jobs()


def cmd_prepare(args) -> int:
    exp = ex.load_experiment(args.config, _overrides(args))
    path = ex.prepare(exp, args.out, _jobs(args))
    print(path)
    return EXIT_OK


def cmd_breed(args) -> int:
    exp = ex.load_experiment(args.config, _overrides(args))
    if exp.breeding is None:
        exp = exp.model_copy(update={"breeding": ex.BreedingModel()})
    levels = ex.breed_experiment(exp, args.out, _jobs(args), states=args.states)
    print(f"bred {sum(len(lv) for lv in levels[1:])} states over {len(levels) - 1} levels into {args.out}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    state = load_state(args.state)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.state).stem
    if args.wigner:
        grid = wigner(state, extent=args.extent, step=args.step)
        write_wigner_csv(grid, out / f"{stem}_wigner.csv")
        print(f"wigner max {grid.values.max():.12g}")
    if args.phase:
        write_phase_csv(phase_distribution(state, args.resolution), out / f"{stem}_phase.csv")
    if args.fit:
        fit = fit_cat(state)
        payload = json.dumps(fit.to_dict(), indent=2, sort_keys=True)
        (out / f"{stem}_fit.json").write_text(payload + "\n")
        print(payload)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits with 2 on bad flags
    handler = {"prepare": cmd_prepare, "breed": cmd_breed, "analyze": cmd_analyze}[args.command]
    try:
        return handler(args)
    except ValidationError as err:
        print(_describe(err), file=sys.stderr)
        return EXIT_CONFIG
    except (yaml.YAMLError, FileNotFoundError) as err:
        print(f"cannot read configuration: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except CutoffExceeded as err:
        print(f"cutoff exceeded: {err}", file=sys.stderr)
        return EXIT_CUTOFF
    except ValueError as err:
        print(f"invalid configuration: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
