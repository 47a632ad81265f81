import argparse
import glob
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from tqdm import tqdm
from xtermcolor import colorize
from zuper_commons.types import ZValueError

from phidiag import logger
from phidiag.checker import Systems, Verdict, build_systems, decide, explain, verdict_to_dict
from phidiag.diagnoser import InfeasibleObservation, replay
from phidiag.ltl import eval_lasso, ltl_to_nba, nba_accepts_lasso, nba_to_dot, parse_ltl
from phidiag.models import load_plant
from phidiag.oracle import BoundExceeded, brute_check
from phidiag.sampling import random_word
from phidiag.synthesis import augmented_to_dot, constrained_to_dot, verifier_to_dot
from phidiag.templates import load_constraint

__all__ = ["main", "EXIT_DIAGNOSABLE", "EXIT_NOT_DIAGNOSABLE", "EXIT_INPUT_ERROR", "EXIT_ORACLE_DISAGREES"]

EXIT_DIAGNOSABLE = 0
EXIT_NOT_DIAGNOSABLE = 1
EXIT_INPUT_ERROR = 2
EXIT_ORACLE_DISAGREES = 3

_GREEN = 0x2E
_RED = 0xC4


def _use_color() -> bool:
    env = os.environ.get("PHIDIAG_COLOR")
    if env is not None:
        return env == "1"
    return sys.stdout.isatty()


def _paint(text: str, ansi: int) -> str:
    return colorize(text, ansi=ansi) if _use_color() else text


def write_dots(systems: Systems, dot_dir: str) -> list[Path]:
    """Writes the NBA and the three constructions as DOT files."""
    out = Path(dot_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "nba.dot": nba_to_dot(systems.nba),
        "augmented.dot": augmented_to_dot(systems.augmented),
        "constrained.dot": constrained_to_dot(systems.constrained),
        "verifier.dot": verifier_to_dot(systems.verifier),
    }
    written = []
    for name, text in files.items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written


def _check_one(plant_file: str, args: argparse.Namespace) -> tuple[int, dict]:
    model = load_plant(plant_file, allow_non_live=args.allow_non_live)
    constraint = load_constraint(args.constraint, model)
    systems = build_systems(model, constraint)
    witness = decide(systems.verifier)
    verdict = Verdict(witness is None, witness, systems.stats())
    if args.dot_dir:
        write_dots(systems, args.dot_dir)
    status = EXIT_DIAGNOSABLE if verdict.diagnosable else EXIT_NOT_DIAGNOSABLE
    report = verdict_to_dict(verdict)
    if args.oracle:
        oracle = brute_check(model, constraint)
        if isinstance(oracle, BoundExceeded):
            logger.warn(f"The oracle gave up on {plant_file}: {oracle.reason} ({oracle.explored} explored)")
            report["oracle"] = None
        else:
            report["oracle"] = oracle.diagnosable
            if oracle.diagnosable != verdict.diagnosable:
                status = EXIT_ORACLE_DISAGREES
    if not args.json:
        headline = explain(verdict)
        color = _GREEN if verdict.diagnosable else _RED
        first, _, rest = headline.partition("\n")
        print(f"{plant_file}: {_paint(first, color)}\n{rest}", end="")
        if status == EXIT_ORACLE_DISAGREES:
            print(_paint(f"The brute-force oracle disagrees: diagnosable={report['oracle']}", _RED))
    return status, report


def cmd_check(args: argparse.Namespace) -> int:
    files = sorted(glob.glob(args.plant)) if args.glob else [args.plant]
    if not files:
        raise ZValueError("No plant file matches the pattern", pattern=args.plant)
    status = EXIT_DIAGNOSABLE
    reports = []
    for plant_file in tqdm(files, disable=len(files) < 2, desc="check"):
        s, report = _check_one(plant_file, args)
        status = max(status, s)
        reports.append({"file": plant_file, **report} if args.glob else report)
    if args.json:
        print(json.dumps(reports if args.glob else reports[0], indent=2, ensure_ascii=False))
    return status


def cmd_translate(args: argparse.Namespace) -> int:
    ap = None if args.ap is None else [a for a in args.ap.split(",") if a]
    formula = parse_ltl(args.formula, ap)
    nba = ltl_to_nba(formula)
    dot = nba_to_dot(nba)
    if args.out:
        Path(args.out).write_text(dot, encoding="utf-8")
    else:
        print(dot, end="")
    if args.samples:
        rng = np.random.default_rng(args.seed)
        atoms = sorted(formula.ap) or ["p"]
        bad = 0
        for _ in range(args.samples):
            word = random_word(rng, atoms)
            if eval_lasso(word, formula) != nba_accepts_lasso(nba, word):
                bad += 1
                logger.error(f"The NBA disagrees with the semantics on {word}")
        print(f"# {args.samples - bad}/{args.samples} sampled words agree", file=sys.stderr)
        if bad:
            return EXIT_NOT_DIAGNOSABLE
    return EXIT_DIAGNOSABLE


def _read_stream(path: str) -> list[str]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ZValueError("Cannot read the observation stream", file=path, reason=str(e)) from e
    return [line.strip() for line in lines if line.strip()]


def cmd_replay(args: argparse.Namespace) -> int:
    model = load_plant(args.plant, allow_non_live=args.allow_non_live)
    constraint = load_constraint(args.constraint, model)
    systems = build_systems(model, constraint)
    stream = _read_stream(args.stream)
    rows = []
    try:
        for state in replay(systems.constrained, stream):
            symbol = stream[state.steps - 1] if state.steps else None
            rows.append({"step": state.steps, "symbol": symbol, "belief": len(state.belief), "alarm": int(state.alarm)})
            if not args.json:
                alarm = _paint("1", _RED) if state.alarm else "0"
                print(f"{state.steps:4d}  {symbol or '-':>8}  belief={len(state.belief):<4d} alarm={alarm}")
    except InfeasibleObservation as e:
        print(f"Infeasible observation at step {e.index}", file=sys.stderr)
        if args.json:
            print(json.dumps({"steps": rows, "infeasible_at": e.index}, indent=2))
        return EXIT_NOT_DIAGNOSABLE
    if args.json:
        print(json.dumps({"steps": rows, "infeasible_at": None}, indent=2))
    return EXIT_DIAGNOSABLE


def cmd_export(args: argparse.Namespace) -> int:
    model = load_plant(args.plant, allow_non_live=args.allow_non_live)
    constraint = load_constraint(args.constraint, model)
    for path in write_dots(build_systems(model, constraint), args.dot_dir):
        print(path)
    return EXIT_DIAGNOSABLE


def get_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phidiag", description="Diagnosability of plants with unreliable sensors under LTL sensor constraints."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def plant_args(p: argparse.ArgumentParser):
        p.add_argument("plant", help="plant JSON file")
        p.add_argument("constraint", help="constraint JSON file (template instance or raw formula)")
        p.add_argument("--allow-non-live", action="store_true", help="accept plants with deadlocking states")

    p = sub.add_parser("check", help="decide diagnosability under the constraint")
    plant_args(p)
    p.add_argument("--json", action="store_true", help="print the verdict as JSON")
    p.add_argument("--dot-dir", help="write the constructions as DOT files in this directory")
    p.add_argument("--oracle", action="store_true", help="cross-check with the brute-force oracle")
    p.add_argument("--glob", action="store_true", help="treat PLANT as a glob pattern")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("translate", help="translate a formula into a Büchi automaton (DOT)")
    p.add_argument("formula", help="LTL formula")
    p.add_argument("--ap", help="comma separated atomic propositions (default: those in the formula)")
    p.add_argument("--out", help="write the DOT here instead of stdout")
    p.add_argument("--samples", type=int, default=0, help="cross-check on this many random lassos")
    p.add_argument("--seed", type=int, default=0, help="seed of the random lassos")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("replay", help="run the online diagnoser on an observation stream")
    plant_args(p)
    p.add_argument("stream", help="file with one output symbol per line")
    p.add_argument("--json", action="store_true", help="print the trace as JSON")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("export", help="write the DOT files of the constructions")
    plant_args(p)
    p.add_argument("--dot-dir", required=True, help="output directory")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = get_parser().parse_args(argv)
    try:
        return args.func(args)
    except ZValueError as e:
        print(f"Input error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
