"""Command-line front end.

Exit codes: 0 success, 1 verification failed, 2 input error, 3 precondition
violated, 4 internal invariant breach.  Set ``FAIRSLICE_LOG=DEBUG`` (or any
logging level name) for diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fairslice import adversary, chores, mixed, solver
from fairslice.core import AdditivePlayer, exact_two_piece, validate_hungry
from fairslice.io import InstanceError, assignment_to_json, dumps, load_assignment, load_instance
from fairslice.protocols import NotMonotoneError, monotone_marks, singleton_first, singleton_last, verify_envy_free
from fairslice.queries import NotHungryError, PreferenceOracle, PromptOracle, QueryBudgetExceeded

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PRECONDITION, EXIT_INVARIANT = 0, 1, 2, 3, 4

log = logging.getLogger("fairslice")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    subcommand: str
    instance: Optional[Path] = None
    group_sizes: Optional[tuple] = None
    tolerance: float = 1e-2
    grid_resolution: Optional[int] = None
    max_queries: Optional[int] = None
    seed: int = 0
    output: Optional[Path] = None
    csv: Optional[Path] = None

    def __post_init__(self):
        if self.tolerance <= 0:
            raise CliError("tolerance must be positive", EXIT_INPUT)


def _sizes(text: str) -> tuple:
    try:
        sizes = tuple(int(k) for k in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if any(k <= 0 for k in sizes):
        raise argparse.ArgumentTypeError("group sizes must be positive")
    return sizes


def _emit(obj, output: Optional[Path]):
    text = dumps(obj)
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)


def _load(path):
    if path is None:
        raise CliError("an instance file is required (-i)", EXIT_INPUT)
    try:
        return load_instance(path)
    except InstanceError as exc:
        raise CliError(str(exc), EXIT_INPUT)


def _config(args) -> RunConfig:
    return RunConfig(
        subcommand=args.command,
        instance=getattr(args, "instance", None),
        group_sizes=getattr(args, "k", None),
        tolerance=getattr(args, "tolerance", 1e-2),
        grid_resolution=getattr(args, "grid", None),
        max_queries=getattr(args, "max_queries", None),
        seed=getattr(args, "seed", 0),
        output=getattr(args, "output", None),
        csv=getattr(args, "csv", None),
    )


# ---------------------------------------------------------------------------

def cmd_protocol(args) -> int:
    cfg = _config(args)
    prefs = None
    if args.interactive:
        if args.n is None:
            raise CliError("--interactive needs --n", EXIT_INPUT)
        oracle = PromptOracle(args.n, sys.stdin, sys.stderr, cfg.max_queries)
    else:
        inst = _load(cfg.instance)
        prefs = []
        for i, p in enumerate(inst.players):
            two = exact_two_piece(p)
            if two is None or (isinstance(p, AdditivePlayer) and p.mode != "hungry"):
                raise CliError(f"player {i} is not a hungry two-piece player", EXIT_PRECONDITION)
            report = validate_hungry(two)
            if not report:
                raise CliError(f"player {i} is not hungry: {report.violations[:3]}", EXIT_PRECONDITION)
            prefs.append(two)
        oracle = PreferenceOracle(prefs, cfg.max_queries)

    try:
        if args.algo == "singleton-first":
            result = singleton_first(oracle)
        elif args.algo == "singleton-last":
            result = singleton_last(oracle)
        else:
            k1 = args.k1 if args.k1 is not None else oracle.n // 2
            result = monotone_marks(oracle, k1)
    except (NotMonotoneError, NotHungryError) as exc:
        raise CliError(str(exc), EXIT_PRECONDITION)
    except QueryBudgetExceeded as exc:
        raise CliError(str(exc), EXIT_PRECONDITION)

    out = result.to_json()
    code = EXIT_OK
    if prefs is not None:
        ef = verify_envy_free(result.assignment, prefs)
        out["envy_free"] = ef.ok
        if not ef:
            out["violations"] = [list(v) for v in ef.violations]
            code = EXIT_INVARIANT
    _emit(out, cfg.output)
    return code


def cmd_duel(args) -> int:
    cfg = _config(args)
    sizes = cfg.group_sizes or (args.n // 2, args.n - args.n // 2)
    if sum(sizes) != args.n or len(sizes) != 2:
        raise CliError(f"group sizes {sizes} do not split {args.n} players into two groups", EXIT_INPUT)
    if min(sizes) < 2:
        raise CliError("a singleton group admits a finite envy-free protocol; the adversary needs groups of "
                       "at least two", EXIT_PRECONDITION)
    protocol = adversary.BUILTIN_PROTOCOLS[args.protocol](cfg.seed)
    state = adversary.AdversaryState(args.n)
    try:
        report = adversary.duel(protocol, args.n, sizes, cfg.max_queries or 1000, check=True, state=state)
    except adversary.AdversaryInvariantError as exc:
        raise CliError(f"adversary invariant broken: {exc}", EXIT_INVARIANT)
    if cfg.csv is not None:
        cfg.csv.write_text(state.intervals_csv())
    _emit(report.to_json(), cfg.output)
    if not report.consistent or report.envy_free:
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_chores(args) -> int:
    cfg = _config(args)
    inst = _load(cfg.instance)
    sizes = cfg.group_sizes or inst.group_sizes
    if sizes is None:
        raise CliError("group sizes are required (--k or 'group_sizes' in the instance)", EXIT_INPUT)
    if sum(sizes) != inst.n:
        raise CliError(f"group sizes {sizes} do not add up to {inst.n} players", EXIT_INPUT)
    try:
        sol = chores.solve_chores(inst.players, sizes, cfg.tolerance)
    except chores.NotLazyError as exc:
        raise CliError(str(exc), EXIT_PRECONDITION)
    except (solver.SolverError, chores.ChoreSolverError) as exc:
        raise CliError(str(exc), EXIT_INVARIANT)
    out = assignment_to_json(sol.assignment)
    out["exact"] = sol.exact
    out["exemptions"] = assignment_to_json(sol.exemptions)
    code = EXIT_OK
    if sol.exact:
        ef = chores.verify_chores(sol, inst.players)
        out["envy_free"] = ef.ok
        if not ef:
            code = EXIT_INVARIANT
    _emit(out, cfg.output)
    return code


def cmd_mixed(args) -> int:
    cfg = _config(args)
    utilities = mixed.gen_counterexample(args.n)
    sizes = cfg.group_sizes or (args.n - 1, 1)
    if sum(sizes) != args.n or len(sizes) != 2:
        raise CliError(f"group sizes {sizes} do not split {args.n} players into two collections", EXIT_INPUT)
    if args.action == "demo":
        max_cuts = args.max_cuts if args.max_cuts is not None else max(args.n - 4, 0)
        try:
            res = mixed.min_cut_search(utilities, sizes, max_cuts, cfg.grid_resolution, tol=args.margin)
        except mixed.SearchBudgetExceeded as exc:
            raise CliError(str(exc), EXIT_PRECONDITION)
        out = {
            "n": args.n,
            "group_sizes": list(sizes),
            "max_cuts": max_cuts,
            "grid_resolution": cfg.grid_resolution or 40 * args.n,
            "result": "found" if res.solution else "no EF assignment found",
            "solution": None if res.solution is None else res.solution.to_json(),
            "grouping": None if res.grouping is None else [list(g) for g in res.grouping],
            "placements_examined": [o.examined for o in res.outcomes],
        }
        if cfg.csv is not None:
            cfg.csv.write_text(res.outcomes_csv())
    else:
        try:
            pick = mixed.halving_then_pick(utilities, args.eps, cfg.grid_resolution or 40 * args.n, sizes)
        except mixed.NoHalvingFound as exc:
            raise CliError(str(exc), EXIT_PRECONDITION)
        out = {
            "n": args.n,
            "group_sizes": list(sizes),
            "eps": args.eps,
            "collection": pick.collection.to_json(),
            "cut_count": pick.collection.cut_count,
            "envy_free": pick.report.ok,
            "grouping": None if pick.report.grouping is None else [list(g) for g in pick.report.grouping],
        }
        if cfg.csv is not None:
            cfg.csv.write_text(mixed.utility_table_csv(pick.collection, utilities))
    _emit(out, cfg.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    inst = _load(cfg.instance)
    try:
        assignment = load_assignment(args.assignment)
    except InstanceError as exc:
        raise CliError(str(exc), EXIT_INPUT)
    if assignment.n != inst.n:
        raise CliError(f"assignment has {assignment.n} players, instance has {inst.n}", EXIT_INPUT)
    try:
        report = verify_envy_free(assignment, inst.players)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_INPUT)
    bad = set(p for p, _ in report.violations)
    lines = []
    for j, group in enumerate(assignment.groups):
        for i in sorted(group):
            lines.append({"player": i, "group": j, "pass": i not in bad})
    _emit({"envy_free": report.ok, "players": sorted(lines, key=lambda r: r["player"])}, cfg.output)
    return EXIT_OK if report.ok else EXIT_FAIL


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fairslice", description="Envy-free cake, chore and mixed-cake division for groups.")
    sub = p.add_subparsers(dest="command", required=True)

    def io_args(sp, instance=True):
        if instance:
            sp.add_argument("-i", "--instance", type=Path, help="instance JSON")
        sp.add_argument("-o", "--output", type=Path, help="write the JSON report here instead of stdout")

    sp = sub.add_parser("protocol", help="run a finite two-group protocol")
    io_args(sp)
    sp.add_argument("--algo", choices=["singleton-first", "singleton-last", "monotone-marks"], default="singleton-first")
    sp.add_argument("--k1", type=int, help="size of the left group (monotone-marks)")
    sp.add_argument("--interactive", action="store_true", help="answer queries at the terminal")
    sp.add_argument("--n", type=int, help="number of players (interactive mode)")
    sp.add_argument("--max-queries", type=int)
    sp.set_defaults(func=cmd_protocol)

    sp = sub.add_parser("duel", help="run a built-in protocol against the adversary")
    io_args(sp, instance=False)
    sp.add_argument("--protocol", choices=sorted(adversary.BUILTIN_PROTOCOLS), default="binary-search")
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--k", type=_sizes, help="group sizes, e.g. 2,2")
    sp.add_argument("--max-queries", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--csv", type=Path, help="known-interval evolution per query")
    sp.set_defaults(func=cmd_duel)

    sp = sub.add_parser("chores", help="envy-free chore division")
    io_args(sp)
    sp.add_argument("--k", type=_sizes, help="group sizes")
    sp.add_argument("--tolerance", type=float, default=1e-2)
    sp.set_defaults(func=cmd_chores)

    sp = sub.add_parser("mixed", help="mixed-cake counterexample searches")
    io_args(sp, instance=False)
    sp.add_argument("action", choices=["demo", "halving"])
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--k", type=_sizes, help="collection sizes (default n-1,1)")
    sp.add_argument("--max-cuts", type=int)
    sp.add_argument("--grid", type=int, help="grid resolution (default 40 n)")
    sp.add_argument("--margin", type=float, default=1e-9, help="utility gap counted as a tie")
    sp.add_argument("--eps", type=float, default=0.02)
    sp.add_argument("--csv", type=Path)
    sp.set_defaults(func=cmd_mixed)

    sp = sub.add_parser("verify", help="check an assignment for envy-freeness")
    io_args(sp)
    sp.add_argument("-a", "--assignment", type=Path, required=True)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    level = os.environ.get("FAIRSLICE_LOG")
    if level:
        logging.basicConfig(level=level.upper(), stream=sys.stderr,
                            format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    log.debug("running %s", args.command)
    try:
        if getattr(args, "command", None) == "mixed" and args.n < 4:
            raise CliError("the counterexample needs n >= 4", EXIT_INPUT)
        return args.func(args)
    except CliError as exc:
        print(f"fairslice: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"fairslice: {exc}", file=sys.stderr)
        return EXIT_INPUT
