"""Command line: ``semiact {solve,experiment,check,list}``.

Exit status: 0 on success, 1 when an attack fails or a check is violated,
2 on configuration errors (bad system descriptor, unknown names, bad flags).
"""

from __future__ import annotations

import argparse
import os
import sys

from .attacks import (
    balanced_bsgs_sizes,
    binary_search_min,
    bsgs,
    collision_probe_search,
    exhaustive,
    pollard_rho,
    symmetric_fixedpoint_search,
    with_retries,
)
from .core import ProblemInstance, SemigroupError, verify_solution
from .experiments import EXPERIMENTS, ExperimentConfig, default_output_dir, run_experiment
from .generic_model import ADVERSARIES
from .instances import BUILDERS, InstanceError, build_from_descriptor
from .reductions import ph_cyclic_solve, recursive_nonunit_solve

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


def _parse_ints(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from None


def _run_bsgs(inst, args):
    n = inst.system.set_size
    k, l = balanced_bsgs_sizes(n)
    return with_retries(bsgs, inst, retries=args.retries, seed=args.seed, k=args.k or k, l=args.l or l)


ATTACKS = {
    "exhaustive": lambda inst, args: exhaustive(inst),
    "bsgs": _run_bsgs,
    "rho": lambda inst, args: with_retries(pollard_rho, inst, retries=args.retries, seed=args.seed),
    "ph": lambda inst, args: ph_cyclic_solve(inst, seed=args.seed),
    "binary-search-min": lambda inst, args: binary_search_min(inst),
    "symmetric-fixedpoint": lambda inst, args: symmetric_fixedpoint_search(inst),
    "collision-probe": lambda inst, args: collision_probe_search(inst, seed=args.seed),
    "recursive-nonunit": lambda inst, args: recursive_nonunit_solve(inst, _parse_ints(args.chain)),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semiact", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one instance y = s.x")
    solve.add_argument("--system", required=True, help="descriptor, e.g. cyclic-exp:p=59,n=29,g=4")
    solve.add_argument("--x", type=int, required=True)
    solve.add_argument("--y", type=int, required=True)
    solve.add_argument("--attack", required=True)
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--k", type=int, default=0, help="bsgs probes")
    solve.add_argument("--l", type=int, default=0, help="bsgs table size")
    solve.add_argument("--retries", type=int, default=10)
    solve.add_argument("--a", type=int, help="published chain position of x (min-chain)")
    solve.add_argument("--chain", help="non-unit chain for recursive-nonunit, e.g. 7,2")

    exp = sub.add_parser("experiment", help="run a Monte-Carlo experiment and write CSV")
    exp.add_argument("name", nargs="?", help=", ".join(EXPERIMENTS))
    exp.add_argument("--config", help="INI config file (overrides the flags below)")
    exp.add_argument("--n", help="set size, or comma-separated grid")
    exp.add_argument("--k", type=int)
    exp.add_argument("--l", type=int)
    exp.add_argument("--m", help="operation counts / semilattice size")
    exp.add_argument("--family", default="", help="attack family or adversary name")
    exp.add_argument("--trials", type=int, default=1000)
    exp.add_argument("--seed", type=int, default=0)
    exp.add_argument("--out", help=f"CSV path (default: ${'{'}SEMIACT_OUT_DIR{'}'}/<name>.csv, else stdout)")

    chk = sub.add_parser("check", help="run the property suites")
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--samples", type=int, default=1000)

    sub.add_parser("list", help="list systems, attacks, experiments and adversaries")
    return p


def _solve(args) -> int:
    if args.attack not in ATTACKS:
        raise ConfigError(f"unknown attack {args.attack!r}; known: {', '.join(ATTACKS)}")
    system = build_from_descriptor(args.system)
    known = {"a": args.a} if args.a is not None else {}
    if args.attack == "binary-search-min" and "a" not in known:
        known["a"] = system.semigroup.carrier_size
    inst = ProblemInstance(system, args.x, args.y, known=known)
    res = ATTACKS[args.attack](inst, args)
    counters = " ".join(f"{k}={v}" for k, v in res.counters().items())
    if not res.success:
        print(f"attack {args.attack} failed ({counters})")
        return EXIT_FAIL
    sol = verify_solution(inst, res.solution)
    print(f"s={_show(res.solution)} verified={str(sol.verified).lower()} {counters}")
    return EXIT_OK if sol.verified else EXIT_FAIL


def _show(s):
    return ",".join(map(str, s.tolist())) if hasattr(s, "tolist") else str(s)


def _experiment(args) -> int:
    if args.config:
        with open(args.config) as fh:
            cfg = ExperimentConfig.from_ini(fh.read())
    else:
        if not args.name:
            raise ConfigError("experiment name or --config required")
        grid = {}
        for key in ("n", "m"):
            vals = _parse_ints(getattr(args, key))
            if vals:
                grid[key] = vals if len(vals) > 1 or key == "m" and args.name == "theorem-bound" else vals[0]
        for key in ("k", "l"):
            if getattr(args, key) is not None:
                grid[key] = getattr(args, key)
        cfg = ExperimentConfig(args.name, seed=args.seed, trials=args.trials, attack=args.family,
                               grid=grid, output=args.out or "")
    if cfg.name not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {cfg.name!r}; known: {', '.join(EXPERIMENTS)}")
    try:
        report = run_experiment(cfg)
    except KeyError as exc:
        raise ConfigError(f"{cfg.name}: missing parameter {exc}") from None
    text = report.to_csv()
    out = cfg.output
    if not out and default_output_dir():
        out = os.path.join(default_output_dir(), f"{cfg.name}.csv")
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _check(args) -> int:
    from .checks import run_suite

    results = run_suite(args.seed, args.samples)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def _list(args) -> int:
    print("systems:     " + ", ".join(BUILDERS))
    print("attacks:     " + ", ".join(ATTACKS))
    print("experiments: " + ", ".join(EXPERIMENTS))
    print("adversaries: " + ", ".join(ADVERSARIES))
    return EXIT_OK


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    handler = {"solve": _solve, "experiment": _experiment, "check": _check, "list": _list}[args.command]
    try:
        return handler(args)
    except (ConfigError, InstanceError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SemigroupError as exc:
        print(f"attack error: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run_cli())
