"""Command-line entry point: ``majority-pca <subcommand> --config run.json``.

Every output is a pure function of the config file and the seed; the
``--threads`` flag only changes how fast it is produced.

Exit codes: 0 success, 2 invalid input, 3 oracle failure, 4 budget refusal.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import bounds, meanfield, oracles
from .errors import BudgetError, ConsistencyError, PreconditionError, ValidationError
from .lattice import all_minus, all_plus, format_grid, parse_grid, run_replicas
from .models import (
    MODEL_KEYS,
    ModelSpec,
    ProofSchedule,
    RangeSchedule,
    ScheduledBox,
    UpdateParams,
    build_model,
    gamma_at,
    odd_side,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ORACLE = 3
EXIT_BUDGET = 4

RUN_KEYS = frozenset({"steps", "initial", "snapshot"})
SWEEP_KEYS = frozenset({"steps", "initial", "epsilons", "replicas"})
MEANFIELD_KEYS = frozenset({"b", "epsilons"})
BOUNDS_KEYS = frozenset({"g", "p", "delta", "b", "monte_carlo", "seed"})
MC_KEYS = frozenset({"T", "R", "replicas"})
ORACLE_KEYS = frozenset({"suites", "budgets", "seed"})


def _fmt(x: float) -> str:
    return "nan" if x is None or math.isnan(x) else repr(float(x))


def _load_config(path: str | None, required: bool = True) -> dict[str, Any]:
    if path is None:
        if required:
            raise ValidationError("--config is required for this subcommand")
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ValidationError("config must be a JSON object")
    return data


def _check_keys(config: dict, allowed: frozenset, where: str) -> None:
    unknown = set(config) - allowed
    if unknown:
        raise ValidationError(f"{where}: unknown keys {sorted(unknown)}")


def _positive_int(value: Any, what: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ValidationError(f"{what} must be an integer >= {minimum}, got {value!r}")
    return value


def _seed(args, config: dict) -> int:
    seed = args.seed if args.seed is not None else config.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return seed


def _initial(config: dict, R: int) -> np.ndarray:
    spec = config.get("initial", "plus")
    if spec == "plus":
        return all_plus(R)
    if spec == "minus":
        return all_minus(R)
    try:
        grid = parse_grid(Path(spec).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read initial grid {spec}: {exc.strerror}") from None
    if grid.shape[0] != R:
        raise ValidationError(f"initial grid has side {grid.shape[0]}, config says R={R}")
    return grid


def _model_and_run(config: dict, allowed_extra: frozenset, where: str, epsilon=None):
    _check_keys(config, MODEL_KEYS | allowed_extra, where)
    R = _positive_int(config.get("R"), "R")
    steps = _positive_int(config.get("steps", 1000), "steps", minimum=0)
    model_cfg = {key: config[key] for key in MODEL_KEYS if key in config}
    if epsilon is not None:
        model_cfg.setdefault("epsilon", epsilon)
    return build_model(model_cfg, horizon=steps), R, steps


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    config = _load_config(args.config)
    model, R, steps = _model_and_run(config, RUN_KEYS, "simulate")
    seed = _seed(args, config)
    traj = run_replicas(_initial(config, R), model, steps, seed, 1, workers=args.threads)
    lines = ["step,density"] + [f"{t},{_fmt(d)}" for t, d in enumerate(traj.densities[0])]
    _emit("\n".join(lines) + "\n", args.out)
    if "snapshot" in config:
        Path(config["snapshot"]).write_text(format_grid(traj.final[0]))
    print(f"late_mean_density={_fmt(traj.late_mean()[0])}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    epsilons = config.get("epsilons")
    if not isinstance(epsilons, list) or not epsilons:
        raise ValidationError("sweep: 'epsilons' must be a non-empty list")
    model, R, steps = _model_and_run(config, SWEEP_KEYS, "sweep", epsilon=epsilons[0])
    replicas = args.replicas if args.replicas is not None else config.get("replicas", 8)
    replicas = _positive_int(replicas, "replicas")
    seed = _seed(args, config)
    initial = _initial(config, R)
    rows = ["epsilon,mean_density,std_error,replicas"]
    for eps in epsilons:
        traj = run_replicas(initial, model.with_epsilon(eps), steps, seed, replicas, workers=args.threads)
        late = np.atleast_1d(traj.late_mean())
        se = late.std(ddof=1) / math.sqrt(replicas) if replicas > 1 else float("nan")
        rows.append(f"{_fmt(eps)},{_fmt(late.mean())},{_fmt(se)},{replicas}")
    _emit("\n".join(rows) + "\n", args.out)
    return EXIT_OK


def cmd_meanfield(args) -> int:
    config = _load_config(args.config)
    _check_keys(config, MEANFIELD_KEYS, "meanfield")
    b = _positive_int(config.get("b"), "b")
    epsilons = config.get("epsilons", [i / 40 for i in range(21)])
    if not isinstance(epsilons, list) or not epsilons:
        raise ValidationError("meanfield: 'epsilons' must be a non-empty list")
    eps_c = meanfield.critical_epsilon(b)
    rows = ["epsilon,fixed_points,stability"]
    for eps in epsilons:
        report = meanfield.find_fixed_points(meanfield.DensityMap(b, eps))
        pts = ";".join(_fmt(r) for r, _ in report.points)
        stab = ";".join(s for _, s in report.points)
        rows.append(f"{_fmt(eps)},{pts},{stab}")
    _emit("\n".join(rows) + "\n", args.out)
    print(f"b={b} critical_epsilon={_fmt(eps_c)}")
    return EXIT_OK


def _number(config: dict, key: str) -> float:
    if key not in config:
        raise ValidationError(f"bounds: missing required parameter {key!r}")
    value = config[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"bounds: {key} must be a number, got {value!r}")
    return value


def cmd_bounds(args) -> int:
    config = _load_config(args.config)
    _check_keys(config, BOUNDS_KEYS, "bounds")
    g, p, delta = (_number(config, key) for key in ("g", "p", "delta"))
    b = _positive_int(config.get("b"), "b")
    if b % 2 == 0:
        raise ValidationError(f"b must be odd, got {b}")
    cert = bounds.certify_nonergodic(g, p, delta, b)
    record = cert.to_json()

    if "monte_carlo" in config:
        mc = config["monte_carlo"]
        if not isinstance(mc, dict):
            raise ValidationError("bounds: monte_carlo must be an object")
        _check_keys(mc, MC_KEYS, "bounds.monte_carlo")
        T = _positive_int(mc.get("T", 5), "monte_carlo.T")
        if not cert.passed:
            raise ValidationError("bounds: Monte Carlo comparison needs a passing certificate")
        schedule = RangeSchedule(ProofSchedule(g, p, cert.params.k), T)
        R = mc.get("R", odd_side(gamma_at(schedule, T - 1)))
        R = _positive_int(R, "monte_carlo.R")
        replicas = args.replicas if args.replicas is not None else mc.get("replicas", 8)
        replicas = _positive_int(replicas, "monte_carlo.replicas")
        model = ModelSpec(ScheduledBox(schedule), UpdateParams(b, cert.params.epsilon), "intermediate-scheduled")
        est, se, nobs = oracles.minus_probability_mc(model, T, R, replicas, _seed(args, config), args.threads)
        record["monte_carlo"] = {
            "T": T,
            "R": R,
            "replicas": replicas,
            "observations": nobs,
            "estimate": est,
            "std_error": se,
            "below_bound": est <= cert.bound + 4 * se,
        }
    _emit(json.dumps(record, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    config = _load_config(args.config, required=False)
    _check_keys(config, ORACLE_KEYS, "oracle")
    names = args.suite or config.get("suites")
    results = oracles.run_suites(names, config.get("budgets"), _seed(args, config), args.threads)
    lines = []
    for res in results:
        lines.append(f"[{'PASS' if res.passed else 'FAIL'}] suite {res.name}")
        lines += [f"  {ln}" for ln in res.lines]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_ORACLE


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "meanfield": cmd_meanfield,
    "bounds": cmd_bounds,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="majority-pca", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--seed", type=int, help="overrides the config seed")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--replicas", type=int, help="overrides the config replica count")
        p.add_argument("--threads", type=int, default=1, help="worker threads; never affects results")
        if name == "oracle":
            p.add_argument("--suite", action="append", choices=oracles.SUITES, help="run only this suite")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code else EXIT_OK
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return COMMANDS[args.command](args)
    except BudgetError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValidationError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE


if __name__ == "__main__":
    sys.exit(main())
