"""Self-checking suites pairing each bound with an independent computation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bounds
from .errors import BudgetError, ValidationError
from .lattice import all_plus, run_replicas
from .models import ModelSpec, UniformBox, UpdateParams

SUITES = ("kappa", "recursion", "tree", "exact-small-t")

DEFAULT_BUDGETS = {
    "kappa_max_lines": 12,
    "recursion_max_height": 3,
    "tree_max_height": 4,
    "mc_samples": 1_000_000,
}
BUDGET_LIMITS = {
    "kappa_max_lines": bounds.KAPPA_MAX_LINES,
    "recursion_max_height": bounds.S_MAX_HEIGHT,
    "tree_max_height": bounds.S_MAX_HEIGHT,
    "mc_samples": 10_000_000,
}


@dataclass
class SuiteResult:
    name: str
    passed: bool = True
    lines: list[str] = field(default_factory=list)

    def check(self, ok: bool, message: str) -> None:
        self.passed &= bool(ok)
        self.lines.append(f"{'PASS' if ok else 'FAIL'} {message}")


def minus_probability_mc(
    model: ModelSpec, T: int, R: int, replicas: int, seed: int, workers: int = 1
) -> tuple[float, float, int]:
    """Monte Carlo estimate of P(a site is - at time T) from an all-+ start.

    Every cell of every replica is one observation of the origin (the
    dynamics is translation invariant).  The standard error is taken across
    replica means, which accounts for spatial correlation within a grid.
    Returns ``(estimate, std_error, observations)``.
    """
    traj = run_replicas(all_plus(R), model, T, seed, replicas, workers=workers)
    per_replica = 1.0 - np.atleast_1d(traj.densities[..., -1])
    est = float(per_replica.mean())
    se = float(per_replica.std(ddof=1) / math.sqrt(replicas)) if replicas > 1 else float("nan")
    return est, se, replicas * R * R


def kappa_suite(max_lines: int = 12) -> SuiteResult:
    if max_lines > bounds.KAPPA_MAX_LINES:
        raise BudgetError(f"kappa_max_lines={max_lines} exceeds {bounds.KAPPA_MAX_LINES}")
    res = SuiteResult("kappa")
    worst = 0
    for k in (2, 3):
        for n in range(1, 4):
            if k * n > max_lines:
                continue
            for m in range(0, k * n + 1):
                ex, bd = bounds.kappa_exact(n, m, k), bounds.kappa_bound_int(n, m, k)
                if ex > bd:
                    res.check(False, f"kappa_exact({n},{m},{k})={ex} > bound {bd}")
                    worst += 1
            res.check(bounds.kappa_exact(n, k * n, k) == 1, f"kappa_exact({n},{k * n},{k}) == 1")
            res.check(bounds.kappa_exact(n, 0, k) == 0, f"kappa_exact({n},0,{k}) == 0")
    res.check(worst == 0, "kappa_exact <= kappa_bound for n <= 3, k in (2, 3)")
    mismatches = [
        (N, m)
        for N in range(1, max_lines + 1)
        for m, count in enumerate(np.bincount(bounds.set_partitions(N).max(axis=1) + 1, minlength=N + 1))
        if count != bounds.stirling2(N, m)
    ]
    res.check(not mismatches, f"enumeration matches the Stirling recurrence for N <= {max_lines}")
    return res


def recursion_suite(max_height: int = 3, b: int = 3, g: float = 48.0) -> SuiteResult:
    if max_height > bounds.S_MAX_HEIGHT:
        raise BudgetError(f"recursion_max_height={max_height} exceeds {bounds.S_MAX_HEIGHT}")
    res = SuiteResult("recursion")
    params = bounds.BoundParams(b, g)
    eps = bounds.epsilon_ceiling(params)
    xt = bounds.tilde_x(params)
    sched = bounds.power_schedule(g, params.k)
    for t_m in range(max_height + 1):
        s = bounds.S_direct(t_m, eps, eps, sched, b)
        top = bounds.iterate_epsilon(eps, t_m, params)[-1]
        res.check(s <= top <= xt, f"t_m={t_m}: S={s:.6g} <= iterate={top:.6g} <= tilde_x={xt:.6g}")
    return res


def tree_suite(max_height: int = 4) -> SuiteResult:
    if max_height > bounds.S_MAX_HEIGHT:
        raise BudgetError(f"tree_max_height={max_height} exceeds {bounds.S_MAX_HEIGHT}")
    res = SuiteResult("tree")
    for k in (2, 3):
        for t_m in range(max_height + 1):
            shapes = list(bounds.enumerate_shapes(t_m, k, trees_only=True))
            low = min(sum(s.e) for s in shapes)
            res.check(
                low >= t_m * (k - 1) + 1,
                f"k={k} t_m={t_m}: {len(shapes)} trees, min errors {low} >= {t_m * (k - 1) + 1}",
            )
    return res


def exact_small_t_suite(samples: int = 1_000_000, seed: int = 0, workers: int = 1) -> SuiteResult:
    if samples > BUDGET_LIMITS["mc_samples"]:
        raise BudgetError(f"mc_samples={samples} exceeds {BUDGET_LIMITS['mc_samples']}")
    res = SuiteResult("exact-small-t")
    b, eps, side = 3, 0.1, 3
    model = ModelSpec(UniformBox(side), UpdateParams(b, eps), "intermediate-fixed")
    R = 125
    replicas = max(2, -(-samples // (R * R)))
    for T in (1, 2):
        exact = bounds.exact_small_T(T, b, eps, side * side)
        est, se, nobs = minus_probability_mc(model, T, R, replicas, seed + T, workers)
        res.check(
            abs(est - exact) <= 4 * se,
            f"T={T}: exact {exact:.6f}, Monte Carlo {est:.6f} +- {se:.2g} ({nobs} obs)",
        )
    return res


def run_suites(names=None, budgets=None, seed: int = 0, workers: int = 1) -> list[SuiteResult]:
    names = list(SUITES) if not names else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ValidationError(f"unknown suites {unknown}; choose from {', '.join(SUITES)}")
    cfg = dict(DEFAULT_BUDGETS)
    for key, value in (budgets or {}).items():
        if key not in DEFAULT_BUDGETS:
            raise ValidationError(f"unknown budget {key!r}")
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise ValidationError(f"budget {key} must be a non-negative integer")
        if value > BUDGET_LIMITS[key]:
            raise BudgetError(f"budget {key}={value} exceeds limit {BUDGET_LIMITS[key]}")
        cfg[key] = value
    out = []
    for name in names:
        if name == "kappa":
            out.append(kappa_suite(cfg["kappa_max_lines"]))
        elif name == "recursion":
            out.append(recursion_suite(cfg["recursion_max_height"]))
        elif name == "tree":
            out.append(tree_suite(cfg["tree_max_height"]))
        else:
            out.append(exact_small_t_suite(cfg["mc_samples"], seed, workers))
    return out
