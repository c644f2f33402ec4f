"""Graph-expansion bounds for the range-scheduled majority voter.

The probability that the origin is ``-`` at time ``T`` (starting from all
``+``) is bounded by a sum over shapes of witness graphs.  A shape records,
for each backward time ``t``, the number of sites ``n_t`` and error sites
``e_t``; non-error sites emit ``k = (b+1)/2`` lines to the next layer.  This
module evaluates the shape weights, enumerates small shape spaces exactly,
and implements the renormalization map that bounds the shape sum, together
with the final certificate.

All counts are computed with Python integers; floats appear only once the
weights are assembled.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Union

import numpy as np

from .errors import BudgetError, PreconditionError, ValidationError
from .models import RangeSchedule, gamma_at

KAPPA_MAX_LINES = 12
S_MAX_HEIGHT = 4
S_MAX_K = 3
EXACT_MAX_B = 7
EXACT_MAX_GAMMA = 10_000

Schedule = Union[RangeSchedule, Callable[[int], float]]


def _k_of(b: int) -> int:
    if b < 1 or b % 2 == 0:
        raise ValidationError(f"b must be odd and positive, got {b}")
    return (b + 1) // 2


def capacity_C(b: int) -> float:
    """``binom(b, k) ** (1/k)``."""
    k = _k_of(b)
    return math.comb(b, k) ** (1.0 / k)


def _gamma_fn(schedule: Schedule) -> Callable[[int], float]:
    if isinstance(schedule, RangeSchedule):
        return lambda t: gamma_at(schedule, t)
    return schedule


def power_schedule(g: float, k: int) -> Callable[[int], float]:
    """``gamma_t = g * k**t``, the schedule under which the map is t-independent."""
    return lambda t: g * k**t


# ---------------------------------------------------------------------------
# line arrangements


@lru_cache(maxsize=None)
def set_partitions(N: int) -> np.ndarray:
    """Every partition of ``N`` labeled items, as restricted growth strings.

    Row ``i`` assigns item ``j`` to block ``rgs[i, j]``; blocks are numbered
    in order of first appearance.  There are Bell(N) rows.
    """
    if N < 0:
        raise ValidationError(f"N must be >= 0, got {N}")
    if N > KAPPA_MAX_LINES:
        raise BudgetError(f"refusing to enumerate partitions of {N} > {KAPPA_MAX_LINES} items")
    if N == 0:
        return np.zeros((1, 0), dtype=np.int8)
    rgs = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)  # largest block label used so far
    for _ in range(1, N):
        choices = top.astype(np.int64) + 2
        rows = np.repeat(np.arange(len(rgs)), choices)
        starts = np.cumsum(choices) - choices
        label = (np.arange(len(rows)) - np.repeat(starts, choices)).astype(np.int8)
        rgs = np.concatenate([rgs[rows], label[:, None]], axis=1)
        top = np.maximum(top[rows], label)
    rgs.setflags(write=False)
    return rgs


def kappa_exact(n: int, m: int, k: int) -> int:
    """Number of ways to send the ``k n`` labeled lines onto ``m`` unlabeled sites.

    Every arrival site receives at least one line, so this is the number of
    partitions of ``k n`` items into exactly ``m`` blocks, counted by listing
    the partitions.
    """
    if n < 1 or k < 1 or m < 0:
        raise ValidationError(f"need n >= 1, k >= 1, m >= 0; got n={n}, m={m}, k={k}")
    N = k * n
    if N > KAPPA_MAX_LINES:
        raise BudgetError(f"k*n = {N} exceeds the enumeration budget of {KAPPA_MAX_LINES} lines")
    if m == 0 or m > N:
        return 0
    rgs = set_partitions(N)
    return int(np.count_nonzero(rgs.max(axis=1) == m - 1))


@lru_cache(maxsize=None)
def stirling2(N: int, m: int) -> int:
    """Stirling number of the second kind from the triangular recurrence."""
    if N == m:
        return 1
    if m == 0 or m > N:
        return 0
    return m * stirling2(N - 1, m) + stirling2(N - 1, m - 1)


def kappa_bound_int(n: int, m: int, k: int) -> int:
    N = k * n
    if not 1 <= m <= N:
        return 0
    return math.factorial(N) * math.comb(N - 1, m - 1) // math.factorial(m)


def kappa_bound(n: int, m: int, k: int) -> float:
    """``(k n)! binom(k n - 1, m - 1) / m!``; zero outside ``1 <= m <= k n``."""
    return float(kappa_bound_int(n, m, k))


# ---------------------------------------------------------------------------
# graph shapes


@dataclass(frozen=True, order=True)
class GraphShape:
    """Layer sizes ``n`` and error counts ``e`` of a witness graph, top to bottom."""

    n: tuple[int, ...]
    e: tuple[int, ...]

    @property
    def t_m(self) -> int:
        return len(self.n) - 1

    def r(self, k: int) -> tuple[int, ...]:
        """Extra lines ``r_t = k (n_t - e_t) - n_{t+1}`` for ``t < t_m``."""
        return tuple(k * (self.n[t] - self.e[t]) - self.n[t + 1] for t in range(self.t_m))

    def validate(self, k: int) -> None:
        n, e = self.n, self.e
        if len(n) == 0 or len(n) != len(e):
            raise ValidationError(f"n and e must be non-empty and of equal length: {n}, {e}")
        if n[0] != 1:
            raise ValidationError(f"the top layer holds exactly one site, got n_0={n[0]}")
        for t, (nt, et) in enumerate(zip(n, e)):
            if not 0 <= et <= nt:
                raise ValidationError(f"need 0 <= e_t <= n_t at t={t}, got e={et}, n={nt}")
        if e[-1] != n[-1]:
            raise ValidationError("every site of the bottom layer must be an error site")
        for t in range(self.t_m):
            if not 0 < n[t + 1] <= k * (n[t] - e[t]):
                raise ValidationError(
                    f"need 0 < n_{t + 1} <= k (n_{t} - e_{t}); got {n[t + 1]} vs {k * (n[t] - e[t])}"
                )


def enumerate_shapes(t_m: int, k: int, trees_only: bool = False) -> Iterator[GraphShape]:
    """All valid shapes of height ``t_m`` in lexicographic order.

    With ``trees_only`` only shapes with every ``r_t = 0`` are produced.
    """
    if t_m < 0 or k < 1:
        raise ValidationError(f"need t_m >= 0 and k >= 1, got t_m={t_m}, k={k}")

    def extend(n: tuple[int, ...], e: tuple[int, ...]) -> Iterator[GraphShape]:
        t = len(n) - 1
        if t == t_m:
            yield GraphShape(n, e + (n[-1],))
            return
        for et in range(n[-1]):
            width = k * (n[-1] - et)
            nexts = (width,) if trees_only else range(1, width + 1)
            for nn in nexts:
                yield from extend(n + (nn,), e + (et,))

    yield from extend((1,), ())


def shape_weight(shape: GraphShape, epsilon: float, eps_0: float, schedule: Schedule, b: int) -> float:
    """Bound on the total probability of all graphs with this shape.

    Product over layers ``t < t_m`` of
    ``binom(n_t, e_t) kappa_bound(n_t - e_t, n_{t+1}) eps^e_t C^(k (n_t - e_t)) / gamma_t^r_t``,
    times ``eps_0 ** n_{t_m}`` for the bottom layer.
    """
    k = _k_of(b)
    shape.validate(k)
    gamma = _gamma_fn(schedule)
    C = capacity_C(b)
    w = 1.0
    for t, rt in enumerate(shape.r(k)):
        nt, et = shape.n[t], shape.e[t]
        live = nt - et
        w *= math.comb(nt, et) * kappa_bound(live, shape.n[t + 1], k)
        w *= epsilon**et * C ** (k * live) / float(gamma(t)) ** rt
    return w * eps_0 ** shape.n[-1]


def S_direct(t_m: int, epsilon: float, eps_0: float, schedule: Schedule, b: int) -> float:
    """Exact sum of :func:`shape_weight` over every shape of height ``t_m``."""
    k = _k_of(b)
    if t_m > S_MAX_HEIGHT or k > S_MAX_K:
        raise BudgetError(
            f"shape enumeration limited to t_m <= {S_MAX_HEIGHT}, k <= {S_MAX_K}; got t_m={t_m}, k={k}"
        )
    return math.fsum(shape_weight(s, epsilon, eps_0, schedule, b) for s in enumerate_shapes(t_m, k))


# ---------------------------------------------------------------------------
# renormalization map and certificate


@dataclass(frozen=True)
class BoundParams:
    """Constants of the bound: schedule ``gamma_t = g p^(t+1) k^t``, ``eps = delta * eps_prime``."""

    b: int
    g: float
    p: float = 2.0
    delta: float = 1.0
    eps_prime: float = 0.0

    def __post_init__(self):
        _k_of(self.b)

    @property
    def k(self) -> int:
        return (self.b + 1) // 2

    @property
    def C(self) -> float:
        return capacity_C(self.b)

    @property
    def epsilon(self) -> float:
        return self.delta * self.eps_prime


def _trap_terms(params: BoundParams) -> tuple[float, float]:
    # 1/C (1/(Ck))^(1/(k-1)) and (1/(Ck))^(k/(k-1)), written via C^k = binom(b, k)
    k = params.k
    if k < 2:
        raise ValidationError("the trapping point needs k >= 2 (b >= 3)")
    ck = math.comb(params.b, k) * k
    return ck ** (-1.0 / (k - 1)), (ck * k ** (k - 1)) ** (-1.0 / (k - 1))


def h_map(x: float, t: int, epsilon: float, params: BoundParams, schedule: Schedule | None = None) -> float:
    """``(C x + k^t C / gamma_{t-1}) ** k + epsilon``.

    Without a schedule, ``gamma_t = g k^t`` is assumed and the shift term
    reduces to ``k C / g`` for every ``t``.
    """
    k, C = params.k, params.C
    if schedule is None:
        ratio = k / params.g
    else:
        if t < 1:
            raise ValidationError("h_t needs t >= 1 when a schedule is given")
        ratio = k**t / float(_gamma_fn(schedule)(t - 1))
    return (C * x + C * ratio) ** k + epsilon


def tilde_x(params: BoundParams) -> float:
    """Point where the map's slope reaches 1, for ``gamma_t = g k^t``."""
    A, _ = _trap_terms(params)
    return A - params.k / params.g


def epsilon_ceiling(params: BoundParams) -> float:
    """Largest error rate for which iterates of the map stay below :func:`tilde_x`."""
    A, B = _trap_terms(params)
    return A - B - params.k / params.g


@dataclass(frozen=True)
class ConditionReport:
    range_ok: bool
    range_slack: float
    epsilon_ok: bool
    epsilon_slack: float

    @property
    def passed(self) -> bool:
        return self.range_ok and self.epsilon_ok

    def __bool__(self) -> bool:
        return self.passed


def condition_check(epsilon: float, params: BoundParams) -> ConditionReport:
    """Check ``k/g <= A - B`` and ``epsilon <= A - B - k/g``, with slacks."""
    A, B = _trap_terms(params)
    range_slack = (A - B) - params.k / params.g
    eps_slack = range_slack - epsilon
    return ConditionReport(range_slack >= 0, range_slack, eps_slack >= 0, eps_slack)


def iterate_epsilon(epsilon: float, t_m: int, params: BoundParams, schedule: Schedule | None = None) -> list[float]:
    """``[eps_0 = eps, eps_1 = h(eps_0), ..., eps_{t_m}]``."""
    report = condition_check(epsilon, params)
    if not report:
        raise PreconditionError(
            f"iteration condition fails: range slack {report.range_slack:.3g}, "
            f"epsilon slack {report.epsilon_slack:.3g}"
        )
    seq = [epsilon]
    for j in range(t_m):
        # the j-th renormalization removes layer t_m - j
        seq.append(h_map(seq[-1], t_m - j, epsilon, params, schedule))
    return seq


def theorem_bound(params: BoundParams) -> float:
    """``delta p / (p - 1) * tilde_x``, an upper bound on P(origin is - at T) for every T."""
    k, p, delta = params.k, params.p, params.delta
    if not p > 1:
        raise PreconditionError(f"need p > 1, got p={p}")
    if not 0 < delta < 1:
        raise PreconditionError(f"need 0 < delta < 1, got delta={delta}")
    if p * delta ** (k - 1) > 1:
        raise PreconditionError(f"need p * delta^(k-1) <= 1, got {p * delta ** (k - 1):.6g}")
    report = condition_check(params.eps_prime, params)
    if not report.range_ok:
        raise PreconditionError(f"need k/g <= A - B; slack {report.range_slack:.6g}")
    if not report.epsilon_ok:
        raise PreconditionError(f"need eps' <= A - B - k/g; slack {report.epsilon_slack:.6g}")
    return delta * p / (p - 1) * tilde_x(params)


@dataclass
class Certificate:
    params: BoundParams
    tilde_x: float
    bound: float | None
    checks: dict[str, bool] = field(default_factory=dict)
    passed: bool = False

    def to_json(self) -> dict:
        pr = self.params
        return {
            "b": pr.b,
            "k": pr.k,
            "C": pr.C,
            "g": pr.g,
            "p": pr.p,
            "delta": pr.delta,
            "eps_prime": pr.eps_prime,
            "epsilon": pr.epsilon,
            "tilde_x": self.tilde_x,
            "bound": self.bound,
            "checks": dict(self.checks),
            "pass": self.passed,
        }


def certify_nonergodic(g: float, p: float, delta: float, b: int) -> Certificate:
    """Pick the largest admissible ``eps'`` and evaluate every inequality.

    The certificate passes when all checks hold and the bound is below 1/2.
    Failing parameters produce a failing certificate, not an exception.
    """
    base = BoundParams(b, g, p, delta)
    eps_prime = epsilon_ceiling(base)
    params = BoundParams(b, g, p, delta, eps_prime)
    report = condition_check(eps_prime, params)
    checks = {
        # ``eps_prime`` sits on the ceiling, so the epsilon check needs room above zero
        "eq7_first": report.range_ok,
        "eq7_second": report.epsilon_ok and eps_prime > 0,
        "p_delta": p > 1 and 0 < delta < 1 and p * delta ** (params.k - 1) <= 1,
    }
    bound = theorem_bound(params) if all(checks.values()) else None
    passed = bound is not None and bound < 0.5 and params.epsilon <= 0.5
    return Certificate(params, tilde_x(params), bound, checks, passed)


# ---------------------------------------------------------------------------
# exact small-T probabilities


def _majority_minus_prob(b: int, epsilon: float, gamma: int | None) -> float:
    """P(majority of b draws is -), layer below i.i.d. - with probability epsilon."""
    k = _k_of(b)
    if gamma is None:
        return math.fsum(
            math.comb(b, j) * epsilon**j * (1 - epsilon) ** (b - j) for j in range(k, b + 1)
        )
    total = 0.0
    for rgs in set_partitions(b):
        sizes = np.bincount(rgs, minlength=1)
        m = len(sizes)
        # ordered draws hitting m distinct sites in this collision pattern
        p_pattern = math.perm(gamma, m) / gamma**b
        if p_pattern == 0.0:
            continue
        p_minus = 0.0
        for states in itertools.product((0, 1), repeat=m):
            votes = sum(s * c for s, c in zip(states, sizes))
            if votes >= k:
                nm = sum(states)
                p_minus += epsilon**nm * (1 - epsilon) ** (m - nm)
        total += p_pattern * p_minus
    return total


def exact_small_T(T: int, b: int, epsilon: float, gamma: int | None = None) -> float:
    """Exact P(origin is - at time T) from an all-+ start, for T = 1 or 2.

    ``gamma`` is the number of sites the origin draws from at the last step
    (``None`` for the no-collision limit).  Sites at time 1 are independent,
    so the only correlation at T = 2 comes from repeated draws.
    """
    if T not in (1, 2):
        raise BudgetError(f"exact evaluation only for T in (1, 2), got T={T}")
    if b > EXACT_MAX_B:
        raise BudgetError(f"b={b} exceeds {EXACT_MAX_B}")
    if gamma is not None and not 1 <= gamma <= EXACT_MAX_GAMMA:
        raise BudgetError(f"gamma={gamma} outside [1, {EXACT_MAX_GAMMA}]")
    _k_of(b)
    if T == 1:
        return float(epsilon)
    mm = _majority_minus_prob(b, epsilon, gamma)
    return (1 - epsilon) * mm + epsilon * (1 - mm)
