"""Neighbor-selection mechanisms, range schedules and the model catalog."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Union

from .errors import ValidationError

NEC_OFFSETS = ((0, 0), (0, 1), (1, 0))
SYM5_OFFSETS = ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1))

CATALOG = (
    "toom-nec",
    "sym5",
    "intermediate-fixed",
    "intermediate-scheduled",
    "meanfield",
    "custom",
)


@dataclass(frozen=True)
class UpdateParams:
    """Neighbor count ``b`` (odd) and error rate ``epsilon`` in [0, 1/2]."""

    b: int
    epsilon: float

    def __post_init__(self):
        if not isinstance(self.b, int) or isinstance(self.b, bool) or self.b < 1:
            raise ValidationError(f"b must be a positive integer, got {self.b!r}")
        if self.b % 2 == 0:
            raise ValidationError(f"b must be odd, got {self.b}")
        eps = self.epsilon
        if not isinstance(eps, (int, float)) or isinstance(eps, bool) or not 0.0 <= eps <= 0.5:
            raise ValidationError(f"epsilon must lie in [0, 0.5], got {eps!r}")

    @property
    def k(self) -> int:
        return (self.b + 1) // 2


# ---------------------------------------------------------------------------
# range schedules


@dataclass(frozen=True)
class ConstantGamma:
    gamma: float


@dataclass(frozen=True)
class Geometric:
    """``gamma_t = g * p**t``."""

    g: float
    p: float


@dataclass(frozen=True)
class ProofSchedule:
    """``gamma_t = g * p**(t+1) * k**t``."""

    g: float
    p: float
    k: int


ScheduleKind = Union[ConstantGamma, Geometric, ProofSchedule]


@dataclass(frozen=True)
class RangeSchedule:
    """A backward-time sequence of range sizes over a horizon of ``horizon`` steps.

    Index ``t`` counts backward from the final time: ``gamma_t`` is the number
    of sites at time ``T - t - 1`` among which a site at time ``T - t`` draws.
    """

    kind: ScheduleKind
    horizon: int

    def __post_init__(self):
        if self.horizon < 0:
            raise ValidationError(f"horizon must be >= 0, got {self.horizon}")
        kind = self.kind
        if isinstance(kind, ConstantGamma):
            if kind.gamma < 1:
                raise ValidationError(f"gamma must be >= 1, got {kind.gamma}")
        elif isinstance(kind, (Geometric, ProofSchedule)):
            if kind.g < 1:
                raise ValidationError(f"g must be >= 1, got {kind.g}")
            if kind.p <= 1:
                raise ValidationError(f"p must be > 1, got {kind.p}")
            if isinstance(kind, ProofSchedule) and kind.k < 1:
                raise ValidationError(f"k must be >= 1, got {kind.k}")
        else:
            raise ValidationError(f"unknown schedule kind {kind!r}")


def gamma_at(schedule: RangeSchedule, t: int) -> int:
    """Range size ``gamma_t`` at backward index ``t``, rounded to an integer."""
    if not 0 <= t < schedule.horizon:
        raise ValidationError(f"t={t} outside [0, {schedule.horizon})")
    kind = schedule.kind
    if isinstance(kind, ConstantGamma):
        value = kind.gamma
    elif isinstance(kind, Geometric):
        value = kind.g * kind.p**t
    else:
        value = kind.g * kind.p ** (t + 1) * kind.k**t
    return max(1, int(round(value)))


def odd_side(gamma: int) -> int:
    """Smallest odd ``l`` with ``l**2 >= gamma``."""
    l = math.isqrt(gamma - 1) + 1 if gamma > 1 else 1
    return l if l % 2 else l + 1


def largest_odd_at_most(r: int) -> int:
    return r if r % 2 else r - 1


def side_at(schedule: RangeSchedule, u: int, R: int) -> int:
    """Box side used at forward step ``u`` (1-based) on a grid of side ``R``."""
    if not 1 <= u <= schedule.horizon:
        raise ValidationError(f"forward step u={u} outside [1, {schedule.horizon}]")
    l = odd_side(gamma_at(schedule, schedule.horizon - u))
    return min(l, largest_odd_at_most(R))


# ---------------------------------------------------------------------------
# samplers


@dataclass(frozen=True)
class FixedOffsets:
    offsets: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.offsets) % 2 == 0:
            raise ValidationError(
                f"a fixed neighborhood needs an odd number of offsets, got {len(self.offsets)}"
            )


@dataclass(frozen=True)
class UniformBox:
    side: int

    def __post_init__(self):
        if self.side < 1 or self.side % 2 == 0:
            raise ValidationError(f"box side must be a positive odd integer, got {self.side}")


@dataclass(frozen=True)
class ScheduledBox:
    schedule: RangeSchedule


@dataclass(frozen=True)
class WholeGrid:
    pass


NeighborSampler = Union[FixedOffsets, UniformBox, ScheduledBox, WholeGrid]


def box_side(sampler: NeighborSampler, u: int, R: int) -> int | None:
    """Side of the random box at forward step ``u``; ``None`` for fixed offsets.

    ``WholeGrid`` returns ``R`` itself, which may be even: the box then covers
    every cell of the torus exactly once.
    """
    if isinstance(sampler, FixedOffsets):
        return None
    if isinstance(sampler, UniformBox):
        return sampler.side
    if isinstance(sampler, ScheduledBox):
        return side_at(sampler.schedule, u, R)
    if isinstance(sampler, WholeGrid):
        return R
    raise ValidationError(f"unknown sampler {sampler!r}")


@dataclass(frozen=True)
class ModelSpec:
    sampler: NeighborSampler
    params: UpdateParams
    name: str = "custom"

    def __post_init__(self):
        if isinstance(self.sampler, FixedOffsets) and len(self.sampler.offsets) != self.params.b:
            raise ValidationError(
                f"{len(self.sampler.offsets)} offsets but b={self.params.b}"
            )

    def with_epsilon(self, epsilon: float) -> "ModelSpec":
        return ModelSpec(self.sampler, UpdateParams(self.params.b, epsilon), self.name)


# ---------------------------------------------------------------------------
# JSON config

MODEL_KEYS = frozenset({"name", "b", "epsilon", "l", "schedule", "offsets", "R", "seed"})
SCHEDULE_KEYS = frozenset({"kind", "gamma", "g", "p", "k", "T"})


def _require(config: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in config:
        raise ValidationError(f"{where}: missing required key {key!r}")
    return config[key]


def _as_int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or value != int(value):
        raise ValidationError(f"{what} must be an integer, got {value!r}")
    return int(value)


def build_schedule(config: Mapping[str, Any], b: int, horizon: int | None = None) -> RangeSchedule:
    """Parse ``{"kind": ..., "g": ..., "p": ..., "T": ...}`` into a schedule."""
    if not isinstance(config, Mapping):
        raise ValidationError("schedule must be a JSON object")
    unknown = set(config) - SCHEDULE_KEYS
    if unknown:
        raise ValidationError(f"schedule: unknown keys {sorted(unknown)}")
    kind_name = _require(config, "kind", "schedule")
    if "T" in config:
        T = _as_int(config["T"], "schedule.T")
    elif horizon is not None:
        T = horizon
    else:
        raise ValidationError("schedule: missing required key 'T'")
    if horizon is not None and T != horizon:
        raise ValidationError(f"schedule.T={T} disagrees with steps={horizon}")
    if kind_name == "constant":
        kind: ScheduleKind = ConstantGamma(float(_require(config, "gamma", "schedule")))
    elif kind_name == "geometric":
        kind = Geometric(float(_require(config, "g", "schedule")), float(_require(config, "p", "schedule")))
    elif kind_name == "proof":
        k = _as_int(config.get("k", (b + 1) // 2), "schedule.k")
        kind = ProofSchedule(float(_require(config, "g", "schedule")), float(_require(config, "p", "schedule")), k)
    else:
        raise ValidationError(f"schedule: unknown kind {kind_name!r} (constant | geometric | proof)")
    return RangeSchedule(kind, T)


def build_model(config: Mapping[str, Any], horizon: int | None = None) -> ModelSpec:
    """Validate a model config and return the corresponding :class:`ModelSpec`.

    ``horizon`` is the run length; it fills in a schedule's ``T`` when absent.
    Keys ``R`` and ``seed`` are accepted but belong to the run, not the model.
    """
    if not isinstance(config, Mapping):
        raise ValidationError("model config must be a JSON object")
    unknown = set(config) - MODEL_KEYS
    if unknown:
        raise ValidationError(f"model: unknown keys {sorted(unknown)}")
    name = _require(config, "name", "model")
    if name not in CATALOG:
        raise ValidationError(f"model: unknown name {name!r}; expected one of {', '.join(CATALOG)}")
    epsilon = _require(config, "epsilon", "model")

    if name in ("toom-nec", "sym5"):
        offsets = NEC_OFFSETS if name == "toom-nec" else SYM5_OFFSETS
        b = _as_int(config.get("b", len(offsets)), "b")
        if b != len(offsets):
            raise ValidationError(f"{name} has b={len(offsets)}, got b={b}")
        params = UpdateParams(b, epsilon)
        return ModelSpec(FixedOffsets(offsets), params, name)

    b = _as_int(_require(config, "b", "model"), "b")
    params = UpdateParams(b, epsilon)
    if name == "intermediate-fixed":
        sampler: NeighborSampler = UniformBox(_as_int(_require(config, "l", "model"), "l"))
    elif name == "intermediate-scheduled":
        sampler = ScheduledBox(build_schedule(_require(config, "schedule", "model"), b, horizon))
    elif name == "meanfield":
        sampler = WholeGrid()
    else:
        raw = _require(config, "offsets", "model")
        try:
            offsets = tuple((int(dx), int(dy)) for dx, dy in raw)
        except (TypeError, ValueError):
            raise ValidationError("offsets must be a list of [dx, dy] pairs") from None
        sampler = FixedOffsets(offsets)
    return ModelSpec(sampler, params, name)
