"""Synchronous majority-voter updates on an R x R torus.

Spins are stored as ``int8`` arrays holding +1 / -1.  A batch of independent
replicas is an array of shape ``(n, R, R)``; every function that takes a grid
also accepts a batch.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import rng
from .errors import ValidationError
from .models import ModelSpec, NeighborSampler, ScheduledBox, UpdateParams, box_side

PLUS = np.int8(1)
MINUS = np.int8(-1)


def all_plus(R: int) -> np.ndarray:
    return np.ones((R, R), dtype=np.int8)


def all_minus(R: int) -> np.ndarray:
    return -np.ones((R, R), dtype=np.int8)


def density(grid: np.ndarray) -> float | np.ndarray:
    """Fraction of ``+`` cells (per replica for a batch)."""
    d = (np.asarray(grid) > 0).mean(axis=(-2, -1))
    return float(d) if np.ndim(d) == 0 else d


def majority_of(samples: Iterable[int]) -> int:
    """Strict majority of an odd-size multiset of +1 / -1 spins."""
    values = list(samples)
    if len(values) % 2 == 0:
        raise ValidationError(f"majority of an even-size multiset ({len(values)}) is undefined")
    if any(v not in (1, -1) for v in values):
        raise ValidationError("spins must be +1 or -1")
    return 1 if sum(values) > 0 else -1


@lru_cache(maxsize=32)
def _counters(R: int, slots: int) -> np.ndarray:
    if R >= rng.MAX_COORD or slots >= rng.MAX_SLOTS:
        raise ValidationError(f"grid side {R} or slot count {slots} exceeds the key layout")
    xs = np.arange(R, dtype=np.uint64)[:, None, None]
    ys = np.arange(R, dtype=np.uint64)[None, :, None]
    c = rng.cell_counters(xs, ys, np.arange(slots, dtype=np.uint64)[None, None, :])
    c.setflags(write=False)
    return c


@lru_cache(maxsize=32)
def _box_tables(R: int, side: int) -> tuple[np.ndarray, np.ndarray]:
    half = side // 2
    wrapped = np.arange(-half, R + side - half) % R
    return wrapped * R, wrapped


def _update_rows(
    grid: np.ndarray,
    keys: np.ndarray,
    sampler: NeighborSampler,
    params: UpdateParams,
    t: int,
    r0: int,
    r1: int,
) -> np.ndarray:
    n, R, _ = grid.shape
    b = params.b
    side = box_side(sampler, t, R)
    counters = _counters(R, b + 1)[r0:r1]
    key = keys[:, None, None]

    if side is None:
        total = np.zeros((n, r1 - r0, R), dtype=np.int16)
        rows = np.arange(r0, r1)
        for dx, dy in sampler.offsets:
            total += np.roll(grid, -dy, axis=2)[:, (rows + dx) % R, :]
    else:
        bits = rng.keyed_bits(key[..., None], counters[None, :, :, 1:])
        row_of, col_of = _box_tables(R, side)
        # high and low 32 bits pick the row and column inside the box
        di = rng.bits_to_index(bits, side).astype(np.intp)
        dj = rng.bits_to_index(bits << np.uint64(32), side).astype(np.intp)
        di += np.arange(r0, r1)[:, None, None]
        dj += np.arange(R)[None, :, None]
        flat = row_of[di] + col_of[dj]
        picked = np.take_along_axis(grid.reshape(n, R * R), flat.reshape(n, -1), axis=1)
        total = picked.reshape(n, r1 - r0, R, b).sum(axis=-1, dtype=np.int16)

    majority = np.where(total > 0, PLUS, MINUS)
    u = rng.bits_to_unit(rng.keyed_bits(key, counters[None, :, :, rng.FLIP_SLOT]))
    return np.where(u < params.epsilon, -majority, majority).astype(np.int8)


def _check_side(sampler: NeighborSampler, t: int, R: int) -> None:
    side = box_side(sampler, t, R)
    if side is not None and side > R:
        raise ValidationError(f"box side {side} exceeds grid side {R}")


def step(
    grid: np.ndarray,
    sampler: NeighborSampler,
    params: UpdateParams,
    t: int,
    seed: int | Sequence[int],
    workers: int = 1,
) -> np.ndarray:
    """One synchronous update producing the configuration at time ``t``.

    ``seed`` is a single integer for one grid, or one integer per replica
    for a batch.  The input is never modified.  ``workers`` splits the rows
    across threads and has no effect on the result.
    """
    grid = np.asarray(grid, dtype=np.int8)
    single = grid.ndim == 2
    batch = grid[None] if single else grid
    if batch.ndim != 3 or batch.shape[1] != batch.shape[2]:
        raise ValidationError(f"expected an R x R grid or a batch of them, got shape {grid.shape}")
    R = batch.shape[1]
    _check_side(sampler, t, R)

    seeds = [seed] if np.ndim(seed) == 0 else list(seed)
    if len(seeds) != batch.shape[0]:
        raise ValidationError(f"{len(seeds)} seeds for {batch.shape[0]} grids")
    keys = np.array([rng.step_key(int(s), t) for s in seeds], dtype=np.uint64)

    if workers <= 1 or R < 2:
        out = _update_rows(batch, keys, sampler, params, t, 0, R)
    else:
        bounds = np.linspace(0, R, min(workers, R) + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(
                lambda ab: _update_rows(batch, keys, sampler, params, t, ab[0], ab[1]),
                zip(bounds[:-1], bounds[1:]),
            )
            out = np.concatenate(list(parts), axis=1)
    return out[0] if single else out


@dataclass
class Trajectory:
    """Densities after each step (index 0 is the initial grid) and the final grid."""

    densities: np.ndarray
    final: np.ndarray

    def late_mean(self) -> float | np.ndarray:
        """Mean density over the second half of the run (steps T//2+1 .. T)."""
        T = self.densities.shape[-1] - 1
        if T == 0:
            return self.densities[..., 0]
        return self.densities[..., T // 2 + 1 :].mean(axis=-1)


def run(
    initial: np.ndarray,
    model: ModelSpec,
    steps: int,
    seed: int | Sequence[int],
    workers: int = 1,
) -> Trajectory:
    """Apply :func:`step` ``steps`` times, recording the density after each."""
    if steps < 0:
        raise ValidationError(f"steps must be >= 0, got {steps}")
    sampler = model.sampler
    if isinstance(sampler, ScheduledBox) and sampler.schedule.horizon != steps:
        raise ValidationError(
            f"schedule horizon {sampler.schedule.horizon} differs from run length {steps}"
        )
    grid = np.array(initial, dtype=np.int8)
    dens = [density(grid)]
    for t in range(1, steps + 1):
        grid = step(grid, sampler, model.params, t, seed, workers=workers)
        dens.append(density(grid))
    return Trajectory(np.stack(dens, axis=-1) if grid.ndim == 3 else np.array(dens), grid)


def replica_seeds(seed: int, replicas: int) -> list[int]:
    return [rng.spawn_seed(seed, r) for r in range(replicas)]


def run_replicas(
    initial: np.ndarray,
    model: ModelSpec,
    steps: int,
    seed: int,
    replicas: int,
    workers: int = 1,
) -> Trajectory:
    """Run independent replicas from the same initial grid, vectorised.

    Replica ``r`` uses the stream ``spawn_seed(seed, r)``; grouping the
    replicas across ``workers`` threads does not change any result.
    """
    if replicas < 1:
        raise ValidationError(f"replicas must be >= 1, got {replicas}")
    seeds = replica_seeds(seed, replicas)
    batch = np.broadcast_to(np.asarray(initial, dtype=np.int8), (replicas,) + np.shape(initial))
    if workers <= 1 or replicas == 1:
        return run(batch, model, steps, seeds)
    groups = np.array_split(np.arange(replicas), min(workers, replicas))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda g: run(batch[g], model, steps, [seeds[i] for i in g]), groups))
    return Trajectory(
        np.concatenate([p.densities for p in parts]), np.concatenate([p.final for p in parts])
    )


def format_grid(grid: np.ndarray) -> str:
    """Snapshot text: ``R=<int>`` then R rows of ``+`` / ``-``."""
    grid = np.asarray(grid)
    lines = [f"R={grid.shape[0]}"]
    lines += ["".join("+" if v > 0 else "-" for v in row) for row in grid]
    return "\n".join(lines) + "\n"


def parse_grid(text: str) -> np.ndarray:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines or not lines[0].startswith("R="):
        raise ValidationError("grid snapshot must start with 'R=<int>'")
    try:
        R = int(lines[0][2:])
    except ValueError:
        raise ValidationError(f"bad header {lines[0]!r}") from None
    rows = lines[1:]
    if len(rows) != R or any(len(r) != R or set(r) - {"+", "-"} for r in rows):
        raise ValidationError(f"expected {R} rows of {R} '+'/'-' characters")
    return np.array([[1 if c == "+" else -1 for c in r] for r in rows], dtype=np.int8)
