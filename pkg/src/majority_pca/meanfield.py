"""Deterministic density map of the mean-field majority voter.

When every site draws its ``b`` neighbors uniformly from the whole box and
the box is large, the density ``rho`` of ``+`` sites evolves as

    rho' = eps + (1 - 2 eps) M(rho),

where ``M(rho)`` is the probability that at least ``k = (b+1)/2`` of ``b``
independent draws are ``+``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np
from scipy.optimize import bisect

from .errors import ConsistencyError, ValidationError
from .models import UpdateParams

FIXED_POINT_TOL = 1e-12
SCAN_STEP = 1e-3


@dataclass(frozen=True)
class DensityMap:
    b: int
    epsilon: float

    def __post_init__(self):
        UpdateParams(self.b, self.epsilon)

    @property
    def k(self) -> int:
        return (self.b + 1) // 2

    def __call__(self, rho):
        return mf_map(rho, self)

    def derivative(self, rho):
        return (1.0 - 2.0 * self.epsilon) * majority_prob_derivative(rho, self.b)


def majority_prob(rho, b: int):
    """P(at least k of b independent draws are +), each + with probability rho."""
    k = (b + 1) // 2
    rho = np.asarray(rho, dtype=float)
    out = sum(comb(b, j) * rho**j * (1.0 - rho) ** (b - j) for j in range(k, b + 1))
    return float(out) if out.ndim == 0 else out


def majority_prob_derivative(rho, b: int):
    k = (b + 1) // 2
    rho = np.asarray(rho, dtype=float)
    out = b * comb(b - 1, k - 1) * rho ** (k - 1) * (1.0 - rho) ** (b - k)
    return float(out) if np.ndim(out) == 0 else out


def mf_map(rho, dmap: DensityMap):
    return dmap.epsilon + (1.0 - 2.0 * dmap.epsilon) * majority_prob(rho, dmap.b)


@dataclass
class FixedPointReport:
    epsilon: float
    points: list[tuple[float, str]] = field(default_factory=list)

    @property
    def stable(self) -> list[float]:
        return [r for r, s in self.points if s == "stable"]


def find_fixed_points(dmap: DensityMap) -> FixedPointReport:
    """All fixed points of the density map in [0, 1] with their stability.

    Sign changes of ``f(rho) - rho`` on a grid of step 1e-3 are refined by
    bisection; grid points where the residual already vanishes are kept as is.
    """
    grid = np.arange(int(round(1 / SCAN_STEP)) + 1) * SCAN_STEP
    g = mf_map(grid, dmap) - grid

    def resid(r):
        return mf_map(r, dmap) - r

    roots = [0.5]
    for i, gi in enumerate(g):
        if abs(gi) <= FIXED_POINT_TOL:
            roots.append(float(grid[i]))
        elif i + 1 < len(g) and abs(g[i + 1]) > FIXED_POINT_TOL and gi * g[i + 1] < 0:
            roots.append(bisect(resid, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15))

    roots.sort()
    unique: list[float] = []
    for r in roots:
        if not unique or r - unique[-1] > 1e-9:
            unique.append(r)
    points = [
        (r, "stable" if abs(dmap.derivative(r)) < 1.0 else "unstable") for r in unique
    ]
    return FixedPointReport(dmap.epsilon, points)


def _pitchfork_epsilon(b: int) -> float:
    # (1 - 2 eps) M'(1/2) = 1
    return 0.5 * (1.0 - 1.0 / majority_prob_derivative(0.5, b))


def _has_upper_fixed_point(b: int, eps: float, margin: float = 1e-6) -> bool:
    rho = np.concatenate([[0.5 + margin], np.arange(501, 1001) * SCAN_STEP])
    g = mf_map(rho, DensityMap(b, eps)) - rho
    return bool(g.max() >= 0.0)


def critical_epsilon(b: int, tol: float = 1e-6) -> float:
    """Largest error rate at which the map has fixed points besides 1/2.

    Computed from the symmetric pitchfork condition and, independently, by
    bisection on the existence of a fixed point above 1/2; the two must agree
    within ``tol``.
    """
    if b < 1 or b % 2 == 0:
        raise ValidationError(f"b must be odd and positive, got {b}")
    pitchfork = _pitchfork_epsilon(b)

    lo, hi = 0.0, 0.5
    if not _has_upper_fixed_point(b, lo):
        scanned = 0.0
    else:
        while hi - lo > 1e-12:
            mid = 0.5 * (lo + hi)
            if _has_upper_fixed_point(b, mid):
                lo = mid
            else:
                hi = mid
        scanned = lo

    if abs(pitchfork - scanned) > tol:
        raise ConsistencyError(
            f"b={b}: pitchfork eps_c={pitchfork:.9f} but scan eps_c={scanned:.9f}"
        )
    return pitchfork
