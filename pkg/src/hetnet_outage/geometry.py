"""Planar PPP sampling in an origin-centred disk and the nearest-point distance law.

Only radial coordinates are kept: the typical user sits at the origin, path
loss is isotropic and fading is i.i.d., so angles never matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_EXPECTED_POINTS = 1e8
VOID_PROBABILITY = 1e-9
DEFAULT_WINDOW_POINTS = 100.0


@dataclass(frozen=True)
class PppWindow:
    radius: float

    def __post_init__(self):
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"window radius must be positive, got {self.radius}")

    @classmethod
    def for_density(cls, lam: float, expected_points: float = DEFAULT_WINDOW_POINTS) -> "PppWindow":
        """Smallest disk holding ``expected_points`` on average, at least 5/sqrt(lam),
        and with void probability below 1e-9."""
        r_points = math.sqrt(expected_points / (math.pi * lam))
        r_void = math.sqrt(-math.log(VOID_PROBABILITY) / (math.pi * lam))
        return cls(max(5.0 / math.sqrt(lam), r_points, r_void))

    def expected_count(self, lam: float) -> float:
        return lam * math.pi * self.radius ** 2


@dataclass(frozen=True)
class PointSet:
    distances: np.ndarray  # ascending
    lam: float


def tail_interference_mean(lam: float, power: float, mean_fading: float, eta: float, radius: float) -> float:
    """Mean interference from PPP points beyond ``radius``: 2 pi lam E[h] P R^(2-eta) / (eta-2)."""
    return 2.0 * math.pi * lam * mean_fading * power * radius ** (2.0 - eta) / (eta - 2.0)


def sample_ppp(lam: float, window: PppWindow, rng: np.random.Generator) -> PointSet:
    if not lam > 0:
        raise ValueError("density must be positive")
    mean = window.expected_count(lam)
    if mean > MAX_EXPECTED_POINTS:
        raise MemoryError(f"expected point count {mean:.3g} exceeds {MAX_EXPECTED_POINTS:.0e}")
    n = rng.poisson(mean)
    r = window.radius * np.sqrt(rng.random(n))
    return PointSet(np.sort(r), lam)


def nearest_distance_pdf(lam: float, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("distance must be nonnegative")
    out = 2.0 * math.pi * lam * r * np.exp(-math.pi * lam * r * r)
    return float(out) if out.ndim == 0 else out


def nearest_distance_cdf(lam: float, r):
    r = np.asarray(r, dtype=float)
    out = -np.expm1(-math.pi * lam * r * r)
    return float(out) if out.ndim == 0 else out


def nearest_distance_from_uniform(lam: float, u):
    """Inverse CDF map u in (0, 1] -> r = sqrt(-ln u / (pi lam))."""
    u = np.asarray(u, dtype=float)
    out = np.sqrt(-np.log(u) / (math.pi * lam))
    return float(out) if out.ndim == 0 else out


def sample_nearest_distance(lam: float, rng: np.random.Generator, size=None):
    if not lam > 0:
        raise ValueError("density must be positive")
    # 1 - random() lies in (0, 1]
    return nearest_distance_from_uniform(lam, 1.0 - rng.random(size))
