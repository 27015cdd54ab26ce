"""Sliding surface of the closed-loop error dynamics and gain synthesis.

The surface is the n-th order error operator (d/dt + slope)^n applied to the
first tracking error.  Expanding the operator gives

    s = de_n/dt + k_n e_n + ... + k_1 e_1,       k_i = C(n, n-i+1) slope^(n-i+1)

so the same binomial coefficients serve both as the surface weights and as the
feedback gain vector: on the surface (s = 0) every error converges with all
poles at -slope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError

# Binomial coefficients stay exactly representable and the design stays sane;
# no supported scenario exceeds n = 3.
MAX_ORDER = 8

DELTA_DEFAULT = 0.05


@dataclass(frozen=True)
class SlidingSurfaceSpec:
    """System order n and surface slope (1/s)."""

    order: int
    slope: float

    def __post_init__(self) -> None:
        if not isinstance(self.order, int) or not 1 <= self.order <= MAX_ORDER:
            raise ConfigError(
                f"surface order must be an integer in [1, {MAX_ORDER}], got {self.order!r}"
            )
        if not (math.isfinite(self.slope) and self.slope > 0):
            raise ConfigError(f"surface slope must be positive and finite, got {self.slope!r}")


@dataclass(frozen=True)
class GainVector:
    """Feedback gains ordered so that gains[i-1] multiplies error e_i."""

    gains: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.gains) == 0 or any(g <= 0 or not math.isfinite(g) for g in self.gains):
            raise ConfigError(f"gains must be a non-empty positive sequence, got {self.gains!r}")

    def __len__(self) -> int:
        return len(self.gains)

    def __iter__(self):
        return iter(self.gains)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.gains, dtype=float)


def gain_vector(spec: SlidingSurfaceSpec) -> GainVector:
    """Synthesize the feedback gain vector from (order, slope).

    Returns [slope^n, ..., C(n,2) slope^2, n slope]: the binomial expansion of
    (d/dt + slope)^n with element i multiplying e_i, so the lowest-derivative
    error gets the highest power of the slope.
    """
    n, lam = spec.order, spec.slope
    return GainVector(tuple(math.comb(n, n - i + 1) * lam ** (n - i + 1) for i in range(1, n + 1)))


def sliding_value(errors: Sequence[float], error_rate_n: float, gains: GainVector) -> float:
    """Evaluate s = de_n/dt + sum_i k_i e_i for the current error state."""
    e = np.asarray(errors, dtype=float)
    if e.shape != (len(gains),):
        raise ConfigError(f"expected {len(gains)} errors to match the gain vector, got shape {e.shape}")
    return float(error_rate_n + gains.as_array() @ e)


def smoothed_sign(s: float, delta: float = DELTA_DEFAULT):
    """Boundary-layer replacement for sign(s): s / (|s| + delta).

    Odd, monotone, bounded in (-1, 1), and pointwise -> sign(s) as delta -> 0.
    Accepts scalars or arrays.
    """
    if not delta > 0:
        raise ConfigError(f"sign smoothing delta must be positive, got {delta!r}")
    return s / (np.abs(s) + delta) if isinstance(s, np.ndarray) else s / (abs(s) + delta)
