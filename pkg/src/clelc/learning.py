"""Sliding-mode adaptation of the fuzzy network parameters.

The three rate laws (centers, widths, consequents) share the smoothed sign of
the sliding value.  Together they move the network output at exactly
alpha * sgn(s) regardless of the operating point, which is the property the
stability argument rests on and what the identity tests in the suite check.
The rates are integrated with one forward-Euler step per controller period.

Guards, all of which only bite in degenerate corners:
  * the width-law denominator (e - c)^2 is floored at center_guard_eps^2,
  * integrated widths are clamped into [sigma_min, sigma_max].  The upper
    clamp exists because the width law grows super-exponentially under a
    persistently negative sign; a huge width already saturates its
    memberships at 1, so clamping there is behavior-neutral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, LearningDivergedError
from .fuzzy import SIGMA_MIN_DEFAULT, FiringState, NeuroFuzzyParams, firing_strengths
from .surface import DELTA_DEFAULT, smoothed_sign

CENTER_GUARD_EPS_DEFAULT = 1e-3
SIGMA_MAX_DEFAULT = 1e6


@dataclass(frozen=True)
class LearningConfig:
    """Learning rate, smoothing, guards and the Euler step for the adaptation."""

    alpha: float
    dt: float
    delta: float = DELTA_DEFAULT
    sigma_min: float = SIGMA_MIN_DEFAULT
    sigma_max: float = SIGMA_MAX_DEFAULT
    center_guard_eps: float = CENTER_GUARD_EPS_DEFAULT

    def __post_init__(self) -> None:
        for name in ("alpha", "dt", "delta", "sigma_min", "sigma_max", "center_guard_eps"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"LearningConfig.{name} must be positive and finite, got {value!r}")
        if self.sigma_max <= self.sigma_min:
            raise ConfigError("sigma_max must exceed sigma_min")


def center_rate(e_i, edot_i, c_ik, alpha: float, sgn_s: float):
    """d(center)/dt = de/dt + (e - c) * alpha * sgn(s); elementwise on arrays."""
    return edot_i + (e_i - c_ik) * alpha * sgn_s


def width_rate(e_i, c_ik, sigma_ik, alpha: float, sgn_s: float,
               guard_eps: float = CENTER_GUARD_EPS_DEFAULT):
    """d(width)/dt = -(sigma + sigma^3 / (e - c)^2) * alpha * sgn(s).

    The squared offset is floored at guard_eps^2: the law is singular at
    e = c and the -sigma term dominates the true direction there anyway.
    """
    offset_sq = np.maximum(np.square(np.asarray(e_i, dtype=float) - c_ik), guard_eps * guard_eps)
    with np.errstate(over="ignore"):  # overflow surfaces via the finite check
        out = -(sigma_ik + sigma_ik**3 / offset_sq) * alpha * sgn_s
    return float(out) if np.ndim(out) == 0 else out


def consequent_rates(firing: FiringState, alpha: float, sgn_s: float) -> np.ndarray:
    """d(consequent_r)/dt = w~_r / (w~ . w~) * alpha * sgn(s) for every rule.

    The denominator is the squared norm of the whole normalized-firing vector,
    which makes sum_r rate_r * w~_r equal alpha * sgn(s) exactly.
    """
    w = firing.normalized
    norm_sq = float(w @ w)
    if norm_sq <= 0.0:
        raise LearningDivergedError("normalized firing strengths have zero norm")
    return w / norm_sq * alpha * sgn_s


def learning_step(
    params: NeuroFuzzyParams,
    e: np.ndarray,
    edot: np.ndarray,
    s: float,
    cfg: LearningConfig,
) -> NeuroFuzzyParams:
    """Advance centers, widths and consequents one Euler step; returns new params."""
    e = np.asarray(e, dtype=float)
    edot = np.asarray(edot, dtype=float)
    if e.shape != (params.input_count,) or edot.shape != e.shape:
        raise ConfigError(
            f"e/edot must both have shape ({params.input_count},), got {e.shape} and {edot.shape}"
        )
    sgn = smoothed_sign(s, cfg.delta)

    c_dot = center_rate(e[:, None], edot[:, None], params.centers, cfg.alpha, sgn)
    w_dot = width_rate(e[:, None], params.centers, params.widths, cfg.alpha, sgn,
                       guard_eps=cfg.center_guard_eps)
    firing = firing_strengths(e, params)
    f_dot = consequent_rates(firing, cfg.alpha, sgn)

    for name, rate in (("centers", c_dot), ("widths", w_dot), ("consequents", f_dot)):
        if not np.isfinite(rate).all():
            raise LearningDivergedError(f"non-finite adaptation rate for {name}")

    centers = params.centers + c_dot * cfg.dt
    widths = np.clip(params.widths + w_dot * cfg.dt, cfg.sigma_min, cfg.sigma_max)
    consequents = params.consequents + f_dot * cfg.dt
    for name, block in (("centers", centers), ("consequents", consequents)):
        if not np.isfinite(block).all():
            raise LearningDivergedError(f"{name} diverged during the Euler step")
    return replace(params, centers=centers, widths=widths, consequents=consequents)
