"""Post-hoc metrics, the finite reaching-time bound, and run comparison.

Conventions (the source plots never pin thresholds, so they are fixed here):
rise time is the first instant the tracking error falls to 10% of its initial
magnitude, settling is the first instant after which it stays within the 2%
band, overshoot is the worst crossing past the reference relative to the
initial error, and the sliding-value convergence threshold is
max(delta, 1% of the peak |s|).  Quantities that never occur are reported as
None rather than fabricated.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError
from .plant import SimLog

RISE_FRACTION = 0.1
SETTLING_BAND = 0.02
FINAL_WINDOW_S = 2.0


def finite_time_bound(s0: float, alpha: float, b_delta_dot: float) -> float:
    """Upper bound on the reaching time: |s(0)| / (alpha - B).

    Requires the learning rate to dominate the disturbance-rate bound B >= 0.
    """
    if b_delta_dot < 0:
        raise ConfigError(f"disturbance-rate bound must be nonnegative, got {b_delta_dot}")
    if alpha <= b_delta_dot:
        raise ConfigError(
            f"learning rate {alpha} must exceed the disturbance-rate bound {b_delta_dot}; "
            "the reaching-time bound does not exist otherwise"
        )
    return abs(s0) / (alpha - b_delta_dot)


@dataclass
class Metrics:
    """Scalar performance summary of one run."""

    rise_time_s: Optional[float]
    settling_time_s: Optional[float]
    overshoot_pct: Optional[float]
    mean_abs_error: float
    mean_euclid_err_m: Optional[float]
    s_convergence_time_s: Optional[float]
    ub_decay_ratio: float
    max_abs_ut_rate: float
    max_abs_xn_accel: float
    max_abs_delta_rate: float

    def to_dict(self) -> dict:
        return asdict(self)


def _first_stay_below(t: np.ndarray, signal: np.ndarray, threshold: float) -> Optional[float]:
    """First time after which |signal| stays below threshold to the end."""
    below = np.abs(signal) < threshold
    if not below[-1]:
        return None
    # last index where the signal is NOT below, +1
    above = np.flatnonzero(~below)
    if len(above) == 0:
        return float(t[0])
    idx = above[-1] + 1
    return float(t[idx]) if idx < len(t) else None


def _central_rate(values: np.ndarray, dt: float) -> np.ndarray:
    if len(values) < 3:
        return np.zeros(0)
    return (values[2:] - values[:-2]) / (2.0 * dt)


def _central_accel(values: np.ndarray, dt: float) -> np.ndarray:
    if len(values) < 3:
        return np.zeros(0)
    return (values[2:] - 2.0 * values[1:-1] + values[:-2]) / (dt * dt)


def compute_metrics(
    log: SimLog,
    delta: float = 0.05,
    settling_band: float = SETTLING_BAND,
    final_window_s: float = FINAL_WINDOW_S,
) -> Metrics:
    """Deterministic metrics over a uniform-step run log.

    Chain logs use the first tracking error; robot logs (detected by the
    euclid_err column) use the planar distance to the reference point.
    """
    if len(log) == 0:
        raise ConfigError("cannot compute metrics over an empty log")
    t = log.t
    if len(t) < 2:
        raise ConfigError("metrics need at least two samples")
    dt = float(t[1] - t[0])
    robot = "euclid_err" in log.data

    err = log.col("euclid_err") if robot else log.col("e1")
    err0 = abs(float(err[0]))

    rise = settle = overshoot = None
    if err0 > 0.0:
        crossed = np.flatnonzero(np.abs(err) <= RISE_FRACTION * err0)
        rise = float(t[crossed[0]]) if len(crossed) else None
        settle = _first_stay_below(t, err, settling_band * err0)
        if not robot:
            sign0 = math.copysign(1.0, float(err[0]))
            overshoot = max(0.0, float(np.max(-err * sign0))) / err0 * 100.0
        else:
            overshoot = None

    if robot:
        ub_mag = np.hypot(log.col("u_b1"), log.col("u_b2"))
        s_mag = np.maximum(np.abs(log.col("s1")), np.abs(log.col("s2")))
        ut_rates = [
            _central_rate(log.col("u_t1"), dt),
            _central_rate(log.col("u_t2"), dt),
        ]
        xn_accels = [
            _central_accel(log.col("x3"), dt),
            _central_accel(log.col("x4"), dt),
        ]
        delta_rates = [
            _central_rate(log.col("delta1"), dt),
            _central_rate(log.col("delta2"), dt),
        ]
        mean_euclid = float(np.abs(err).mean())
    else:
        ub_mag = np.abs(log.col("u_b"))
        s_mag = np.abs(log.col("s"))
        order = sum(1 for c in log.columns if c.startswith("x"))
        ut_rates = [_central_rate(log.col("u_t"), dt)]
        xn_accels = [_central_accel(log.col(f"x{order}"), dt)]
        delta_rates = [_central_rate(log.col("delta"), dt)]
        mean_euclid = None

    s_threshold = max(delta, 0.01 * float(s_mag.max()))
    s_conv = _first_stay_below(t, s_mag, s_threshold)

    final = t >= (t[-1] - final_window_s)
    ub_peak = float(ub_mag.max())
    ub_ratio = float(ub_mag[final].mean() / ub_peak) if ub_peak > 0 else 0.0

    def max_abs(pieces: "list[np.ndarray]") -> float:
        vals = [float(np.abs(p).max()) for p in pieces if len(p)]
        return max(vals) if vals else 0.0

    return Metrics(
        rise_time_s=rise,
        settling_time_s=settle,
        overshoot_pct=overshoot,
        mean_abs_error=float(np.abs(err).mean()),
        mean_euclid_err_m=mean_euclid,
        s_convergence_time_s=s_conv,
        ub_decay_ratio=ub_ratio,
        max_abs_ut_rate=max_abs(ut_rates),
        max_abs_xn_accel=max_abs(xn_accels),
        max_abs_delta_rate=max_abs(delta_rates),
    )


# Metrics where a smaller value wins the comparison; the empirical bounds are
# descriptive and excluded from win flags.
_SMALLER_WINS = (
    "rise_time_s",
    "settling_time_s",
    "overshoot_pct",
    "mean_abs_error",
    "mean_euclid_err_m",
    "s_convergence_time_s",
    "ub_decay_ratio",
)


def compare(flc: Metrics, clelc: Metrics) -> dict:
    """Side-by-side report with ratios and a winner flag per metric."""
    report: dict = {"metrics": {}}
    flc_d, clelc_d = flc.to_dict(), clelc.to_dict()
    for name in flc_d:
        a, b = flc_d[name], clelc_d[name]
        entry: dict = {"flc": a, "clelc": b}
        if name in _SMALLER_WINS:
            if a is None and b is None:
                entry["winner"] = None
            elif a is None:
                entry["winner"] = "clelc"
            elif b is None:
                entry["winner"] = "flc"
            else:
                entry["winner"] = "clelc" if b < a else ("flc" if a < b else "tie")
                entry["ratio_clelc_over_flc"] = b / a if a != 0 else None
        report["metrics"][name] = entry
    wins = [m.get("winner") for m in report["metrics"].values()]
    report["clelc_wins"] = sum(1 for w in wins if w == "clelc")
    report["flc_wins"] = sum(1 for w in wins if w == "flc")
    return report


def format_metrics(metrics: Metrics, title: str = "metrics") -> str:
    lines = [title, "-" * len(title)]
    for name, value in metrics.to_dict().items():
        lines.append(f"{name:24s} {'-' if value is None else format(value, '.6g')}")
    return "\n".join(lines)


def format_comparison(report: dict) -> str:
    lines = [f"{'metric':24s} {'flc':>14s} {'clelc':>14s}  winner"]
    for name, entry in report["metrics"].items():
        def fmt(v):
            return "-" if v is None else format(v, ".6g")
        lines.append(
            f"{name:24s} {fmt(entry['flc']):>14s} {fmt(entry['clelc']):>14s}  {entry.get('winner') or '-'}"
        )
    lines.append(f"wins: clelc {report['clelc_wins']}, flc {report['flc_wins']}")
    return "\n".join(lines)
