"""Feedback, feedforward and combined control laws for chain plants.

The physical input inverts the plant nonlinearity around the virtual input:
u = (-a(x) + u_t) / b(x) with u_t = u_b + u_f + u_n.  With the learner off
(u_n = 0) this is plain feedback linearization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, SingularPlantError
from .surface import GainVector

B_MIN_DEFAULT = 1e-9


@dataclass(frozen=True)
class ControlDecomposition:
    """One step's control budget: parts, their sum, and the physical input."""

    u_b: float  # feedback
    u_f: float  # feedforward
    u_n: float  # learned compensation
    u_t: float  # u_b + u_f + u_n
    u: float  # (-a(x) + u_t) / b(x)


@dataclass(frozen=True)
class ReferenceSignal:
    """Reference chain r_1..r_n plus the two extra derivatives the laws need.

    r_np1 is the n-th reference rate (drives the feedforward term) and
    r_dot_np1 its derivative (used only by post-hoc analysis and the robot
    feedforward).
    """

    r: np.ndarray
    r_np1: float
    r_dot_np1: float = 0.0


def zero_reference(order: int) -> ReferenceSignal:
    return ReferenceSignal(r=np.zeros(order), r_np1=0.0, r_dot_np1=0.0)


def tracking_errors(ref: ReferenceSignal, x: np.ndarray) -> np.ndarray:
    """Error vector e_i = r_i - x_i."""
    return ref.r - np.asarray(x, dtype=float)


def feedback_control(e: Sequence[float], gains: GainVector) -> float:
    """u_b = sum_i k_i e_i."""
    e = np.asarray(e, dtype=float)
    if e.shape != (len(gains),):
        raise ConfigError(f"expected {len(gains)} errors to match the gain vector, got shape {e.shape}")
    return float(gains.as_array() @ e)


def feedforward_control(ref: ReferenceSignal) -> float:
    """u_f is the n-th reference rate."""
    return ref.r_np1


def clelc_law(
    a_x: float,
    b_x: float,
    u_b: float,
    u_f: float,
    u_n: float,
    b_min: float = B_MIN_DEFAULT,
) -> ControlDecomposition:
    """Compose the learned term with feedback/feedforward and invert the plant."""
    if abs(b_x) <= b_min:
        raise SingularPlantError(f"|b(x)| = {abs(b_x):.3e} is below the {b_min} invertibility guard")
    u_t = u_b + u_f + u_n
    return ControlDecomposition(u_b=u_b, u_f=u_f, u_n=u_n, u_t=u_t, u=(-a_x + u_t) / b_x)


def flc_law(a_x: float, b_x: float, u_b: float, u_f: float,
            b_min: float = B_MIN_DEFAULT) -> ControlDecomposition:
    """Feedback linearization alone: the learned term is zero."""
    return clelc_law(a_x, b_x, u_b, u_f, 0.0, b_min=b_min)
