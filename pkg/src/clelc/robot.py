"""Unicycle robot: dynamic-extension linearization, trajectories, slip, physics.

Extending the unicycle with an acceleration input (v' = xi) gives the planar
positions uniform relative degree two, so the commanded accelerations map to
(xi, omega) through a rotation that is invertible whenever v != 0.  The
tracking problem then splits into two independent double-integrator channels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import ConfigError, SimulationFault, VelocitySingularityError

V_MIN_DEFAULT = 0.05  # m/s
OMEGA_LIMIT_DEFAULT = 0.1  # rad/s


def wrap_angle(theta: float) -> float:
    """Wrap to (-pi, pi]."""
    wrapped = math.fmod(theta + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class RobotState:
    """Pose plus the linear-velocity state of the dynamic extension."""

    px: float
    py: float
    theta: float
    v: float


@dataclass(frozen=True)
class RobotCommand:
    """Linear acceleration xi and (saturated) angular velocity."""

    v_dot: float
    omega: float


@dataclass(frozen=True)
class TrajectoryPoint:
    """Reference position, velocity, and acceleration at one instant."""

    r1: float
    r2: float
    r3: float  # d(r1)/dt
    r4: float  # d(r2)/dt
    r1dd: float  # d(r3)/dt
    r2dd: float  # d(r4)/dt


Trajectory = Callable[[float], TrajectoryPoint]


def linearized_state(state: RobotState, slip_vx: float = 0.0, slip_vy: float = 0.0) -> np.ndarray:
    """[px, py, px', py'] with planar velocities including any slip component."""
    return np.array(
        [
            state.px,
            state.py,
            state.v * math.cos(state.theta) + slip_vx,
            state.v * math.sin(state.theta) + slip_vy,
        ]
    )


def unicycle_dynamics(state: RobotState, cmd: RobotCommand) -> np.ndarray:
    """(px', py', theta', v') = (v cos theta, v sin theta, omega, xi)."""
    return np.array(
        [
            state.v * math.cos(state.theta),
            state.v * math.sin(state.theta),
            cmd.omega,
            cmd.v_dot,
        ]
    )


def feedback_linearize(
    u1: float,
    u2: float,
    theta: float,
    v: float,
    v_min: float = V_MIN_DEFAULT,
    omega_limit: float = OMEGA_LIMIT_DEFAULT,
) -> RobotCommand:
    """Map commanded planar accelerations to (xi, omega); omega is saturated.

    The rotation is singular at v = 0, so |v| below v_min raises; the scenario
    runner substitutes omega = 0 for that sample and flags it.
    """
    if abs(v) < v_min:
        raise VelocitySingularityError(f"|v| = {abs(v):.4f} m/s is below the {v_min} m/s guard")
    c, s = math.cos(theta), math.sin(theta)
    omega = (u2 * c - u1 * s) / v
    return RobotCommand(v_dot=u1 * c + u2 * s, omega=max(-omega_limit, min(omega_limit, omega)))


def clelc_robot_law(
    traj: TrajectoryPoint,
    lin: np.ndarray,
    gains: "tuple[float, float, float, float]",
    u_n1: float = 0.0,
    u_n2: float = 0.0,
) -> "tuple[float, float]":
    """Per-axis acceleration commands: feedforward + PD on (position, velocity)
    errors + the learned terms.  With u_n = 0 this is the plain linearizing law."""
    k1, k2, k3, k4 = gains
    if min(k1, k2, k3, k4) <= 0:
        raise ConfigError(f"robot gains must be positive, got {gains!r}")
    u1 = traj.r1dd + k1 * (traj.r1 - lin[0]) + k3 * (traj.r3 - lin[2]) + u_n1
    u2 = traj.r2dd + k2 * (traj.r2 - lin[1]) + k4 * (traj.r4 - lin[3]) + u_n2
    return u1, u2


def heading_reference(r3: float, r4: float, reverse: bool = False) -> float:
    """Heading that aligns the body axis with the reference velocity.

    The reverse branch points the tail along the path (heading + pi).
    """
    if r3 == 0.0 and r4 == 0.0:
        raise ConfigError("heading reference is undefined at zero reference velocity")
    theta = math.atan2(r4, r3)
    return wrap_angle(theta + math.pi) if reverse else wrap_angle(theta)


def feedforward_velocities(
    r3: float, r4: float, r3dot: float, r4dot: float, reverse: bool = False
) -> "tuple[float, float]":
    """Speed and turn rate implied by the reference velocity and its rate."""
    speed_sq = r3 * r3 + r4 * r4
    if speed_sq <= 0.0:
        raise ConfigError("feedforward velocities are undefined at zero reference velocity")
    v_d = math.sqrt(speed_sq)
    omega_d = (r4dot * r3 - r3dot * r4) / speed_sq
    return (-v_d if reverse else v_d), omega_d


# --------------------------------------------------------------------------
# Trajectory library
# --------------------------------------------------------------------------


def _line(speed_mps: float) -> Trajectory:
    if speed_mps <= 0:
        raise ConfigError(f"line speed must be positive, got {speed_mps}")

    def point(t: float) -> TrajectoryPoint:
        return TrajectoryPoint(r1=speed_mps * t, r2=0.0, r3=speed_mps, r4=0.0, r1dd=0.0, r2dd=0.0)

    return point


def _circle(radius_m: float, rate_rad_s: float) -> Trajectory:
    if radius_m <= 0 or rate_rad_s <= 0:
        raise ConfigError(f"circle needs positive radius and rate, got {radius_m}, {rate_rad_s}")
    R, w = radius_m, rate_rad_s

    def point(t: float) -> TrajectoryPoint:
        c, s = math.cos(w * t), math.sin(w * t)
        return TrajectoryPoint(
            r1=R * c, r2=R * s,
            r3=-R * w * s, r4=R * w * c,
            r1dd=-R * w * w * c, r2dd=-R * w * w * s,
        )

    return point


def _stadium(straight_m: float, radius_m: float, speed_mps: float) -> Trajectory:
    """Rounded rectangle: two straights joined by semicircular caps, traversed
    counterclockwise at constant speed starting on the lower straight."""
    if straight_m <= 0 or radius_m <= 0 or speed_mps <= 0:
        raise ConfigError("stadium needs positive straight length, radius and speed")
    L, R, v = straight_m, radius_m, speed_mps
    perimeter = 2.0 * L + 2.0 * math.pi * R
    a_cent = v * v / R

    def point(t: float) -> TrajectoryPoint:
        arc = (v * t) % perimeter
        if arc < L:  # lower straight, heading +x
            return TrajectoryPoint(-L / 2 + arc, -R, v, 0.0, 0.0, 0.0)
        arc -= L
        if arc < math.pi * R:  # right cap
            phi = arc / R - math.pi / 2
            c, s = math.cos(phi), math.sin(phi)
            return TrajectoryPoint(L / 2 + R * c, R * s, -v * s, v * c, -a_cent * c, -a_cent * s)
        arc -= math.pi * R
        if arc < L:  # upper straight, heading -x
            return TrajectoryPoint(L / 2 - arc, R, -v, 0.0, 0.0, 0.0)
        arc -= L
        phi = arc / R + math.pi / 2  # left cap
        c, s = math.cos(phi), math.sin(phi)
        return TrajectoryPoint(-L / 2 + R * c, R * s, -v * s, v * c, -a_cent * c, -a_cent * s)

    return point


_TRAJECTORY_BUILDERS = {
    "line": (_line, ("speed_mps",)),
    "circle": (_circle, ("radius_m", "rate_rad_s")),
    "stadium": (_stadium, ("straight_m", "radius_m", "speed_mps")),
}


def trajectory_library(name: str, params: dict) -> Trajectory:
    """Analytic reference paths with closed-form position/velocity/acceleration."""
    if name not in _TRAJECTORY_BUILDERS:
        raise ConfigError(f"unknown trajectory {name!r}; choose from {sorted(_TRAJECTORY_BUILDERS)}")
    builder, keys = _TRAJECTORY_BUILDERS[name]
    unknown = set(params) - set(keys)
    if unknown:
        raise ConfigError(f"unknown {name} trajectory keys: {sorted(unknown)}")
    try:
        return builder(**{k: float(params[k]) for k in keys})
    except KeyError as missing:
        raise ConfigError(f"{name} trajectory needs key {missing}") from None


# --------------------------------------------------------------------------
# Slip disturbance
# --------------------------------------------------------------------------


def slip_disturbance(state: RobotState, t: float, profile: dict) -> "tuple[float, float]":
    """Deterministic additive accelerations on the planar double integrators."""
    kind = profile.get("kind", "none")
    if kind == "none":
        return 0.0, 0.0
    if kind == "constant":
        return float(profile.get("ax_mps2", 0.0)), float(profile.get("ay_mps2", 0.0))
    if kind == "sinusoid":
        try:
            amp = float(profile["amplitude_mps2"])
            period = float(profile["period_s"])
        except KeyError as missing:
            raise ConfigError(f"sinusoid slip needs key {missing}") from None
        if period <= 0:
            raise ConfigError(f"sinusoid slip period must be positive, got {period}")
        return amp * math.sin(2.0 * math.pi * t / period), 0.0
    if kind == "patch":
        inside = (
            float(profile.get("x_min_m", -math.inf)) <= state.px <= float(profile.get("x_max_m", math.inf))
            and float(profile.get("y_min_m", -math.inf)) <= state.py <= float(profile.get("y_max_m", math.inf))
        )
        if inside:
            return float(profile.get("ax_mps2", 0.0)), float(profile.get("ay_mps2", 0.0))
        return 0.0, 0.0
    raise ConfigError(f"unknown slip profile kind {kind!r}")


# --------------------------------------------------------------------------
# Physics stepping
# --------------------------------------------------------------------------


class RobotSimulator:
    """Unicycle physics with slip accumulation and an optional actuator lag.

    In ideal mode the commanded (xi, omega) act directly.  In lag mode the
    vehicle tracks a velocity reference pair through first-order lags, the way
    a low-level track controller would: the runner integrates xi into v_ref
    and the lag states chase (v_ref, omega).
    """

    def __init__(
        self,
        start: RobotState,
        slip_profile: dict | None = None,
        actuator: str = "ideal",
        lag_tau_s: float = 0.3,
    ):
        if actuator not in ("ideal", "lag"):
            raise ConfigError(f"actuator must be 'ideal' or 'lag', got {actuator!r}")
        if lag_tau_s <= 0:
            raise ConfigError(f"actuator lag time constant must be positive, got {lag_tau_s}")
        self.state = start
        self.slip_profile = slip_profile or {"kind": "none"}
        self.actuator = actuator
        self.tau = lag_tau_s
        self.slip_vx = 0.0  # accumulated slip velocity (integral of slip accel)
        self.slip_vy = 0.0
        self.omega_actual = 0.0  # lag mode only

    def measured(self) -> np.ndarray:
        """Linearizing coordinates [px, py, px', py'] as a sensor would see them."""
        return linearized_state(self.state, self.slip_vx, self.slip_vy)

    def slip_at(self, t: float) -> "tuple[float, float]":
        return slip_disturbance(self.state, t, self.slip_profile)

    def acceleration(self, cmd: RobotCommand, v_ref: float, t: float) -> "tuple[float, float]":
        """Instantaneous planar accelerations under the command just issued."""
        st = self.state
        c, s = math.cos(st.theta), math.sin(st.theta)
        if self.actuator == "ideal":
            v_dot, theta_dot = cmd.v_dot, cmd.omega
        else:
            v_dot, theta_dot = (v_ref - st.v) / self.tau, self.omega_actual
        d1, d2 = self.slip_at(t)
        return (
            v_dot * c - st.v * theta_dot * s + d1,
            v_dot * s + st.v * theta_dot * c + d2,
        )

    def advance(self, cmd: RobotCommand, v_ref: float, t: float, dt: float, substeps: int) -> None:
        """Integrate the physics over [t, t + dt] with the command held."""
        y = np.array(
            [
                self.state.px,
                self.state.py,
                self.state.theta,
                self.state.v,
                self.slip_vx,
                self.slip_vy,
                self.omega_actual,
            ]
        )
        h = dt / substeps
        for j in range(substeps):
            tj = t + j * h
            k1 = self._deriv(y, cmd, v_ref, tj)
            k2 = self._deriv(y + 0.5 * h * k1, cmd, v_ref, tj + 0.5 * h)
            k3 = self._deriv(y + 0.5 * h * k2, cmd, v_ref, tj + 0.5 * h)
            k4 = self._deriv(y + h * k3, cmd, v_ref, tj + h)
            y = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(y).all():
            raise SimulationFault(f"robot state became non-finite during the step at t = {t:.6g}")
        self.state = RobotState(px=y[0], py=y[1], theta=wrap_angle(y[2]), v=y[3])
        self.slip_vx, self.slip_vy = y[4], y[5]
        self.omega_actual = y[6]

    def _deriv(self, y: np.ndarray, cmd: RobotCommand, v_ref: float, t: float) -> np.ndarray:
        px, py, theta, v, svx, svy, om_act = y
        d1, d2 = slip_disturbance(replace(self.state, px=px, py=py), t, self.slip_profile)
        if self.actuator == "ideal":
            theta_dot, v_dot, om_dot = cmd.omega, cmd.v_dot, 0.0
        else:
            theta_dot, v_dot, om_dot = om_act, (v_ref - v) / self.tau, (cmd.omega - om_act) / self.tau
        return np.array(
            [
                v * math.cos(theta) + svx,
                v * math.sin(theta) + svy,
                theta_dot,
                v_dot,
                d1,
                d2,
                om_dot,
            ]
        )


def robot_log_columns() -> list[str]:
    return (
        ["t"]
        + [f"x{i}" for i in range(1, 5)]
        + [f"r{i}" for i in range(1, 5)]
        + [f"e{i}" for i in range(1, 5)]
        + ["u_b1", "u_b2", "u_f1", "u_f2", "u_n1", "u_n2", "u_t1", "u_t2", "u1", "u2"]
        + ["s1", "s2", "delta1", "delta2"]
        + ["px", "py", "theta", "v", "omega", "theta_r", "v_d", "omega_d", "euclid_err"]
    )
