"""Scenario orchestration: the control loops behind `run_scenario`.

Loop order per controller step: read state, build errors, feedback and
feedforward terms, learned term (clelc only), control law, sliding value from
the plant equation under the control just computed, learning step (clelc
only), plant substeps, log.  Computing the error rate with the current step's
input keeps the logged rows on the closed-loop relation exactly, which the
residual checks in the suite rely on.
"""

from __future__ import annotations

import math

import numpy as np

from .analysis import Metrics, compute_metrics
from .config import ScenarioConfig
from .control import clelc_law, feedback_control, feedforward_control, tracking_errors, zero_reference
from .errors import ConfigError, SimulationFault, VelocitySingularityError
from .fuzzy import firing_strengths, grid_params, output
from .learning import LearningConfig, learning_step
from .plant import (
    PlantModel,
    SimLog,
    benchmark_plant,
    chain_log_columns,
    disturbance_profile,
    integrate_hold,
    integrate_step,
)
from .robot import (
    RobotCommand,
    RobotSimulator,
    RobotState,
    clelc_robot_law,
    feedback_linearize,
    feedforward_velocities,
    heading_reference,
    robot_log_columns,
    trajectory_library,
)
from .surface import SlidingSurfaceSpec, gain_vector, sliding_value


def run_scenario(config: ScenarioConfig, capture_fine: bool = False) -> "tuple[SimLog, Metrics]":
    """Run one configured scenario; identical configs produce identical logs."""
    config.validate()
    if config.scenario == "third_order":
        plant = benchmark_plant(disturbance_profile(config.disturbance))
        log = run_chain_scenario(config, plant, capture_fine=capture_fine)
    elif config.scenario == "robot":
        log = run_robot_scenario(config, capture_fine=capture_fine)
    else:
        raise ConfigError(
            "custom scenarios need a plant model; call run_chain_scenario directly"
        )
    return log, compute_metrics(log, delta=config.sign_smoothing)


def _learning_config(config: ScenarioConfig) -> LearningConfig:
    return LearningConfig(
        alpha=config.learning_rate,
        dt=config.controller_dt_s,
        delta=config.sign_smoothing,
        sigma_min=config.sigma_min,
        sigma_max=config.sigma_max,
        center_guard_eps=config.center_guard_eps,
    )


def run_chain_scenario(
    config: ScenarioConfig, plant: PlantModel, capture_fine: bool = False
) -> SimLog:
    """Regulation loop for an n-th order chain plant (reference fixed at zero)."""
    order = plant.order
    if len(config.initial_state) != order:
        raise ConfigError(f"initial_state must have {order} entries for this plant")
    dt = config.controller_dt_s
    steps = round(config.duration_s / dt)
    if steps < 1:
        raise ConfigError("the configured duration covers no controller steps")

    gains = gain_vector(SlidingSurfaceSpec(order, config.surface_slope))
    clelc = config.controller == "clelc"
    params = grid_params(config.membership_half_range, config.mf_per_input, config.sigma_min)
    lcfg = _learning_config(config)

    x = np.asarray(config.initial_state, dtype=float)
    columns = chain_log_columns(order)
    rows: dict[str, list] = {c: [] for c in columns}
    events: list[str] = []
    fine_t: list[float] = [0.0]
    fine_x: list[np.ndarray] = [x.copy()]
    prev_e_n = 0.0
    substeps = config.plant_substeps
    h = dt / substeps

    for k in range(steps):
        t = k * dt
        try:
            ref = zero_reference(order)
            e = tracking_errors(ref, x)
            u_b = feedback_control(e, gains)
            u_f = feedforward_control(ref)
            if clelc:
                firing = firing_strengths(e, params)
                if firing.underflow:
                    events.append(f"step {k}: firing underflow, uniform fallback")
                u_n = output(firing, params.consequents)
            else:
                u_n = 0.0
            a_x = plant.a_fn(x)
            b_x = plant.b_fn(x)
            dec = clelc_law(a_x, b_x, u_b, u_f, u_n, b_min=config.b_min)
            d_now = plant.disturbance(x, dec.u, t)
            if config.edot_mode == "analytic":
                edot_n = ref.r_np1 - (a_x + b_x * dec.u + d_now)
            else:
                edot_n = 0.0 if k == 0 else (e[-1] - prev_e_n) / dt
            edot = np.append(e[1:], edot_n)
            s = sliding_value(e, edot_n, gains)

            for name, series in zip(columns, _chain_row(t, x, ref.r, e, dec, s, d_now)):
                rows[name].append(series)

            if clelc:
                params = learning_step(params, e, edot, s, lcfg)
            prev_e_n = e[-1]

            if capture_fine:
                for j in range(substeps):
                    x = integrate_step(plant, x, dec.u, t + j * h, h, method="rk4")
                    fine_t.append(t + (j + 1) * h)
                    fine_x.append(x.copy())
            else:
                x = integrate_hold(plant, x, dec.u, t, dt, substeps)
        except SimulationFault as fault:
            raise SimulationFault(f"step {k} (t = {t:.6g}): {fault}") from fault

    log = SimLog(
        columns=columns,
        data={c: np.asarray(v) for c, v in rows.items()},
        meta={"scenario": config.scenario, "controller": config.controller, "dt": dt},
        events=events,
    )
    if capture_fine:
        fx = np.asarray(fine_x)
        log.fine = {"t": np.asarray(fine_t)}
        for i in range(order):
            log.fine[f"x{i+1}"] = fx[:, i]
    return log


def _chain_row(t, x, r, e, dec, s, d_now):
    return (
        [t]
        + list(x)
        + list(r)
        + list(e)
        + [dec.u_b, dec.u_f, dec.u_n, dec.u_t, dec.u, s, d_now]
    )


def run_robot_scenario(config: ScenarioConfig, capture_fine: bool = False) -> SimLog:
    """Trajectory-tracking loop: two independent second-order channels."""
    dt = config.controller_dt_s
    steps = round(config.duration_s / dt)
    if steps < 1:
        raise ConfigError("the configured duration covers no controller steps")

    traj = trajectory_library(config.trajectory["kind"],
                              {k: v for k, v in config.trajectory.items() if k != "kind"})
    axis_gains = gain_vector(SlidingSurfaceSpec(2, config.surface_slope))
    k_pos, k_vel = axis_gains.gains
    clelc = config.controller == "clelc"
    params_x = grid_params(config.membership_half_range, config.mf_per_input, config.sigma_min)
    params_y = grid_params(config.membership_half_range, config.mf_per_input, config.sigma_min)
    lcfg = _learning_config(config)

    start = config.robot_start
    sim = RobotSimulator(
        RobotState(
            px=float(start["px_m"]),
            py=float(start["py_m"]),
            theta=float(start["theta_rad"]),
            v=float(start["v_mps"]),
        ),
        slip_profile=config.disturbance,
        actuator=config.actuator,
        lag_tau_s=config.actuator_lag_s,
    )
    v_ref = sim.state.v
    prev_e3 = prev_e4 = 0.0

    columns = robot_log_columns()
    rows: dict[str, list] = {c: [] for c in columns}
    events: list[str] = []
    fine: dict[str, list] = {"t": [], "px": [], "py": [], "vx": [], "vy": []}
    if capture_fine:
        _capture_robot_fine(fine, sim, 0.0)

    for k in range(steps):
        t = k * dt
        try:
            tp = traj(t)
            lin = sim.measured()
            r = np.array([tp.r1, tp.r2, tp.r3, tp.r4])
            e = r - lin
            u_b1 = k_pos * e[0] + k_vel * e[2]
            u_b2 = k_pos * e[1] + k_vel * e[3]
            if clelc:
                fire_x = firing_strengths(np.array([e[0], e[2]]), params_x)
                fire_y = firing_strengths(np.array([e[1], e[3]]), params_y)
                if fire_x.underflow or fire_y.underflow:
                    events.append(f"step {k}: firing underflow, uniform fallback")
                u_n1 = output(fire_x, params_x.consequents)
                u_n2 = output(fire_y, params_y.consequents)
            else:
                u_n1 = u_n2 = 0.0
            u1, u2 = clelc_robot_law(tp, lin, (k_pos, k_pos, k_vel, k_vel), u_n1, u_n2)

            try:
                cmd = feedback_linearize(
                    u1, u2, sim.state.theta, sim.state.v,
                    v_min=config.v_min_mps, omega_limit=config.omega_limit_rad_s,
                )
            except VelocitySingularityError:
                events.append(f"step {k}: |v| below v_min, omega forced to 0")
                c, s_ = math.cos(sim.state.theta), math.sin(sim.state.theta)
                cmd = RobotCommand(v_dot=u1 * c + u2 * s_, omega=0.0)

            if config.actuator == "lag":
                v_ref = v_ref + cmd.v_dot * dt

            if config.edot_mode == "analytic":
                ax1, ax2 = sim.acceleration(cmd, v_ref, t)
                edot3 = tp.r1dd - ax1
                edot4 = tp.r2dd - ax2
            else:
                edot3 = 0.0 if k == 0 else (e[2] - prev_e3) / dt
                edot4 = 0.0 if k == 0 else (e[3] - prev_e4) / dt
            s1 = sliding_value([e[0], e[2]], edot3, axis_gains)
            s2 = sliding_value([e[1], e[3]], edot4, axis_gains)

            d1, d2 = sim.slip_at(t)
            theta_r = heading_reference(tp.r3, tp.r4)
            v_d, omega_d = feedforward_velocities(tp.r3, tp.r4, tp.r1dd, tp.r2dd)
            row = (
                [t]
                + list(lin)
                + list(r)
                + list(e)
                + [u_b1, u_b2, tp.r1dd, tp.r2dd, u_n1, u_n2, u_b1 + tp.r1dd + u_n1,
                   u_b2 + tp.r2dd + u_n2, u1, u2, s1, s2, d1, d2]
                + [sim.state.px, sim.state.py, sim.state.theta, sim.state.v, cmd.omega,
                   theta_r, v_d, omega_d, math.hypot(e[0], e[1])]
            )
            for name, value in zip(columns, row):
                rows[name].append(value)

            if clelc:
                params_x = learning_step(
                    params_x, np.array([e[0], e[2]]), np.array([e[2], edot3]), s1, lcfg
                )
                params_y = learning_step(
                    params_y, np.array([e[1], e[3]]), np.array([e[3], edot4]), s2, lcfg
                )
            prev_e3, prev_e4 = e[2], e[3]

            if capture_fine:
                sub = config.plant_substeps
                hsub = dt / sub
                for j in range(sub):
                    sim.advance(cmd, v_ref, t + j * hsub, hsub, 1)
                    _capture_robot_fine(fine, sim, t + (j + 1) * hsub)
            else:
                sim.advance(cmd, v_ref, t, dt, config.plant_substeps)
        except SimulationFault as fault:
            raise SimulationFault(f"step {k} (t = {t:.6g}): {fault}") from fault

    log = SimLog(
        columns=columns,
        data={c: np.asarray(v) for c, v in rows.items()},
        meta={"scenario": config.scenario, "controller": config.controller, "dt": dt},
        events=events,
    )
    if capture_fine:
        log.fine = {k: np.asarray(v) for k, v in fine.items()}
    return log


def _capture_robot_fine(fine: dict, sim: RobotSimulator, t: float) -> None:
    lin = sim.measured()
    fine["t"].append(t)
    fine["px"].append(lin[0])
    fine["py"].append(lin[1])
    fine["vx"].append(lin[2])
    fine["vy"].append(lin[3])
