import dataclasses
import math

import numpy as np
import pytest

from clelc import (
    ConfigError,
    PlantModel,
    SimulationFault,
    benchmark_plant,
    default_benchmark_config,
    disturbance_profile,
    dynamics,
    integrate_step,
    run_scenario,
)
from clelc.plant import SimLog, chain_log_columns, integrate_hold, no_disturbance


def _pure_integrator(order=1):
    return PlantModel(order=order, a_fn=lambda x: 0.0, b_fn=lambda x: 1.0,
                      disturbance=no_disturbance)


def _exponential_model():
    # x' = x: closed form exp(t) gives an independent integration oracle
    return PlantModel(order=1, a_fn=lambda x: x[0], b_fn=lambda x: 1.0,
                      disturbance=no_disturbance)


def test_dynamics_equilibrium():
    model = _pure_integrator(order=2)
    assert dynamics(model, np.array([0.0, 0.0]), 0.0, 0.0).tolist() == [0.0, 0.0]


def test_dynamics_pure_integrator():
    assert dynamics(_pure_integrator(), np.array([0.0]), 3.0, 0.0).tolist() == [3.0]


def test_dynamics_benchmark_initial_state():
    plant = benchmark_plant()
    x0 = np.array([1.0, -1.0, -10.0])
    a0 = -2.0 * 1.0 - (-1.0) - math.sin(-10.0) + math.exp(1.0)
    deriv = dynamics(plant, x0, 0.0, 0.0)
    assert deriv[0] == -1.0 and deriv[1] == -10.0
    assert deriv[2] == pytest.approx(a0, rel=1e-15)
    assert a0 == pytest.approx(1.1742607175696753, rel=1e-15)


def test_dynamics_non_finite_is_reported():
    model = PlantModel(order=1, a_fn=lambda x: float("nan"), b_fn=lambda x: 1.0,
                       disturbance=no_disturbance)
    with pytest.raises(SimulationFault, match="a\\(x\\)"):
        dynamics(model, np.array([0.0]), 0.0, 0.0)


def test_benchmark_nonlinearity_at_origin():
    assert benchmark_plant().a_fn(np.zeros(3)) == 1.0


def test_benchmark_disturbance_onset():
    plant = benchmark_plant()
    assert plant.disturbance(np.zeros(3), 0.0, 9.99) == 0.0
    assert plant.disturbance(np.zeros(3), 0.0, 10.0) == pytest.approx(5.0 * math.sin(10.0), rel=1e-15)
    assert plant.disturbance(np.zeros(3), 0.0, 10.5) == pytest.approx(5.0 * math.sin(10.5), rel=1e-15)


def test_disturbance_profile_builder():
    fn = disturbance_profile({"kind": "sin_onset", "amplitude": 2.0, "onset_s": 1.0})
    assert fn(np.zeros(1), 0.0, 0.5) == 0.0
    assert fn(np.zeros(1), 0.0, 2.0) == pytest.approx(2.0 * math.sin(2.0))
    assert disturbance_profile({"kind": "none"})(np.zeros(1), 0.0, 5.0) == 0.0
    with pytest.raises(ConfigError):
        disturbance_profile({"kind": "sin_onset"})
    with pytest.raises(ConfigError):
        disturbance_profile({"kind": "banana"})


def test_euler_pure_integrator():
    x = integrate_step(_pure_integrator(), np.array([0.5]), 1.0, 0.0, 0.01, method="euler")
    assert x[0] == pytest.approx(0.51, rel=1e-15)


def test_rk4_against_exponential_oracle():
    x = integrate_step(_exponential_model(), np.array([1.0]), 0.0, 0.0, 0.1)
    assert abs(x[0] - math.exp(0.1)) < 1e-7


def test_equilibrium_state_unchanged():
    x = integrate_step(_pure_integrator(order=2), np.array([1.0, 0.0]), 0.0, 0.0, 0.1)
    assert x.tolist() == [1.0, 0.0]


def test_unknown_method_rejected():
    with pytest.raises(ConfigError):
        integrate_step(_pure_integrator(), np.array([0.0]), 0.0, 0.0, 0.1, method="rk5")
    with pytest.raises(ConfigError):
        integrate_step(_pure_integrator(), np.array([0.0]), 0.0, 0.0, -0.1)


def _rk4_global_error(dt):
    model = _exponential_model()
    x = np.array([1.0])
    steps = round(1.0 / dt)
    for k in range(steps):
        x = integrate_step(model, x, 0.0, k * dt, dt)
    return abs(x[0] - math.e)


def test_rk4_order_under_step_halving():
    ratio = _rk4_global_error(0.02) / _rk4_global_error(0.01)
    assert 12.0 < ratio < 20.0


def test_integrate_hold_matches_repeated_steps_bitwise():
    plant = benchmark_plant()
    x_fast = np.array([1.0, -1.0, -10.0])
    x_slow = x_fast.copy()
    for k in range(40):
        t, u = k * 0.01, 5.0 - 0.2 * k
        x_fast = integrate_hold(plant, x_fast, u, t, 0.01, 10)
        for j in range(10):
            x_slow = integrate_step(plant, x_slow, u, t + j * 0.001, 0.001)
        assert np.array_equal(x_fast, x_slow)


def test_integrate_hold_falls_back_for_array_only_callables():
    model = PlantModel(order=2, a_fn=lambda x: float(np.sum(x) * 0.1),
                       b_fn=lambda x: 1.0, disturbance=no_disturbance)
    x0 = np.array([1.0, 0.5])
    held = integrate_hold(model, x0, 0.3, 0.0, 0.1, 5)
    stepped = x0.copy()
    for j in range(5):
        stepped = integrate_step(model, stepped, 0.3, j * 0.02, 0.02)
    assert held == pytest.approx(stepped, rel=1e-15)


def test_integrate_hold_overflow_is_a_fault():
    model = PlantModel(order=1, a_fn=lambda x: x[0] * x[0], b_fn=lambda x: 1.0,
                       disturbance=no_disturbance)
    with pytest.raises(SimulationFault):
        integrate_hold(model, np.array([1e200]), 0.0, 0.0, 1.0, 10)


def test_chain_consistency_on_fine_trace():
    # central differences of each chain coordinate reproduce the next one
    config = dataclasses.replace(default_benchmark_config(), duration_s=4.0)
    log, _ = run_scenario(config, capture_fine=True)
    t = log.fine["t"]
    h = t[1] - t[0]
    substeps = default_benchmark_config().plant_substeps
    # keep stencils strictly inside one hold interval: the input jumps at
    # controller boundaries
    idx = np.arange(1, len(t) - 1)
    interior = idx[(idx % substeps != 0) & ((idx + 1) % substeps != 0) & ((idx - 1) % substeps != 0)]
    for lower, upper in (("x1", "x2"), ("x2", "x3")):
        lo, hi = log.fine[lower], log.fine[upper]
        cd = (lo[interior + 1] - lo[interior - 1]) / (2.0 * h)
        assert np.abs(cd - hi[interior]).max() < 2e-4


def test_disturbance_applies_exactly_at_the_boundary(bench_clelc_run):
    log, _, _ = bench_clelc_run
    t = log.t
    delta = log.col("delta")
    onset = int(np.argmax(t >= 10.0))
    assert t[onset] == 10.0
    assert np.all(delta[:onset] == 0.0)
    expected = 5.0 * np.sin(t[onset:])
    assert np.array_equal(delta[onset:], expected)


def test_simlog_csv_round_trip(tmp_path):
    config = dataclasses.replace(default_benchmark_config(), duration_s=1.0)
    log, _ = run_scenario(config)
    path = tmp_path / "run.csv"
    log.to_csv(path)
    header = path.read_text().splitlines()[0]
    assert header == "t,x1,x2,x3,r1,r2,r3,e1,e2,e3,u_b,u_f,u_n,u_t,u,s,delta"
    back = SimLog.from_csv(path)
    assert back.columns == log.columns
    for column in log.columns:
        assert np.array_equal(back.col(column), log.col(column))


def test_chain_log_columns_schema():
    assert chain_log_columns(2) == [
        "t", "x1", "x2", "r1", "r2", "e1", "e2",
        "u_b", "u_f", "u_n", "u_t", "u", "s", "delta",
    ]


def test_zero_duration_is_a_config_error():
    with pytest.raises(ConfigError):
        dataclasses.replace(default_benchmark_config(), duration_s=0.001).validate()
