import math

import numpy as np
import pytest

from clelc import (
    ConfigError,
    LearningConfig,
    LearningDivergedError,
    center_rate,
    consequent_rates,
    firing_strengths,
    grid_params,
    learning_step,
    output,
    smoothed_sign,
    width_rate,
)
from clelc.fuzzy import FiringState


def test_center_rate_vanishing_offset():
    assert center_rate(1.5, -0.7, 1.5, 25.0, 0.9) == -0.7


def test_center_rate_zero_sign():
    assert center_rate(2.0, 0.3, -1.0, 25.0, 0.0) == 0.3


def test_center_rate_direct_substitution():
    assert center_rate(1.0, 0.0, 0.0, 25.0, 1.0) == 25.0


def test_width_rate_zero_sign():
    assert width_rate(1.0, 0.5, 0.8, 5.0, 0.0) == 0.0


def test_width_rate_offset_equals_width():
    # sigma^3 / (e-c)^2 collapses to sigma, so the rate is -2 sigma alpha sgn
    assert width_rate(3.0, 1.0, 2.0, 3.0, 1.0) == pytest.approx(-12.0, rel=1e-15)


def test_width_rate_direct_substitution():
    assert width_rate(0.5, 0.0, 1.0, 5.0, -1.0) == pytest.approx(25.0, rel=1e-15)


def test_width_rate_guard_floors_denominator():
    rate = width_rate(0.0, 0.0, 0.1, 1.0, 1.0, guard_eps=1e-3)
    assert rate == pytest.approx(-(0.1 + 0.1**3 / 1e-6), rel=1e-12)


def _uniform_firing(n):
    w = np.full(n, 1.0 / n)
    return FiringState(memberships=np.zeros((1, n)), raw=w.copy(), normalized=w)


def _single_rule_firing(n, active=0):
    w = np.zeros(n)
    w[active] = 1.0
    return FiringState(memberships=np.zeros((1, n)), raw=w.copy(), normalized=w)


def test_consequent_rates_single_active_rule():
    rates = consequent_rates(_single_rule_firing(5), 25.0, 0.8)
    assert rates[0] == pytest.approx(20.0, rel=1e-15)
    assert np.all(rates[1:] == 0.0)


def test_consequent_rates_uniform():
    rates = consequent_rates(_uniform_firing(8), 25.0, 1.0)
    assert rates == pytest.approx([25.0] * 8, rel=1e-12)


def test_consequent_rates_zero_sign():
    assert np.all(consequent_rates(_uniform_firing(4), 25.0, 0.0) == 0.0)


def test_consequent_rates_weighted_sum_is_alpha_sign():
    rng = np.random.default_rng(5)
    for _ in range(100):
        w = rng.random(9)
        w /= w.sum()
        fire = FiringState(memberships=np.zeros((1, 9)), raw=w.copy(), normalized=w)
        rates = consequent_rates(fire, 25.0, 0.37)
        assert math.fsum(rates * w) == pytest.approx(25.0 * 0.37, rel=1e-12)


def test_learning_config_validation():
    with pytest.raises(ConfigError):
        LearningConfig(alpha=0.0, dt=0.01)
    with pytest.raises(ConfigError):
        LearningConfig(alpha=1.0, dt=-0.1)
    with pytest.raises(ConfigError):
        LearningConfig(alpha=1.0, dt=0.1, sigma_min=1.0, sigma_max=0.5)


def test_learning_step_inert_at_zero():
    params = grid_params([2.0, 2.0], 3)
    cfg = LearningConfig(alpha=25.0, dt=0.01)
    stepped = learning_step(params, np.array([0.5, -0.5]), np.zeros(2), 0.0, cfg)
    assert np.array_equal(stepped.centers, params.centers)
    assert np.array_equal(stepped.widths, params.widths)
    assert np.array_equal(stepped.consequents, params.consequents)


def test_learning_step_single_rule_euler():
    # |s| huge makes the smoothed sign exactly 1.0, so the lone consequent
    # moves by alpha * dt
    params = grid_params([1.0], 1)
    cfg = LearningConfig(alpha=25.0, dt=0.01)
    stepped = learning_step(params, np.array([0.0]), np.array([0.0]), 1e300, cfg)
    assert smoothed_sign(1e300, cfg.delta) == 1.0
    assert stepped.consequents[0] == 0.25


def test_learning_step_width_floor_clamp():
    params = grid_params([1.0], 3)
    params.widths = np.full_like(params.widths, 1e-3)
    cfg = LearningConfig(alpha=25.0, dt=0.01, sigma_min=1e-3)
    stepped = learning_step(params, np.array([0.9]), np.array([0.0]), 1e300, cfg)
    assert np.all(stepped.widths == 1e-3)


def test_learning_step_width_ceiling_clamp():
    params = grid_params([1.0], 3)
    cfg = LearningConfig(alpha=25.0, dt=0.2, sigma_max=5.0)
    stepped = learning_step(params, np.array([0.9]), np.array([0.0]), -1e300, cfg)
    assert np.all(stepped.widths <= 5.0)


def test_learning_step_reports_divergence():
    params = grid_params([1.0], 2)
    params.widths = np.full_like(params.widths, 1e200)  # cubing overflows
    cfg = LearningConfig(alpha=25.0, dt=0.01)
    with pytest.raises(LearningDivergedError, match="widths"):
        learning_step(params, np.array([0.9]), np.array([0.0]), -1.0, cfg)


def test_learning_step_shape_check():
    params = grid_params([1.0, 1.0], 2)
    cfg = LearningConfig(alpha=1.0, dt=0.01)
    with pytest.raises(ConfigError):
        learning_step(params, np.array([0.1]), np.array([0.1]), 0.0, cfg)


def _rich_network(seed=0):
    params = grid_params([2.0, 1.0], 3)
    rng = np.random.default_rng(seed)
    params.consequents = rng.normal(scale=2.0, size=9)
    return params


def test_output_rate_identity_frozen_memberships():
    params = _rich_network()
    e = np.array([0.3, -0.2])
    s, alpha, delta, dt = -0.7, 25.0, 0.05, 1e-3
    fire = firing_strengths(e, params)
    sgn = smoothed_sign(s, delta)
    advanced = params.consequents + consequent_rates(fire, alpha, sgn) * dt
    change = output(fire, advanced) - output(fire, params.consequents)
    assert abs(change - alpha * sgn * dt) <= 1e-12 * abs(alpha * sgn * dt)


def _full_step_residual(params, e, edot, s, alpha, delta, dt):
    cfg = LearningConfig(alpha=alpha, dt=dt, delta=delta)
    before = output(firing_strengths(e, params), params.consequents)
    stepped = learning_step(params, e, edot, s, cfg)
    e_next = e + edot * dt
    after = output(firing_strengths(e_next, stepped), stepped.consequents)
    return abs((after - before) - alpha * smoothed_sign(s, delta) * dt)


def test_output_rate_identity_full_step_second_order():
    # with memberships adapting too, the one-step output change misses
    # alpha * sgn * dt only at second order: halving dt cuts the residual 4x
    params = _rich_network()
    e = np.array([0.3, -0.2])
    edot = np.array([0.15, 0.1])
    r1 = _full_step_residual(params, e, edot, 0.04, 25.0, 0.05, 1e-3)
    r2 = _full_step_residual(params, e, edot, 0.04, 25.0, 0.05, 5e-4)
    assert r1 > 0.0
    assert r1 / r2 >= 3.5


def _unguarded_draw(rng, alpha_range=(1.0, 30.0)):
    input_count = int(rng.integers(1, 4))
    mf = int(rng.integers(1, 4))
    c = rng.uniform(-2.0, 2.0, size=(input_count, mf))
    e = c[:, 0] + rng.choice([-1.0, 1.0], size=input_count) * rng.uniform(0.3, 2.0, size=input_count)
    # keep every offset well away from the width-law guard
    for i in range(input_count):
        for k in range(mf):
            if abs(e[i] - c[i, k]) < 0.1:
                c[i, k] += 0.25
    sigma = rng.uniform(0.3, 3.0, size=(input_count, mf))
    edot = rng.uniform(-2.0, 2.0, size=input_count)
    s = rng.choice([-1.0, 1.0]) * rng.uniform(0.05, 5.0)
    alpha = rng.uniform(*alpha_range)
    return input_count, mf, e, edot, c, sigma, s, alpha


def test_scaled_offset_rate_identity():
    # the product of the scaled offset (e-c)/sigma and its time derivative
    # equals alpha * sgn(s) for every membership, hence I alpha sgn per rule
    rng = np.random.default_rng(123)
    delta = 0.05
    for _ in range(1000):
        input_count, mf, e, edot, c, sigma, s, alpha = _unguarded_draw(rng)
        sgn = smoothed_sign(s, delta)
        cdot = center_rate(e[:, None], edot[:, None], c, alpha, sgn)
        sdot = width_rate(e[:, None], c, sigma, alpha, sgn, guard_eps=1e-6)
        offset = (e[:, None] - c) / sigma
        offset_rate = ((edot[:, None] - cdot) * sigma - (e[:, None] - c) * sdot) / sigma**2
        product = offset * offset_rate
        target = alpha * sgn
        assert np.all(np.abs(product - target) <= 1e-10 * abs(target))
        per_rule = product[np.arange(input_count)[:, None], np.arange(mf)[None, :]]
        total = product.sum(axis=0)  # any membership column sums over inputs
        assert np.all(np.abs(total - input_count * target) <= 1e-10 * abs(input_count * target))


def test_firing_strength_decay_rate():
    # raw firing strengths decay at I * alpha * sgn(s) along one guarded step
    params = _rich_network(seed=9)
    e = np.array([0.9, -0.45])
    edot = np.array([0.2, -0.1])
    s, alpha, delta, dt = 0.3, 10.0, 0.05, 1e-5
    sgn = smoothed_sign(s, delta)
    before = firing_strengths(e, params).raw
    stepped = learning_step(params, e, edot, s, LearningConfig(alpha=alpha, dt=dt, delta=delta))
    after = firing_strengths(e + edot * dt, stepped).raw
    fd = (after - before) / dt
    expected = -params.input_count * alpha * sgn * before
    assert np.all(np.abs(fd - expected) <= 1e-3 * np.abs(expected))


def test_surface_energy_descends_through_the_reach(bench_clelc_run):
    # right after the disturbance switches on, the learner drives |s| down
    # monotonically until it re-enters the chattering band
    log, _, _ = bench_clelc_run
    s = log.col("s")
    onset = int(np.argmax(log.t >= 10.0))
    k = onset
    while abs(s[k]) > 0.3:
        assert 0.5 * s[k + 1] ** 2 < 0.5 * s[k] ** 2
        k += 1
    assert k > onset + 5  # the reach lasted several samples
