"""Chain-of-integrators plants, fixed-step integrators, and run logs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import ConfigError, SimulationFault

DisturbanceFn = Callable[[np.ndarray, float, float], float]  # (x, u, t) -> accel


@dataclass
class PlantModel:
    """x_i' = x_{i+1} for i < n;  x_n' = a(x) + b(x) u + disturbance(x, u, t)."""

    order: int
    a_fn: Callable[[np.ndarray], float]
    b_fn: Callable[[np.ndarray], float]
    disturbance: DisturbanceFn


def no_disturbance(x: np.ndarray, u: float, t: float) -> float:
    return 0.0


def sin_onset_disturbance(amplitude: float, onset_s: float) -> DisturbanceFn:
    """amplitude * sin(t) from onset_s onward (inclusive), zero before."""

    def fn(x: np.ndarray, u: float, t: float) -> float:
        return amplitude * math.sin(t) if t >= onset_s else 0.0

    return fn


def disturbance_profile(profile: dict) -> DisturbanceFn:
    """Build a disturbance callable from a tagged profile dict."""
    kind = profile.get("kind", "none")
    if kind == "none":
        return no_disturbance
    if kind == "sin_onset":
        try:
            return sin_onset_disturbance(float(profile["amplitude"]), float(profile["onset_s"]))
        except KeyError as missing:
            raise ConfigError(f"sin_onset disturbance needs key {missing}") from None
    raise ConfigError(f"unknown disturbance kind {kind!r}")


def benchmark_plant(disturbance: DisturbanceFn | None = None) -> PlantModel:
    """Third-order test system with a stiff nonlinearity in the last state.

    a(x) = -2 x1 - x2 - sin(x3) + exp(x1), b(x) = 1; the default disturbance
    is 5 sin(t) switched on at t = 10 s.
    """

    def a_fn(x: np.ndarray) -> float:
        return -2.0 * x[0] - x[1] - math.sin(x[2]) + math.exp(x[0])

    if disturbance is None:
        disturbance = sin_onset_disturbance(5.0, 10.0)
    return PlantModel(order=3, a_fn=a_fn, b_fn=lambda x: 1.0, disturbance=disturbance)


def dynamics(model: PlantModel, x: np.ndarray, u: float, t: float) -> np.ndarray:
    """State derivative of the chain under input u at time t."""
    a = model.a_fn(x)
    b = model.b_fn(x)
    d = model.disturbance(x, u, t)
    for name, value in (("a(x)", a), ("b(x)", b), ("disturbance", d)):
        if not math.isfinite(value):
            raise SimulationFault(f"{name} is non-finite at t = {t:.6g}, x = {x}")
    deriv = np.empty(model.order)
    deriv[:-1] = x[1:]
    deriv[-1] = a + b * u + d
    return deriv


def integrate_step(
    model: PlantModel,
    x: np.ndarray,
    u: float,
    t: float,
    dt: float,
    method: str = "rk4",
) -> np.ndarray:
    """Advance the state one step with the input held constant over [t, t+dt]."""
    if dt <= 0:
        raise ConfigError(f"integration step must be positive, got {dt}")
    if method == "euler":
        x_new = x + dt * dynamics(model, x, u, t)
    elif method == "rk4":
        k1 = dynamics(model, x, u, t)
        k2 = dynamics(model, x + 0.5 * dt * k1, u, t + 0.5 * dt)
        k3 = dynamics(model, x + 0.5 * dt * k2, u, t + 0.5 * dt)
        k4 = dynamics(model, x + dt * k3, u, t + dt)
        x_new = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    else:
        raise ConfigError(f"unknown integration method {method!r}")
    if not np.isfinite(x_new).all():
        raise SimulationFault(f"state became non-finite during the step at t = {t:.6g}")
    return x_new


def integrate_hold(
    model: PlantModel,
    x: np.ndarray,
    u: float,
    t: float,
    dt: float,
    substeps: int,
) -> np.ndarray:
    """RK4 over `substeps` equal slices of [t, t+dt] with the input held.

    Runs a scalar fast path (bit-identical arithmetic to integrate_step) and
    falls back to the array path for plant callables that reject plain
    sequences.
    """
    if substeps < 1:
        raise ConfigError(f"substeps must be >= 1, got {substeps}")
    h = dt / substeps
    try:
        xs = tuple(float(v) for v in x)
        a_fn, b_fn, dist = model.a_fn, model.b_fn, model.disturbance
        n = len(xs)
        shift = range(1, n)
        span = range(n)
        for j in range(substeps):
            tj = t + j * h
            k1 = tuple(xs[i] for i in shift) + (a_fn(xs) + b_fn(xs) * u + dist(xs, u, tj),)
            y = tuple(xs[i] + 0.5 * h * k1[i] for i in span)
            k2 = tuple(y[i] for i in shift) + (a_fn(y) + b_fn(y) * u + dist(y, u, tj + 0.5 * h),)
            y = tuple(xs[i] + 0.5 * h * k2[i] for i in span)
            k3 = tuple(y[i] for i in shift) + (a_fn(y) + b_fn(y) * u + dist(y, u, tj + 0.5 * h),)
            y = tuple(xs[i] + h * k3[i] for i in span)
            k4 = tuple(y[i] for i in shift) + (a_fn(y) + b_fn(y) * u + dist(y, u, tj + h),)
            xs = tuple(
                xs[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in span
            )
    except (TypeError, AttributeError, IndexError):
        x_new = np.asarray(x, dtype=float)
        for j in range(substeps):
            x_new = integrate_step(model, x_new, u, t + j * h, h, method="rk4")
        return x_new
    except OverflowError:
        raise SimulationFault(f"state overflowed during the hold starting at t = {t:.6g}") from None
    out = np.array(xs)
    if not np.isfinite(out).all():
        raise SimulationFault(f"state became non-finite during the hold starting at t = {t:.6g}")
    return out


@dataclass
class SimLog:
    """Column-oriented run log with a pinned CSV schema.

    events collects irregular occurrences (firing underflow, omega
    singularities) by step; fine optionally holds a substep-resolution state
    trace for the integration-accuracy tests.  Neither is part of the CSV.
    """

    columns: list[str]
    data: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)
    events: list[str] = field(default_factory=list)
    fine: dict[str, np.ndarray] | None = None

    def __len__(self) -> int:
        return len(self.data[self.columns[0]]) if self.columns else 0

    @property
    def t(self) -> np.ndarray:
        return self.data["t"]

    def col(self, name: str) -> np.ndarray:
        return self.data[name]

    def to_csv(self, path: "str | Path") -> None:
        """Write the log; floats use repr so the file round-trips exactly."""
        rows = zip(*(self.data[c] for c in self.columns))
        with open(path, "w", newline="\n") as fh:
            fh.write(",".join(self.columns) + "\n")
            for row in rows:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")

    @classmethod
    def from_csv(cls, path: "str | Path") -> "SimLog":
        with open(path) as fh:
            header = fh.readline().strip()
            columns = header.split(",")
            values: list[list[float]] = [[] for _ in columns]
            for line in fh:
                for store, cell in zip(values, line.rstrip("\n").split(",")):
                    store.append(float(cell))
        return cls(columns=columns, data={c: np.asarray(v) for c, v in zip(columns, values)})


def chain_log_columns(order: int) -> list[str]:
    return (
        ["t"]
        + [f"x{i}" for i in range(1, order + 1)]
        + [f"r{i}" for i in range(1, order + 1)]
        + [f"e{i}" for i in range(1, order + 1)]
        + ["u_b", "u_f", "u_n", "u_t", "u", "s", "delta"]
    )
