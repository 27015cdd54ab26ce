"""Zeroth-order Takagi-Sugeno-Kang inference over a full membership grid.

Each input is fuzzified through Gaussian memberships; rules are every
combination of one membership per input (K^I of them, enumerated row-major
with the last input varying fastest); rule firing strengths use the product
t-norm; the crisp output is the normalized-firing-weighted sum of the
constant rule consequents.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigError, GuardViolationError

SIGMA_MIN_DEFAULT = 1e-3


@lru_cache(maxsize=None)
def rule_grid(input_count: int, mf_per_input: int) -> np.ndarray:
    """Membership-index tuples for every rule, one row per rule (read-only)."""
    grid = np.array(
        list(itertools.product(range(mf_per_input), repeat=input_count)), dtype=np.intp
    ).reshape(mf_per_input**input_count, input_count)
    grid.setflags(write=False)
    return grid


@dataclass
class NeuroFuzzyParams:
    """Adjustable network parameters.

    centers and widths are (input_count, mf_per_input); consequents has one
    entry per rule in row-major grid order.
    """

    input_count: int
    mf_per_input: int
    centers: np.ndarray
    widths: np.ndarray
    consequents: np.ndarray

    @property
    def rule_count(self) -> int:
        return self.mf_per_input**self.input_count

    @property
    def rule_index(self) -> np.ndarray:
        return rule_grid(self.input_count, self.mf_per_input)

    def validate(self, sigma_min: float = SIGMA_MIN_DEFAULT) -> None:
        shape = (self.input_count, self.mf_per_input)
        if self.centers.shape != shape or self.widths.shape != shape:
            raise ConfigError(f"centers/widths must have shape {shape}")
        if self.consequents.shape != (self.rule_count,):
            raise ConfigError(f"consequents must have shape ({self.rule_count},)")
        if not np.isfinite(self.centers).all() or not np.isfinite(self.consequents).all():
            raise ConfigError("centers and consequents must be finite")
        if not (self.widths >= sigma_min).all():
            raise ConfigError(f"all widths must be >= sigma_min = {sigma_min}")

    def to_snapshot(self) -> dict:
        """Flat dict {centers, widths, consequents, I, K} for checkpoints."""
        return {
            "I": self.input_count,
            "K": self.mf_per_input,
            "centers": self.centers.tolist(),
            "widths": self.widths.tolist(),
            "consequents": self.consequents.tolist(),
        }

    @classmethod
    def from_snapshot(cls, snapshot: dict) -> "NeuroFuzzyParams":
        params = cls(
            input_count=int(snapshot["I"]),
            mf_per_input=int(snapshot["K"]),
            centers=np.asarray(snapshot["centers"], dtype=float),
            widths=np.asarray(snapshot["widths"], dtype=float),
            consequents=np.asarray(snapshot["consequents"], dtype=float),
        )
        params.validate()
        return params


def grid_params(
    half_ranges: "list[float] | np.ndarray",
    mf_per_input: int,
    sigma_min: float = SIGMA_MIN_DEFAULT,
) -> NeuroFuzzyParams:
    """Fresh network: centers spread uniformly over [-E_i, E_i] per input.

    Widths start at span/(K-1) so adjacent memberships overlap at one sigma;
    consequents start at zero so the learner's output is initially inert.
    """
    half = np.asarray(half_ranges, dtype=float)
    if half.ndim != 1 or len(half) == 0 or not (half > 0).all():
        raise ConfigError(f"half_ranges must be a non-empty positive sequence, got {half_ranges!r}")
    if mf_per_input < 1:
        raise ConfigError(f"need at least one membership per input, got {mf_per_input}")
    input_count = len(half)
    if mf_per_input == 1:
        centers = np.zeros((input_count, 1))
        widths = np.maximum(2.0 * half[:, None], sigma_min)
    else:
        centers = np.array([np.linspace(-h, h, mf_per_input) for h in half])
        widths = np.maximum(
            np.repeat(2.0 * half[:, None] / (mf_per_input - 1), mf_per_input, axis=1), sigma_min
        )
    params = NeuroFuzzyParams(
        input_count=input_count,
        mf_per_input=mf_per_input,
        centers=centers,
        widths=widths,
        consequents=np.zeros(mf_per_input**input_count),
    )
    params.validate(sigma_min)
    return params


@dataclass
class FiringState:
    """Membership values and raw/normalized rule firing strengths."""

    memberships: np.ndarray  # (I, K)
    raw: np.ndarray  # (N,)
    normalized: np.ndarray  # (N,)
    underflow: bool = field(default=False)


def membership(e_i, c, sigma, sigma_min: float = SIGMA_MIN_DEFAULT):
    """Gaussian membership exp(-((e - c)/sigma)^2 / 2); accepts scalars or arrays."""
    if np.any(np.asarray(sigma) < sigma_min):
        raise GuardViolationError(f"membership width below the {sigma_min} floor")
    z = (np.asarray(e_i, dtype=float) - c) / sigma
    out = np.exp(-0.5 * z * z)
    return float(out) if np.ndim(out) == 0 else out


def firing_strengths(inputs: np.ndarray, params: NeuroFuzzyParams) -> FiringState:
    """Fuzzify the inputs and fire every rule with the product t-norm.

    If the raw strengths all underflow to zero the normalized strengths fall
    back to uniform 1/N so the output stays defined; the event is flagged.
    """
    e = np.asarray(inputs, dtype=float)
    if e.shape != (params.input_count,):
        raise ConfigError(f"expected {params.input_count} inputs, got shape {e.shape}")
    z = (e[:, None] - params.centers) / params.widths
    mu = np.exp(-0.5 * z * z)
    raw = mu[np.arange(params.input_count)[None, :], params.rule_index].prod(axis=1)
    total = raw.sum()
    if total > 0.0:
        return FiringState(memberships=mu, raw=raw, normalized=raw / total)
    n = params.rule_count
    return FiringState(memberships=mu, raw=raw, normalized=np.full(n, 1.0 / n), underflow=True)


def output(firing: FiringState, consequents: np.ndarray) -> float:
    """Crisp network output: the normalized-firing-weighted sum of consequents.

    Summed with math.fsum so reordering rules (with their consequents) cannot
    change the result even in the last bit.
    """
    f = np.asarray(consequents, dtype=float)
    if f.shape != firing.normalized.shape:
        raise ConfigError(
            f"consequents shape {f.shape} does not match {firing.normalized.shape} rules"
        )
    return math.fsum(firing.normalized * f)
