"""Unadjusted Langevin chains with exit tracking and ergodic accumulators."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np


class ChainDivergedError(RuntimeError):
    """Raised when a chain hits a non-finite state or drift with guard='none'."""

    def __init__(self, step: int, last_state: np.ndarray):
        super().__init__(f"chain diverged at step {step}")
        self.step = step
        self.last_state = last_state


@dataclass
class SamplerConfig:
    variant: str = "surrogate"  # "surrogate" | "vanilla"
    gamma: float = 1e-3
    j_in: int = 0
    j: int = 1
    seed: int = 0
    guard: str = "none"  # "none" | "reflect"
    guard_radius: float = 1e3

    def __post_init__(self):
        if self.variant not in ("surrogate", "vanilla"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.j_in < 0 or self.j < 1:
            raise ValueError("need j_in >= 0 and j >= 1")
        if self.guard not in ("none", "reflect"):
            raise ValueError(f"unknown guard {self.guard!r}")


@dataclass
class ChainTrace:
    states: np.ndarray  # (n_stored, p), thinned by `stride`
    stride: int
    exit_step: int | None
    accumulators: dict
    j_in: int
    j: int
    seed: int
    gamma: float
    guard_trigger_count: int = 0
    final_state: np.ndarray | None = None

    def ergodic_average(self, functional_id: str):
        if functional_id not in self.accumulators:
            raise KeyError(f"functional {functional_id!r} was not registered before the run")
        return self.accumulators[functional_id] / self.j

    def post_burn_in_states(self) -> np.ndarray:
        """Stored states whose step index exceeds j_in."""
        first = self.j_in // self.stride + 1
        return self.states[first:]


def ula_step(drift, state, gamma, noise):
    """One Euler step: state + gamma * drift(state) + sqrt(2 gamma) * noise."""
    d = drift(state) if callable(drift) else drift
    d = np.asarray(d, dtype=float)
    if not np.all(np.isfinite(d)):
        raise FloatingPointError("non-finite drift")
    return state + gamma * d + math.sqrt(2.0 * gamma) * np.asarray(noise, dtype=float)


def run_chain(drift, theta_init, config: SamplerConfig, functionals=None,
              region_center=None, region_radius=None,
              storage_budget: int = 10_000_000) -> ChainTrace:
    """Advance j_in + j ULA steps from theta_init.

    `functionals` maps names to callables of the state; their sums over the
    averaging window (steps j_in+1 .. j_in+j) are accumulated at full
    resolution regardless of trace thinning.  The first step k >= 1 with
    ||state_k - region_center|| > region_radius is recorded as the exit step;
    the chain keeps running.
    """
    functionals = functionals or {}
    theta = np.asarray(theta_init, dtype=float)
    p = theta.size
    total = config.j_in + config.j
    stride = 1
    while (total // stride + 1) * p > storage_budget:
        stride *= 2
    rng = np.random.default_rng(config.seed)
    accname = list(functionals)
    acc = {name: None for name in accname}
    stored = [theta.copy()]
    exit_step = None
    guard_count = 0
    track_exit = region_center is not None and region_radius is not None
    sqrt2g = math.sqrt(2.0 * config.gamma)
    for k in range(1, total + 1):
        noise = rng.standard_normal(p)
        try:
            d = np.asarray(drift(theta), dtype=float)
            if not np.all(np.isfinite(d)):
                raise FloatingPointError("non-finite drift")
        except FloatingPointError:
            if config.guard == "reflect":
                # pull the state back inside the guard radius and retry once
                r = np.linalg.norm(theta)
                theta = theta * (config.guard_radius / r)
                guard_count += 1
                d = np.asarray(drift(theta), dtype=float)
                if not np.all(np.isfinite(d)):
                    raise ChainDivergedError(k, theta) from None
            else:
                raise ChainDivergedError(k, theta) from None
        theta = theta + config.gamma * d + sqrt2g * noise
        if not np.all(np.isfinite(theta)):
            raise ChainDivergedError(k, stored[-1])
        if config.guard == "reflect":
            r = float(np.linalg.norm(theta))
            if r > config.guard_radius:
                theta = theta * (2.0 * config.guard_radius - r) / r
                guard_count += 1
        if track_exit and exit_step is None:
            if np.linalg.norm(theta - region_center) > region_radius:
                exit_step = k
        if k % stride == 0:
            stored.append(theta.copy())
        if k > config.j_in:
            for name, f in functionals.items():
                val = np.asarray(f(theta), dtype=float)
                acc[name] = val if acc[name] is None else acc[name] + val
    for name in accname:
        if acc[name] is None:
            acc[name] = 0.0
    return ChainTrace(np.asarray(stored), stride, exit_step, acc,
                      config.j_in, config.j, config.seed, config.gamma,
                      guard_trigger_count=guard_count, final_state=theta)


def step_size_bound(m: float, lam: float) -> tuple[float, float]:
    """(sampling bound 2/(m+Lambda), exit-time bound m/(sqrt(54) Lambda^2))."""
    if m <= 0 or lam <= 0:
        raise ValueError("m and lambda must be positive")
    return 2.0 / (m + lam), m / (math.sqrt(54.0) * lam ** 2)


def discretization_bias(gamma: float, p: int, m: float, lam: float) -> float:
    """Wasserstein discretization bias B(gamma) = 36 g p L^2/m^2 + 12 g^2 p L^4/m^3."""
    return 36.0 * gamma * p * lam ** 2 / m ** 2 + 12.0 * gamma ** 2 * p * lam ** 4 / m ** 3


def precision_floor(n: int, delta_n: float, bias: float) -> float:
    """Smallest certified precision level sqrt(16 e^{-n delta^2} + 8 B(gamma))."""
    return math.sqrt(16.0 * math.exp(-n * delta_n ** 2) + 8.0 * bias)


def burn_in_steps(epsilon: float, m: float, gamma: float, eta: float,
                  lambda_pi: float, p: int, c_w: float = 1.0,
                  floor: float | None = None) -> int:
    """Burn-in from the geometric-contraction bound.

    J_in = ceil( log(eps^2 / (32 (c_w max(eta, Lambda_pi/m)^2 + p/m)))
                 / log(1 - m gamma / 2) ).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if m * gamma >= 2.0:
        raise ConfigurationStepError("m * gamma must be below 2 for the contraction bound")
    if floor is not None and epsilon < floor:
        warnings.warn(
            f"requested precision {epsilon:g} is below the certified floor {floor:g}; "
            "the burn-in bound is not guaranteed to reach it", stacklevel=2)
    denom = 32.0 * (c_w * max(eta, lambda_pi / m) ** 2 + p / m)
    ratio = epsilon ** 2 / denom
    if ratio >= 1.0:
        return 0
    return int(math.ceil(math.log(ratio) / math.log(1.0 - m * gamma / 2.0)))


class ConfigurationStepError(ValueError):
    pass


def ergodic_average(trace: ChainTrace, functional_id: str):
    return trace.ergodic_average(functional_id)
