"""Chain initialization strategies.

Synthetic runs can start from the truth projection (or a bounded perturbation
of it); the no-oracle workflow uses a pilot gradient ascent on the
unnormalized log posterior.
"""

from __future__ import annotations

import numpy as np


def oracle_projection_init(theta0: np.ndarray, p: int) -> np.ndarray:
    """First p coefficients of the data-generating truth (synthetic only)."""
    theta0 = np.asarray(theta0, dtype=float)
    out = np.zeros(p)
    out[: min(p, theta0.size)] = theta0[: min(p, theta0.size)]
    return out


def oracle_perturbed_init(theta0: np.ndarray, p: int, rho: float, eta: float,
                          seed: int) -> np.ndarray:
    """Truth projection plus a uniform-ball perturbation of radius rho <= eta/8."""
    if rho > eta / 8.0:
        raise ValueError(f"perturbation radius {rho:g} exceeds eta/8 = {eta / 8.0:g}")
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(p)
    direction /= np.linalg.norm(direction)
    radius = rho * rng.uniform() ** (1.0 / p)
    return oracle_projection_init(theta0, p) + radius * direction


def pilot_ascent_init(model, prior, steps: int = 500, rate: float = None,
                      theta_star=None, eta: float = None):
    """Backtracking gradient ascent on log-likelihood + log prior from zero.

    Returns (theta, info) where info reports the final objective, step count,
    and — when the truth projection and locality radius are supplied — the
    ratio ||theta - theta_star|| / eta for checking the <= 1/8 initialization
    contract.
    """
    p = model.basis.p
    theta = np.zeros(p)

    def objective(t):
        return model.log_lik(t) + prior.log_density(t)

    def gradient(t):
        return model.grad_log_lik(t) + prior.grad_log_density(t)

    obj = objective(theta)
    if not np.isfinite(obj):
        raise ValueError("log posterior is non-finite at the zero start")
    step = rate if rate is not None else 1.0 / max(model.dataset.n, 1)
    consecutive_failures = 0
    for _ in range(steps):
        g = gradient(theta)
        gnorm = np.linalg.norm(g)
        if gnorm < 1e-12:
            break
        candidate = theta + step * g
        cobj = objective(candidate)
        if np.isfinite(cobj) and cobj >= obj:
            theta, obj = candidate, cobj
            step *= 1.5
            consecutive_failures = 0
        else:
            step *= 0.5
            consecutive_failures += 1
            if consecutive_failures >= 50:
                raise RuntimeError(
                    "pilot ascent failed 50 consecutive backtracking steps")
    info = {"objective": float(obj), "grad_norm": float(np.linalg.norm(gradient(theta)))}
    if theta_star is not None and eta is not None:
        info["distance_over_eta"] = float(
            np.linalg.norm(theta - np.asarray(theta_star)) / eta)
    return theta, info
