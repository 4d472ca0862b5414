"""Convexified surrogate log-likelihood and its gradient.

The surrogate is

    lt(theta) = v(t/eta) (l(theta) - l(init)) + l(init) - K v_eta(t),
    t = ||theta - theta_init||,

with a smooth cutoff v that is 1 on [0, 3/4] and 0 on [7/8, inf), and a
convex penalty v_eta obtained by mollifying the hinge quadratic
gamma_eta(t) = (t - 5 eta/8)_+^2 with a symmetric bump of width eta/8.
Inside t <= eta/2 both corrections vanish identically, so the surrogate
equals the base log-likelihood there exactly (including its gradient).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .likelihood import CurvatureReport, ModelInstance
from .prior import SievePrior


class ConfigurationError(ValueError):
    pass


def _bump_unnormalized(x):
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1.0
    out = np.zeros_like(x)
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


def _smoothstep(s):
    """psi(s) = f(s)/(f(s)+f(1-s)) with f(x) = exp(-1/x) for x > 0."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        fs = np.where(s > 0, np.exp(-1.0 / np.maximum(s, 1e-300)), 0.0)
        f1 = np.where(1 - s > 0, np.exp(-1.0 / np.maximum(1 - s, 1e-300)), 0.0)
    return fs / (fs + f1)


def _smoothstep_deriv(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = (s > 0) & (s < 1)
    si = s[inside]
    fs = np.exp(-1.0 / si)
    f1 = np.exp(-1.0 / (1 - si))
    d_fs = fs / si ** 2
    d_f1 = f1 / (1 - si) ** 2
    out[inside] = (d_fs * f1 + fs * d_f1) / (fs + f1) ** 2
    return out


class CutoffV:
    """Smooth radial cutoff: 1 for t <= 3/4, 0 for t >= 7/8."""

    def __init__(self, grid_size: int = 10_001):
        t = np.linspace(0.75, 0.875, grid_size)
        v = self.eval(t)
        v1 = self.deriv(t)
        h = t[1] - t[0]
        v2 = np.gradient(v1, h)
        self.c2_norm = float(max(np.max(np.abs(v)), np.max(np.abs(v1)), np.max(np.abs(v2))))
        self.sup_d1 = float(np.max(np.abs(v1)))
        self.sup_d2 = float(np.max(np.abs(v2)))

    @staticmethod
    def eval(t):
        t = np.asarray(t, dtype=float)
        s = (7.0 / 8.0 - t) * 8.0
        return np.where(t <= 0.75, 1.0, np.where(t >= 0.875, 0.0, _smoothstep(np.clip(s, 0.0, 1.0))))[()]

    @staticmethod
    def deriv(t):
        t = np.asarray(t, dtype=float)
        s = (7.0 / 8.0 - t) * 8.0
        inner = (t > 0.75) & (t < 0.875)
        out = np.zeros_like(t)
        out[inner] = -8.0 * _smoothstep_deriv(s[inner])
        return out[()]


class MollifiedPenalty:
    """Convex penalty v_eta = phi_{eta/8} * gamma_eta by fixed quadrature."""

    def __init__(self, eta: float, quad_nodes: int = 64):
        if eta <= 0:
            raise ValueError("eta must be positive")
        self.eta = float(eta)
        self.s = self.eta / 8.0
        z, w = np.polynomial.legendre.leggauss(quad_nodes)
        phi = _bump_unnormalized(z)
        norm = np.sum(w * phi)
        self._z = z
        self._wphi = w * phi / norm  # weights of the unit-mass mollifier
        self.sigma2_phi = float(np.sum(self._wphi * z ** 2))

    def _hinge(self, t):
        d = t - 5.0 * self.eta / 8.0
        return np.where(d > 0, d * d, 0.0)

    def _hinge_deriv(self, t):
        d = t - 5.0 * self.eta / 8.0
        return np.where(d > 0, 2.0 * d, 0.0)

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        shifted = t[..., None] - self.s * self._z
        return np.sum(self._wphi * self._hinge(shifted), axis=-1)[()]

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        shifted = t[..., None] - self.s * self._z
        return np.sum(self._wphi * self._hinge_deriv(shifted), axis=-1)[()]

    def tail_closed_form(self, t):
        """Exact value for t >= 3 eta / 4 (the mollifier cross term cancels)."""
        return (np.asarray(t, dtype=float) - 5.0 * self.eta / 8.0) ** 2 + self.s ** 2 * self.sigma2_phi


_PRESET_EXPONENTS = {
    # (kappa1, kappa2, kappa3)
    "glm": (0.0, 0.5, 0.0),
    "density": (0.0, 0.5, 0.0),
    "darcy": (0.0, 2.0, 6.0),
}


def choose_K(probe: CurvatureReport, n: int, p: int, delta_n: float,
             preset: str = "glm", override: float | None = None,
             cutoff: CutoffV | None = None) -> float:
    """Penalty weight from the empirical curvature probe.

    Floor: 60 * c_hat_max * ||v||_C2 * n * (1 + p^kappa2), with c_hat_max
    estimated from the probe's Hessian maximum and center gradient norm.
    A user override can only raise the result.
    """
    if preset not in _PRESET_EXPONENTS:
        raise ConfigurationError(f"unknown preset {preset!r}")
    kappa1, kappa2, _ = _PRESET_EXPONENTS[preset]
    if probe.lambda_max_est <= 0.0 and probe.grad_norm_at_center <= 0.0:
        raise ConfigurationError("curvature probe is degenerate (no data?); cannot choose K")
    if cutoff is None:
        cutoff = CutoffV()
    c_hat = max(probe.lambda_max_est / (n * p ** kappa2),
                probe.grad_norm_at_center / (n * delta_n * p ** kappa1))
    K = 60.0 * c_hat * cutoff.c2_norm * n * (1.0 + p ** kappa2)
    if override is not None:
        K = max(K, float(override))
    return float(K)


def preset_exponents(preset: str):
    return _PRESET_EXPONENTS[preset]


@dataclass
class SurrogateSpec:
    """Surrogate log-likelihood lt and the constants it certifies.

    lambda_tilde = 7K, lambda_total = 7K + Lambda_pi and
    m_total = (probe curvature minimum) + m_pi.
    """

    model: ModelInstance
    prior: SievePrior
    theta_init: np.ndarray
    eta: float
    K: float
    probe: CurvatureReport
    cutoff: CutoffV = field(default_factory=CutoffV)
    penalty: MollifiedPenalty = field(init=False)

    def __post_init__(self):
        self.theta_init = np.asarray(self.theta_init, dtype=float)
        if self.theta_init.shape != (self.model.p,):
            raise ValueError("theta_init has wrong length")
        if self.eta <= 0 or self.K <= 0:
            raise ValueError("eta and K must be positive")
        self.penalty = MollifiedPenalty(self.eta)
        self._ll_init = self.model.log_lik(self.theta_init)
        if not np.isfinite(self._ll_init):
            raise ValueError("log-likelihood is not finite at theta_init")

    # derived constants -------------------------------------------------------

    @property
    def m_curv(self) -> float:
        return self.probe.lambda_min_est

    @property
    def lambda_tilde(self) -> float:
        return 7.0 * self.K

    @property
    def m(self) -> float:
        return self.m_curv + self.prior.m_pi

    @property
    def lam(self) -> float:
        return self.lambda_tilde + self.prior.lambda_pi

    @property
    def region_center(self) -> np.ndarray:
        """Center of the coincidence region (the probe's ball center)."""
        return self.probe.center

    @property
    def coincidence_radius(self) -> float:
        """Radius 3 eta / 8 of the region where lt == l."""
        return 3.0 * self.eta / 8.0

    # evaluations --------------------------------------------------------------

    def log_lik(self, theta) -> float:
        theta = np.asarray(theta, dtype=float)
        t = float(np.linalg.norm(theta - self.theta_init))
        if t <= 0.5 * self.eta:
            # cutoff == 1 and penalty == 0 hold identically here; return the
            # base value directly so the region identity is exact in floats
            return self.model.log_lik(theta)
        vt = float(self.cutoff.eval(t / self.eta))
        pen = float(self.penalty.eval(t))
        if vt == 0.0:
            return self._ll_init - self.K * pen
        ll = self.model.log_lik(theta)
        if not np.isfinite(ll):
            return -np.inf
        return vt * (ll - self._ll_init) + self._ll_init - self.K * pen

    def grad(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        diff = theta - self.theta_init
        t = float(np.linalg.norm(diff))
        if t <= 0.5 * self.eta:
            return self.model.grad_log_lik(theta)
        radial = diff / t
        vt = float(self.cutoff.eval(t / self.eta))
        dv = float(self.cutoff.deriv(t / self.eta)) / self.eta
        dpen = float(self.penalty.deriv(t))
        out = -self.K * dpen * radial
        if vt != 0.0 or dv != 0.0:
            ll = self.model.log_lik(theta)
            if not np.isfinite(ll):
                raise FloatingPointError("non-finite base likelihood inside the cutoff support")
            out = out + dv * (ll - self._ll_init) * radial
            if vt != 0.0:
                out = out + vt * self.model.grad_log_lik(theta)
        return out

    def posterior_log_density(self, theta) -> float:
        """log of the (unnormalized) surrogate posterior density."""
        return self.log_lik(theta) + self.prior.log_density(theta)

    def posterior_grad(self, theta) -> np.ndarray:
        """The Langevin drift: grad lt + grad log prior."""
        return self.grad(theta) + self.prior.grad_log_density(theta)
