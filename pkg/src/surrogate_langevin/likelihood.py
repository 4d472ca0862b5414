"""Log-likelihood engines for regression and density estimation.

Regression (any forward operator G, exponential family, link g):

    l_n(theta) = sum_i [ Y_i b(theta)(X_i) - A(b(theta)(X_i)) ],
    b(theta) = (A')^{-1} o g^{-1} o G(theta).

Density estimation (centered basis):

    l_n(theta) = sum_i Phi(theta)(X_i) - n log int_0^1 exp(Phi(theta)),

with the log-partition and its derivatives computed by fixed Gauss-Legendre
quadrature, so that differentiation commutes with the nodes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import BasisFamily
from .expfam import ExpFamily, LinkFunction, natural_param, natural_param_d1, natural_param_d2
from .forward import LinearPhi


def gauss_legendre_01(nodes: int):
    """Gauss-Legendre rule transplanted to [0, 1]."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (t + 1.0), 0.5 * w


@dataclass
class Dataset:
    """Observed data: design points x in [0,1] and responses y (regression)."""

    kind: str  # "regression" | "density"
    x: np.ndarray
    y: np.ndarray | None
    n: int
    truth_theta0: np.ndarray | None = None
    seed: int | None = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        if self.x.shape != (self.n,):
            raise ValueError("length of x must equal n")
        if np.any((self.x < 0) | (self.x > 1)):
            raise ValueError("design points must lie in [0, 1]")
        if self.kind == "regression":
            if self.y is None:
                raise ValueError("regression data needs responses y")
            self.y = np.asarray(self.y, dtype=float)
            if self.y.shape != (self.n,):
                raise ValueError("length of y must equal n")

    def save(self, path):
        """Write data as CSV plus a JSON metadata sidecar."""
        path = Path(path)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            if self.kind == "regression":
                writer.writerow(["x", "y"])
                for xi, yi in zip(self.x, self.y):
                    writer.writerow([repr(float(xi)), repr(float(yi))])
            else:
                writer.writerow(["x"])
                for xi in self.x:
                    writer.writerow([repr(float(xi))])
        meta = {
            "kind": self.kind,
            "n": self.n,
            "seed": self.seed,
            "theta0": None if self.truth_theta0 is None else list(map(float, self.truth_theta0)),
        }
        path.with_suffix(path.suffix + ".meta.json").write_text(json.dumps(meta, indent=2))

    @classmethod
    def load(cls, path):
        path = Path(path)
        meta = json.loads(path.with_suffix(path.suffix + ".meta.json").read_text())
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        theta0 = None if meta["theta0"] is None else np.asarray(meta["theta0"])
        if meta["kind"] == "regression":
            return cls("regression", rows[:, 0], rows[:, 1], meta["n"], theta0, meta["seed"])
        return cls("density", rows[:, 0], None, meta["n"], theta0, meta["seed"])


@dataclass
class CurvatureReport:
    """Empirical local curvature/boundedness probe over a ball."""

    lambda_min_est: float
    lambda_max_est: float
    grad_norm_at_center: float
    n_probes: int
    center: np.ndarray
    eta: float
    skipped: int = 0


@dataclass
class ModelInstance:
    """A likelihood engine binding data, basis, family, link and forward operator."""

    dataset: Dataset
    basis: BasisFamily
    family: ExpFamily | None
    link: LinkFunction | None
    forward: object | None
    quadrature_nodes: int = 256

    def __post_init__(self):
        if self.dataset.kind == "density":
            if self.basis.kind != "cosine-centered":
                raise ValueError("density estimation requires the cosine-centered basis")
            self._qx, self._qw = gauss_legendre_01(self.quadrature_nodes)
            self._E_quad = self.basis.design_matrix(self._qx)
        else:
            if self.forward is None:
                raise ValueError("regression model needs a forward operator")
            if self.forward.kind == "darcy-1d" and self.basis.kind != "dirichlet-sine":
                raise ValueError("the Darcy model requires the dirichlet-sine basis")
        self._E_data = self.basis.design_matrix(self.dataset.x) if self.dataset.n else None
        self._grad_data_const = (
            self._E_data.sum(axis=0) if (self.dataset.kind == "density" and self.dataset.n) else None
        )

    @property
    def p(self) -> int:
        return self.basis.p

    @property
    def n(self) -> int:
        return self.dataset.n

    @property
    def kind(self) -> str:
        return self.dataset.kind

    # -- regression internals ------------------------------------------------

    def _forward_values(self, theta):
        if isinstance(self.forward, LinearPhi):
            return self._E_data @ theta
        return self.forward.values(theta, self.dataset.x)

    # -- density internals ---------------------------------------------------

    def _log_partition(self, phi_quad):
        mx = np.max(phi_quad)
        return mx + np.log(np.sum(self._qw * np.exp(phi_quad - mx)))

    def density_on_grid(self, theta, x):
        """p_theta evaluated at x (density model)."""
        phi_quad = self._E_quad @ theta
        a = self._log_partition(phi_quad)
        return np.exp(self.basis.design_matrix(np.atleast_1d(x)) @ theta - a)

    # -- public likelihood surface -------------------------------------------

    def log_lik(self, theta) -> float:
        theta = self._check(theta)
        if self.n == 0:
            return 0.0
        if self.kind == "density":
            phi_quad = self._E_quad @ theta
            return float(np.sum(self._E_data @ theta) - self.n * self._log_partition(phi_quad))
        u = self._forward_values(theta)
        b = natural_param(self.family, self.link, u)
        with np.errstate(over="ignore", invalid="ignore"):
            terms = self.dataset.y * b - self.family.A(b)
        total = np.sum(terms)
        return float(total) if np.isfinite(total) else -np.inf

    def grad_log_lik(self, theta) -> np.ndarray:
        theta = self._check(theta)
        if self.n == 0:
            return np.zeros(self.p)
        if self.kind == "density":
            phi_quad = self._E_quad @ theta
            a = self._log_partition(phi_quad)
            p_quad = np.exp(phi_quad - a)
            return self._grad_data_const - self.n * (self._E_quad.T @ (self._qw * p_quad))
        u = self._forward_values(theta)
        b = natural_param(self.family, self.link, u)
        with np.errstate(over="ignore", invalid="ignore"):
            resid = (self.dataset.y - self.family.A1(b)) * natural_param_d1(self.family, self.link, u)
        if not np.all(np.isfinite(resid)):
            raise FloatingPointError("non-finite likelihood gradient (overflowed natural parameter)")
        if isinstance(self.forward, LinearPhi):
            return self._E_data.T @ resid
        return self.forward.grad_rows(theta, self.dataset.x).T @ resid

    def hess_dir(self, theta, v) -> float:
        """Directional second derivative v' hess l_n(theta) v."""
        theta = self._check(theta)
        v = np.asarray(v, dtype=float)
        if self.n == 0:
            return 0.0
        if self.kind == "density":
            phi_quad = self._E_quad @ theta
            a = self._log_partition(phi_quad)
            p_quad = np.exp(phi_quad - a)
            phiv = self._E_quad @ v
            mean = np.sum(self._qw * phiv * p_quad)
            var = np.sum(self._qw * (phiv - mean) ** 2 * p_quad)
            return float(-self.n * var)
        u = self._forward_values(theta)
        b = natural_param(self.family, self.link, u)
        if isinstance(self.forward, LinearPhi):
            gu = self._E_data @ v
            hu = 0.0
        else:
            gu = self.forward.dir_grad(theta, v, self.dataset.x)
            hu = self.forward.dir_hess(theta, v, self.dataset.x)
        q1 = natural_param_d1(self.family, self.link, u)
        q2 = natural_param_d2(self.family, self.link, u)
        db = q1 * gu
        d2b = q2 * gu ** 2 + q1 * hu
        with np.errstate(over="ignore", invalid="ignore"):
            val = np.sum((self.dataset.y - self.family.A1(b)) * d2b - self.family.A2(b) * db ** 2)
        if not np.isfinite(val):
            raise FloatingPointError("non-finite directional Hessian")
        return float(val)

    def hess_dir_many(self, theta, V) -> np.ndarray:
        """v' hess l_n v for all columns of V at once (fast path for LinearPhi)."""
        theta = self._check(theta)
        V = np.asarray(V, dtype=float)
        if self.kind == "regression" and isinstance(self.forward, LinearPhi) and self.n:
            u = self._forward_values(theta)
            b = natural_param(self.family, self.link, u)
            q1 = natural_param_d1(self.family, self.link, u)
            q2 = natural_param_d2(self.family, self.link, u)
            GU = self._E_data @ V  # (n, ndir)
            w_hess = (self.dataset.y - self.family.A1(b)) * q2 - self.family.A2(b) * q1 ** 2
            return w_hess @ GU ** 2
        return np.array([self.hess_dir(theta, V[:, j]) for j in range(V.shape[1])])

    def hess_matrix(self, theta) -> np.ndarray:
        """Full Hessian by polarization of directional forms (small p only)."""
        if self.p > 16:
            raise ValueError("full Hessian assembly is restricted to p <= 16")
        p = self.p
        eye = np.eye(p)
        diag = np.array([self.hess_dir(theta, eye[k]) for k in range(p)])
        H = np.diag(diag)
        for i in range(p):
            for j in range(i + 1, p):
                d = self.hess_dir(theta, eye[i] + eye[j])
                H[i, j] = H[j, i] = 0.5 * (d - diag[i] - diag[j])
        return H

    def curvature_probe(self, center, eta, n_probes, seed) -> CurvatureReport:
        """Sample -v' hess l_n v over the ball B(center, eta).

        Each probe point gets 2p random unit directions plus the p coordinate
        directions; points with non-finite likelihood are skipped and counted.
        """
        center = np.asarray(center, dtype=float)
        if eta <= 0:
            raise ValueError("probe radius eta must be positive")
        p = self.p
        rng = np.random.default_rng(seed)
        if self.n == 0:
            return CurvatureReport(0.0, 0.0, 0.0, n_probes, center, eta)
        lam_min, lam_max = np.inf, -np.inf
        skipped = 0
        for _ in range(n_probes):
            direction = rng.standard_normal(p)
            direction /= np.linalg.norm(direction)
            radius = eta * rng.random() ** (1.0 / p)
            theta = center + radius * direction
            if not np.isfinite(self.log_lik(theta)):
                skipped += 1
                continue
            V = rng.standard_normal((p, 2 * p))
            V /= np.linalg.norm(V, axis=0)
            V = np.concatenate([V, np.eye(p)], axis=1)
            vals = -self.hess_dir_many(theta, V)
            lam_min = min(lam_min, float(np.min(vals)))
            lam_max = max(lam_max, float(np.max(vals)))
        if not np.isfinite(lam_min):
            lam_min = lam_max = 0.0
        grad_norm = float(np.linalg.norm(self.grad_log_lik(center)))
        return CurvatureReport(lam_min, lam_max, grad_norm, n_probes, center, eta, skipped)

    def _check(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.p,):
            raise ValueError(f"theta must have length p={self.p}, got shape {theta.shape}")
        return theta


def generate_data(basis: BasisFamily, theta0, n: int, seed,
                  kind: str = "regression",
                  family: ExpFamily | None = None,
                  link: LinkFunction | None = None,
                  forward=None) -> Dataset:
    """Draw a synthetic dataset from the model at theta0; deterministic per seed."""
    theta0 = np.asarray(theta0, dtype=float)
    if not np.all(np.isfinite(theta0)):
        raise ValueError("theta0 must be finite")
    if n < 1:
        raise ValueError("need n >= 1 observations")
    rng = np.random.default_rng(seed)
    if kind == "density":
        grid = np.linspace(0.0, 1.0, 8193)
        logpdf = basis.design_matrix(grid) @ theta0
        pdf = np.exp(logpdf - np.max(logpdf))
        cdf = np.concatenate(([0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid))))
        cdf /= cdf[-1]
        x = np.interp(rng.random(n), cdf, grid)
        return Dataset("density", x, None, n, theta0, seed)
    x = rng.random(n)
    op = forward if forward is not None else LinearPhi(basis)
    u = op.values(theta0, x)
    try:
        b = natural_param(family, link, u)
    except ValueError as exc:
        raise ValueError(f"natural parameter out of range at theta0: {exc}") from exc
    if not np.all(np.isfinite(family.A(b))):
        raise ValueError("natural-parameter overflow at theta0; use a smaller ||theta0||")
    y = family.sample(b, rng)
    return Dataset("regression", x, y, n, theta0, seed)
