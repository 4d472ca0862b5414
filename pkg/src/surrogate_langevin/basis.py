"""Orthonormal bases on [0, 1] and coefficient-to-function expansions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BASIS_KINDS = ("cosine-with-constant", "cosine-centered", "dirichlet-sine")


@dataclass(frozen=True)
class BasisFamily:
    """An orthonormal basis of L^2([0,1], dx), truncated at dimension p.

    Kinds:
      cosine-with-constant: e_1 = 1, e_k(x) = sqrt(2) cos(pi (k-1) x) for k >= 2
      cosine-centered:      e_k(x) = sqrt(2) cos(pi k x)  (all integrate to 0)
      dirichlet-sine:       e_k(x) = sqrt(2) sin(pi k x)  (Dirichlet Laplacian
                            eigenfunctions, eigenvalue pi^2 k^2)
    """

    kind: str
    p: int

    def __post_init__(self):
        if self.kind not in BASIS_KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}; expected one of {BASIS_KINDS}")
        if self.p < 1:
            raise ValueError(f"basis dimension p must be >= 1, got {self.p}")

    def eval(self, k: int, x):
        """Evaluate e_k at x (scalar or array). Requires 1 <= k <= p, 0 <= x <= 1."""
        if not 1 <= k <= self.p:
            raise ValueError(f"basis index k={k} outside 1..{self.p}")
        x = np.asarray(x, dtype=float)
        if np.any((x < 0.0) | (x > 1.0)):
            raise ValueError("evaluation point outside [0, 1]")
        if self.kind == "cosine-with-constant":
            if k == 1:
                return np.ones_like(x)[()]
            return np.sqrt(2.0) * np.cos(np.pi * (k - 1) * x)
        if self.kind == "cosine-centered":
            return np.sqrt(2.0) * np.cos(np.pi * k * x)
        return np.sqrt(2.0) * np.sin(np.pi * k * x)

    def design_matrix(self, x) -> np.ndarray:
        """Matrix E with E[i, k-1] = e_k(x_i), shape (len(x), p)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any((x < 0.0) | (x > 1.0)):
            raise ValueError("evaluation point outside [0, 1]")
        ks = np.arange(1, self.p + 1)
        if self.kind == "cosine-with-constant":
            E = np.sqrt(2.0) * np.cos(np.pi * (ks - 1)[None, :] * x[:, None])
            E[:, 0] = 1.0
            return E
        if self.kind == "cosine-centered":
            return np.sqrt(2.0) * np.cos(np.pi * ks[None, :] * x[:, None])
        return np.sqrt(2.0) * np.sin(np.pi * ks[None, :] * x[:, None])

    def expand(self, theta, x):
        """Evaluate the series sum_k theta_k e_k at x; linear in theta."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.p,):
            raise ValueError(f"theta must have length p={self.p}, got shape {theta.shape}")
        scalar = np.isscalar(x) or np.asarray(x).ndim == 0
        out = self.design_matrix(x) @ theta
        return float(out[0]) if scalar else out

    def laplacian_eigenvalue(self, k: int) -> float:
        """Dirichlet-Laplacian eigenvalue pi^2 k^2 (dirichlet-sine only)."""
        if self.kind != "dirichlet-sine":
            raise ValueError("Laplacian eigenvalues only defined for the dirichlet-sine basis")
        if not 1 <= k <= self.p:
            raise ValueError(f"basis index k={k} outside 1..{self.p}")
        return np.pi ** 2 * k ** 2


def eval_basis(basis: BasisFamily, k: int, x):
    return basis.eval(k, x)


def phi_apply(basis: BasisFamily, theta, x):
    return basis.expand(theta, x)
