"""Scikit-learn-style front end for the sampling pipeline.

fit() builds the surrogate posterior around an initialization point, runs the
Langevin chain, and stores the ergodic posterior mean; predict() evaluates the
fitted regression function at new design points.
"""

from __future__ import annotations

import numpy as np

from .basis import BasisFamily
from .expfam import ExpFamily, LinkFunction, natural_param
from .forward import LinearPhi
from .initializers import pilot_ascent_init
from .likelihood import Dataset, ModelInstance
from .prior import SievePrior
from .sampler import SamplerConfig, run_chain, step_size_bound, burn_in_steps
from .surrogate import SurrogateSpec, choose_K, preset_exponents


class LangevinGLMRegressor:
    """Bayesian GLM regression via surrogate-posterior Langevin sampling.

    Parameters follow the scikit-learn convention: all constructor arguments
    are stored unmodified and inferred quantities get a trailing underscore.
    """

    def __init__(self, p=8, alpha=1.0, family="gaussian", link="canonical",
                 basis="cosine-with-constant", eta=None, kappa_const=None, epsilon=0.5,
                 gamma_fraction=1.0, j=20_000, n_probes=200, seed=0):
        self.p = p
        self.alpha = alpha
        self.family = family
        self.link = link
        self.basis = basis
        self.eta = eta
        self.kappa_const = kappa_const
        self.epsilon = epsilon
        self.gamma_fraction = gamma_fraction
        self.j = j
        self.n_probes = n_probes
        self.seed = seed

    def get_params(self, deep=True):
        return {k: getattr(self, k) for k in (
            "p", "alpha", "family", "link", "basis", "eta", "kappa_const",
            "epsilon", "gamma_fraction", "j", "n_probes", "seed")}

    def set_params(self, **params):
        for k, v in params.items():
            if not hasattr(self, k):
                raise ValueError(f"unknown parameter {k!r}")
            setattr(self, k, v)
        return self

    def fit(self, X, y):
        x = np.ravel(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=float)
        n = x.size
        basis = BasisFamily(self.basis, self.p)
        family = ExpFamily(self.family)
        link = LinkFunction(self.link)
        dataset = Dataset(kind="regression", x=x, y=y, n=n)
        model = ModelInstance(dataset, basis, family, link, LinearPhi(basis))
        prior = SievePrior(self.alpha, n, self.p)

        theta_init, info = pilot_ascent_init(model, prior)
        eta = self.eta if self.eta is not None else self.p ** -0.5
        delta_n = n ** (-self.alpha / (2.0 * self.alpha + 1.0))
        probe = model.curvature_probe(theta_init, eta, n_probes=self.n_probes,
                                      seed=self.seed)
        kappa = choose_K(probe, n=n, p=self.p, delta_n=delta_n, preset="glm",
                         override=self.kappa_const)
        surrogate = SurrogateSpec(model, prior, theta_init, eta, kappa, probe)
        gamma = self.gamma_fraction * step_size_bound(surrogate.m, surrogate.lam)[0]
        j_in = burn_in_steps(self.epsilon, surrogate.m, gamma, eta,
                             prior.lambda_pi, self.p)
        config = SamplerConfig(variant="surrogate", gamma=gamma, j_in=j_in,
                               j=self.j, seed=self.seed)
        trace = run_chain(surrogate.posterior_grad, theta_init, config,
                          functionals={"identity": lambda t: t},
                          region_center=surrogate.region_center,
                          region_radius=surrogate.coincidence_radius)

        self.model_ = model
        self.surrogate_ = surrogate
        self.trace_ = trace
        self.posterior_mean_ = trace.ergodic_average("identity")
        self.theta_init_ = theta_init
        self.gamma_ = gamma
        self.j_in_ = j_in
        self.init_info_ = info
        return self

    def predict(self, X):
        if not hasattr(self, "posterior_mean_"):
            raise RuntimeError("call fit before predict")
        x = np.ravel(np.asarray(X, dtype=float))
        model = self.model_
        u = model.basis.design_matrix(x) @ self.posterior_mean_
        b = natural_param(model.family, model.link, u)
        return model.family.A1(b)
