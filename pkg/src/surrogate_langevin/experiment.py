"""Experiment harness: run (n, p, seed) cells from a validated config and emit
CSV reports plus a manifest of every resolved numeric parameter."""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .basis import BasisFamily
from .config import MODEL_PRESETS, ExperimentConfig
from .diagnostics import (condition_numbers, contraction_metric,
                          grid_posterior, grid_tv_distance, loglog_slope)
from .expfam import ExpFamily, LinkFunction
from .forward import Darcy1D, LinearPhi
from .initializers import (oracle_perturbed_init, oracle_projection_init,
                           pilot_ascent_init)
from .likelihood import ModelInstance, generate_data
from .prior import SievePrior
from .sampler import (ChainDivergedError, SamplerConfig, burn_in_steps,
                      discretization_bias, precision_floor, run_chain,
                      step_size_bound)
from .surrogate import SurrogateSpec, choose_K

REPORT_COLUMNS = [
    "n", "p", "seed", "status", "gamma", "j_in", "j", "kappa_const", "eta",
    "m", "lambda", "delta_n", "exit_step", "mean_error", "contraction_fraction",
    "cond_surrogate", "cond_prior", "grid_tv", "message",
]


@dataclass
class CellResult:
    n: int
    p: int
    seed: int
    status: str = "ok"
    message: str = ""
    resolved: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    trace: object = None

    def row(self) -> list:
        r, m = self.resolved, self.metrics
        def fmt(v):
            return "" if v is None else (repr(float(v)) if isinstance(v, (int, float, np.floating)) and not isinstance(v, bool) else str(v))
        return [
            self.n, self.p, self.seed, self.status,
            fmt(r.get("gamma")), r.get("j_in", ""), r.get("j", ""),
            fmt(r.get("kappa_const")), fmt(r.get("eta")), fmt(r.get("m")),
            fmt(r.get("lambda")), fmt(r.get("delta_n")),
            "" if m.get("exit_step") is None else m.get("exit_step"),
            fmt(m.get("mean_error")), fmt(m.get("contraction_fraction")),
            fmt(m.get("cond_surrogate")), fmt(m.get("cond_prior")),
            fmt(m.get("grid_tv")), self.message,
        ]


def build_model(cfg: ExperimentConfig, n: int, p: int, seed: int):
    """Generate data and assemble the likelihood engine for one cell."""
    kind, family_name, link_name, basis_kind, preset = MODEL_PRESETS[cfg.model_preset]
    basis = BasisFamily(basis_kind, p)
    family = ExpFamily(family_name) if family_name else None
    link = LinkFunction(link_name) if link_name else None
    theta0 = cfg.theta0_for(p)
    if cfg.model_preset == "darcy-1d":
        forward = Darcy1D(basis, M=cfg.darcy_mesh, f_min=cfg.darcy_f_min,
                          g1=cfg.darcy_source, g2=cfg.darcy_boundary)
    elif kind == "regression":
        forward = LinearPhi(basis)
    else:
        forward = None
    dataset = generate_data(basis, theta0, n, seed, kind=kind, family=family,
                            link=link, forward=forward)
    model = ModelInstance(dataset, basis, family, link, forward)
    return model, theta0, preset


def resolve_cell(cfg: ExperimentConfig, model, theta0, preset, seed: int):
    """Resolve every rule to numbers: init point, eta, K, gamma, J_in."""
    n, p = model.n, model.p
    prior = SievePrior(cfg.alpha, n, p)
    eta = cfg.eta_for(p)
    delta_n = cfg.delta_n(n)
    theta_star = oracle_projection_init(theta0, p)
    if cfg.init_mode == "oracle-projection":
        theta_init = theta_star
    elif cfg.init_mode == "oracle-perturbed":
        theta_init = oracle_perturbed_init(theta0, p, cfg.init_rho, eta, seed)
    else:
        theta_init, _ = pilot_ascent_init(model, prior, theta_star=theta_star, eta=eta)
    probe = model.curvature_probe(theta_init, eta, cfg.n_probes, seed)
    kappa = choose_K(probe, n, p, delta_n, preset=preset, override=cfg.k_override)
    surrogate = SurrogateSpec(model, prior, theta_init, eta, kappa, probe)
    bounds = step_size_bound(surrogate.m, surrogate.lam)
    if cfg.gamma_rule == "fixed":
        gamma = cfg.gamma_value
    else:
        gamma = cfg.gamma_fraction * (bounds[0] if cfg.gamma_bound == "sampling" else bounds[1])
    if cfg.j_in_rule == "fixed":
        j_in = cfg.j_in_value
    else:
        bias = discretization_bias(gamma, p, surrogate.m, surrogate.lam)
        floor = precision_floor(n, delta_n, bias)
        j_in = burn_in_steps(cfg.epsilon, surrogate.m, gamma, eta,
                             prior.lambda_pi, p, c_w=cfg.c_w, floor=floor)
    resolved = {
        "gamma": gamma, "j_in": j_in, "j": cfg.j, "kappa_const": kappa,
        "eta": eta, "m": surrogate.m, "lambda": surrogate.lam,
        "delta_n": delta_n, "m_pi": prior.m_pi, "lambda_pi": prior.lambda_pi,
        "step_bound_sampling": bounds[0], "step_bound_exit": bounds[1],
        "c_w": cfg.c_w, "epsilon": cfg.epsilon,
    }
    return surrogate, theta_star, resolved


def run_cell(cfg: ExperimentConfig, n: int, seed: int) -> CellResult:
    p = cfg.p_for(n)
    result = CellResult(n=n, p=p, seed=seed)
    try:
        model, theta0, preset = build_model(cfg, n, p, seed)
        surrogate, theta_star, resolved = resolve_cell(cfg, model, theta0, preset, seed)
        result.resolved = resolved
        drift = (surrogate.posterior_grad if cfg.variant == "surrogate"
                 else lambda t: model.grad_log_lik(t) + surrogate.prior.grad_log_density(t))
        sconf = SamplerConfig(variant=cfg.variant, gamma=resolved["gamma"],
                              j_in=resolved["j_in"], j=cfg.j, seed=seed,
                              guard=cfg.guard, guard_radius=cfg.guard_radius)
        trace = run_chain(drift, surrogate.theta_init, sconf,
                          functionals={"identity": lambda t: t},
                          region_center=theta_star,
                          region_radius=surrogate.coincidence_radius,
                          storage_budget=cfg.thinning_budget)
        result.trace = trace
        mean = trace.ergodic_average("identity")
        result.metrics["exit_step"] = trace.exit_step
        result.metrics["mean_error"] = float(np.linalg.norm(mean - theta_star))
        if "contraction" in cfg.diagnostics:
            beta = ((cfg.alpha + 1.0) / (cfg.alpha - 1.0)
                    if cfg.model_preset == "darcy-1d" else 1.0)
            result.metrics["contraction_fraction"] = contraction_metric(
                trace.post_burn_in_states(), theta_star, beta, 10.0,
                resolved["delta_n"])
        if "condition-numbers" in cfg.diagnostics:
            cs, cp = condition_numbers(surrogate)
            result.metrics["cond_surrogate"] = cs
            result.metrics["cond_prior"] = cp
        if "grid-posterior" in cfg.diagnostics and p == 1:
            half = max(6.0 / np.sqrt(surrogate.m), 4 * surrogate.eta)
            bounds = ((theta_star[0] - half, theta_star[0] + half),)
            g_sur = grid_posterior(surrogate.posterior_log_density, bounds, (1024,))
            g_true = grid_posterior(
                lambda t: model.log_lik(t) + surrogate.prior.log_density(t),
                bounds, (1024,))
            result.metrics["grid_tv"] = grid_tv_distance(g_sur, g_true)
    except ChainDivergedError as exc:
        result.status = "diverged"
        result.message = str(exc)
    except Exception as exc:  # cell failures must not abort the experiment
        result.status = "failed"
        result.message = f"{type(exc).__name__}: {exc}"
    return result


def _run_cell_star(args):
    return run_cell(*args)


def run_experiment(cfg: ExperimentConfig, out_dir=None, seed_offset: int = 0,
                   jobs: int = 1):
    """Execute all (n, seed) cells; returns (results, manifest path).

    Every cell writes into the report CSV; failures are recorded per cell and
    never abort the run.  A manifest echoes the configuration and each cell's
    resolved parameters.
    """
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cells = [(cfg, n, seed + seed_offset) for n in cfg.n_grid for seed in cfg.seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell_star, cells))
    else:
        results = [run_cell(*c) for c in cells]

    report_path = out / "report.csv"
    with open(report_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPORT_COLUMNS)
        for r in results:
            writer.writerow(r.row())

    if "recovery" in cfg.diagnostics:
        _write_recovery(out, cfg, results)

    manifest = {
        "config": {k: (list(v) if isinstance(v, (list, tuple)) else v)
                   for k, v in vars(cfg).items()},
        "seed_offset": seed_offset,
        "cells": [
            {"n": r.n, "p": r.p, "seed": r.seed, "status": r.status,
             "resolved": {k: (float(v) if isinstance(v, (np.floating, np.integer)) else v)
                          for k, v in r.resolved.items()},
             "metrics": {k: (None if v is None else float(v)) for k, v in r.metrics.items()}}
            for r in results
        ],
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True))

    for r in results:
        if r.trace is not None and len(cells) <= 64:
            _write_trace(out / f"trace_n{r.n}_p{r.p}_seed{r.seed}.csv", r)
    return results, report_path


def _write_recovery(out: Path, cfg: ExperimentConfig, results):
    by_n = {}
    for r in results:
        if r.status == "ok":
            by_n.setdefault(r.n, []).append(r.metrics["mean_error"])
    rows = [(n, float(np.median(errs))) for n, errs in sorted(by_n.items())]
    slope = loglog_slope([r[0] for r in rows], [r[1] for r in rows]) if len(rows) >= 2 else float("nan")
    with open(out / "recovery.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "median_mean_error", "fitted_slope", "target_rate"])
        for n, err in rows:
            writer.writerow([n, repr(err), repr(slope),
                             repr(-cfg.alpha / (2 * cfg.alpha + 1))])


def _write_trace(path: Path, result: CellResult):
    trace = result.trace
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step"] + [f"coord_{k + 1}" for k in range(result.p)])
        for i, state in enumerate(trace.states):
            writer.writerow([i * trace.stride] + [repr(float(v)) for v in state])
    meta = {"seed": trace.seed, "gamma": trace.gamma, "j_in": trace.j_in,
            "j": trace.j, "exit_step": trace.exit_step,
            "guard_trigger_count": trace.guard_trigger_count,
            "stride": trace.stride}
    path.with_suffix(".meta.json").write_text(json.dumps(meta, indent=2))
