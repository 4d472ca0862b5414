"""Experiment configuration: INI-style files with block headers and key=value
lines, validated up front so every rule resolves to numbers before any chain
starts."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

MODEL_PRESETS = {
    # preset -> (data kind, family, link, basis, curvature-exponent preset)
    "glm-gaussian": ("regression", "gaussian", "canonical", "cosine-with-constant", "glm"),
    "glm-poisson": ("regression", "poisson", "canonical", "cosine-with-constant", "glm"),
    "glm-logistic": ("regression", "bernoulli", "canonical", "cosine-with-constant", "glm"),
    "glm-gaussian-cube": ("regression", "gaussian", "cube", "cosine-with-constant", "glm"),
    "density": ("density", None, None, "cosine-centered", "density"),
    "darcy-1d": ("regression", "gaussian", "canonical", "dirichlet-sine", "darcy"),
}

INIT_MODES = ("oracle-projection", "oracle-perturbed", "pilot-ascent")


class ConfigValidationError(ValueError):
    """Carries the full list of violated fields."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in self.problems))


@dataclass
class ExperimentConfig:
    # model block
    model_preset: str = "glm-gaussian"
    theta0_mode: str = "decay"       # "decay" | "explicit"
    theta0_scale: float = 0.5
    theta0_power: float = 2.0        # theta0_k = scale * k^{-power}
    theta0_values: list = field(default_factory=list)
    darcy_mesh: int = 256
    darcy_f_min: float = 1.0
    darcy_source: float = 4.0
    darcy_boundary: tuple = (1.0, 1.0)
    # prior block
    alpha: float = 1.0
    # surrogate block
    eta_rule: str = "preset"         # "preset" | "fixed"
    eta_value: float = 0.0
    k_override: float | None = None
    init_mode: str = "oracle-projection"
    init_rho: float = 0.0            # oracle-perturbed radius (<= eta/8)
    n_probes: int = 200
    # sampler block
    variant: str = "surrogate"
    gamma_rule: str = "fraction"     # fraction of the chosen step bound
    gamma_fraction: float = 1.0
    gamma_bound: str = "sampling"    # "sampling" (2/(m+L)) | "exit" (m/(sqrt54 L^2))
    gamma_value: float = 0.0         # used when gamma_rule == "fixed"
    j_in_rule: str = "auto"          # "auto" (burn-in formula) | "fixed"
    j_in_value: int = 0
    epsilon: float = 0.5
    c_w: float = 1.0
    j: int = 10_000
    seeds: list = field(default_factory=lambda: [0])
    guard: str = "none"
    guard_radius: float = 1e3
    run_vanilla: bool = False
    # experiment block
    n_grid: list = field(default_factory=lambda: [500])
    p_rule: str = "fixed"            # "fixed" | "rate" (round n^{1/(2 alpha + 1)})
    p_value: int = 4
    diagnostics: list = field(default_factory=list)  # subset of DIAGNOSTIC_NAMES
    # output block
    out_dir: str = "out"
    thinning_budget: int = 10_000_000

    def p_for(self, n: int) -> int:
        if self.p_rule == "fixed":
            return self.p_value
        return max(1, round(n ** (1.0 / (2.0 * self.alpha + 1.0))))

    def eta_for(self, p: int) -> float:
        if self.eta_rule == "fixed":
            return self.eta_value
        if self.model_preset == "darcy-1d":
            return float(p) ** -8.0
        return float(p) ** -0.5

    def delta_n(self, n: int) -> float:
        return float(n) ** (-self.alpha / (2.0 * self.alpha + 1.0))

    def theta0_for(self, p: int):
        import numpy as np
        if self.theta0_mode == "explicit":
            out = np.zeros(p)
            m = min(p, len(self.theta0_values))
            out[:m] = self.theta0_values[:m]
            return out
        k = np.arange(1, p + 1, dtype=float)
        return self.theta0_scale * k ** -self.theta0_power

    def validate(self):
        problems = []
        if self.model_preset not in MODEL_PRESETS:
            problems.append(f"model.preset: unknown preset {self.model_preset!r}")
        if self.theta0_mode not in ("decay", "explicit"):
            problems.append(f"model.theta0_mode: must be decay or explicit, got {self.theta0_mode!r}")
        if self.theta0_mode == "explicit" and not self.theta0_values:
            problems.append("model.theta0_values: required when theta0_mode = explicit")
        if self.darcy_mesh < 8:
            problems.append("model.darcy_mesh: must be >= 8")
        if self.alpha <= 0.5:
            problems.append("prior.alpha: smoothness must exceed 1/2")
        if self.eta_rule not in ("preset", "fixed"):
            problems.append(f"surrogate.eta_rule: must be preset or fixed, got {self.eta_rule!r}")
        if self.eta_rule == "fixed" and self.eta_value <= 0:
            problems.append("surrogate.eta_value: must be positive when eta_rule = fixed")
        if self.k_override is not None and self.k_override <= 0:
            problems.append("surrogate.k_override: must be positive when given")
        if self.init_mode not in INIT_MODES:
            problems.append(f"surrogate.init_mode: must be one of {INIT_MODES}, got {self.init_mode!r}")
        if self.init_mode == "oracle-perturbed" and self.init_rho < 0:
            problems.append("surrogate.init_rho: must be nonnegative")
        if self.n_probes < 1:
            problems.append("surrogate.n_probes: must be >= 1")
        if self.variant not in ("surrogate", "vanilla"):
            problems.append(f"sampler.variant: must be surrogate or vanilla, got {self.variant!r}")
        if self.gamma_rule not in ("fraction", "fixed"):
            problems.append(f"sampler.gamma_rule: must be fraction or fixed, got {self.gamma_rule!r}")
        if self.gamma_rule == "fraction" and not 0.0 < self.gamma_fraction <= 1.0:
            problems.append(
                f"sampler.gamma: fraction-of-bound must lie in (0, 1], got {self.gamma_fraction}"
                " (violates the step-size bound)")
        if self.gamma_rule == "fixed" and self.gamma_value <= 0:
            problems.append("sampler.gamma_value: must be positive when gamma_rule = fixed")
        if self.gamma_bound not in ("sampling", "exit"):
            problems.append(f"sampler.gamma_bound: must be sampling or exit, got {self.gamma_bound!r}")
        if self.j_in_rule not in ("auto", "fixed"):
            problems.append(f"sampler.j_in_rule: must be auto or fixed, got {self.j_in_rule!r}")
        if self.j_in_rule == "fixed" and self.j_in_value < 0:
            problems.append("sampler.j_in_value: must be >= 0")
        if self.epsilon <= 0:
            problems.append("sampler.epsilon: must be positive")
        if self.j < 1:
            problems.append("sampler.j: must be >= 1")
        if not self.seeds:
            problems.append("sampler.seeds: need at least one seed")
        if self.guard not in ("none", "reflect"):
            problems.append(f"sampler.guard: must be none or reflect, got {self.guard!r}")
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            problems.append("experiment.n_grid: need positive sample sizes")
        if self.p_rule not in ("fixed", "rate"):
            problems.append(f"experiment.p_rule: must be fixed or rate, got {self.p_rule!r}")
        if self.p_rule == "fixed" and self.p_value < 1:
            problems.append("experiment.p_value: must be >= 1")
        if self.thinning_budget < 1000:
            problems.append("output.thinning_budget: must be >= 1000")
        known = {"grid-posterior", "w2", "contraction", "condition-numbers", "exit-times", "recovery"}
        for d in self.diagnostics:
            if d not in known:
                problems.append(f"experiment.diagnostics: unknown diagnostic {d!r}")
        if problems:
            raise ConfigValidationError(problems)
        return self


def _parse_list(raw, conv):
    return [conv(tok) for tok in raw.replace(",", " ").split()]


def load_config(path) -> ExperimentConfig:
    """Parse and validate an experiment config file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    text = Path(path).read_text()
    parser.read_string(text)
    cfg = ExperimentConfig()

    def section(name):
        return parser[name] if parser.has_section(name) else {}

    m = section("model")
    cfg.model_preset = m.get("preset", cfg.model_preset)
    cfg.theta0_mode = m.get("theta0_mode", cfg.theta0_mode)
    cfg.theta0_scale = float(m.get("theta0_scale", cfg.theta0_scale))
    cfg.theta0_power = float(m.get("theta0_power", cfg.theta0_power))
    if "theta0_values" in m:
        cfg.theta0_values = _parse_list(m["theta0_values"], float)
    cfg.darcy_mesh = int(m.get("darcy_mesh", cfg.darcy_mesh))
    cfg.darcy_f_min = float(m.get("darcy_f_min", cfg.darcy_f_min))
    cfg.darcy_source = float(m.get("darcy_source", cfg.darcy_source))
    if "darcy_boundary" in m:
        vals = _parse_list(m["darcy_boundary"], float)
        cfg.darcy_boundary = (vals[0], vals[1])

    pr = section("prior")
    cfg.alpha = float(pr.get("alpha", cfg.alpha))

    s = section("surrogate")
    cfg.eta_rule = s.get("eta_rule", cfg.eta_rule)
    cfg.eta_value = float(s.get("eta_value", cfg.eta_value))
    if "k_override" in s:
        cfg.k_override = float(s["k_override"])
    cfg.init_mode = s.get("init_mode", cfg.init_mode)
    cfg.init_rho = float(s.get("init_rho", cfg.init_rho))
    cfg.n_probes = int(s.get("n_probes", cfg.n_probes))

    sa = section("sampler")
    cfg.variant = sa.get("variant", cfg.variant)
    cfg.gamma_rule = sa.get("gamma_rule", cfg.gamma_rule)
    cfg.gamma_fraction = float(sa.get("gamma_fraction", cfg.gamma_fraction))
    cfg.gamma_bound = sa.get("gamma_bound", cfg.gamma_bound)
    cfg.gamma_value = float(sa.get("gamma_value", cfg.gamma_value))
    cfg.j_in_rule = sa.get("j_in_rule", cfg.j_in_rule)
    cfg.j_in_value = int(sa.get("j_in_value", cfg.j_in_value))
    cfg.epsilon = float(sa.get("epsilon", cfg.epsilon))
    cfg.c_w = float(sa.get("c_w", cfg.c_w))
    cfg.j = int(sa.get("j", cfg.j))
    if "seeds" in sa:
        cfg.seeds = _parse_list(sa["seeds"], int)
    cfg.guard = sa.get("guard", cfg.guard)
    cfg.guard_radius = float(sa.get("guard_radius", cfg.guard_radius))
    cfg.run_vanilla = sa.get("run_vanilla", "false").strip().lower() in ("1", "true", "yes")

    e = section("experiment")
    if "n_grid" in e:
        cfg.n_grid = _parse_list(e["n_grid"], int)
    cfg.p_rule = e.get("p_rule", cfg.p_rule)
    cfg.p_value = int(e.get("p_value", cfg.p_value))
    if "diagnostics" in e:
        cfg.diagnostics = _parse_list(e["diagnostics"], str)

    o = section("output")
    cfg.out_dir = o.get("dir", cfg.out_dir)
    cfg.thinning_budget = int(o.get("thinning_budget", cfg.thinning_budget))

    return cfg.validate()
