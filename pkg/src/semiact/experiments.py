"""Monte-Carlo experiments, configuration files and scaling fits.

Config files are INI-style (``configparser``): flat ``key = value`` lines in
named sections. See the README for the section and key list.
"""

from __future__ import annotations

import configparser
import io
import math
import os
from dataclasses import dataclass, field
from statistics import median

import numpy as np

from .attacks import (
    balanced_bsgs_sizes,
    binary_search_min,
    bsgs,
    collision_probe_search,
    exhaustive,
    pollard_rho,
    with_retries,
)
from .core import ProblemInstance, make_rng, verify_solution
from .generic_model import ADVERSARIES, bound_experiment
from .instances import (
    build_flat_semilattice,
    build_from_descriptor,
    build_min_chain,
    cyclic_exp_for_order,
    cyclic_shift_for_order,
)
from .report import ExperimentReport, binomial_sigma

OUT_DIR_ENV = "SEMIACT_OUT_DIR"


def default_output_dir() -> str | None:
    return os.environ.get(OUT_DIR_ENV)


@dataclass
class ExperimentConfig:
    name: str
    seed: int = 0
    trials: int = 100
    system: str = ""
    attack: str = ""
    grid: dict = field(default_factory=dict)
    output: str = ""

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        cp["experiment"] = {"name": self.name, "seed": str(self.seed), "trials": str(self.trials),
                            "output": self.output}
        cp["system"] = {"descriptor": self.system}
        cp["attack"] = {"name": self.attack}
        cp["grid"] = {k: ",".join(str(v) for v in vals) if isinstance(vals, (list, tuple)) else str(vals)
                      for k, vals in self.grid.items()}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "ExperimentConfig":
        cp = configparser.ConfigParser()
        cp.read_string(text)
        exp = cp["experiment"]
        grid = {}
        if cp.has_section("grid"):
            for key, raw in cp["grid"].items():
                vals = [int(v) for v in raw.split(",") if v.strip()]
                grid[key] = vals if "," in raw else vals[0]
        return cls(
            name=exp["name"],
            seed=exp.getint("seed", 0),
            trials=exp.getint("trials", 100),
            system=cp.get("system", "descriptor", fallback=""),
            attack=cp.get("attack", "name", fallback=""),
            grid=grid,
            output=exp.get("output", ""),
        )


# -- experiments ------------------------------------------------------------------------

def lemma_intersect_experiment(n: int, k: int, l: int, trials: int, seed: int = 0) -> ExperimentReport:
    """Frequency of ``A & B == {}`` for uniform ``k``- and ``l``-subsets of an
    ``n``-set, against the bounds ``1 - kl/n`` and ``exp(-kl/n)``."""
    if not (0 <= k <= n and 0 <= l <= n):
        raise ValueError("k and l must lie in [0, n]")
    report = ExperimentReport("lemma-intersect", {"n": n, "k": k, "l": l, "trials": trials, "seed": seed})
    hits = 0
    for t in range(trials):
        rng = make_rng(seed, t)
        a = rng.choice(n, size=k, replace=False)
        b = rng.choice(n, size=l, replace=False)
        disjoint = not np.intersect1d(a, b, assume_unique=True).size
        hits += disjoint
        report.add_row(trial=t, disjoint=disjoint)
    p = hits / trials
    sigma = binomial_sigma(p, trials)
    lower, upper = 1 - k * l / n, math.exp(-k * l / n)
    exact = math.comb(n - l, k) / math.comb(n, k)
    report.aggregates.update({
        "disjoint_rate": p, "sigma": sigma, "lower_bound": lower, "upper_bound": upper,
        "exact": exact, "within_bounds": lower - 3 * sigma <= p <= upper + 3 * sigma,
    })
    return report


def _unit_instance(system, rng):
    s = system.semigroup.sample_unit(rng)
    return ProblemInstance(system, system.g, system.act(s, system.g), witness=s)


def bsgs_law_experiment(n: int, trials: int, seed: int = 0) -> ExperimentReport:
    """Balanced BSGS with ``k*l >= n ln 2``: success should be at least 1/2."""
    system = cyclic_exp_for_order(n)
    k, l = balanced_bsgs_sizes(n)
    report = ExperimentReport("bsgs-law", {"n": n, "k": k, "l": l, "trials": trials, "seed": seed,
                                           "system": system.name})
    wins = verified = 0
    for t in range(trials):
        rng = make_rng(seed, t, 1)
        s = system.semigroup.sample(rng)
        inst = ProblemInstance(system, system.g, system.act(s, system.g), witness=s)
        res = bsgs(inst, k, l, seed=seed, attempt=t)
        ok = res.success and verify_solution(inst, res.solution).verified
        wins += res.success
        verified += ok
        report.add_row(trial=t, success=res.success, verified=ok, **res.counters())
    p = wins / trials
    sigma = binomial_sigma(p, trials)
    report.aggregates.update({"success_rate": p, "sigma": sigma, "all_verified": verified == wins,
                              "meets_half": p >= 0.5 - 3 * sigma})
    return report


def rho_experiment(n: int, trials: int, seed: int = 0, retries: int = 10) -> ExperimentReport:
    """Pollard rho on the order-``n`` cyclic-exp system with unit witnesses."""
    system = cyclic_exp_for_order(n)
    root = math.sqrt(n)
    report = ExperimentReport("rho", {"n": n, "trials": trials, "seed": seed, "retries": retries,
                                      "system": system.name})
    for t in range(trials):
        inst = _unit_instance(system, make_rng(seed, t, 2))
        res = with_retries(pollard_rho, inst, retries=retries, seed=seed * 100003 + t)
        ok = res.success and verify_solution(inst, res.solution).verified
        report.add_row(trial=t, success=res.success, verified=ok, attempts=res.info["attempts"],
                       k=res.info.get("k", 0), l=res.info.get("l", 0), **res.counters())
    steps = report.column("wall_steps")
    ks = report.column("k")
    report.aggregates.update({
        "success_rate": sum(report.column("success")) / trials,
        "first_attempt_rate": sum(a == 1 for a in report.column("attempts")) / trials,
        "median_steps_over_sqrt_n": median(steps) / root,
        "median_k_over_sqrt_n": median(ks) / root,
    })
    return report


def _scaling_trial(family: str, n: int, seed: int, t: int):
    rng = make_rng(seed, n, t)
    if family == "rho":
        system = cyclic_exp_for_order(n)
        inst = _unit_instance(system, rng)
        return with_retries(pollard_rho, inst, seed=seed * 100003 + t)
    if family == "bsgs":
        system = cyclic_exp_for_order(n)
        inst = _unit_instance(system, rng)
        k, l = balanced_bsgs_sizes(n)
        return with_retries(bsgs, inst, seed=seed * 100003 + t, k=k, l=l)
    if family == "binary-search-min":
        system = build_min_chain(n, seed)
        return binary_search_min(system.instance(int(rng.integers(1, n + 1))))
    if family == "exhaustive":
        system = cyclic_exp_for_order(n)
        return exhaustive(_unit_instance(system, rng))
    raise ValueError(f"unknown scaling family {family!r}")


SCALING_METRIC = {"rho": "wall_steps", "bsgs": "action_queries",
                  "binary-search-min": "action_queries", "exhaustive": "wall_steps"}


def fit_slope(xs, ys) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def scaling_experiment(family: str, grid, trials: int, seed: int = 0) -> ExperimentReport:
    """Median cost per ``n`` and the fitted log-log slope."""
    grid = list(grid)
    if len(grid) < 4:
        raise ValueError("scaling needs at least 4 grid sizes")
    metric = SCALING_METRIC[family]
    report = ExperimentReport("scaling", {"family": family, "metric": metric, "trials": trials, "seed": seed})
    medians = []
    for n in grid:
        vals = []
        for t in range(trials):
            res = _scaling_trial(family, n, seed, t)
            vals.append(getattr(res, metric))
            report.add_row(n=n, trial=t, success=res.success, **{metric: getattr(res, metric)})
        medians.append(median(vals))
        report.aggregates[f"n={n}.median"] = float(medians[-1])
    report.aggregates["slope"] = fit_slope(grid, medians)
    report.aggregates["slope_per_log_n"] = fit_slope(grid, [m / math.log2(n) for m, n in zip(medians, grid)])
    return report


def flat_hardness_experiment(m: int, trials: int, seed: int = 0) -> ExperimentReport:
    """Distinct probes a collision search needs on the flat semilattice."""
    system = build_flat_semilattice(m, seed)
    sg = system.semigroup
    report = ExperimentReport("flat-hardness", {"m": m, "trials": trials, "seed": seed})
    for t in range(trials):
        i = int(make_rng(seed, t, 3).integers(1, m + 1))
        inst = ProblemInstance(system, system.e, system.act(i, system.e), witness=i)
        res = collision_probe_search(inst, seed=seed * 7919 + t)
        report.add_row(trial=t, success=res.success, probes=res.info["probes"],
                       uninformative=res.info["uninformative"])
    probes = report.column("probes")
    mean = sum(probes) / trials
    sd = float(np.std(probes, ddof=1)) if trials > 1 else 0.0
    report.aggregates.update({"mean_probes": mean, "sem": sd / math.sqrt(trials),
                              "half_carrier": (m + 1) / 2, "quarter_carrier": (m + 1) / 4})
    return report


def theorem_experiment(n: int, m_grid, trials: int, seed: int = 0, adversary: str = "collision"
                       ) -> ExperimentReport:
    system = cyclic_shift_for_order(n)
    return bound_experiment(system, ADVERSARIES[adversary], m_grid, trials, seed)


EXPERIMENTS = ("lemma-intersect", "theorem-bound", "bsgs-law", "rho", "scaling", "flat-hardness")


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    g = cfg.grid
    if cfg.name == "lemma-intersect":
        return lemma_intersect_experiment(g["n"], g["k"], g["l"], cfg.trials, cfg.seed)
    if cfg.name == "theorem-bound":
        ms = g.get("m", [8, 16, 32, 64])
        return theorem_experiment(g.get("n", 1024), ms if isinstance(ms, list) else [ms], cfg.trials,
                                  cfg.seed, cfg.attack or "collision")
    if cfg.name == "bsgs-law":
        return bsgs_law_experiment(g["n"], cfg.trials, cfg.seed)
    if cfg.name == "rho":
        return rho_experiment(g["n"], cfg.trials, cfg.seed)
    if cfg.name == "scaling":
        ns = g["n"] if isinstance(g["n"], list) else [g["n"]]
        return scaling_experiment(cfg.attack or "rho", ns, cfg.trials, cfg.seed)
    if cfg.name == "flat-hardness":
        return flat_hardness_experiment(g["m"], cfg.trials, cfg.seed)
    raise KeyError(cfg.name)


def system_from_config(cfg: ExperimentConfig):
    return build_from_descriptor(cfg.system)
