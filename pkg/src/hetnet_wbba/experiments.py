"""Monte-Carlo harness, rate statistics and result files.

A trial drops one network, draws one channel realization and runs every
requested algorithm on it, so algorithms are always compared on paired
samples. Trials are independent work items; results are sorted by trial id
before aggregation, which makes every output file independent of the number
of workers.
"""
from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import heuristics, oracle, pwbba, uwbba
from .decomposition import SolverConfig
from .propagation import link_budget_rows, realize_channels
from .rates import (
    Association,
    PerCellWbba,
    UnifiedWbba,
    backhaul_capacity,
    min_feasible_beta_unified,
    per_cell_betas,
    per_mt_rates,
    small_cell_throughput,
    sum_log_rate,
)
from .scenario import NetworkScenario, generate_topology, trial_seeds

log = logging.getLogger(__name__)

ALGORITHMS = ("sinr", "cre", "cawbba", "offload", "offload_balanced", "oracle")
SCENARIO_KINDS = ("unified", "per_cell")
PER_CELL_ONLY = ("offload", "offload_balanced")


@dataclass
class ExperimentSpec:
    scenario: NetworkScenario = field(default_factory=NetworkScenario)
    scenario_kind: str = "unified"
    algorithms: Sequence[str] = ("sinr", "cre", "cawbba")
    n_trials: int = 200
    master_seed: int = 0
    cre_bias_db: float = 3.0
    output_dir: Optional[str] = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    oracle_limit: int = 10**6

    def __post_init__(self):
        self.algorithms = tuple(self.algorithms)
        if self.scenario_kind not in SCENARIO_KINDS:
            raise ValueError(f"scenario_kind must be one of {SCENARIO_KINDS}")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        for name in self.algorithms:
            if name not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
            if name in PER_CELL_ONLY and self.scenario_kind != "per_cell":
                raise ValueError(f"{name} is defined for the per_cell scenario only")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError("duplicate algorithm names")
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if "oracle" in self.algorithms:
            size = oracle.enumeration_size(self.scenario.n_small_cells, self.scenario.n_mts)
            if size > self.oracle_limit:
                raise ValueError(f"oracle needs {size} evaluations, above the limit {self.oracle_limit}")

    @property
    def per_cell(self) -> bool:
        return self.scenario_kind == "per_cell"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["algorithms"] = list(self.algorithms)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        data = dict(data)
        if "scenario" in data and isinstance(data["scenario"], dict):
            data["scenario"] = NetworkScenario.from_dict(data["scenario"])
        if "solver" in data and isinstance(data["solver"], dict):
            data["solver"] = SolverConfig(**data["solver"])
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class TrialResult:
    trial_id: int
    algorithm: str
    cells: np.ndarray
    per_mt_rates: np.ndarray
    loads: np.ndarray
    wbba: object
    utility: float
    converged: bool = True
    iterations: tuple = (0, 0)
    max_backhaul_excess: float = 0.0
    max_equality_error: float = 0.0

    @property
    def mean_rate(self) -> float:
        return float(np.mean(self.per_mt_rates))


@dataclass
class AlgorithmMetrics:
    n_trials: int
    mean_utility: float
    utility_stderr: float
    r50: float
    r90: float
    n_unconverged: int
    cdf_rate: np.ndarray = field(repr=False)
    cdf_fraction: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "n_trials": self.n_trials,
            "mean_utility": self.mean_utility,
            "utility_stderr": self.utility_stderr,
            "R_0.5": self.r50,
            "R_0.9": self.r90,
            "n_unconverged": self.n_unconverged,
        }


@dataclass
class MetricsSummary:
    per_algorithm: dict

    def __getitem__(self, algorithm) -> AlgorithmMetrics:
        return self.per_algorithm[algorithm]

    def to_dict(self) -> dict:
        return {name: m.to_dict() for name, m in self.per_algorithm.items()}


def rate_at_probability(rates, p: float) -> float:
    """Largest sample value that a fraction of at least ``p`` of the samples exceed.

    Defined by ``Pr{rate > R_p} = p`` on the empirical distribution; when no
    sample qualifies (``p = 1``) the minimum is returned.
    """
    x = np.sort(np.asarray(rates, dtype=float).reshape(-1))
    if x.size == 0:
        raise ValueError("rates must be non-empty")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    n = x.size
    exceed = n - np.searchsorted(x, x, side="right")
    ok = np.flatnonzero(exceed >= p * n - 1e-9 * n)
    return float(x[ok[-1]]) if ok.size else float(x[0])


def empirical_cdf(rates) -> tuple[np.ndarray, np.ndarray]:
    x = np.sort(np.asarray(rates, dtype=float).reshape(-1))
    return x, np.arange(1, x.size + 1) / x.size


def _check_backhaul(assoc: Association, wbba, chan) -> tuple[float, float]:
    """Largest ``R_j - C_j`` and, per-cell only, largest relative ``|R_j - C_j|``."""
    excess, eq_err = 0.0, 0.0
    load = assoc.load
    for j in range(1, chan.n_small_cells + 1):
        r = small_cell_throughput(assoc, wbba, chan, j)
        c = backhaul_capacity(wbba, chan, j)
        excess = max(excess, r - c)
        if isinstance(wbba, PerCellWbba) and load[j] > 0:
            eq_err = max(eq_err, abs(r - c) / max(abs(c), 1e-300))
    return excess, eq_err


def _run_algorithm(spec: ExperimentSpec, name: str, chan):
    """Returns ``(assoc, wbba, converged, iterations, claimed_utility)``."""
    cfg = spec.solver
    per_cell = spec.per_cell
    converged, iterations, claimed = True, (0, 0), None

    if name in ("sinr", "cre"):
        bias = 0.0 if name == "sinr" else spec.cre_bias_db
        assoc = heuristics.cre_association(chan, bias)
        wbba = PerCellWbba(per_cell_betas(assoc, chan)) if per_cell else \
            UnifiedWbba(min_feasible_beta_unified(assoc, chan))
    elif name == "cawbba":
        if per_cell:
            assoc, beta, diag = pwbba.solve(chan, cfg)
            wbba = PerCellWbba(beta)
        else:
            assoc, beta, diag = uwbba.solve(chan, cfg)
            wbba = UnifiedWbba(beta)
        converged = diag.converged
        iterations = (diag.outer_iterations, diag.total_inner_iterations)
        claimed = diag.best_utility
    elif name in PER_CELL_ONLY:
        start = heuristics.sinr_association(chan)
        fn = heuristics.offload_macro if name == "offload" else heuristics.offload_and_balance
        assoc, beta = fn(start, per_cell_betas(start, chan), chan)
        wbba = PerCellWbba(beta)
    elif name == "oracle":
        limits = oracle.OracleLimits(max_enumeration=spec.oracle_limit)
        if per_cell:
            assoc, beta, claimed = oracle.brute_force_pwbba(chan, limits)
            wbba = PerCellWbba(beta)
        else:
            assoc, beta, claimed = oracle.brute_force_uwbba(chan, limits)
            wbba = UnifiedWbba(beta)
    else:
        raise ValueError(f"unknown algorithm {name!r}")
    return assoc, wbba, converged, iterations, claimed


def _trial_channel(spec: ExperimentSpec, trial_id: int):
    topo_seed, rng = trial_seeds(spec.master_seed, trial_id)
    topology = generate_topology(spec.scenario, topo_seed)
    return topology, realize_channels(topology, spec.scenario, rng)


def _result(spec, name, trial_id, chan) -> TrialResult:
    assoc, wbba, converged, iterations, claimed = _run_algorithm(spec, name, chan)
    utility = sum_log_rate(assoc, wbba, chan)
    if claimed is not None and not math.isclose(utility, claimed, rel_tol=0.0, abs_tol=1e-9):
        raise RuntimeError(
            f"trial {trial_id}, {name}: reported utility {claimed} != recomputed {utility}"
        )
    if not converged:
        log.warning("trial %d: %s hit its iteration cap", trial_id, name)
    excess, eq_err = _check_backhaul(assoc, wbba, chan)
    return TrialResult(
        trial_id=trial_id,
        algorithm=name,
        cells=assoc.cell.copy(),
        per_mt_rates=per_mt_rates(assoc, wbba, chan),
        loads=assoc.load,
        wbba=float(wbba.beta) if isinstance(wbba, UnifiedWbba) else wbba.beta.copy(),
        utility=utility,
        converged=converged,
        iterations=iterations,
        max_backhaul_excess=excess,
        max_equality_error=eq_err,
    )


def run_trial(spec: ExperimentSpec, algorithm: str, trial_id: int) -> TrialResult:
    """Run one algorithm on trial ``trial_id``; deterministic in ``(spec, trial_id)``."""
    _, chan = _trial_channel(spec, trial_id)
    return _result(spec, algorithm, trial_id, chan)


def _run_trial_all(args):
    spec, trial_id, dump_links = args
    topology, chan = _trial_channel(spec, trial_id)
    results = [_result(spec, name, trial_id, chan) for name in spec.algorithms]
    links = list(link_budget_rows(topology, chan)) if dump_links else None
    return trial_id, results, links


def summarize(results: Sequence[TrialResult], algorithms: Sequence[str], scale: float = 1.0) -> MetricsSummary:
    """Pool per-MT rates per algorithm and compute utility and rate statistics."""
    out = {}
    for name in algorithms:
        rs = [r for r in results if r.algorithm == name]
        utilities = np.array([r.utility for r in rs])
        pooled = np.concatenate([r.per_mt_rates for r in rs]) * scale
        stderr = float(utilities.std(ddof=1) / np.sqrt(len(rs))) if len(rs) > 1 else 0.0
        x, f = empirical_cdf(pooled) if pooled.size else (np.zeros(0), np.zeros(0))
        out[name] = AlgorithmMetrics(
            n_trials=len(rs),
            mean_utility=float(utilities.mean()),
            utility_stderr=stderr,
            r50=rate_at_probability(pooled, 0.5) if pooled.size else float("nan"),
            r90=rate_at_probability(pooled, 0.9) if pooled.size else float("nan"),
            n_unconverged=sum(not r.converged for r in rs),
            cdf_rate=x,
            cdf_fraction=f,
        )
    return MetricsSummary(out)


def run_experiment(spec: ExperimentSpec, n_workers: int = 1, bits_per_second: bool = False,
                   dump_links: bool = False):
    """Run ``n_trials`` trials of every algorithm; returns ``(summary, results)``.

    Results are ordered by trial id, then by the order of ``spec.algorithms``.
    If ``spec.output_dir`` is set, ``results_raw.csv``, ``summary.json`` and
    one ``cdf_<algorithm>.csv`` per algorithm are written there.
    """
    jobs = [(spec, t, dump_links) for t in range(spec.n_trials)]
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            done = list(pool.map(_run_trial_all, jobs, chunksize=max(1, len(jobs) // (4 * n_workers))))
    else:
        done = [_run_trial_all(job) for job in jobs]
    done.sort(key=lambda item: item[0])
    results = [r for _, rs, _ in done for r in rs]

    scale = spec.scenario.bandwidth if bits_per_second else 1.0
    summary = summarize(results, spec.algorithms, scale)
    if spec.output_dir is not None:
        links = [(t, rows) for t, _, rows in done] if dump_links else None
        write_outputs(spec, summary, results, scale, links)
    return summary, results


def write_raw_csv(path, results: Sequence[TrialResult], scale: float = 1.0) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trial_id", "algorithm", "mt_id", "cell_id", "rate"])
        for r in results:
            for k, (cell, rate) in enumerate(zip(r.cells, r.per_mt_rates)):
                w.writerow([r.trial_id, r.algorithm, k, int(cell), repr(float(rate) * scale)])


def write_outputs(spec: ExperimentSpec, summary: MetricsSummary, results, scale: float = 1.0,
                  links=None) -> None:
    out = Path(spec.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_raw_csv(out / "results_raw.csv", results, scale)
        doc = {
            "spec": spec.to_dict(),
            "rate_unit": "bit/s" if scale != 1.0 else "bit/s/Hz",
            "algorithms": summary.to_dict(),
        }
        with open(out / "summary.json", "w") as fh:
            json.dump(doc, fh, indent=2)
        for name, m in summary.per_algorithm.items():
            with open(out / f"cdf_{name}.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["rate", "cumulative_fraction"])
                w.writerows(zip(map(repr, m.cdf_rate.tolist()), map(repr, m.cdf_fraction.tolist())))
        if links is not None:
            with open(out / "links.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["trial_id", "link", "distance_m", "path_loss_db", "shadowing_db", "gain", "sinr"])
                for t, rows in links:
                    w.writerows([t, *row] for row in rows)
    except OSError as exc:
        raise OSError(f"cannot write results to {out}: {exc}") from exc
