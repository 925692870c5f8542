"""Subgradient dual decomposition for the cell-association subproblem.

With the backhaul fractions held fixed, association is a concave program once
the binary indicators are relaxed. Dualizing the load-coupling constraints
``K_j = sum_k x_jk`` (multipliers ``mu``) and the backhaul constraints
(multipliers ``nu``) splits it into

* a per-MT choice: every MT joins the cell with the highest revenue
  ``d_j + ln r_jk - mu_j - nu_j * a_j * r_jk``;
* a per-cell load update ``K_j = min(exp(mu_j + nu_j * b_j - 1), N_U)``;

followed by projected subgradient steps on ``(mu, nu)``. Here ``a_j`` is the
access fraction ``1 - beta_j`` and ``b_j = beta_j * c_j``. The macro BS has no
backhaul constraint, so ``nu_0`` is pinned to zero.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .rates import Association


@dataclass
class SolverConfig:
    """Tuning knobs of the decomposition solvers.

    Step sizes follow the diminishing rule ``delta(t) = delta_0 / t**step_decay``.
    ``utility_tol`` is the outer stopping threshold of the per-cell solver,
    ``outer_tol`` the threshold on ``|delta beta|`` of the unified one.
    """

    step_mu_0: float = 0.1
    step_nu_0: float = 0.01
    step_decay: float = 1.0
    inner_tol: float = 1e-4
    inner_max_iter: int = 2000
    outer_tol: float = 1e-4
    outer_max_iter: int = 50
    beta_init: float = 0.1
    stability_window: int = 10
    utility_tol: float = 1e-6

    def __post_init__(self):
        for name in ("step_mu_0", "step_nu_0", "step_decay", "inner_tol", "inner_max_iter",
                     "outer_tol", "outer_max_iter", "stability_window", "utility_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 < self.beta_init < 1.0:
            raise ValueError("beta_init must lie in (0, 1)")

    def step_sizes(self, t: int) -> tuple[float, float]:
        scale = float(t) ** -self.step_decay
        return self.step_mu_0 * scale, self.step_nu_0 * scale


@dataclass
class DualState:
    mu: np.ndarray
    nu: np.ndarray
    k_aux: np.ndarray
    t: int = 1
    s: int = 0

    @classmethod
    def initial(cls, n_cells: int, n_mts: int) -> "DualState":
        return cls(
            mu=np.zeros(n_cells),
            nu=np.zeros(n_cells),
            k_aux=np.full(n_cells, n_mts / n_cells),
        )

    def copy(self) -> "DualState":
        return DualState(self.mu.copy(), self.nu.copy(), self.k_aux.copy(), self.t, self.s)


@dataclass
class SolverDiagnostics:
    """Iteration record of one solve, serializable to JSON."""

    converged: bool = False
    outer_iterations: int = 0
    inner_iterations: list = field(default_factory=list)
    inner_converged: list = field(default_factory=list)
    utility_trace: list = field(default_factory=list)
    beta_trace: list = field(default_factory=list)
    best_utility: float = float("-inf")
    backhaul_violation: bool = False
    final_mu: list = field(default_factory=list)
    final_nu: list = field(default_factory=list)

    @property
    def total_inner_iterations(self) -> int:
        return int(sum(self.inner_iterations))

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass(frozen=True)
class RevenueModel:
    """Fixed data of one association subproblem, cells stacked macro first.

    ``offset`` holds the per-cell revenue bias ``d_j`` (zero in the unified
    scenario), ``access`` the ``1 - beta_j`` factors and ``backhaul`` the
    ``beta_j * c_j`` products, both with the macro entry unused.
    """

    rates: np.ndarray
    offset: np.ndarray
    access: np.ndarray
    backhaul: np.ndarray

    @property
    def n_cells(self) -> int:
        return self.rates.shape[0]

    @property
    def n_mts(self) -> int:
        return self.rates.shape[1]

    def revenue(self, duals: DualState) -> np.ndarray:
        nu_term = (duals.nu * self.access)[:, None] * self.rates
        return (self.offset + np.log(self.rates).T).T - duals.mu[:, None] - nu_term


def assign(model: RevenueModel, duals: DualState) -> Association:
    """Each MT picks its highest-revenue cell; ties go to the lowest index."""
    if model.n_mts == 0:
        return Association(np.zeros(0, dtype=np.int64), model.n_cells)
    return Association(np.argmax(model.revenue(duals), axis=0), model.n_cells)


def k_aux_update(model: RevenueModel, duals: DualState) -> np.ndarray:
    expo = duals.mu + duals.nu * model.backhaul - 1.0
    return np.minimum(np.exp(np.minimum(expo, 700.0)), float(model.n_mts))


def multiplier_update(model: RevenueModel, duals: DualState, assoc: Association,
                      k_aux: np.ndarray, cfg: SolverConfig, t: int) -> DualState:
    """One projected subgradient step on ``(mu, nu)`` at iteration ``t``."""
    d_mu, d_nu = cfg.step_sizes(t)
    load = assoc.load
    served = np.bincount(assoc.cell, weights=model.rates[assoc.cell, np.arange(model.n_mts)],
                         minlength=model.n_cells)
    mu = np.maximum(duals.mu - d_mu * (k_aux - load), 0.0)
    nu = np.maximum(duals.nu - d_nu * (model.backhaul * k_aux - model.access * served), 0.0)
    nu[0] = 0.0
    return DualState(mu, nu, k_aux, t + 1, duals.s)


@dataclass
class InnerResult:
    assoc: Association
    utility: float
    feasible: bool
    iterations: int
    converged: bool
    duals: DualState


def solve_association(model: RevenueModel, cfg: SolverConfig,
                      score: Callable[[Association], Optional[float]],
                      duals: Optional[DualState] = None) -> InnerResult:
    """Alternate primal choices and multiplier steps until the assignment settles.

    ``score`` returns the utility of a feasible assignment and ``None`` for an
    infeasible one. The best feasible iterate is returned; if none was seen,
    the last iterate is returned with ``feasible=False``.
    """
    duals = DualState.initial(model.n_cells, model.n_mts) if duals is None else duals.copy()
    duals.t = 1

    best = None
    best_utility = float("-inf")
    prev = None
    stable = 0
    converged = False
    it = 0
    for it in range(1, cfg.inner_max_iter + 1):
        assoc = assign(model, duals)
        k_aux = k_aux_update(model, duals)
        new = multiplier_update(model, duals, assoc, k_aux, cfg, it)
        change = max(np.max(np.abs(new.mu - duals.mu), initial=0.0),
                     np.max(np.abs(new.nu - duals.nu), initial=0.0))
        duals = new

        if prev is not None and assoc == prev:
            stable += 1
        else:
            stable = 0
            u = score(assoc)
            if u is not None and u > best_utility:
                best, best_utility = assoc, u
        prev = assoc
        if stable >= cfg.stability_window or change < cfg.inner_tol:
            converged = True
            break

    if best is None:
        return InnerResult(prev, float("-inf"), False, it, converged, duals)
    return InnerResult(best, best_utility, True, it, converged, duals)
