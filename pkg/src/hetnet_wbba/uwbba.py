"""Joint cell association and unified backhaul allocation.

Two-level scheme: an outer loop sets the shared backhaul fraction ``beta``
to the smallest value that every small cell's backhaul can sustain, an inner
dual-decomposition loop associates MTs for the current ``beta``.
"""
from __future__ import annotations

import numpy as np

from .decomposition import (
    DualState,
    RevenueModel,
    SolverConfig,
    SolverDiagnostics,
    assign,
    k_aux_update,
    multiplier_update,
    solve_association,
)
from .propagation import ChannelRealization
from .rates import (
    Association,
    UnifiedWbba,
    backhaul_slack,
    min_feasible_beta_unified,
    sum_log_rate,
)


def revenue_model(beta: float, chan: ChannelRealization) -> RevenueModel:
    n = chan.n_small_cells + 1
    backhaul = np.concatenate(([0.0], beta * chan.c_backhaul))
    return RevenueModel(chan.rates, np.zeros(n), np.full(n, 1.0 - beta), backhaul)


def revenue(k: int, j: int, duals: DualState, beta: float, chan: ChannelRealization) -> float:
    """Revenue MT ``k`` sees from cell ``j``: ``ln r_jk - mu_j - nu_j (1 - beta) r_jk``."""
    r = chan.r_macro[k] if j == 0 else chan.r_sc[j - 1, k]
    nu = 0.0 if j == 0 else duals.nu[j]
    return float(np.log(r) - duals.mu[j] - nu * (1.0 - beta) * r)


def assign_step(duals: DualState, beta: float, chan: ChannelRealization) -> Association:
    return assign(revenue_model(beta, chan), duals)


def update_k_aux(duals: DualState, beta: float, chan: ChannelRealization) -> np.ndarray:
    return k_aux_update(revenue_model(beta, chan), duals)


def update_multipliers(duals: DualState, assoc: Association, k_aux, beta: float,
                       chan: ChannelRealization, t: int, cfg: SolverConfig = None) -> DualState:
    cfg = SolverConfig() if cfg is None else cfg
    return multiplier_update(revenue_model(beta, chan), duals, assoc, np.asarray(k_aux, float), cfg, t)


def solve_inner(beta: float, chan: ChannelRealization, cfg: SolverConfig = None, duals: DualState = None):
    """Cell association for a fixed unified ``beta``.

    Returns the :class:`~hetnet_wbba.decomposition.InnerResult` holding the
    best assignment that respects every backhaul constraint at ``beta``.
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError("beta must lie in [0, 1)")
    cfg = SolverConfig() if cfg is None else cfg
    wbba = UnifiedWbba(beta)

    def score(assoc):
        if np.any(backhaul_slack(assoc, wbba, chan) < -1e-12):
            return None
        return sum_log_rate(assoc, wbba, chan)

    return solve_association(revenue_model(beta, chan), cfg, score, duals)


def solve(chan: ChannelRealization, cfg: SolverConfig = None):
    """Alternate association and ``beta`` repair until ``beta`` settles.

    Returns ``(assoc, beta, diagnostics)``; the pair is the best backhaul
    feasible iterate found across outer iterations.
    """
    cfg = SolverConfig() if cfg is None else cfg
    diag = SolverDiagnostics()
    beta = cfg.beta_init
    best = None
    best_utility = float("-inf")
    duals = None
    for s in range(1, cfg.outer_max_iter + 1):
        inner = solve_inner(beta, chan, cfg, duals)
        duals = inner.duals
        diag.inner_iterations.append(inner.iterations)
        diag.inner_converged.append(inner.converged)

        new_beta = min_feasible_beta_unified(inner.assoc, chan)
        utility = sum_log_rate(inner.assoc, UnifiedWbba(new_beta), chan)
        diag.beta_trace.append(new_beta)
        diag.utility_trace.append(utility)
        if utility > best_utility:
            best, best_utility = (inner.assoc, new_beta), utility
        diag.outer_iterations = s
        done = abs(new_beta - beta) < cfg.outer_tol
        beta = new_beta
        if done:
            diag.converged = True
            break

    assoc, beta = best
    diag.best_utility = best_utility
    diag.final_mu = duals.mu.tolist()
    diag.final_nu = duals.nu.tolist()
    diag.backhaul_violation = bool(np.any(backhaul_slack(assoc, UnifiedWbba(beta), chan) < -1e-9))
    return assoc, beta, diag
