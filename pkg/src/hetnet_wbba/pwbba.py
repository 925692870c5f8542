"""Joint cell association and per-small-cell backhaul allocation.

Association and allocation are solved in alternation: with every ``beta_j``
fixed, MTs are associated by dual decomposition (revenues carry the bias
``d_j``); then each small cell sets ``beta_j`` so that its backhaul capacity
exactly matches its throughput. The scheme is a heuristic for the non-convex
joint problem, not an exact method.
"""
from __future__ import annotations

import numpy as np

from .decomposition import DualState, RevenueModel, SolverConfig, SolverDiagnostics, solve_association
from .heuristics import sinr_association
from .propagation import ChannelRealization
from .rates import Association, PerCellWbba, backhaul_slack, per_cell_betas, sum_log_rate


def revenue_offsets(beta_vec, chan: ChannelRealization) -> np.ndarray:
    """``d_0 = ln(1 - n_b / N_g)`` for the macro and ``d_j = ln(1 - beta_j)``."""
    beta = np.asarray(beta_vec, dtype=float)
    macro = 1.0 - beta.sum() / chan.beam_group
    with np.errstate(divide="ignore"):
        return np.log(np.concatenate(([macro], 1.0 - beta)))


def revenue_model(beta_vec, chan: ChannelRealization) -> RevenueModel:
    beta = np.asarray(beta_vec, dtype=float)
    return RevenueModel(
        chan.rates,
        revenue_offsets(beta, chan),
        np.concatenate(([1.0], 1.0 - beta)),
        np.concatenate(([0.0], beta * chan.c_backhaul)),
    )


def revenue_p(k: int, j: int, duals: DualState, beta_vec, chan: ChannelRealization) -> float:
    """Revenue ``d_j + ln r_jk - mu_j - nu_j (1 - beta_j) r_jk`` of cell ``j`` for MT ``k``."""
    beta = np.asarray(beta_vec, dtype=float)
    if j > 0 and beta[j - 1] >= 1.0:
        raise ValueError(f"beta_{j} = 1 leaves small cell {j} no access bandwidth")
    d = revenue_offsets(beta, chan)[j]
    if j == 0:
        return float(d + np.log(chan.r_macro[k]) - duals.mu[0])
    r = chan.r_sc[j - 1, k]
    return float(d + np.log(r) - duals.mu[j] - duals.nu[j] * (1.0 - beta[j - 1]) * r)


def solve(chan: ChannelRealization, cfg: SolverConfig = None, init: Association = None):
    """Alternate association and per-cell ``beta`` updates.

    Starts from SINR-based association unless ``init`` is given. Returns
    ``(assoc, beta_vec, diagnostics)`` for the best iterate found; the
    allocation always satisfies every backhaul constraint with equality.
    """
    cfg = SolverConfig() if cfg is None else cfg
    diag = SolverDiagnostics()
    assoc = sinr_association(chan) if init is None else init
    beta = per_cell_betas(assoc, chan)
    best_utility = sum_log_rate(assoc, PerCellWbba(beta), chan)
    best = (assoc, beta)
    diag.beta_trace.append(beta.tolist())
    diag.utility_trace.append(best_utility)

    utility = best_utility
    duals = None
    for s in range(1, cfg.outer_max_iter + 1):
        model = revenue_model(beta, chan)

        def score(candidate):
            return sum_log_rate(candidate, PerCellWbba(per_cell_betas(candidate, chan)), chan)

        inner = solve_association(model, cfg, score, duals)
        duals = inner.duals
        diag.inner_iterations.append(inner.iterations)
        diag.inner_converged.append(inner.converged)

        beta = per_cell_betas(inner.assoc, chan)
        new_utility = sum_log_rate(inner.assoc, PerCellWbba(beta), chan)
        diag.beta_trace.append(beta.tolist())
        diag.utility_trace.append(new_utility)
        if new_utility > best_utility:
            best, best_utility = (inner.assoc, beta), new_utility
        diag.outer_iterations = s
        done = abs(new_utility - utility) < cfg.utility_tol
        utility = new_utility
        if done:
            diag.converged = True
            break

    assoc, beta = best
    diag.best_utility = best_utility
    if duals is not None:
        diag.final_mu = duals.mu.tolist()
        diag.final_nu = duals.nu.tolist()
    diag.backhaul_violation = bool(np.any(backhaul_slack(assoc, PerCellWbba(beta), chan) < -1e-9))
    return assoc, beta, diag
