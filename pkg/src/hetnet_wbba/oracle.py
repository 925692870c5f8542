"""Exhaustive solvers for tiny instances.

For a fixed association the utility decreases in every backhaul fraction, so
the smallest feasible fraction is optimal; enumerating all ``(N_S + 1)**N_U``
associations with that fraction therefore yields the exact optimum of both
joint problems. Used as ground truth for the iterative solvers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .propagation import ChannelRealization
from .rates import Association, PerCellWbba, UnifiedWbba, is_backhaul_feasible, sum_log_rate


@dataclass(frozen=True)
class OracleLimits:
    max_enumeration: int = 10**6
    chunk: int = 1 << 15


def enumeration_size(n_small_cells: int, n_mts: int) -> int:
    return (n_small_cells + 1) ** n_mts


def _check_size(chan: ChannelRealization, limits: OracleLimits) -> int:
    size = enumeration_size(chan.n_small_cells, chan.n_mts)
    if size > limits.max_enumeration:
        raise ValueError(
            f"instance too large for enumeration: {size} associations > {limits.max_enumeration}"
        )
    return size


def _assignments(start: int, stop: int, n_cells: int, n_mts: int) -> np.ndarray:
    """Rows of the mixed-radix counter; MT 0 is the least significant digit."""
    codes = np.arange(start, stop, dtype=np.int64)
    out = np.empty((stop - start, n_mts), dtype=np.int64)
    for k in range(n_mts):
        out[:, k] = codes % n_cells
        codes //= n_cells
    return out


def _batch_utilities(cells: np.ndarray, chan: ChannelRealization, per_cell: bool):
    """Utilities and allocations of a batch of associations, shape ``(B, N_U)``."""
    b, nu = cells.shape
    n = chan.n_small_cells + 1
    rates = chan.rates[cells, np.arange(nu)]
    onehot = cells[:, :, None] == np.arange(n)
    load = onehot.sum(axis=1)
    sum_r = np.einsum("bk,bkj->bj", rates, onehot)
    denom = sum_r[:, 1:] + load[:, 1:] * chan.c_backhaul
    beta_cells = np.divide(sum_r[:, 1:], denom, out=np.zeros_like(denom), where=load[:, 1:] > 0)
    if per_cell:
        frac = np.concatenate((1.0 - beta_cells.sum(axis=1, keepdims=True) / chan.beam_group,
                               1.0 - beta_cells), axis=1)
        beta = beta_cells
    else:
        beta = beta_cells.max(axis=1, initial=0.0)
        frac = np.repeat((1.0 - beta)[:, None], n, axis=1)
    rows = np.arange(b)[:, None]
    per_mt = frac[rows, cells] * rates / load[rows, cells]
    return np.log(per_mt).sum(axis=1), beta


def _brute_force(chan: ChannelRealization, limits: OracleLimits, per_cell: bool):
    size = _check_size(chan, limits)
    n, nu = chan.n_small_cells + 1, chan.n_mts
    best_u, best_cells, best_beta = float("-inf"), None, None
    for start in range(0, size, limits.chunk):
        cells = _assignments(start, min(size, start + limits.chunk), n, nu)
        util, beta = _batch_utilities(cells, chan, per_cell)
        i = int(np.argmax(util))
        if util[i] > best_u:
            best_u, best_cells, best_beta = float(util[i]), cells[i], beta[i]
    return Association(best_cells, n), best_beta, best_u


def brute_force_uwbba(chan: ChannelRealization, limits: OracleLimits = OracleLimits()):
    """Exact optimum of the unified problem: ``(assoc, beta, utility)``."""
    assoc, beta, _ = _brute_force(chan, limits, per_cell=False)
    beta = float(beta)
    return assoc, beta, sum_log_rate(assoc, UnifiedWbba(beta), chan)


def brute_force_pwbba(chan: ChannelRealization, limits: OracleLimits = OracleLimits()):
    """Exact optimum of the per-cell problem: ``(assoc, beta_vec, utility)``."""
    assoc, beta, _ = _brute_force(chan, limits, per_cell=True)
    beta = np.asarray(beta, dtype=float)
    return assoc, beta, sum_log_rate(assoc, PerCellWbba(beta), chan)


def perturbation_check(assoc: Association, beta_vec, chan: ChannelRealization, eps: float = 1e-3) -> bool:
    """True if no feasible ``+-eps`` nudge of a single ``beta_j`` improves the utility."""
    beta = np.asarray(beta_vec, dtype=float)
    base = sum_log_rate(assoc, PerCellWbba(beta), chan)
    for j in range(beta.size):
        for step in (-eps, eps):
            trial = beta.copy()
            trial[j] = trial[j] + step
            if not 0.0 <= trial[j] < 1.0:
                continue
            wbba = PerCellWbba(trial)
            if is_backhaul_feasible(assoc, wbba, chan, tol=0.0) and sum_log_rate(assoc, wbba, chan) > base:
                return False
    return True
