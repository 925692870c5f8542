"""Baseline association policies and greedy load-balancing heuristics."""
from __future__ import annotations

import numpy as np

from .propagation import ChannelRealization
from .rates import Association, per_cell_betas


def sinr_association(chan: ChannelRealization) -> Association:
    """Every MT joins the cell with the strongest SINR (macro wins ties)."""
    return cre_association(chan, 0.0)


def cre_association(chan: ChannelRealization, bias_db: float = 3.0) -> Association:
    """Cell range expansion: small-cell SINRs are biased by ``bias_db`` before comparison."""
    with np.errstate(divide="ignore"):
        score = 10.0 * np.log10(chan.sinr)
    if bias_db:
        score[1:] += bias_db
    if chan.n_mts == 0:
        return Association(np.zeros(0, dtype=np.int64), chan.n_small_cells + 1)
    return Association(np.argmax(score, axis=0), chan.n_small_cells + 1)


class PerCellUtility:
    """Sum log-rate under per-cell allocation, maintained incrementally.

    Each small cell always runs at its smallest feasible ``beta_j``, so the
    utility splits into per-cell terms that only depend on the cell's load,
    the sum of its members' baseline rates and the sum of their logs. A
    single move is then evaluated in O(1).
    """

    def __init__(self, assoc: Association, chan: ChannelRealization):
        self.chan = chan
        self.cell = assoc.cell.copy()
        n = chan.n_small_cells + 1
        idx = np.arange(assoc.n_mts)
        base = chan.rates[self.cell, idx]
        self.load = np.bincount(self.cell, minlength=n).astype(float)
        self.sum_r = np.bincount(self.cell, weights=base, minlength=n)
        self.sum_log = np.bincount(self.cell, weights=np.log(base), minlength=n)
        self.c = np.concatenate(([np.nan], chan.c_backhaul))
        self.beta = np.zeros(n)
        self.terms = np.zeros(n)
        for j in range(1, n):
            self.beta[j], self.terms[j] = self._small_term(j, self.load[j], self.sum_r[j], self.sum_log[j])
        self.n_b = self.beta[1:].sum()
        self.terms[0] = self._macro_term(self.load[0], self.sum_log[0], self.n_b)

    def _small_term(self, j, load, sum_r, sum_log):
        if load == 0:
            return 0.0, 0.0
        beta = sum_r / (sum_r + load * self.c[j])
        return beta, sum_log + load * np.log1p(-beta) - load * np.log(load)

    def _macro_term(self, load, sum_log, n_b):
        if load == 0:
            return 0.0
        return sum_log + load * np.log1p(-n_b / self.chan.beam_group) - load * np.log(load)

    @property
    def utility(self) -> float:
        return float(self.terms.sum())

    @property
    def betas(self) -> np.ndarray:
        return self.beta[1:].copy()

    def association(self) -> Association:
        return Association(self.cell.copy(), self.chan.n_small_cells + 1)

    def evaluate_move(self, k: int, dst: int):
        """Utility after moving MT ``k`` to cell ``dst`` plus the state needed to commit it."""
        src = int(self.cell[k])
        r_src = self.chan.rates[src, k]
        r_dst = self.chan.rates[dst, k]
        load = self.load.copy()
        sum_r = self.sum_r.copy()
        sum_log = self.sum_log.copy()
        load[src] -= 1
        load[dst] += 1
        sum_r[src] -= r_src
        sum_r[dst] += r_dst
        sum_log[src] -= np.log(r_src)
        sum_log[dst] += np.log(r_dst)
        if load[src] == 0:
            sum_r[src] = sum_log[src] = 0.0

        beta = self.beta.copy()
        terms = self.terms.copy()
        for j in {src, dst} - {0}:
            beta[j], terms[j] = self._small_term(j, load[j], sum_r[j], sum_log[j])
        n_b = self.n_b - sum(self.beta[j] - beta[j] for j in {src, dst} - {0})
        terms[0] = self._macro_term(load[0], sum_log[0], n_b)
        return float(terms.sum()), (load, sum_r, sum_log, beta, terms, n_b)

    def commit(self, k: int, dst: int, state) -> None:
        self.cell[k] = dst
        self.load, self.sum_r, self.sum_log, self.beta, self.terms, self.n_b = state


def _greedy_pass(state: PerCellUtility, movers, targets_for) -> None:
    for k in movers:
        for dst in targets_for(k):
            if dst == state.cell[k]:
                continue
            new_utility, new_state = state.evaluate_move(k, dst)
            if new_utility > state.utility + 1e-12:
                state.commit(k, dst, new_state)


def offload_macro(assoc: Association, beta_vec, chan: ChannelRealization):
    """One greedy pass moving macro MTs to small cells while utility improves.

    MTs that start on the macro BS are scanned in index order; for each, the
    small cells are tried in index order and every strictly improving move is
    committed immediately, so an MT may hop on to a later cell in the same
    scan. Returns ``(assoc, beta_vec)`` with ``beta_vec`` at equality.
    ``beta_vec`` is accepted for interface symmetry; the allocation is always
    re-derived from ``assoc``.
    """
    state = PerCellUtility(assoc, chan)
    movers = np.flatnonzero(assoc.cell == 0)
    small = range(1, chan.n_small_cells + 1)
    _greedy_pass(state, movers, lambda k: small)
    return state.association(), state.betas


def balance_small_cells(assoc: Association, beta_vec, chan: ChannelRealization):
    """Greedy moves of small-cell MTs toward other small cells, cell by cell."""
    state = PerCellUtility(assoc, chan)
    small = range(1, chan.n_small_cells + 1)
    for j in small:
        members = np.flatnonzero(state.cell == j)
        _greedy_pass(state, members, lambda k: small)
    return state.association(), state.betas


def offload_and_balance(assoc: Association, beta_vec, chan: ChannelRealization):
    assoc, beta = offload_macro(assoc, beta_vec, chan)
    return balance_small_cells(assoc, beta, chan)


def sinr_with_per_cell_beta(chan: ChannelRealization):
    assoc = sinr_association(chan)
    return assoc, per_cell_betas(assoc, chan)
