"""Load-dependent rates, backhaul capacities and the sum log-rate utility.

Every other module evaluates solutions through these functions, so the two
bandwidth-allocation scenarios are defined in exactly one place:

* unified: one backhaul fraction ``beta`` shared by all small cells, the
  macro BS loses the same fraction of its band;
* per-cell: a fraction ``beta[j]`` per small cell, the macro BS loses
  ``n_b / N_g`` of its spatial streams with ``n_b = sum(beta)``.

Cell index 0 is the macro BS, small cell ``j`` is index ``j`` (1-based).
Utilities are in nats.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .propagation import ChannelRealization


@dataclass(frozen=True)
class Association:
    """Binary cell association, stored as the serving cell of every MT."""

    cell: np.ndarray
    n_cells: int

    def __post_init__(self):
        cell = np.asarray(self.cell, dtype=np.int64)
        if cell.ndim != 1:
            raise ValueError("cell must be a 1-D vector of cell indices")
        if cell.size and (cell.min() < 0 or cell.max() >= self.n_cells):
            raise ValueError("cell index out of range")
        cell.setflags(write=False)
        object.__setattr__(self, "cell", cell)

    @classmethod
    def from_matrix(cls, x) -> "Association":
        x = np.asarray(x)
        if x.ndim != 2 or not np.all((x == 0) | (x == 1)) or not np.all(x.sum(axis=0) == 1):
            raise ValueError("x must be binary with exactly one 1 per column")
        return cls(np.argmax(x, axis=0), x.shape[0])

    @classmethod
    def all_macro(cls, n_mts: int, n_small_cells: int) -> "Association":
        return cls(np.zeros(n_mts, dtype=np.int64), n_small_cells + 1)

    @property
    def n_mts(self) -> int:
        return self.cell.size

    @property
    def x(self) -> np.ndarray:
        """The ``(N_S + 1, N_U)`` 0/1 indicator matrix."""
        x = np.zeros((self.n_cells, self.n_mts), dtype=np.int64)
        x[self.cell, np.arange(self.n_mts)] = 1
        return x

    @property
    def load(self) -> np.ndarray:
        return np.bincount(self.cell, minlength=self.n_cells)

    def moved(self, k: int, j: int) -> "Association":
        cell = self.cell.copy()
        cell[k] = j
        return Association(cell, self.n_cells)

    def __eq__(self, other):
        if not isinstance(other, Association):
            return NotImplemented
        return self.n_cells == other.n_cells and np.array_equal(self.cell, other.cell)

    __hash__ = None


@dataclass(frozen=True)
class UnifiedWbba:
    beta: float

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")


@dataclass(frozen=True)
class PerCellWbba:
    beta: np.ndarray

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=float).reshape(-1)
        if beta.size and (beta.min() < 0.0 or beta.max() > 1.0):
            raise ValueError("every beta_j must lie in [0, 1]")
        beta.setflags(write=False)
        object.__setattr__(self, "beta", beta)

    @property
    def n_b(self) -> float:
        """Average number of small cells using the macro BS per sub-band."""
        return float(self.beta.sum())


def _cell_fractions(wbba, chan: ChannelRealization) -> np.ndarray:
    """Fraction of resources left for access traffic, per cell (macro first)."""
    ns = chan.n_small_cells
    if isinstance(wbba, UnifiedWbba):
        return np.full(ns + 1, 1.0 - wbba.beta)
    if isinstance(wbba, PerCellWbba):
        if wbba.beta.size != ns:
            raise ValueError("beta vector length must equal the number of small cells")
        return np.concatenate(([1.0 - wbba.n_b / chan.beam_group], 1.0 - wbba.beta))
    raise TypeError(f"unsupported allocation type {type(wbba).__name__}")


def _beta_of(wbba, j: int) -> float:
    return wbba.beta if isinstance(wbba, UnifiedWbba) else float(wbba.beta[j - 1])


def small_cell_throughput(assoc: Association, wbba, chan: ChannelRealization, j: int) -> float:
    """Downlink throughput of small cell ``j`` (1-based); zero for an empty cell."""
    if not 1 <= j <= chan.n_small_cells:
        raise ValueError("j must index a small cell")
    members = assoc.cell == j
    load = members.sum()
    if load == 0:
        return 0.0
    return (1.0 - _beta_of(wbba, j)) * chan.r_sc[j - 1, members].sum() / load


def macro_user_rate(assoc: Association, wbba, chan: ChannelRealization, k: int) -> float:
    """Rate of macro-associated MT ``k`` under equal resource sharing."""
    if assoc.cell[k] != 0:
        raise ValueError(f"MT {k} is not associated with the macro BS")
    load = np.count_nonzero(assoc.cell == 0)
    return _cell_fractions(wbba, chan)[0] * chan.r_macro[k] / load


def backhaul_capacity(wbba, chan: ChannelRealization, j: int) -> float:
    """Wireless-backhaul downlink capacity of small cell ``j`` (1-based)."""
    return _beta_of(wbba, j) * float(chan.c_backhaul[j - 1])


def per_mt_rates(assoc: Association, wbba, chan: ChannelRealization) -> np.ndarray:
    """Long-term rate of every MT under its serving cell (bit/s/Hz)."""
    k = np.arange(assoc.n_mts)
    base = chan.rates[assoc.cell, k]
    return _cell_fractions(wbba, chan)[assoc.cell] * base / assoc.load[assoc.cell]


def sum_log_rate(assoc: Association, wbba, chan: ChannelRealization) -> float:
    """Proportional-fair utility: sum over MTs of ln(rate).

    Returns ``-inf`` if some associated MT gets a zero rate, which only
    happens when a populated cell has no access bandwidth left.
    """
    if assoc.n_mts == 0:
        return 0.0
    rates = per_mt_rates(assoc, wbba, chan)
    if np.any(rates <= 0):
        return float("-inf")
    return float(np.log(rates).sum())


def _cell_rate_sums(assoc: Association, chan: ChannelRealization) -> tuple[np.ndarray, np.ndarray]:
    ns = chan.n_small_cells
    sc = assoc.cell - 1
    mask = sc >= 0
    r = chan.r_sc[sc[mask], np.flatnonzero(mask)]
    sum_r = np.bincount(sc[mask], weights=r, minlength=ns).astype(float)
    load = np.bincount(sc[mask], minlength=ns)
    return sum_r, load


def per_cell_betas(assoc: Association, chan: ChannelRealization) -> np.ndarray:
    """Smallest backhaul fraction of every small cell; 0 for empty cells.

    At this value the cell's throughput exactly equals its backhaul capacity.
    """
    sum_r, load = _cell_rate_sums(assoc, chan)
    denom = sum_r + load * chan.c_backhaul
    out = np.zeros_like(sum_r)
    np.divide(sum_r, denom, out=out, where=load > 0)
    return out


def beta_per_cell(assoc: Association, chan: ChannelRealization, j: int) -> float:
    return float(per_cell_betas(assoc, chan)[j - 1])


def min_feasible_beta_unified(assoc: Association, chan: ChannelRealization) -> float:
    """Smallest unified fraction meeting every small cell's backhaul constraint."""
    if chan.n_small_cells == 0:
        return 0.0
    return float(per_cell_betas(assoc, chan).max(initial=0.0))


def backhaul_slack(assoc: Association, wbba, chan: ChannelRealization) -> np.ndarray:
    """``C_j - R_j`` for every small cell (negative means the backhaul is violated)."""
    sum_r, load = _cell_rate_sums(assoc, chan)
    mean_r = np.zeros_like(sum_r)
    np.divide(sum_r, load, out=mean_r, where=load > 0)
    beta = np.full(chan.n_small_cells, wbba.beta) if isinstance(wbba, UnifiedWbba) else wbba.beta
    return beta * chan.c_backhaul - (1.0 - beta) * mean_r


def is_backhaul_feasible(assoc: Association, wbba, chan: ChannelRealization, tol: float = 1e-9) -> bool:
    return bool(np.all(backhaul_slack(assoc, wbba, chan) >= -tol))
