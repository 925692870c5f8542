"""Scenario parameters and random network geometry.

The macro BS sits at the origin; small cells and mobile terminals (MTs) are
dropped uniformly over the disk of radius ``macro_radius``.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class NetworkScenario:
    """Immutable parameter set of a two-tier HetNet.

    Powers are in watts, lengths in meters, gains and spreads in dB.
    """

    n_small_cells: int = 10
    n_mts: int = 100
    macro_radius: float = 350.0
    n_antennas: int = 100
    beam_group: int = 20
    p_macro: float = 20.0
    p_small: float = 2.0
    sc_antenna_gain: float = 5.0
    noise_psd: float = -174.0
    bandwidth: float = 5e6
    sigma_bs: float = 6.0
    sigma_sc: float = 4.0
    min_link_distance: float = 5.0

    def __post_init__(self):
        if self.n_small_cells < 0 or self.n_mts < 0:
            raise ValueError("node counts must be non-negative")
        if not self.beam_group < self.n_antennas:
            raise ValueError(
                f"beam_group ({self.beam_group}) must be smaller than n_antennas ({self.n_antennas})"
            )
        if not self.n_small_cells < self.beam_group:
            raise ValueError(
                f"n_small_cells ({self.n_small_cells}) must be smaller than beam_group ({self.beam_group})"
            )
        for name in ("macro_radius", "p_macro", "p_small", "bandwidth", "min_link_distance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.sigma_bs < 0 or self.sigma_sc < 0:
            raise ValueError("shadowing spreads must be non-negative")

    def replace(self, **changes) -> "NetworkScenario":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkScenario":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "NetworkScenario":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class Topology:
    """Node positions and all link distances of one network drop.

    ``d_sc_mt`` has shape ``(n_small_cells, n_mts)``.
    """

    sc_positions: np.ndarray
    mt_positions: np.ndarray
    d_macro_mt: np.ndarray
    d_macro_sc: np.ndarray
    d_sc_mt: np.ndarray = field(repr=False)

    @property
    def n_small_cells(self) -> int:
        return len(self.sc_positions)

    @property
    def n_mts(self) -> int:
        return len(self.mt_positions)


def sample_disk(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    """Draw ``n`` points uniformly (by area) over a disk centred at the origin."""
    r = radius * np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    return np.column_stack((r * np.cos(theta), r * np.sin(theta)))


def topology_from_positions(scenario: NetworkScenario, sc_positions, mt_positions) -> Topology:
    """Build a :class:`Topology` from explicit positions (distances are clamped)."""
    sc = np.asarray(sc_positions, dtype=float).reshape(-1, 2)
    mt = np.asarray(mt_positions, dtype=float).reshape(-1, 2)
    dmin = scenario.min_link_distance
    d_macro_mt = np.maximum(np.linalg.norm(mt, axis=1), dmin)
    d_macro_sc = np.maximum(np.linalg.norm(sc, axis=1), dmin)
    d_sc_mt = np.maximum(np.linalg.norm(sc[:, None, :] - mt[None, :, :], axis=2), dmin)
    return Topology(sc, mt, d_macro_mt, d_macro_sc, d_sc_mt.reshape(len(sc), len(mt)))


def generate_topology(scenario: NetworkScenario, seed: int) -> Topology:
    """Drop small cells, then MTs, uniformly in the macro cell. Deterministic in ``seed``."""
    rng = np.random.default_rng(seed)
    sc = sample_disk(rng, scenario.n_small_cells, scenario.macro_radius)
    mt = sample_disk(rng, scenario.n_mts, scenario.macro_radius)
    return topology_from_positions(scenario, sc, mt)


def trial_seeds(master_seed: int, trial_id: int) -> tuple[int, np.random.Generator]:
    """Split ``(master_seed, trial_id)`` into a topology seed and a channel RNG.

    Mixing the trial index into the seed makes every trial independent of
    execution order.
    """
    ss = np.random.SeedSequence([int(master_seed), int(trial_id)])
    topo_ss, chan_ss = ss.spawn(2)
    topo_seed = int(topo_ss.generate_state(1, dtype=np.uint64)[0])
    return topo_seed, np.random.default_rng(chan_ss)


def load_scenario(path: str | Path) -> NetworkScenario:
    return NetworkScenario.from_json(path)
