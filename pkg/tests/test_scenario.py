import json

import numpy as np
import pytest
from scipy import integrate

from hetnet_wbba.scenario import (
    NetworkScenario,
    generate_topology,
    sample_disk,
    topology_from_positions,
    trial_seeds,
)


def test_defaults_match_evaluation_setup():
    s = NetworkScenario()
    assert (s.macro_radius, s.n_antennas, s.beam_group) == (350.0, 100, 20)
    assert (s.p_macro, s.p_small, s.sc_antenna_gain) == (20.0, 2.0, 5.0)
    assert (s.noise_psd, s.bandwidth, s.sigma_bs, s.sigma_sc) == (-174.0, 5e6, 6.0, 4.0)
    assert s.min_link_distance == 5.0


@pytest.mark.parametrize("kwargs", [
    dict(n_small_cells=20),                 # N_S must stay below N_g
    dict(beam_group=100),                   # N_g must stay below N_T
    dict(p_macro=0.0),
    dict(bandwidth=-1.0),
    dict(macro_radius=0.0),
    dict(sigma_sc=-1.0),
    dict(n_mts=-1),
])
def test_invalid_scenarios_rejected(kwargs):
    with pytest.raises(ValueError):
        NetworkScenario(**kwargs)


def test_empty_network():
    topo = generate_topology(NetworkScenario(n_small_cells=0, n_mts=0), seed=3)
    assert topo.sc_positions.shape == (0, 2)
    assert topo.mt_positions.shape == (0, 2)
    assert topo.d_sc_mt.shape == (0, 0)


def test_same_seed_same_topology():
    s = NetworkScenario(n_small_cells=7, n_mts=40)
    a, b = generate_topology(s, 99), generate_topology(s, 99)
    for name in ("sc_positions", "mt_positions", "d_macro_mt", "d_macro_sc", "d_sc_mt"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    c = generate_topology(s, 100)
    assert not np.array_equal(a.mt_positions, c.mt_positions)


def test_positions_inside_disk_and_distances_consistent():
    s = NetworkScenario(n_small_cells=10, n_mts=500)
    topo = generate_topology(s, 1)
    assert np.all(np.linalg.norm(topo.mt_positions, axis=1) <= s.macro_radius)
    assert np.all(np.linalg.norm(topo.sc_positions, axis=1) <= s.macro_radius)
    expect = np.maximum(np.linalg.norm(topo.sc_positions[:, None] - topo.mt_positions[None], axis=2), 5.0)
    assert np.array_equal(topo.d_sc_mt, expect)
    assert topo.d_sc_mt.min() >= s.min_link_distance


def test_mean_macro_distance_matches_disk_integral():
    R = 350.0
    # mean radius of a uniform point: integral of r * (2r / R^2) over [0, R]
    analytic, _ = integrate.quad(lambda r: r * 2.0 * r / R**2, 0.0, R)
    s = NetworkScenario(n_small_cells=0, n_mts=10_000)
    d = np.concatenate([generate_topology(s, seed).d_macro_mt for seed in range(5)])
    assert abs(d.mean() - analytic) / analytic < 0.01
    assert analytic == pytest.approx(2.0 / 3.0 * R)


def test_area_uniformity():
    R = 350.0
    pts = sample_disk(np.random.default_rng(7), 100_000, R)
    r = np.linalg.norm(pts, axis=1)
    for frac in (0.25, 0.5, 0.75):
        assert abs(np.mean(r <= frac * R) - frac**2) <= 0.01


def test_distances_are_clamped():
    s = NetworkScenario(n_small_cells=1, n_mts=2)
    topo = topology_from_positions(s, [[1.0, 0.0]], [[0.0, 0.0], [1.0, 2.0]])
    assert topo.d_macro_mt[0] == 5.0
    assert topo.d_sc_mt[0, 0] == 5.0
    assert topo.d_sc_mt[0, 1] == 5.0
    assert topo.d_macro_sc[0] == 5.0


def test_trial_seed_splitting():
    a_seed, a_rng = trial_seeds(5, 3)
    b_seed, b_rng = trial_seeds(5, 3)
    assert a_seed == b_seed
    assert a_rng.random() == b_rng.random()
    assert trial_seeds(5, 4)[0] != a_seed
    assert trial_seeds(6, 3)[0] != a_seed


def test_json_round_trip(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps({"n_small_cells": 5, "n_mts": 50, "sigma_bs": 0.0}))
    s = NetworkScenario.from_json(path)
    assert (s.n_small_cells, s.n_mts, s.sigma_bs, s.macro_radius) == (5, 50, 0.0, 350.0)
    assert NetworkScenario.from_dict(s.to_dict()) == s
    path.write_text(json.dumps({"bogus": 1}))
    with pytest.raises(ValueError):
        NetworkScenario.from_json(path)
