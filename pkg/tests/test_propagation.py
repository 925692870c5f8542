import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetnet_wbba.propagation import (
    channels_from_gains,
    draw_shadowing,
    link_budget_rows,
    massive_mimo_rate,
    noise_power_watts,
    path_loss_backhaul_db,
    path_loss_macro_mt_db,
    path_loss_sc_mt_db,
    realize_channels,
    write_link_budget_csv,
)
from hetnet_wbba.scenario import NetworkScenario, generate_topology, topology_from_positions


@pytest.mark.parametrize("fn, d, expected, tol", [
    (path_loss_macro_mt_db, 1.0, 27.3, 1e-9),
    (path_loss_macro_mt_db, 100.0, 105.5, 1e-9),
    (path_loss_macro_mt_db, 10.0, 66.4, 1e-9),
    (path_loss_backhaul_db, 1.0, 24.6, 1e-9),
    (path_loss_backhaul_db, 100.0, 102.8, 1e-9),
    (path_loss_backhaul_db, 350.0, 124.07, 0.01),
    (path_loss_sc_mt_db, 1.0, 36.8, 1e-9),
    (path_loss_sc_mt_db, 100.0, 110.2, 1e-9),
    (path_loss_sc_mt_db, 50.0, 99.15, 0.01),
])
def test_path_loss_values(fn, d, expected, tol):
    assert fn(d) == pytest.approx(expected, abs=tol)


@pytest.mark.parametrize("fn", [path_loss_macro_mt_db, path_loss_backhaul_db, path_loss_sc_mt_db])
@pytest.mark.parametrize("d", [0.0, -3.0])
def test_path_loss_rejects_non_positive_distance(fn, d):
    with pytest.raises(ValueError):
        fn(d)


def test_shadowing_zero_sigma_is_exactly_zero(rng):
    assert draw_shadowing(0.0, rng) == 0.0
    assert np.all(draw_shadowing(0.0, rng, 10) == 0.0)


def test_shadowing_spread(rng):
    z = draw_shadowing(6.0, rng, 100_000)
    assert 5.9 <= z.std() <= 6.1
    assert abs(z.mean()) < 0.05


def test_shadowing_deterministic():
    a = draw_shadowing(4.0, np.random.default_rng(1))
    b = draw_shadowing(4.0, np.random.default_rng(1))
    assert a == b
    with pytest.raises(ValueError):
        draw_shadowing(-1.0, np.random.default_rng(1))


def test_noise_power_default():
    assert noise_power_watts(NetworkScenario()) == pytest.approx(1.99e-14, rel=2e-3)
    assert noise_power_watts(NetworkScenario()) == pytest.approx(10 ** -20.4 * 5e6, rel=1e-12)


def _flat_channel(scenario, sc, mt):
    topo = topology_from_positions(scenario, sc, mt)
    return topo, realize_channels(topo, scenario, np.random.default_rng(0))


def test_single_small_cell_has_no_interference():
    s = NetworkScenario(n_small_cells=1, n_mts=3, sigma_bs=0.0, sigma_sc=0.0)
    topo, chan = _flat_channel(s, [[50.0, 0.0]], [[10.0, 10.0], [80.0, -5.0], [-100.0, 30.0]])
    expect = s.p_small * chan.gain_sc_mt[0] / chan.noise_power
    assert np.allclose(chan.sinr_sc[0], expect, rtol=1e-12, atol=0)


def test_gains_include_small_cell_antenna_gain():
    s = NetworkScenario(n_small_cells=1, n_mts=1, sigma_bs=0.0, sigma_sc=0.0)
    topo, chan = _flat_channel(s, [[120.0, 0.0]], [[0.0, 200.0]])
    assert chan.gain_macro_mt[0] == pytest.approx(10 ** (-path_loss_macro_mt_db(200.0) / 10), rel=1e-12)
    assert chan.gain_macro_sc[0] == pytest.approx(10 ** (-(path_loss_backhaul_db(120.0) - 5.0) / 10), rel=1e-12)
    d = np.hypot(120.0, 200.0)
    assert chan.gain_sc_mt[0, 0] == pytest.approx(10 ** (-(path_loss_sc_mt_db(d) - 5.0) / 10), rel=1e-12)


def test_baseline_rate_formulas():
    s = NetworkScenario(n_small_cells=3, n_mts=20)
    chan = realize_channels(generate_topology(s, 4), s, np.random.default_rng(4))
    factor = (s.n_antennas - s.beam_group + 1) / s.beam_group
    assert np.array_equal(chan.r_macro, s.beam_group * np.log2(1 + factor * chan.sinr_macro))
    assert np.array_equal(chan.c_backhaul, np.log2(1 + factor * chan.sinr_backhaul))
    assert np.array_equal(chan.r_sc, np.log2(1 + chan.sinr_sc))
    assert np.all(chan.r_macro > 0) and np.all(chan.r_sc > 0) and np.all(chan.c_backhaul > 0)
    assert np.allclose(chan.sinr_macro, s.p_macro * chan.gain_macro_mt / chan.noise_power, rtol=1e-12)
    assert np.allclose(chan.sinr_backhaul, s.p_macro * chan.gain_macro_sc / chan.noise_power, rtol=1e-12)


def test_full_array_equal_to_group_size():
    # N_T = N_g collapses the array gain factor to 1/N_g. Scenarios require
    # N_g < N_T, so the rate helper is exercised directly.
    gamma = np.array([0.5, 3.0, 1e4])
    assert np.allclose(20 * massive_mimo_rate(gamma, 20, 20), 20 * np.log2(1 + gamma / 20), rtol=1e-15)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(5.0, 350.0), min_size=2, max_size=10, unique=True))
def test_gain_and_sinr_decrease_with_distance(ds):
    ds = np.sort(np.asarray(ds))
    s = NetworkScenario(n_small_cells=1, n_mts=len(ds), sigma_bs=0.0, sigma_sc=0.0)
    mt = np.column_stack((ds, np.zeros_like(ds)))
    topo, chan = _flat_channel(s, [[0.0, -300.0]], mt)
    strictly = np.diff(ds) > 1e-9
    assert np.all(np.diff(chan.gain_macro_mt)[strictly] < 0)
    assert np.all(np.diff(chan.sinr_macro)[strictly] < 0)


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-3, 1e3), st.integers(0, 2**32 - 1))
def test_sinr_invariant_to_common_power_scaling(scale, seed):
    s = NetworkScenario(n_small_cells=4, n_mts=12)
    chan = realize_channels(generate_topology(s, seed), s, np.random.default_rng(seed))
    scaled = s.replace(p_macro=s.p_macro * scale, p_small=s.p_small * scale)
    again = channels_from_gains(chan.gain_macro_mt, chan.gain_macro_sc, chan.gain_sc_mt, scaled,
                                noise_power=chan.noise_power * scale)
    for name in ("sinr_macro", "sinr_backhaul", "sinr_sc", "r_macro", "r_sc", "c_backhaul"):
        assert np.allclose(getattr(again, name), getattr(chan, name), rtol=1e-12, atol=0)


def test_interference_sum_recomputed_term_by_term():
    s = NetworkScenario(n_small_cells=6, n_mts=15)
    chan = realize_channels(generate_topology(s, 21), s, np.random.default_rng(21))
    for j in range(6):
        for k in range(15):
            interf = 0.0
            for l in range(6):
                if l != j:
                    interf += s.p_small * chan.gain_sc_mt[l, k]
            expect = s.p_small * chan.gain_sc_mt[j, k] / (chan.noise_power + interf)
            assert chan.sinr_sc[j, k] == pytest.approx(expect, rel=1e-12)


def test_link_budget_dump(tmp_path):
    s = NetworkScenario(n_small_cells=2, n_mts=3)
    topo = generate_topology(s, 2)
    chan = realize_channels(topo, s, np.random.default_rng(2))
    rows = list(link_budget_rows(topo, chan))
    assert len(rows) == 3 + 2 + 2 * 3
    path = tmp_path / "links.csv"
    write_link_budget_csv(path, topo, chan)
    lines = path.read_text().splitlines()
    assert lines[0] == "link,distance_m,path_loss_db,shadowing_db,gain,sinr"
    assert len(lines) == 1 + len(rows)
    first = rows[0]
    assert first[0] == "macro->mt0"
    pl, z, g = float(first[2]), float(first[3]), float(first[4])
    assert g == pytest.approx(10 ** (-(pl + z) / 10), rel=1e-12)
