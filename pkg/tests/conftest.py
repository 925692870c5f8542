import numpy as np
import pytest

from hetnet_wbba.propagation import ChannelRealization, realize_channels
from hetnet_wbba.scenario import NetworkScenario, generate_topology, trial_seeds

ACCEPTANCE_LINES = []


def make_channel(r_macro, r_sc, c_backhaul, beam_group=20, n_antennas=100, sinr_macro=None, sinr_sc=None):
    """Channel realization with hand-picked baseline rates (gains are placeholders)."""
    r_macro = np.asarray(r_macro, dtype=float).reshape(-1)
    r_sc = np.asarray(r_sc, dtype=float).reshape(-1, r_macro.size)
    c = np.asarray(c_backhaul, dtype=float).reshape(-1)
    ns, nu = r_sc.shape
    return ChannelRealization(
        gain_macro_mt=np.ones(nu),
        gain_macro_sc=np.ones(ns),
        gain_sc_mt=np.ones((ns, nu)),
        noise_power=1.0,
        sinr_macro=np.ones(nu) if sinr_macro is None else np.asarray(sinr_macro, float),
        sinr_backhaul=np.ones(ns),
        sinr_sc=np.ones((ns, nu)) if sinr_sc is None else np.asarray(sinr_sc, float).reshape(ns, nu),
        r_macro=r_macro,
        r_sc=r_sc,
        c_backhaul=c,
        beam_group=beam_group,
        n_antennas=n_antennas,
    )


def seeded_channel(scenario, master_seed, trial_id):
    topo_seed, rng = trial_seeds(master_seed, trial_id)
    return realize_channels(generate_topology(scenario, topo_seed), scenario, rng)


TINY = NetworkScenario(n_small_cells=2, n_mts=6, sigma_bs=0.0, sigma_sc=0.0)
# Weak macro array, so small cells win MTs in roughly half of the tiny drops.
TINY_CONTESTED = NetworkScenario(n_small_cells=2, n_mts=6, sigma_bs=0.0, sigma_sc=0.0,
                                 n_antennas=4, beam_group=3, macro_radius=150.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
