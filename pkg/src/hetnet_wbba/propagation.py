"""Large-scale path loss, log-normal shadowing, SINRs and baseline rates."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .scenario import NetworkScenario, Topology


def _check_distance(d):
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("link distance must be positive")
    return d


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def path_loss_macro_mt_db(d):
    """Urban-macro NLOS loss from the macro BS to an MT, shadowing excluded."""
    return _scalar_or_array(27.3 + 39.1 * np.log10(_check_distance(d)))


def path_loss_backhaul_db(d):
    """Loss on the macro BS to small-cell backhaul link, shadowing excluded."""
    return _scalar_or_array(24.6 + 39.1 * np.log10(_check_distance(d)))


def path_loss_sc_mt_db(d):
    """Urban-micro NLOS loss from a small cell to an MT, shadowing excluded."""
    return _scalar_or_array(36.8 + 36.7 * np.log10(_check_distance(d)))


def draw_shadowing(sigma, rng: np.random.Generator, size=None):
    """Zero-mean Gaussian shadowing in dB with standard deviation ``sigma``."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    z = rng.standard_normal(size)
    if sigma == 0:
        return np.zeros_like(z) if size is not None else 0.0
    return sigma * z


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def noise_power_watts(scenario: NetworkScenario) -> float:
    return 10.0 ** ((scenario.noise_psd - 30.0) / 10.0) * scenario.bandwidth


def massive_mimo_rate(sinr, n_antennas: int, beam_group: int):
    """Per-stream spectral efficiency ``log2(1 + (N_T - N_g + 1) / N_g * sinr)``."""
    return np.log2(1.0 + (n_antennas - beam_group + 1) / beam_group * np.asarray(sinr))


@dataclass(frozen=True)
class ChannelRealization:
    """Everything the optimizers need from one trial's channel.

    Gains are linear power gains; rates are spectral efficiencies in bit/s/Hz.
    Arrays over small cells and MTs are indexed ``[j, k]``.
    """

    gain_macro_mt: np.ndarray
    gain_macro_sc: np.ndarray
    gain_sc_mt: np.ndarray
    noise_power: float
    sinr_macro: np.ndarray
    sinr_backhaul: np.ndarray
    sinr_sc: np.ndarray
    r_macro: np.ndarray
    r_sc: np.ndarray
    c_backhaul: np.ndarray
    beam_group: int
    n_antennas: int
    shadow_macro_mt: np.ndarray = field(default=None, repr=False)
    shadow_macro_sc: np.ndarray = field(default=None, repr=False)
    shadow_sc_mt: np.ndarray = field(default=None, repr=False)

    @property
    def n_small_cells(self) -> int:
        return self.r_sc.shape[0]

    @property
    def n_mts(self) -> int:
        return self.r_macro.shape[0]

    @property
    def rates(self) -> np.ndarray:
        """Baseline rates stacked as ``(N_S + 1, N_U)`` with the macro in row 0."""
        return np.vstack((self.r_macro[None, :], self.r_sc))

    @property
    def sinr(self) -> np.ndarray:
        """Access SINRs stacked as ``(N_S + 1, N_U)`` with the macro in row 0."""
        return np.vstack((self.sinr_macro[None, :], self.sinr_sc))


def channels_from_gains(
    gain_macro_mt, gain_macro_sc, gain_sc_mt, scenario: NetworkScenario, noise_power=None, **shadow
) -> ChannelRealization:
    """Compute SINRs and baseline rates from linear gains.

    Macro links are interference-free (reverse TDD plus soft frequency reuse);
    a small-cell downlink sees every other small cell as an interferer.
    """
    g0 = np.asarray(gain_macro_mt, dtype=float)
    gb = np.asarray(gain_macro_sc, dtype=float)
    gs = np.asarray(gain_sc_mt, dtype=float).reshape(len(gb), len(g0))
    n0 = noise_power_watts(scenario) if noise_power is None else float(noise_power)

    sinr_macro = scenario.p_macro * g0 / n0
    sinr_backhaul = scenario.p_macro * gb / n0
    rx = scenario.p_small * gs
    # sum over the other cells directly; total-minus-own loses precision
    others = 1.0 - np.eye(len(gb))
    interference = others @ rx
    sinr_sc = rx / (n0 + interference)

    nt, ng = scenario.n_antennas, scenario.beam_group
    return ChannelRealization(
        gain_macro_mt=g0,
        gain_macro_sc=gb,
        gain_sc_mt=gs,
        noise_power=n0,
        sinr_macro=sinr_macro,
        sinr_backhaul=sinr_backhaul,
        sinr_sc=sinr_sc,
        r_macro=ng * massive_mimo_rate(sinr_macro, nt, ng),
        r_sc=np.log2(1.0 + sinr_sc),
        c_backhaul=massive_mimo_rate(sinr_backhaul, nt, ng),
        beam_group=ng,
        n_antennas=nt,
        **shadow,
    )


def realize_channels(topology: Topology, scenario: NetworkScenario, rng: np.random.Generator) -> ChannelRealization:
    """Draw shadowing for every link and build the trial's channel realization."""
    ns, nu = topology.n_small_cells, topology.n_mts
    z_macro_mt = draw_shadowing(scenario.sigma_bs, rng, nu)
    z_macro_sc = draw_shadowing(scenario.sigma_bs, rng, ns)
    z_sc_mt = draw_shadowing(scenario.sigma_sc, rng, (ns, nu))

    g_ant = scenario.sc_antenna_gain
    gain_macro_mt = db_to_linear(-(path_loss_macro_mt_db(topology.d_macro_mt) + z_macro_mt))
    gain_macro_sc = db_to_linear(-(path_loss_backhaul_db(topology.d_macro_sc) + z_macro_sc - g_ant))
    gain_sc_mt = db_to_linear(-(path_loss_sc_mt_db(topology.d_sc_mt) + z_sc_mt - g_ant))
    return channels_from_gains(
        gain_macro_mt,
        gain_macro_sc,
        gain_sc_mt,
        scenario,
        shadow_macro_mt=z_macro_mt,
        shadow_macro_sc=z_macro_sc,
        shadow_sc_mt=z_sc_mt,
    )


def link_budget_rows(topology: Topology, chan: ChannelRealization):
    """Yield ``(link, distance, path loss, shadowing, gain, SINR)`` for every link."""
    def row(name, d, pl, z, g, sinr):
        return [name, repr(float(d)), repr(float(pl)), repr(float(z)), repr(float(g)), repr(float(sinr))]

    for k in range(topology.n_mts):
        d = topology.d_macro_mt[k]
        yield row(f"macro->mt{k}", d, path_loss_macro_mt_db(d), chan.shadow_macro_mt[k],
                  chan.gain_macro_mt[k], chan.sinr_macro[k])
    for j in range(topology.n_small_cells):
        d = topology.d_macro_sc[j]
        yield row(f"macro->sc{j + 1}", d, path_loss_backhaul_db(d), chan.shadow_macro_sc[j],
                  chan.gain_macro_sc[j], chan.sinr_backhaul[j])
    for j in range(topology.n_small_cells):
        for k in range(topology.n_mts):
            d = topology.d_sc_mt[j, k]
            yield row(f"sc{j + 1}->mt{k}", d, path_loss_sc_mt_db(d), chan.shadow_sc_mt[j, k],
                      chan.gain_sc_mt[j, k], chan.sinr_sc[j, k])


def write_link_budget_csv(path, topology: Topology, chan: ChannelRealization) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["link", "distance_m", "path_loss_db", "shadowing_db", "gain", "sinr"])
        w.writerows(link_budget_rows(topology, chan))
