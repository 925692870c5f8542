"""
Per-small-cell backhaul fractions
=================================

Let each small cell pick its own backhaul share and compare the solver with
the greedy offloading heuristics on a handful of drops.
"""

import numpy as np

from hetnet_wbba import NetworkScenario, PerCellWbba, pwbba, sum_log_rate, uwbba
from hetnet_wbba.heuristics import offload_and_balance, offload_macro, sinr_with_per_cell_beta
from hetnet_wbba.rates import UnifiedWbba
from hetnet_wbba.scenario import generate_topology, trial_seeds
from hetnet_wbba.propagation import realize_channels

scenario = NetworkScenario()
rows = []
for trial in range(5):
    topo_seed, rng = trial_seeds(master_seed=3, trial_id=trial)
    chan = realize_channels(generate_topology(scenario, topo_seed), scenario, rng)

    # every small cell runs at the share that makes its backhaul constraint tight
    a_u, b_u, _ = uwbba.solve(chan)
    a_p, b_p, _ = pwbba.solve(chan)
    start = sinr_with_per_cell_beta(chan)
    a_o, b_o = offload_macro(*start, chan)
    a_b, b_b = offload_and_balance(*start, chan)
    rows.append([
        sum_log_rate(a_u, UnifiedWbba(b_u), chan),
        sum_log_rate(a_p, PerCellWbba(b_p), chan),
        sum_log_rate(a_o, PerCellWbba(b_o), chan),
        sum_log_rate(a_b, PerCellWbba(b_b), chan),
    ])
    print(f"trial {trial}: per-cell betas {np.round(b_p, 2)}")

rows = np.array(rows)
for name, column in zip(("u-WBBA", "p-WBBA", "offload", "offload+balance"), rows.T):
    print(f"{name:16s} mean utility {column.mean():7.2f}")
