"""
A single network drop and its link budget
=========================================

Draw one topology, realize shadowed channels and look at the baseline rates
every association decision is built from.
"""

import numpy as np

from hetnet_wbba import NetworkScenario, generate_topology, realize_channels
from hetnet_wbba.scenario import trial_seeds

scenario = NetworkScenario(n_small_cells=4, n_mts=12)
topo_seed, rng = trial_seeds(master_seed=7, trial_id=0)
topology = generate_topology(scenario, topo_seed)
chan = realize_channels(topology, scenario, rng)

# distances from the macro BS: MTs are uniform over the disk
print("MT distances to macro (m):", np.round(topology.d_macro_mt, 1))

# baseline macro rates already include the massive MIMO beamforming gain
print("r_0k  (bit/s/Hz):", np.round(chan.r_macro, 2))

# rows are small cells, columns MTs
print("r_jk  (bit/s/Hz):")
print(np.round(chan.r_sc, 2))

# wireless backhaul capacity of each small cell, per unit of macro bandwidth
print("c_j   (bit/s/Hz):", np.round(chan.c_backhaul, 2))

# which cell has the strongest SINR for each MT
print("strongest cell per MT:", np.argmax(chan.sinr, axis=0))
