"""
Association with one shared backhaul fraction
=============================================

Compare max-SINR association against the dual-decomposition solver when a
single fraction beta of the macro band is reserved for backhaul.
"""

import numpy as np

from hetnet_wbba import NetworkScenario, UnifiedWbba, per_mt_rates, rate_at_probability, sinr_association, sum_log_rate, uwbba
from hetnet_wbba.propagation import realize_channels
from hetnet_wbba.rates import min_feasible_beta_unified
from hetnet_wbba.scenario import generate_topology, trial_seeds

scenario = NetworkScenario()
topo_seed, rng = trial_seeds(master_seed=1, trial_id=0)
chan = realize_channels(generate_topology(scenario, topo_seed), scenario, rng)

# max-SINR leaves most MTs on the macro BS
sinr = sinr_association(chan)
beta_sinr = min_feasible_beta_unified(sinr, chan)
print("SINR loads:", sinr.load, " beta =", round(beta_sinr, 3))

# the solver alternates association at fixed beta with the smallest feasible beta
assoc, beta, diag = uwbba.solve(chan)
print("CA-WBBA loads:", assoc.load, " beta =", round(beta, 3))
print("outer iterations:", diag.outer_iterations, " beta trace:", np.round(diag.beta_trace, 3))

# a shared beta taxes every macro MT for each offloaded one, so on many
# drops the solver keeps everyone on the macro BS with beta = 0

# the objective is proportional fairness: the sum of log rates
for name, a, b in (("sinr", sinr, beta_sinr), ("cawbba", assoc, beta)):
    rates = per_mt_rates(a, UnifiedWbba(b), chan)
    print(f"{name:7s} utility {sum_log_rate(a, UnifiedWbba(b), chan):7.2f}"
          f"  R0.5 {rate_at_probability(rates, 0.5):.3f}  R0.9 {rate_at_probability(rates, 0.9):.3f}")
