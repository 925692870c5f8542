"""Joint cell association and wireless-backhaul bandwidth allocation for
two-tier HetNets with a massive-MIMO macro base station."""

from .decomposition import DualState, SolverConfig, SolverDiagnostics
from .experiments import ExperimentSpec, MetricsSummary, TrialResult, rate_at_probability, run_experiment, run_trial
from .heuristics import balance_small_cells, cre_association, offload_macro, sinr_association
from .oracle import OracleLimits, brute_force_pwbba, brute_force_uwbba
from .propagation import ChannelRealization, realize_channels
from .rates import (
    Association,
    PerCellWbba,
    UnifiedWbba,
    backhaul_capacity,
    beta_per_cell,
    macro_user_rate,
    min_feasible_beta_unified,
    per_mt_rates,
    small_cell_throughput,
    sum_log_rate,
)
from .scenario import NetworkScenario, Topology, generate_topology

__version__ = "0.1.0"
