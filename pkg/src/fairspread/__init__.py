"""Fair influence maximization under the Independent Cascade model.

Selects seed sets that maximize the worst per-group expected coverage,
using reverse-reachable set sampling for estimation.
"""

from .agm import GS, US, AgmResult, agm_gs, agm_us, bound_report, run_agm, xi
from .baselines import BaselineResult, global_imm, myopic, naive_greedy
from .diffusion import estimate_group_utilities, estimate_sigma, simulate_ic
from .errors import BudgetError, CapExceededError, DataError, FairspreadError, ParseError, UsageError
from .experiment import ExperimentConfig, run_experiment
from .graph import (
    Graph,
    GroupStructure,
    assign_wc_probabilities,
    group_connectivity,
    load_edge_list,
    load_groups,
)
from .igm import SeedMatrix, run_igm
from .metrics import evaluate, price_of_fairness
from .oracle import LiveEdgeEnumeration, exact_optimum, exact_phi, exact_sigma, exact_utilities
from .ris import ImmParams, RRSetPool, build_group_pool, compute_theta, greedy_max_cover
from .synth import SynthSpec, planted_partition

__version__ = "0.1.0"

__all__ = [
    "GS", "US", "AgmResult", "BaselineResult", "BudgetError", "CapExceededError", "DataError",
    "ExperimentConfig", "FairspreadError", "Graph", "GroupStructure", "ImmParams", "LiveEdgeEnumeration",
    "ParseError", "RRSetPool", "SeedMatrix", "SynthSpec", "UsageError", "agm_gs", "agm_us",
    "assign_wc_probabilities", "bound_report", "build_group_pool", "compute_theta", "estimate_group_utilities",
    "estimate_sigma", "evaluate", "exact_optimum", "exact_phi", "exact_sigma", "exact_utilities",
    "global_imm", "greedy_max_cover", "group_connectivity", "load_edge_list", "load_groups", "myopic",
    "naive_greedy", "planted_partition", "price_of_fairness", "run_agm", "run_experiment", "run_igm",
    "simulate_ic", "xi",
]
