"""Scheduling weighted jobs with a common deadline on identical parallel
machines under a conflict graph: exact matching-based and branch-and-bound
solvers, an m/2-approximation for unit jobs, VNS/IVNS heuristics, integer
programming model export, and a benchmark harness.
"""

from .core import (
    Instance,
    InstanceFormatError,
    InvalidScheduleError,
    Schedule,
    ScheduleViolation,
    SlotProfile,
    instance_from_text,
    instance_to_text,
    objective_value,
    schedule_from_json,
    schedule_to_json,
    slot_profile,
    validate_schedule,
)
from .gen import GenParams, generate_instance, read_instance, write_instance
from .heuristics import SearchConfig, ivns, recompute_start_times, vns, wspt_list_schedule
from .matching import (
    Matching,
    NoPerfectMatchingError,
    WeightedGraph,
    brute_force_perfect_matching,
    build_transformed_graph,
    matching_to_schedule,
    max_weight_perfect_matching,
)
from .milp import (
    BnbResult,
    IlpModel,
    build_ilp1,
    build_ilp2,
    export_lp,
    extract_schedule,
    solve_bnb,
)
from .uet import (
    RatioBoundReport,
    TightnessInstance,
    make_tightness_instance,
    solve_uet_anchored_greedy,
    solve_uet_two_machines,
    verify_ratio_bound,
)

__version__ = "0.1.0"
