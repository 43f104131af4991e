"""Solvers and batch planner for mixed ranger/villager patrol allocation games."""

from .bench import BenchReport, BenchRow, GenParams, generate_instance, run_benchmark
from .feasibility import (
    FeasibilityAnswer,
    FeasibilityQuery,
    TargetSpecificInstance,
    check_consistent,
    check_consistent_ts,
    max_feasible_villagers,
    min_valid_coverage,
    total_wasted_coverage,
)
from .model import (
    BestResponse,
    GameDefinitionError,
    Instance,
    ProfileValidationError,
    SolveResult,
    StrategyProfile,
    best_response,
    compute_coverage,
    evaluate_profile,
    target_utilities,
    validate_profile,
)
from .oracle import (
    EnumerationLimitError,
    VillagerSpecificInstance,
    VillagerSpecificResult,
    solve_oracle,
    solve_oracle_villager_specific,
)
from .planner import (
    BaselineComparison,
    BudgetSweepRow,
    ScenarioInstance,
    budget_sweep,
    case_study_scenario,
    compare_with_baseline,
    effectiveness_grid,
    load_instance,
    load_result,
    save_instance,
    save_result,
    terrain_adjust,
)
from .tdbs import TdbsConfig, solve_tdbs, utility_gap_bound, value_bound
from .waterfill import (
    SwapCandidate,
    WaterfillState,
    get_swap_line,
    hw_subproblem,
    min_drop_before_swap,
    solve_hw,
)

__all__ = [
    "BenchReport",
    "BenchRow",
    "BestResponse",
    "BaselineComparison",
    "BudgetSweepRow",
    "EnumerationLimitError",
    "FeasibilityAnswer",
    "FeasibilityQuery",
    "GameDefinitionError",
    "GenParams",
    "Instance",
    "ProfileValidationError",
    "ScenarioInstance",
    "SolveResult",
    "StrategyProfile",
    "SwapCandidate",
    "TargetSpecificInstance",
    "TdbsConfig",
    "VillagerSpecificInstance",
    "VillagerSpecificResult",
    "WaterfillState",
    "best_response",
    "budget_sweep",
    "case_study_scenario",
    "check_consistent",
    "check_consistent_ts",
    "compare_with_baseline",
    "compute_coverage",
    "effectiveness_grid",
    "evaluate_profile",
    "generate_instance",
    "get_swap_line",
    "hw_subproblem",
    "load_instance",
    "load_result",
    "max_feasible_villagers",
    "min_drop_before_swap",
    "min_valid_coverage",
    "run_benchmark",
    "save_instance",
    "save_result",
    "solve_hw",
    "solve_oracle",
    "solve_oracle_villager_specific",
    "solve_tdbs",
    "target_utilities",
    "terrain_adjust",
    "total_wasted_coverage",
    "utility_gap_bound",
    "validate_profile",
    "value_bound",
]

__version__ = "0.1.0"
