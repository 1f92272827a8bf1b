"""Stackelberg pricing of two competing generative-AI models across tasks."""

from .demand import ExponentialDemand, GeneralDemand, evaluate, pooled_revenue
from .follower import (
    SearchParams,
    follower_price_bounds,
    solve_follower_exponential,
    solve_follower_general,
)
from .interaction import (
    EmpiricalMean,
    Geometric,
    TruncatedGeometric,
    competitive_ratio,
    expected_rounds,
    per_token_competitive_ratio,
)
from .leader import (
    LeaderSearchParams,
    Regime,
    RegimeKind,
    classify_two_task_regime,
    region_map,
    solve_leader_general,
    solve_leader_two_task,
)
from .market import (
    Firm,
    LeaderSolution,
    PriceSolution,
    PriceUnit,
    Scenario,
    Task,
    TaskOrdering,
    rank_tasks,
    revenue_split,
    scenario_from_kappas,
    user_choice,
)
from .oracle import TieRule, follower_oracle, leader_oracle
from .scenario_io import dump_scenario, parse_scenario
from .special import lambert_w0

__version__ = "0.1.0"

__all__ = [
    "EmpiricalMean", "ExponentialDemand", "Firm", "GeneralDemand", "Geometric",
    "LeaderSearchParams", "LeaderSolution", "PriceSolution", "PriceUnit", "Regime",
    "RegimeKind", "Scenario", "SearchParams", "Task", "TaskOrdering", "TieRule",
    "TruncatedGeometric", "classify_two_task_regime", "competitive_ratio", "dump_scenario",
    "evaluate", "expected_rounds", "follower_oracle", "follower_price_bounds", "lambert_w0",
    "leader_oracle", "parse_scenario", "per_token_competitive_ratio", "pooled_revenue",
    "rank_tasks", "region_map", "revenue_split", "scenario_from_kappas",
    "solve_follower_exponential", "solve_follower_general", "solve_leader_general",
    "solve_leader_two_task", "user_choice",
]
