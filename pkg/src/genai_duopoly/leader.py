"""Firm A's first-mover price.

The leader keeps the tasks the follower leaves behind, so it earns only
when B's best response is to serve a strict prefix of the ordering.
:func:`solve_leader_general` searches that bilevel problem numerically for
any number of tasks; for two tasks with exponential demand
:func:`solve_leader_two_task` gives the optimum in closed form.

At exact follower indifference the leader is assumed to get the
favourable (smaller-prefix) response. ``dominance_delta > 0`` instead
demands that B's chosen prefix beat every alternative by that margin.
"""

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from .errors import NonExponentialDemand, WrongTaskCount
from .follower import (
    SearchParams,
    exponential_piece_optima,
    general_piece_optima,
    pick_piece,
    solve_follower_exponential,
)
from .market import LeaderSolution, PriceSolution, rank_tasks, scenario_from_kappas
from .special import lambert_w0

#: Relative slack treating ``ratio == share`` as the infeasible side.
BOUNDARY_RTOL = 1e-12


class RegimeKind(str, Enum):
    INFEASIBLE = "infeasible"
    LOW_PRICE = "low_price"
    HIGH_PRICE = "high_price"


@dataclass(frozen=True)
class Regime:
    kind: RegimeKind
    demand_share: float
    lambert_bound: float
    ratio: float


def lambert_bound(share):
    """``-W0(-share / e)``: largest ratio for which the high-price regime holds."""
    return -lambert_w0(-share * math.exp(-1.0))


def classify_ratio_share(ratio, share):
    """Two-task regime from ``kappa_2/kappa_1`` and ``a_1/(a_1+a_2)`` alone.

    ``ratio >= share`` is infeasible: at equality the low-price cap on
    ``q`` is exactly zero, so no positive leader price survives.
    """
    bound = lambert_bound(share)
    if ratio >= share * (1.0 - BOUNDARY_RTOL):
        kind = RegimeKind.INFEASIBLE
    elif ratio <= bound:
        kind = RegimeKind.HIGH_PRICE
    else:
        kind = RegimeKind.LOW_PRICE
    return Regime(kind, share, bound, ratio)


def _two_groups(scenario):
    if not scenario.is_exponential:
        raise NonExponentialDemand("two-task closed form needs exponential demand")
    ordering = rank_tasks(scenario)
    if len(ordering) != 2:
        raise WrongTaskCount(f"need exactly two task groups after ranking, got {len(ordering)}")
    return ordering


def classify_two_task_regime(scenario):
    ordering = _two_groups(scenario)
    g1, g2 = ordering.groups
    share = g1.merged_base_a / (g1.merged_base_a + g2.merged_base_a)
    return classify_ratio_share(g2.kappa / g1.kappa, share)


def two_task_price_cap(scenario):
    """Largest leader price keeping B on the first group only, or ``None``."""
    ordering = _two_groups(scenario)
    regime = classify_two_task_regime(scenario)
    if regime.kind is RegimeKind.INFEASIBLE:
        return None
    b = scenario.sensitivity_b
    k1, k2 = ordering.kappas
    if regime.kind is RegimeKind.HIGH_PRICE:
        return regime.lambert_bound / (b * k2)
    cap = (math.log(k1 / k2) + math.log(regime.demand_share)) / (b * (k1 - k2))
    return cap if cap > 0 else None


def solve_leader_two_task(scenario):
    """Closed-form leader optimum for two task groups under exponential demand.

    Leader revenue ``q a_2 e^{-bq}`` rises up to ``1/b``, so the optimum is
    ``min(1/b, cap)`` with ``cap`` from :func:`two_task_price_cap`:

    * high-price regime: ``cap = -W0(-a_1 e^{-1}/(a_1+a_2)) / (b kappa_2)``
    * low-price regime: ``cap = (log(kappa_1/kappa_2) + log(a_1/(a_1+a_2))) / (b (kappa_1 - kappa_2))``
    """
    ordering = _two_groups(scenario)
    regime = classify_two_task_regime(scenario)
    cap = two_task_price_cap(scenario)
    if cap is None:
        return LeaderSolution(False, None, 0.0, regime=regime, method="closed")
    b = scenario.sensitivity_b
    q = min(1.0 / b, cap)
    a2 = ordering.groups[1].merged_base_a
    revenue = q * a2 * math.exp(-b * q)
    induced = solve_follower_exponential(scenario, q, tie_break="smaller")
    if induced.served_groups != 1:
        # cap sits on an indifference point; roundoff tipped B to both tasks
        return LeaderSolution(False, None, 0.0, induced, regime=regime, method="closed",
                              diagnostics={"cap": cap, "note": "follower serves both groups at cap"})
    return LeaderSolution(True, q, revenue, induced, 1, regime=regime, method="closed",
                          diagnostics={"cap": cap})


@dataclass(frozen=True)
class LeaderSearchParams:
    q_points: int = 400
    q_upper: float | None = None
    q_lower_frac: float = 1e-4
    refine_rounds: int = 4
    refine_points: int = 33
    dominance_delta: float = 0.0
    follower_method: str = "auto"
    follower_search: SearchParams = SearchParams()


def _default_q_upper(scenario):
    if scenario.is_exponential:
        return 10.0 / scenario.sensitivity_b
    return max(d.p_max for d in scenario.demands)


def leader_revenue_at(scenario, q, ordering=None, search=LeaderSearchParams()):
    """Leader revenue at ``q`` given the follower's anticipated prefix.

    Returns ``(revenue, prefix, piece)`` where ``piece`` is the follower's
    chosen :class:`~genai_duopoly.follower.PieceOptimum`.
    """
    ordering = ordering or rank_tasks(scenario)
    method = search.follower_method
    if method == "auto":
        method = "closed" if scenario.is_exponential else "general"
    if method == "closed":
        pieces = exponential_piece_optima(scenario, q, ordering)
    else:
        pieces = general_piece_optima(scenario, q, search.follower_search, ordering)
    values = [pc.value for pc in pieces]
    k = pick_piece(values, tie_break="smaller")
    chosen = pieces[k]
    if search.dominance_delta > 0 and len(values) > 1:
        runner_up = max(v for i, v in enumerate(values) if i != k)
        if chosen.value - runner_up < search.dominance_delta:
            return 0.0, chosen.prefix, chosen
    if chosen.prefix >= len(ordering):
        return 0.0, chosen.prefix, chosen
    members = [i for g in ordering.groups[chosen.prefix:] for i in g.members]
    revenue = q * sum(scenario.demands[i](q) for i in members)
    return float(revenue), chosen.prefix, chosen


def solve_leader_general(scenario, search=LeaderSearchParams()):
    """Numeric leader optimum for any number of tasks.

    Scans ``q`` on a log grid over ``[q_lower_frac * q_upper, q_upper]``
    (``q_upper`` defaults to ``10/b``; ``1/b`` is always included), then
    zooms into the cell around the best point ``refine_rounds`` times.
    A single task group is always infeasible: B simply matches the leader.
    """
    ordering = rank_tasks(scenario)
    if len(ordering) == 1:
        return LeaderSolution(False, None, 0.0, method="general",
                              diagnostics={"note": "single task group"})
    q_upper = search.q_upper or _default_q_upper(scenario)
    qs = np.geomspace(q_upper * search.q_lower_frac, q_upper, search.q_points)
    if scenario.is_exponential:
        qs = np.unique(np.append(qs, 1.0 / scenario.sensitivity_b))

    def scan(grid):
        return [leader_revenue_at(scenario, float(q), ordering, search) for q in grid]

    rows = scan(qs)
    vals = np.array([r[0] for r in rows])
    j = int(np.argmax(vals))
    best_q, best = float(qs[j]), rows[j]
    step = float(qs[min(j + 1, len(qs) - 1)] - qs[max(j - 1, 0)]) / 2.0
    if best[0] > 0:
        lo, hi = float(qs[max(j - 1, 0)]), float(qs[min(j + 1, len(qs) - 1)])
        for _ in range(search.refine_rounds):
            grid = np.linspace(lo, hi, search.refine_points)
            sub = scan(grid)
            sv = np.array([r[0] for r in sub])
            k = int(np.argmax(sv))
            if sv[k] > best[0]:
                best_q, best = float(grid[k]), sub[k]
            lo = float(grid[max(k - 1, 0)])
            hi = float(grid[min(k + 1, len(grid) - 1)])

    diag = {"grid_step": step, "q_grid": qs, "revenue_curve": vals}
    revenue, prefix, piece = best
    if revenue <= 0:
        return LeaderSolution(False, None, 0.0, method="general", diagnostics=diag)
    induced = PriceSolution(
        piece.price, piece.value, prefix, tuple(sorted(ordering.prefix_members(prefix))), method="general"
    )
    return LeaderSolution(True, best_q, revenue, induced, prefix, method="general", diagnostics=diag)


@dataclass(frozen=True)
class RegionCell:
    ratio: float
    share: float
    regime: Regime


def region_axis(resolution):
    """Cell-centre coordinates ``(i + 1/2) / n`` in (0, 1)."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    return (np.arange(resolution) + 0.5) / resolution


def region_map(resolution=21):
    """Regime of every cell on a ``resolution x resolution`` (ratio, share) grid.

    Each cell is classified on a representative instance with
    ``kappa_1 = 1``, ``b = 1`` and ``a_1 + a_2 = 1``; the classification
    depends on the two coordinates only. Rows run over share, columns over
    ratio.
    """
    axis = region_axis(resolution)
    cells = []
    for share in axis:
        for ratio in axis:
            scen = scenario_from_kappas([1.0, ratio], [share, 1.0 - share], 1.0)
            cells.append(RegionCell(float(ratio), float(share), classify_two_task_regime(scen)))
    return cells

