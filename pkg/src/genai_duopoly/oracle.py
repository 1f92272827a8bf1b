"""Brute-force grid solvers used to check the closed forms.

Nothing here ranks tasks, enumerates closed-form candidates or touches the
Lambert W function: every response is found by evaluating
:func:`~genai_duopoly.market.revenue_split` on a price grid.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
import math
import os

import numpy as np

from .errors import NonPositiveLeaderPrice, ValidationError
from .market import LeaderSolution, PriceSolution, revenue_split, scenario_from_kappas, served_count, served_mask

TIE_RTOL = 1e-9
_LOG_DECADES = 6
_CHUNK_ELEMS = 2_000_000


class TieRule(str, Enum):
    FAVOR_LEADER = "favor_leader"
    FAVOR_FOLLOWER_EXPANSION = "favor_follower_expansion"


def _unit_grid(n):
    """Mixed linear/log grid on (0, 1] with ``n`` points, sorted, 1 included."""
    n_lin = n // 2
    n_log = n - n_lin
    lin = np.linspace(1.0 / n_lin, 1.0, n_lin)
    log = np.logspace(-_LOG_DECADES, 0.0, n_log)
    return np.unique(np.concatenate([lin, log]))


def _price_grid(scenario, q, n):
    kmax = float(scenario.kappas.max())
    top = kmax * q
    pts = [_unit_grid(n) * top, scenario.kappas * q]
    if scenario.is_exponential and 1.0 / scenario.sensitivity_b <= top:
        pts.append([1.0 / scenario.sensitivity_b])
    return np.unique(np.concatenate(pts))


def follower_oracle(scenario, q, grid_points=10**5):
    """Follower best response by exhaustive evaluation on a price grid.

    The grid mixes uniform and log-spaced points over ``(0, kappa_max q]``
    and includes every ``kappa_t q`` and (for exponential demand) ``1/b``
    exactly. Ties go to the lowest price.
    """
    if not (q > 0 and math.isfinite(q)):
        raise NonPositiveLeaderPrice(f"leader price must be > 0, got {q!r}")
    if grid_points < 100:
        raise ValidationError("follower_oracle needs grid_points >= 100")
    prices = _price_grid(scenario, float(q), grid_points)
    _, rev_b = revenue_split(scenario, prices, q)
    j = int(np.argmax(rev_b))
    p = float(prices[j])
    served = tuple(int(i) for i in np.flatnonzero(served_mask(scenario, p, q)))
    return PriceSolution(
        price=p,
        revenue=float(rev_b[j]),
        served_groups=None,
        served_task_indices=served,
        method="oracle",
        diagnostics={"grid_points": len(prices)},
    )


def _leader_q_grid(scenario, n, q_upper):
    if q_upper is None:
        if scenario.is_exponential:
            q_upper = 10.0 / scenario.sensitivity_b
        else:
            q_upper = max(d.p_max for d in scenario.demands)
    pts = [_unit_grid(n) * q_upper]
    if scenario.is_exponential:
        pts.append([1.0 / scenario.sensitivity_b])
    return np.unique(np.concatenate(pts))


def _leader_rows(scenario, qs, u_grid, tie_rule):
    """Leader revenue at each ``q`` plus the follower response it induces.

    Follower prices are ``u_grid * q`` plus ``1/b`` (exponential demand,
    masked out where it exceeds the top price).
    """
    prices = qs[:, None] * u_grid[None, :]
    valid = np.ones_like(prices, dtype=bool)
    if scenario.is_exponential:
        peak = 1.0 / scenario.sensitivity_b
        prices = np.concatenate([prices, np.full((len(qs), 1), peak)], axis=1)
        valid = np.concatenate([valid, (peak <= qs * u_grid[-1])[:, None]], axis=1)
    rev_a, rev_b = revenue_split(scenario, prices, qs[:, None])
    rev_b = np.where(valid, rev_b, -np.inf)
    best = rev_b.max(axis=1, keepdims=True)
    near = rev_b >= best - TIE_RTOL * best
    n_served = served_count(scenario, prices, qs[:, None])
    if tie_rule is TieRule.FAVOR_LEADER:
        target = np.where(near, n_served, np.iinfo(np.int64).max).min(axis=1, keepdims=True)
    else:
        target = np.where(near, n_served, -1).max(axis=1, keepdims=True)
    pick = near & (n_served == target)
    # among equally sized responses, the best-revenue one (lowest index on ties)
    j = np.argmax(np.where(pick, rev_b, -np.inf), axis=1)
    rows = np.arange(len(qs))
    return rev_a[rows, j], prices[rows, j], rev_b[rows, j]


def leader_oracle(scenario, q_grid=2000, p_grid=10**4, tie_rule=TieRule.FAVOR_LEADER, q_upper=None,
                  refine_rounds=3, refine_points=101):
    """Leader optimum by nested grid search.

    For each leader price on a mixed grid over ``(0, q_upper]`` (default
    ``10/b``, with ``1/b`` inserted), the follower's response is found by
    grid search; among responses within 1e-9 relative revenue of the best,
    ``tie_rule`` picks the one serving the fewest (``FAVOR_LEADER``) or the
    most (``FAVOR_FOLLOWER_EXPANSION``) tasks. The leader earns
    ``q * sum D_t(q)`` over the tasks B does not serve.

    Leader revenue jumps to zero where B starts to undercut, so a plain grid
    is only first-order accurate there. When the best grid revenue is
    positive, the two cells around it are re-gridded with ``refine_points``
    uniform points, ``refine_rounds`` times. ``diagnostics["q_grid"]`` and
    ``["revenue_curve"]`` hold the coarse scan only.
    """
    tie_rule = TieRule(tie_rule)
    if q_grid < 100 or p_grid < 100:
        raise ValidationError("leader_oracle needs q_grid >= 100 and p_grid >= 100")
    qs = _leader_q_grid(scenario, q_grid, q_upper)
    kappas = scenario.kappas
    u_grid = np.unique(np.concatenate([_unit_grid(p_grid) * kappas.max(), kappas]))
    chunk = max(1, _CHUNK_ELEMS // (len(u_grid) * scenario.num_tasks))

    def scan(grid):
        parts = [_leader_rows(scenario, grid[i:i + chunk], u_grid, tie_rule) for i in range(0, len(grid), chunk)]
        return tuple(np.concatenate(x) for x in zip(*parts))

    curve, follower_p, follower_rev = scan(qs)
    j = int(np.argmax(curve))
    diag = {"tie_rule": tie_rule, "q_grid": qs, "revenue_curve": curve}
    if curve[j] <= 0.0:
        return LeaderSolution(False, None, 0.0, method="oracle", diagnostics=diag)
    best = (float(qs[j]), float(curve[j]), float(follower_p[j]), float(follower_rev[j]))
    grid = qs
    for _ in range(refine_rounds):
        lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, len(grid) - 1)]
        grid = np.linspace(lo, hi, refine_points)
        rev, fp, frev = scan(grid)
        j = int(np.argmax(rev))
        if rev[j] > best[1]:
            best = (float(grid[j]), float(rev[j]), float(fp[j]), float(frev[j]))
    q, revenue, p, p_rev = best
    served = tuple(int(i) for i in np.flatnonzero(served_mask(scenario, p, q)))
    induced = PriceSolution(p, p_rev, None, served, method="oracle")
    return LeaderSolution(True, q, revenue, induced, method="oracle", diagnostics=diag)


def worker_count():
    """Parallelism cap from ``GENAI_DUOPOLY_THREADS`` (default: CPU count)."""
    env = os.environ.get("GENAI_DUOPOLY_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class CellCertificate:
    ratio: float
    share: float
    revenue_favor_leader: float
    revenue_favor_follower: float


def certify_cell(ratio, share, q_grid=200, p_grid=1000):
    """Oracle leader revenue for one two-task cell under both tie rules.

    Representative instance: ``kappa = (1, ratio)``, ``a = (share, 1 - share)``,
    ``b = 1``.
    """
    scen = scenario_from_kappas([1.0, ratio], [share, 1.0 - share], 1.0)
    fl = leader_oracle(scen, q_grid, p_grid, TieRule.FAVOR_LEADER)
    ff = leader_oracle(scen, q_grid, p_grid, TieRule.FAVOR_FOLLOWER_EXPANSION)
    return CellCertificate(ratio, share, fl.revenue_a, ff.revenue_a)


def certify_cells(cells, q_grid=200, p_grid=1000, workers=None):
    """:func:`certify_cell` over ``(ratio, share)`` pairs, results in input order."""
    workers = workers or worker_count()
    cells = list(cells)
    if workers == 1:
        return [certify_cell(r, s, q_grid, p_grid) for r, s in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: certify_cell(c[0], c[1], q_grid, p_grid), cells))
