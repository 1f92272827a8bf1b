"""Firm B's best response to a leader price ``q``.

B's problem splits into one sub-problem per prefix ``t`` of the task
ordering: serve groups ``1..t`` at a price in ``(kappa_{t+1} q, kappa_t q]``.
:func:`solve_follower_general` searches each piece numerically and works
for any demand; :func:`solve_follower_exponential` uses the closed-form
candidates available when demand is exponential.
"""

from dataclasses import dataclass
import math
import warnings

import numpy as np

from .errors import NonExponentialDemand, NonPositiveLeaderPrice, SearchBudgetExceeded
from .market import PriceSolution, rank_tasks

#: Piece revenues within this relative gap count as a tie.
REVENUE_TIE_RTOL = 1e-9

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SearchParams:
    grid_points: int = 64
    rel_tol: float = 1e-9
    max_iter: int = 200
    open_end_clip: float = 1e-12


@dataclass(frozen=True)
class PieceOptimum:
    """Best value of one prefix sub-problem.

    ``attained`` is False when the supremum sits at the open lower end
    (decreasing revenue above the peak); such a piece never wins outright.
    """

    prefix: int
    price: float
    value: float
    attained: bool = True


def _check_q(q):
    if not (isinstance(q, (int, float, np.floating)) and q > 0 and math.isfinite(q)):
        raise NonPositiveLeaderPrice(f"leader price must be > 0, got {q!r}")
    return float(q)


def _require_exponential(scenario):
    if not scenario.is_exponential:
        raise NonExponentialDemand("closed form needs exponential demand with shared sensitivity")


def piece_bounds(ordering, q):
    """``(lo, hi)`` price interval of each prefix piece, lo open and hi closed."""
    return [
        (ordering.kappa_with_sentinel(t + 1) * q, ordering.groups[t].kappa * q)
        for t in range(len(ordering))
    ]


def pick_piece(values, tie_break="larger"):
    """Index of the best value; near-ties go to the larger or smaller prefix."""
    best = max(values)
    ties = [i for i, v in enumerate(values) if v >= best - REVENUE_TIE_RTOL * abs(best)]
    return ties[-1] if tie_break == "larger" else ties[0]


def _solution(scenario, ordering, t, price, value, method, **diag):
    return PriceSolution(
        price=float(price),
        revenue=float(value),
        served_groups=t,
        served_task_indices=tuple(sorted(ordering.prefix_members(t))),
        method=method,
        diagnostics=diag,
    )


def exponential_piece_optima(scenario, q, ordering=None):
    """Closed-form optimum of every prefix piece under exponential demand."""
    _require_exponential(scenario)
    q = _check_q(q)
    ordering = ordering or rank_tasks(scenario)
    b = scenario.sensitivity_b
    peak = 1.0 / b
    out = []
    for t, (lo, hi) in enumerate(piece_bounds(ordering, q)):
        a_bar = ordering.prefix_base_a(t + 1)
        if hi >= peak > lo:
            out.append(PieceOptimum(t + 1, peak, a_bar * math.exp(-1.0) / b))
        elif hi < peak:
            out.append(PieceOptimum(t + 1, hi, hi * a_bar * math.exp(-b * hi)))
        else:
            out.append(PieceOptimum(t + 1, lo, lo * a_bar * math.exp(-b * lo), attained=False))
    return out


def solve_follower_exponential(scenario, q, tie_break="larger"):
    """Best response by enumerating the closed-form candidates.

    Let ``t*`` be the piece containing the zero-gradient price ``1/b``.
    Candidates are ``a_bar(t*) e^{-1} / b`` and the upper-boundary revenues
    of every piece after ``t*``; without a ``t*`` (``1/b > kappa_1 q``)
    every upper boundary is a candidate. Pieces before ``t*`` are dominated
    by their successor and skipped.

    ``tie_break`` decides near-equal candidates: ``"larger"`` serves more
    tasks (the default), ``"smaller"`` fewer (what a leader may count on).
    """
    _require_exponential(scenario)
    q = _check_q(q)
    ordering = rank_tasks(scenario)
    b = scenario.sensitivity_b
    peak = 1.0 / b
    bounds = piece_bounds(ordering, q)

    t_star = None
    for t, (lo, hi) in enumerate(bounds):
        if hi >= peak > lo:
            t_star = t
            break

    cands = []  # (prefix, price, revenue)
    if t_star is not None:
        cands.append((t_star + 1, peak, ordering.prefix_base_a(t_star + 1) * math.exp(-1.0) / b))
        first_boundary = t_star + 1
    else:
        first_boundary = 0
    for t in range(first_boundary, len(ordering)):
        hi = bounds[t][1]
        cands.append((t + 1, hi, hi * ordering.prefix_base_a(t + 1) * math.exp(-b * hi)))

    k = pick_piece([c[2] for c in cands], tie_break)
    prefix, price, value = cands[k]
    return _solution(
        scenario, ordering, prefix, price, value, "closed",
        t_star=None if t_star is None else t_star + 1,
        candidates=tuple(cands),
    )


def _golden_max(f, lo, hi, tol, max_iter):
    """Golden-section maximisation on ``[lo, hi]``; returns ``(x, f(x), converged)``."""
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
    else:
        return (c, fc, False) if fc >= fd else (d, fd, False)
    return (c, fc, True) if fc >= fd else (d, fd, True)


def numeric_piece_optimum(scenario, ordering, t, q, search=SearchParams()):
    """Maximise ``p * sum_{s<=t} D_s(p)`` over piece ``t`` (1-based) numerically.

    The piece is seeded on a uniform grid plus both ends, then the best seed
    is refined by golden section inside its neighbouring grid cells.
    """
    lo, hi = ordering.kappa_with_sentinel(t) * q, ordering.groups[t - 1].kappa * q
    lo = lo * (1.0 + search.open_end_clip) if lo > 0 else hi * search.open_end_clip
    members = ordering.prefix_members(t)
    demands = [scenario.demands[i] for i in members]

    def revenue(p):
        return p * sum(d(p) for d in demands)

    seeds = np.unique(np.concatenate([np.linspace(lo, hi, search.grid_points), [lo, hi]]))
    vals = np.array([revenue(float(p)) for p in seeds])
    j = int(np.argmax(vals))
    best_p, best_v = float(seeds[j]), float(vals[j])

    left = float(seeds[max(j - 1, 0)])
    right = float(seeds[min(j + 1, len(seeds) - 1)])
    tol = search.rel_tol * ordering.groups[0].kappa * q
    converged = True
    if right - left > tol:
        x, fx, converged = _golden_max(revenue, left, right, tol, search.max_iter)
        if fx > best_v:
            best_p, best_v = x, fx
    if not converged:
        warnings.warn(
            f"golden-section search on piece {t} hit max_iter={search.max_iter}",
            SearchBudgetExceeded,
            stacklevel=2,
        )
    return PieceOptimum(t, best_p, best_v)


def general_piece_optima(scenario, q, search=SearchParams(), ordering=None):
    q = _check_q(q)
    ordering = ordering or rank_tasks(scenario)
    return [numeric_piece_optimum(scenario, ordering, t, q, search) for t in range(1, len(ordering) + 1)]


def solve_follower_general(scenario, q, search=SearchParams(), tie_break="larger"):
    """Best response by numeric search over every prefix piece (any demand)."""
    q = _check_q(q)
    ordering = rank_tasks(scenario)
    pieces = general_piece_optima(scenario, q, search, ordering)
    k = pick_piece([pc.value for pc in pieces], tie_break)
    pc = pieces[k]
    return _solution(
        scenario, ordering, pc.prefix, pc.price, pc.value, "general",
        piece_values=tuple(x.value for x in pieces),
    )


def solve_follower(scenario, q, method="closed", **kwargs):
    if method == "closed":
        return solve_follower_exponential(scenario, q, **kwargs)
    if method == "general":
        return solve_follower_general(scenario, q, **kwargs)
    if method == "oracle":
        from .oracle import follower_oracle

        return follower_oracle(scenario, q, **kwargs)
    raise ValueError(f"unknown method {method!r}")


def follower_price_bounds(scenario, q):
    """``(kappa_T q, 1/b)``: the smallest piece boundary and the revenue peak.

    The optimum lies between them; when ``kappa_T q > 1/b`` the pair is
    reversed and ``min``/``max`` of it still brackets the optimum.
    """
    _require_exponential(scenario)
    q = _check_q(q)
    ordering = rank_tasks(scenario)
    return ordering.groups[-1].kappa * q, 1.0 / scenario.sensitivity_b
