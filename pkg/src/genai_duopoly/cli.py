"""Command-line interface.

Results are printed as ``key=value`` lines. Exit codes: 0 success, 1
infeasible leader problem, 2 invalid input, 3 closed form and oracle
disagree (``oracle-check``).
"""

import argparse
import io
import math
import sys

import numpy as np

from .errors import DuopolyError
from .follower import follower_price_bounds, solve_follower
from .leader import (
    LeaderSearchParams,
    RegimeKind,
    region_map,
    solve_leader_general,
    solve_leader_two_task,
)
from .market import PriceUnit, rank_tasks, revenue_by_task
from .oracle import TieRule, follower_oracle, leader_oracle
from .interaction import competitive_ratio
from .scenario_io import parse_scenario

EXIT_OK, EXIT_INFEASIBLE, EXIT_INVALID, EXIT_MISMATCH = 0, 1, 2, 3

FOLLOWER_RTOL = 1e-3


def fmt(x):
    """Fixed 12-significant-digit rendering used in every output."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def emit(stream, /, **pairs):
    for k, v in pairs.items():
        v = ",".join(fmt(x) for x in v) if isinstance(v, (list, tuple)) else fmt(v)
        stream.write(f"{k}={v}\n")


def _task_names(scenario, indices):
    return [scenario.tasks[i].name for i in indices]


def cmd_follower(args, out):
    scen = parse_scenario(args.scenario)
    kwargs = {"grid_points": args.grid} if args.method == "oracle" else {}
    sol = solve_follower(scen, args.leader_price, args.method, **kwargs)
    emit(out, method=args.method, leader_price=args.leader_price, price=sol.price,
         revenue=sol.revenue, served_tasks=_task_names(scen, sol.served_task_indices))
    if sol.served_groups is not None:
        emit(out, served_groups=sol.served_groups)
    if scen.is_exponential:
        lo, hi = follower_price_bounds(scen, args.leader_price)
        top = rank_tasks(scen).groups[0].kappa * args.leader_price
        emit(out, bound_lower=lo, bound_upper=hi, bound_top_ratio=top)
    return EXIT_OK


def _leader_report(scen, sol, out):
    emit(out, feasible=sol.feasible, method=sol.method)
    if sol.regime is not None:
        r = sol.regime
        emit(out, regime=r.kind.value, kappa_ratio=r.ratio, demand_share=r.demand_share,
             lambert_bound=r.lambert_bound)
    if not sol.feasible:
        if sol.regime is not None and sol.regime.kind is RegimeKind.INFEASIBLE:
            emit(out, reason="kappa_ratio_not_below_demand_share")
        else:
            emit(out, reason="follower_serves_all_tasks")
        emit(out, revenue_a=0.0)
        return EXIT_INFEASIBLE
    emit(out, price_q=sol.price_q, revenue_a=sol.revenue_a)
    f = sol.induced_follower
    emit(out, follower_price=f.price, follower_revenue=f.revenue,
         follower_tasks=_task_names(scen, f.served_task_indices),
         leader_tasks=_task_names(scen, [i for i in range(scen.num_tasks)
                                         if i not in f.served_task_indices]))
    return EXIT_OK


def cmd_leader(args, out):
    scen = parse_scenario(args.scenario)
    if args.dominance_delta and args.method != "general":
        raise DuopolyError("--dominance-delta applies to --method general only")
    if args.method == "closed":
        sol = solve_leader_two_task(scen)
    elif args.method == "general":
        sol = solve_leader_general(scen, LeaderSearchParams(dominance_delta=args.dominance_delta))
    else:
        sol = leader_oracle(scen, args.q_grid, args.grid, TieRule(args.tie_rule))
    return _leader_report(scen, sol, out)


def curve_table(scenario, q, points=301):
    """Rows ``(price, per-task revenue..., total, active_pieces, breakpoint)``."""
    ordering = rank_tasks(scenario)
    breaks = sorted({g.kappa * q for g in ordering.groups})
    top = max(breaks)
    prices = np.unique(np.concatenate([np.linspace(0.0, 1.1 * top, points), breaks]))
    _, rev_b = revenue_by_task(scenario, prices, q)
    rows = []
    for p, r in zip(prices, rev_b):
        active = sum(1 for g in ordering.groups if p <= g.kappa * q)
        rows.append((float(p), *map(float, r), float(r.sum()), active, p if p in breaks else None))
    return rows, breaks


def write_csv(path, header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(x) for x in row) + "\n")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def cmd_curve(args, out):
    scen = parse_scenario(args.scenario)
    rows, breaks = curve_table(scen, args.leader_price, args.points)
    header = ["price", *(f"revenue_task_{t.name}" for t in scen.tasks),
              "revenue_total", "active_pieces", "breakpoint"]
    write_csv(args.out, header, rows)
    emit(out, rows=len(rows), breakpoints=breaks, out=args.out)
    return EXIT_OK


def cmd_region(args, out):
    cells = region_map(args.resolution)
    write_csv(args.out, ["kappa_ratio", "demand_share", "regime"],
              [(c.ratio, c.share, c.regime.kind.value) for c in cells])
    counts = {k.value: sum(c.regime.kind is k for c in cells) for k in RegimeKind}
    emit(out, cells=len(cells), **counts, out=args.out)
    return EXIT_OK


def cmd_oracle_check(args, out):
    scen = parse_scenario(args.scenario)
    ok = True
    if args.leader_price:
        qs = [args.leader_price]
    elif scen.is_exponential:
        qs = list(np.geomspace(0.1, 10.0, 9) / scen.sensitivity_b)
    else:
        qs = [1.0]
    method = "closed" if scen.is_exponential else "general"
    for q in qs:
        mine = solve_follower(scen, float(q), method)
        ref = follower_oracle(scen, float(q), args.grid)
        err = abs(mine.revenue - ref.revenue) / max(abs(ref.revenue), 1e-300)
        good = err <= FOLLOWER_RTOL and mine.revenue >= ref.revenue * (1 - FOLLOWER_RTOL)
        ok &= good
        out.write(f"check=follower method={method} q={fmt(q)} price={fmt(mine.price)} "
                  f"oracle_price={fmt(ref.price)} revenue={fmt(mine.revenue)} "
                  f"oracle_revenue={fmt(ref.revenue)} rel_err={fmt(err)} ok={fmt(good)}\n")
    if scen.is_exponential and len(rank_tasks(scen)) == 2:
        closed = solve_leader_two_task(scen)
        ref = leader_oracle(scen, args.q_grid, max(100, args.grid // 10))
        qs_grid = ref.diagnostics["q_grid"]
        step = float(np.max(np.diff(qs_grid)))
        good = closed.feasible == ref.feasible
        if good and closed.feasible:
            good = abs(closed.price_q - ref.price_q) <= 2 * step
        ok &= good
        out.write(f"check=leader feasible={fmt(closed.feasible)} oracle_feasible={fmt(ref.feasible)} "
                  f"q={fmt(closed.price_q)} oracle_q={fmt(ref.price_q)} grid_step={fmt(step)} "
                  f"ok={fmt(good)}\n")
    emit(out, all_ok=ok)
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_tokens_convert(args, out):
    scen = parse_scenario(args.scenario)
    per_token = scen.kappas if scen.price_unit is PriceUnit.PER_TOKEN else None
    for i, t in enumerate(scen.tasks):
        base = competitive_ratio(scen.interaction_for(i), t.score_b, t.score_a)
        eff = base * (t.mean_tokens_a / t.mean_tokens_b) if per_token is None else per_token[i]
        out.write(f"task={t.name} kappa_per_prompt={fmt(base)} mean_tokens_b={fmt(t.mean_tokens_b)} "
                  f"mean_tokens_a={fmt(t.mean_tokens_a)} kappa_effective={fmt(eff)} "
                  f"identical={fmt(eff == base)}\n")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="genai-duopoly", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("follower", help="follower best response to a leader price")
    p.add_argument("--scenario", required=True)
    p.add_argument("--leader-price", type=float, required=True)
    p.add_argument("--method", choices=["closed", "general", "oracle"], default="closed")
    p.add_argument("--grid", type=int, default=10**5, help="oracle price grid size")
    p.set_defaults(func=cmd_follower)

    p = sub.add_parser("leader", help="leader optimum anticipating the follower")
    p.add_argument("--scenario", required=True)
    p.add_argument("--method", choices=["closed", "general", "oracle"], default="closed")
    p.add_argument("--dominance-delta", type=float, default=0.0)
    p.add_argument("--tie-rule", choices=[r.value for r in TieRule], default=TieRule.FAVOR_LEADER.value)
    p.add_argument("--grid", type=int, default=2000, help="oracle follower price grid")
    p.add_argument("--q-grid", type=int, default=400, help="oracle leader price grid")
    p.set_defaults(func=cmd_leader)

    p = sub.add_parser("curve", help="follower revenue curve as CSV")
    p.add_argument("--scenario", required=True)
    p.add_argument("--leader-price", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--points", type=int, default=301)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("region", help="two-task regime map as CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--resolution", type=int, default=21)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("oracle-check", help="compare closed forms with grid oracles")
    p.add_argument("--scenario", required=True)
    p.add_argument("--grid", type=int, default=10**5)
    p.add_argument("--q-grid", type=int, default=400)
    p.add_argument("--leader-price", type=float, default=None)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("tokens-convert", help="effective per-token competitive ratios")
    p.add_argument("--scenario", required=True)
    p.set_defaults(func=cmd_tokens_convert)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "leader_price") and args.leader_price is not None:
            if not (args.leader_price > 0 and math.isfinite(args.leader_price)):
                raise DuopolyError(f"--leader-price must be > 0, got {args.leader_price}")
        return args.func(args, out)
    except DuopolyError as exc:
        emit(out, error=type(exc).__name__, message=str(exc).replace("\n", " "))
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
