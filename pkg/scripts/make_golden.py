"""Regenerate the frozen oracle outputs under tests/golden/.

Run from the repository root:

    python3 scripts/make_golden.py

The tests compare against these files, so only rerun after an intentional
change to the oracle or the CSV format.
"""

import io
import json
from pathlib import Path

from genai_duopoly.cli import main
from genai_duopoly.market import scenario_from_kappas
from genai_duopoly.oracle import TieRule, follower_oracle, leader_oracle
from genai_duopoly.scenario_io import parse_scenario

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"

LEADER_CASES = {
    "figure2": ("scenarios/figure2.json", None),
    "two_task_high_price": ("scenarios/two_task_high_price.json", None),
    "two_task_infeasible": ("scenarios/two_task_infeasible.json", None),
    "low_price": (None, ([2.0, 1.0], [300.0, 100.0], 0.5)),
    "three_task_feasible": (None, ([3.0, 1.0, 0.2], [100.0, 100.0, 300.0], 1.0)),
}


def load(path, params):
    return parse_scenario(ROOT / path) if path else scenario_from_kappas(*params)


def leader_record(scen, rule):
    sol = leader_oracle(scen, 2000, 10**4, rule)
    return {
        "feasible": sol.feasible,
        "price_q": sol.price_q,
        "revenue_a": sol.revenue_a,
        "follower_tasks": list(sol.induced_follower.served_task_indices) if sol.feasible else None,
    }


def main_golden():
    GOLDEN.mkdir(parents=True, exist_ok=True)
    main(["curve", "--scenario", str(ROOT / "scenarios/figure2.json"), "--leader-price", "1",
          "--out", str(GOLDEN / "figure2_curve.csv")], out=io.StringIO())

    out = {"grid": {"q_grid": 2000, "p_grid": 10**4, "follower_grid": 10**5}, "leader": {}, "follower": {}}
    for name, (path, params) in LEADER_CASES.items():
        scen = load(path, params)
        out["leader"][name] = {rule.value: leader_record(scen, rule) for rule in TieRule}
        print(name, out["leader"][name][TieRule.FAVOR_LEADER.value])
    fig2 = parse_scenario(ROOT / "scenarios/figure2.json")
    for q in (0.5, 1.0, 2.0):
        sol = follower_oracle(fig2, q, 10**5)
        out["follower"][f"figure2_q{q:g}"] = {"q": q, "price": sol.price, "revenue": sol.revenue,
                                             "served": list(sol.served_task_indices)}
    (GOLDEN / "oracle_results.json").write_text(json.dumps(out, indent=2) + "\n")


if __name__ == "__main__":
    main_golden()
