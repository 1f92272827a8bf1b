"""Follower revenue against its own price for the three-task example.

Writes ``figure2_curve.csv`` (same format as ``genai-duopoly curve``) and,
if matplotlib is available, ``figure2.png``.

    python3 scripts/reproduce_figure2.py --out-dir out/
"""

import argparse
import io
from pathlib import Path

from genai_duopoly.cli import main
from genai_duopoly.follower import solve_follower_exponential
from genai_duopoly.scenario_io import parse_scenario

ROOT = Path(__file__).resolve().parents[1]


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scenario", default=str(ROOT / "scenarios" / "figure2.json"))
    ap.add_argument("--leader-price", type=float, default=1.0)
    ap.add_argument("--out-dir", default=".")
    ap.add_argument("--points", type=int, default=601)
    return ap.parse_args()


def plot(csv_path, png_path, breaks):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        import numpy as np
    except ImportError:
        print("matplotlib not installed; skipping plot")
        return
    data = np.genfromtxt(csv_path, delimiter=",", names=True)
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in data.dtype.names:
        if name.startswith("revenue_task_"):
            ax.plot(data["price"], data[name], lw=1, label=name.removeprefix("revenue_task_"))
    ax.plot(data["price"], data["revenue_total"], "k", lw=2, label="total")
    for x in breaks:
        ax.axvline(x, color="grey", ls=":", lw=0.8)
    ax.set_xlabel("follower price p")
    ax.set_ylabel("follower revenue")
    ax.legend()
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)


def run():
    args = parse_args()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "figure2_curve.csv"
    report = io.StringIO()
    main(["curve", "--scenario", args.scenario, "--leader-price", str(args.leader_price),
          "--out", str(csv_path), "--points", str(args.points)], out=report)
    print(report.getvalue(), end="")
    sol = solve_follower_exponential(parse_scenario(args.scenario), args.leader_price)
    print(f"optimum price={sol.price:.12g} revenue={sol.revenue:.12g} served_groups={sol.served_groups}")
    breaks = [float(x) for x in report.getvalue().split("breakpoints=")[1].split()[0].split(",")]
    plot(csv_path, out_dir / "figure2.png", breaks)


if __name__ == "__main__":
    run()
