"""Two-task regime map over (competitive-ratio ratio, demand share).

Writes ``figure3_regions.csv`` and optionally certifies every cell with the
brute-force leader oracle (``--certify``, ~10 s at 21x21 on one core).

    python3 scripts/reproduce_figure3.py --resolution 41 --out-dir out/
"""

import argparse
import io
from pathlib import Path

import numpy as np

from genai_duopoly.cli import main
from genai_duopoly.leader import RegimeKind, lambert_bound, region_map
from genai_duopoly.oracle import certify_cells


def parse_args():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=int, default=21)
    ap.add_argument("--out-dir", default=".")
    ap.add_argument("--certify", action="store_true")
    return ap.parse_args()


def plot(cells, n, png_path):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping plot")
        return
    codes = {RegimeKind.INFEASIBLE: 0, RegimeKind.LOW_PRICE: 1, RegimeKind.HIGH_PRICE: 2}
    img = np.array([codes[c.regime.kind] for c in cells]).reshape(n, n)
    xs = np.linspace(1e-3, 1 - 1e-3, 400)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(img, origin="lower", extent=(0, 1, 0, 1), cmap="Pastel1", vmin=0, vmax=8)
    ax.plot(xs, xs, "k", lw=1, label="ratio = share")
    ax.plot([lambert_bound(x) for x in xs], xs, "k--", lw=1, label="ratio = -W0(-share/e)")
    ax.set_xlabel("kappa_2 / kappa_1")
    ax.set_ylabel("a_1 / (a_1 + a_2)")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)


def run():
    args = parse_args()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "figure3_regions.csv"
    report = io.StringIO()
    main(["region", "--out", str(csv_path), "--resolution", str(args.resolution)], out=report)
    print(report.getvalue(), end="")
    cells = region_map(args.resolution)
    if args.certify:
        certs = certify_cells([(c.ratio, c.share) for c in cells])
        bad = 0
        for c, cert in zip(cells, certs):
            top = max(cert.revenue_favor_leader, cert.revenue_favor_follower)
            if c.regime.kind is RegimeKind.INFEASIBLE:
                bad += top > 1e-6
            else:
                bad += cert.revenue_favor_leader <= 1e-3
        print(f"certified={len(cells)} disagreements={bad}")
    plot(cells, args.resolution, out_dir / "figure3.png")


if __name__ == "__main__":
    run()
