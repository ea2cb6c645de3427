"""Regime map of the peak shift over a (delta, linewidth) grid.

Writes regime.sweep.csv and prints a small table of max|shift| / |delta|.
"""
import argparse
from pathlib import Path

import numpy as np

from stark_packet import ScenarioConfig, run_sweep
from stark_packet.runner import write_sweep_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-o", "--outdir", default="out")
    ap.add_argument("--serial", action="store_true")
    args = ap.parse_args()
    deltas = [0.5, 1.0, 3.0, 5.0]
    widths = list(np.round(np.geomspace(0.1, 5.0, 6), 3))
    rows = run_sweep(ScenarioConfig(), deltas, widths, parallel=not args.serial)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(rows, out / "regime.sweep.csv")
    print("delta \\ linewidth " + " ".join(f"{w:>7g}" for w in widths))
    for i, d in enumerate(deltas):
        cells = rows[i * len(widths):(i + 1) * len(widths)]
        print(f"{d:>17g} " + " ".join(f"{r['max_abs_shift'] / d:>7.2f}" for r in cells))


if __name__ == "__main__":
    main()
