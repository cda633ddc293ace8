#!/usr/bin/env python3
"""Run every sweep config under configs/ and write CSVs to results/.

    python scripts/run_sweeps.py [--trials N] [--seed S]
"""

import argparse
from pathlib import Path

from hetnet_outage import cli

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--out-dir", type=Path, default=ROOT / "results")
    args = ap.parse_args()
    args.out_dir.mkdir(exist_ok=True)
    for cfg in sorted((ROOT / "configs").glob("*_sweep*.toml")):
        out = args.out_dir / (cfg.stem + ".csv")
        argv = ["sweep", "--config", str(cfg), "--out", str(out)]
        if args.trials is not None:
            argv += ["--trials", str(args.trials)]
        if args.seed is not None:
            argv += ["--seed", str(args.seed)]
        code = cli.main(argv)
        print(f"{cfg.name}: exit {code} -> {out}")


if __name__ == "__main__":
    main()
