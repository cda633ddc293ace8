#!/usr/bin/env python3
"""Refit the 4-term exponential series for I0 and rewrite the frozen data file.

    python scripts/fit_bessel_series.py [--check]

With --check the fit is compared to the shipped file and nothing is written.
"""

import argparse
import sys
from importlib import resources

import numpy as np

from hetnet_outage.bessel import DEFAULT_SERIES_FILE, default_series, fit_bessel_series, series_max_rel_error


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--terms", type=int, default=4)
    ap.add_argument("--x-max", type=float, default=20.0)
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()

    series = fit_bessel_series(args.terms, args.x_max)
    print(f"max relative error {series_max_rel_error(series):.3e}, sum alpha {sum(series.alphas):.6f}")
    for a, b in zip(series.alphas, series.betas):
        print(f"  alpha {a: .10f}  beta {b: .10f}")
    if args.check:
        shipped = default_series()
        same = np.allclose(series.alphas, shipped.alphas, rtol=1e-6) and np.allclose(series.betas, shipped.betas, rtol=1e-6)
        print("shipped file matches" if same else "shipped file differs")
        return 0 if same else 1
    target = resources.files("hetnet_outage").joinpath("data", DEFAULT_SERIES_FILE)
    with resources.as_file(target) as path:
        path.write_text(series.to_text())
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
