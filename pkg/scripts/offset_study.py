"""Monte-Carlo accuracy of the in-situ offset estimator versus raw noise level.

    python scripts/offset_study.py --trials 50
"""

import argparse

import numpy as np

from ftcal import scenarios as sc
from ftcal.errors import CalibrationError
from ftcal.estimation import estimate_offset_insitu


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--orientations", type=int, default=60)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    truth = sc.random_true_model(rng)
    body = sc.random_body(rng)
    spec = sc.grid_spec(args.orientations, seed=args.seed)
    target = -np.linalg.solve(truth.matrix, truth.offset)
    scale = sc.noiseless_raw_scale(sc.make_dataset(body, spec, truth, "c"), truth)

    print(f"{'noise %':>8} {'mean err/sigma':>15} {'max err/sigma':>14} {'failures':>9}")
    for pct in (0.1, 0.5, 1.0, 2.0, 5.0):
        sigma = pct / 100 * scale
        ratios, failures = [], 0
        for s in range(args.trials):
            d = sc.make_dataset(body, spec, truth, "g", sigma, s)
            try:
                ratios.append(np.linalg.norm(estimate_offset_insitu(d).offset - target) / sigma)
            except CalibrationError:
                failures += 1
        mean = np.mean(ratios) if ratios else float("nan")
        worst = np.max(ratios) if ratios else float("nan")
        print(f"{pct:8.1f} {mean:15.3f} {worst:14.3f} {failures:9d}")


if __name__ == "__main__":
    main()
