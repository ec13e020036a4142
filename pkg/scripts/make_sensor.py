"""Write a ground-truth calibration file and a deliberately wrong Workbench prior.

    python scripts/make_sensor.py configs/ --seed 0 --workbench-error 0.1
"""

import argparse
from pathlib import Path

import numpy as np

from ftcal import io, scenarios
from ftcal.core import CalibrationModel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workbench-error", type=float, default=0.1,
                    help="relative elementwise perturbation of the Workbench matrix")
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    truth = scenarios.random_true_model(rng)
    wb = truth.matrix * (1 + args.workbench_error * rng.standard_normal((6, 6)))
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_calibration(io.CalibrationFile(truth), out / "truth.cal")
    io.write_calibration(io.CalibrationFile(CalibrationModel(wb, np.zeros(6), "Workbench")), out / "workbench.cal")
    print(f"wrote {out / 'truth.cal'} and {out / 'workbench.cal'}")


if __name__ == "__main__":
    main()
