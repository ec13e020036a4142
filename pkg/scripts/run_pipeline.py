"""Run the full command-line chain on the shipped configs.

    python scripts/run_pipeline.py out/
"""

import argparse
import shutil
from pathlib import Path

from ftcal.cli import main as ftcal

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir")
    args = ap.parse_args()

    out = Path(args.outdir)
    shutil.copytree(CONFIGS, out, dirs_exist_ok=True)
    p = lambda name: str(out / name)  # noqa: E731
    wb = p("workbench.cal")
    steps = [
        ["generate", p("grid.cfg"), "-o", p("grid.csv")],
        ["generate", p("balancing.cfg"), "-o", p("bal.csv")],
        ["generate", p("extbal.cfg"), "-o", p("ext.csv")],
        ["calibrate", p("bal.csv"), "--workbench", wb, "-o", p("bal.cal")],
        ["calibrate", p("ext.csv"), "--workbench", wb, "-o", p("ext.cal")],
        ["crosstab", "--workbench", wb, "--models", p("bal.cal"), p("ext.cal"),
         "--datasets", p("bal.csv"), p("ext.csv"), "-o", p("crosstab")],
        ["sweep", p("grid.csv"), p("bal.csv"), "--test", p("ext.csv"), "--workbench", wb,
         "--models-dir", p("models"), "-o", p("sweep")],
    ]
    for argv in steps:
        print("$ ftcal", " ".join(argv))
        if ftcal(argv):
            raise SystemExit(f"step failed: {argv[0]}")
    models = sorted(str(m) for m in (out / "models").glob("*.cal"))
    print("$ ftcal mix ...")
    raise SystemExit(ftcal(["mix", *models, "--selection", p("ext.csv"), "-o", p("mixed")]))


if __name__ == "__main__":
    main()
