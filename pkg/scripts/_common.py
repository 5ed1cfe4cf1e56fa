"""Shared helpers for the figure scripts."""

import argparse
import dataclasses
import logging
from pathlib import Path

from evcss.harness import emit_plot_script, run_experiment, write_results
from evcss.harness.config import ExperimentConfig


def parse_args(description: str):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--trials", type=int, default=5000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out-dir", default="results")
    p.add_argument("--plot", action="store_true", help="also write a plotting script")
    p.add_argument("-v", "--verbose", action="store_true")
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    return args


def run(name: str, cfg: ExperimentConfig, args) -> Path:
    cfg = dataclasses.replace(cfg, trials=args.trials, seed=args.seed)
    out = write_results(run_experiment(cfg), Path(args.out_dir) / f"{name}.csv")
    print(out)
    if args.plot:
        print(emit_plot_script(out))
    return out
