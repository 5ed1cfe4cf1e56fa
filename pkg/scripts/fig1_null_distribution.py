"""H0 statistics for M = 2, 3, 4 and their chi-square fit (KS distance)."""

from pathlib import Path

import numpy as np
from scipy import stats

from _common import parse_args
from evcss.detectors import DetectorId
from evcss.harness import runner
from evcss.harness.config import ExperimentConfig

args = parse_args(__doc__)
cfg = ExperimentConfig(experiment="h0-dist", antennas=(2, 3, 4), samples=(1000,),
                       detectors=("evcss",), trials=args.trials, seed=args.seed)
out = Path(args.out_dir)
out.mkdir(parents=True, exist_ok=True)
for pt in runner.make_points(cfg):
    t = runner.collect_statistics(pt, cfg.trials, 0, h1=False).h0[DetectorId.EVCSS]
    k = pt.M * (pt.M + 1)
    np.save(out / f"h0_stats_M{pt.M}.npy", t)
    ks = stats.kstest(t, "chi2", args=(k,)).statistic
    print(f"M={pt.M}: mean T={t.mean():.3f} (chi2_{k} mean {k}), KS={ks:.4f}")
