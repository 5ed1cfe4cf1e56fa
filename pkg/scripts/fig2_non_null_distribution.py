"""H1 statistics for h = [1, 1] against the non-central chi-square model."""

from pathlib import Path

import numpy as np
from scipy import stats

from _common import parse_args
from evcss.analysis import true_canonical_corr
from evcss.channel import spatial_cholesky
from evcss.detectors import DetectorId
from evcss.harness import runner
from evcss.harness.config import ExperimentConfig

args = parse_args(__doc__)
cfg = ExperimentConfig(experiment="h1-dist", channel="awgn", channel_gains=(1, 1),
                       samples=(1000,), snr_db=(-10.0,), detectors=("evcss",),
                       trials=args.trials, seed=args.seed)
pt = runner.make_points(cfg)[0]
t = runner.collect_statistics(pt, cfg.trials, 0, h1=True).h1[DetectorId.EVCSS]
noise = spatial_cholesky(0.0, pt.noise_power(pt.snr_db), pt.M)
rho = true_canonical_corr(pt.fixed_channel(), noise, pt.feature.rss_alpha_mag)
delta2 = (pt.N - pt.M - 1) * rho ** 2
out = Path(args.out_dir)
out.mkdir(parents=True, exist_ok=True)
np.save(out / "h1_stats.npy", t)
ks = stats.kstest(t, "ncx2", args=(6, delta2)).statistic
print(f"rho={rho:.4f} delta2={delta2:.2f} mean T={t.mean():.2f} (model {6 + delta2:.2f}) KS={ks:.4f}")
