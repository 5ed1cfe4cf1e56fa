"""EV-CSS under spatially correlated noise (AWGN, SNR -10 dB, N = 1000, M = 2)."""

from _common import parse_args, run
from evcss.harness.config import ExperimentConfig

args = parse_args(__doc__)
run("fig7_spatial_corr", ExperimentConfig(
    experiment="spatial-corr", channel="awgn", rho_s=(0.0, 0.2, 0.4, 0.6, 0.8, 0.9),
    detectors=("evcss",)), args)
