"""P_D versus frame length under Rayleigh fading (SNR -10 dB, M = 2)."""

from _common import parse_args, run
from evcss.harness.config import ExperimentConfig

args = parse_args(__doc__)
run("fig5_pd_vs_n", ExperimentConfig(
    experiment="pd-vs-n", channel="rayleigh", samples=(500, 1000, 2000, 3000, 4000, 5000)),
    args)
