"""P_D versus number of antennas under Rayleigh fading (SNR -10 dB, N = 1000)."""

from _common import parse_args, run
from evcss.harness.config import ExperimentConfig

args = parse_args(__doc__)
run("fig6_pd_vs_m", ExperimentConfig(experiment="pd-vs-m", channel="rayleigh",
                                     antennas=(1, 2, 3, 4, 5, 6)), args)
