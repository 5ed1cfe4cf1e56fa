"""P_D versus SNR under Rayleigh fading (N = 1000, M = 2, P_FA = 0.1)."""

from _common import parse_args, run
from evcss.harness.config import ExperimentConfig

args = parse_args(__doc__)
run("fig4_pd_vs_snr", ExperimentConfig(
    experiment="pd-vs-snr", channel="rayleigh", samples=(1000,),
    snr_db=(-20.0, -17.5, -15.0, -12.5, -10.0, -7.5, -5.0, -2.5, 0.0)), args)
