"""ROC of all four detectors under Rayleigh fading (SNR -10 dB, N = 4000, M = 2)."""

from _common import parse_args, run
from evcss.harness.config import ExperimentConfig

args = parse_args(__doc__)
run("fig3_roc", ExperimentConfig(
    experiment="roc", channel="rayleigh", samples=(4000,), snr_db=(-10.0,),
    pfa=(0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9)), args)
