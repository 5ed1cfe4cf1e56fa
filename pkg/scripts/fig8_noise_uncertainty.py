"""Average P_D and P_FA under noise-power uncertainty of +/- delta dB (AWGN)."""

from _common import parse_args, run
from evcss.harness.config import ExperimentConfig

args = parse_args(__doc__)
run("fig8_noise_uncertainty", ExperimentConfig(
    experiment="noise-uncertainty", channel="awgn", snr_delta_db=(0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0)),
    args)
