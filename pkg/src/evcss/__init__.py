"""Eigenvalue-based cyclostationary spectrum sensing (EV-CSS) for multi-antenna
receivers, its analytical performance model, and spectral-correlation baselines."""

from .analysis import (H1Model, pd_fixed_channel, pd_rayleigh, threshold_cfar,
                       true_canonical_corr)
from .channel import (ChannelRealization, NoiseModel, draw_rayleigh, draw_uncertain_snr,
                      snr_to_noise_power, spatial_cholesky, synthesize_frame)
from .detectors import (DetectorId, DetectorOutput, MsdfConfig, ThresholdSpec, bmrc_msdf,
                        egc_msdf, evcss, msdf_statistic, sum_msdf)
from .matstats import (CovariancePair, IQFrame, ccst_eigenvalues, chi2_cdf, chi2_quantile,
                       cyclic_covariance, lag_covariance, noncentral_chi2_cdf)
from .signals import (CyclicFeature, SignalSpec, cyclic_correlogram, generate_bpsk,
                      reference_cyclic_feature)

__version__ = "0.1.0"
