"""EV-CSS and the three spectral-correlation baselines.

Every detector maps one IQFrame to a scalar statistic and, given a
threshold, a decision. EV-CSS thresholds come from the chi-square null;
the baselines need thresholds calibrated by simulation.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .matstats import IQFrame, ccst_eigenvalues, covariance_pair, cyclic_covariance
from .signals import CyclicFeature, cyclic_correlogram, cyclic_cross_correlogram


class DetectorId(str, enum.Enum):
    EVCSS = "evcss"
    SUM_MSDF = "sum_msdf"
    EGC_MSDF = "egc_msdf"
    BMRC_MSDF = "bmrc_msdf"


@dataclass(frozen=True)
class ThresholdSpec:
    gamma: float
    k_dof: int | None = None
    target_pfa: float | None = None


@dataclass(frozen=True)
class MsdfConfig:
    """Cyclic-periodogram settings for the baselines.

    ``smoothing_bins=None`` sums the spectral correlation over every bin pair,
    which makes the statistic the frequency-domain twin of the time-domain
    correlogram at zero lag. An odd integer restricts the sum to that many
    bins around ``center_hz`` (default: half the cyclic frequency).

    ``normalization="received"`` divides by the measured block energy, which
    makes the statistic scale-invariant. ``"signal"`` divides by the known
    energy of the signal of interest (``signal_power`` per sample) instead,
    so the null distribution scales with the noise power.
    """

    fft_size: int = 128
    reference_antenna: int = 0
    smoothing_bins: int | None = None
    center_hz: float | None = None
    normalization: str = "received"
    signal_power: float = 1.0

    def __post_init__(self):
        n = self.fft_size
        if n < 2 or n & (n - 1):
            raise ValueError("fft_size must be a power of two")
        if self.smoothing_bins is not None and (
                self.smoothing_bins < 1 or self.smoothing_bins % 2 == 0):
            raise ValueError("smoothing_bins must be a positive odd count")
        if self.reference_antenna < 0:
            raise ValueError("reference_antenna must be non-negative")
        if self.normalization not in ("signal", "received"):
            raise ValueError("normalization must be 'signal' or 'received'")
        if self.signal_power <= 0:
            raise ValueError("signal_power must be positive")


@dataclass
class DetectorOutput:
    statistic: float
    detector_id: DetectorId
    decision: bool | None = None
    eigenvalues_sq: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lam: float | None = None


def _decide(stat: float, gamma: float | None) -> bool | None:
    return None if gamma is None else bool(stat > gamma)


def _gamma(threshold) -> float | None:
    if threshold is None or isinstance(threshold, (int, float)):
        return threshold
    return threshold.gamma


# -- EV-CSS ------------------------------------------------------------------

def evcss(frame: IQFrame, feature: CyclicFeature, threshold=None) -> DetectorOutput:
    pair = covariance_pair(frame, feature.alpha0_hz, feature.tau0_samples, feature.conjugate)
    mu2 = ccst_eigenvalues(pair)
    m = frame.N - frame.M - 1
    log_lam = float(np.sum(np.log1p(-mu2)))
    stat = -m * log_lam
    return DetectorOutput(stat, DetectorId.EVCSS, _decide(stat, _gamma(threshold)),
                          mu2, float(np.exp(log_lam)))


# -- MSDF baselines ------------------------------------------------------------

def _alpha_bin(feature: CyclicFeature, cfg: MsdfConfig, ts: float) -> int:
    k = feature.alpha0_hz * ts * cfg.fft_size
    if abs(k - round(k)) > 1e-6:
        raise ValueError(
            f"cyclic frequency {feature.alpha0_hz:g} Hz falls between FFT bins "
            f"({k:.4f}) for fft_size={cfg.fft_size}"
        )
    return int(round(k)) % cfg.fft_size


def _bins(k_alpha: int, cfg: MsdfConfig, ts: float) -> np.ndarray:
    n = cfg.fft_size
    if cfg.smoothing_bins is None:
        return np.arange(n)
    if cfg.center_hz is None:
        k0 = k_alpha // 2
    else:
        k0 = int(round(cfg.center_hz * ts * n))
    half = cfg.smoothing_bins // 2
    return np.unique((k0 + np.arange(-half, half + 1)) % n)


def spectral_correlation(x, y, feature: CyclicFeature, cfg: MsdfConfig,
                         sample_period_s: float) -> tuple[complex, float]:
    """Block-averaged cyclic cross-periodogram summed over the configured bins.

    Returns the (unnormalised) correlation sum and the total energy of ``x``
    over the same blocks, both in FFT units.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    n_fft = cfg.fft_size
    blocks = x.size // n_fft
    if blocks < 1:
        raise ValueError(f"stream of {x.size} samples shorter than fft_size={n_fft}")
    k_alpha = _alpha_bin(feature, cfg, sample_period_s)
    X = np.fft.fft(x[: blocks * n_fft].reshape(blocks, n_fft), axis=1)
    Y = X if y is x else np.fft.fft(y[: blocks * n_fft].reshape(blocks, n_fft), axis=1)
    k = _bins(k_alpha, cfg, sample_period_s)
    if feature.conjugate:
        prod = X[:, k] * Y[:, (k_alpha - k) % n_fft]
    else:
        prod = X[:, k] * np.conj(Y[:, (k - k_alpha) % n_fft])
    energy = float(np.sum(X.real ** 2 + X.imag ** 2))
    return complex(prod.sum()), energy


def msdf_statistic(stream, feature: CyclicFeature, cfg: MsdfConfig = MsdfConfig(),
                   sample_period_s: float = 1.0) -> float:
    """Magnitude of the block-averaged spectral correlation, normalised by energy.

    With full-band summation and signal normalisation this equals the
    zero-lag cyclic correlogram magnitude of the analysed blocks divided by
    the signal power.
    """
    x = np.asarray(stream)
    scf, energy = spectral_correlation(x, x, feature, cfg, sample_period_s)
    if cfg.normalization == "signal":
        n_used = (x.size // cfg.fft_size) * cfg.fft_size
        energy = cfg.signal_power * n_used * cfg.fft_size
    if energy == 0.0:
        return 0.0
    return abs(scf) / energy


def sum_msdf(frame: IQFrame, feature: CyclicFeature, cfg: MsdfConfig = MsdfConfig(),
             gamma_empirical=None) -> DetectorOutput:
    ts = frame.sample_period_s
    stat = float(sum(msdf_statistic(row, feature, cfg, ts) for row in frame.samples))
    return DetectorOutput(stat, DetectorId.SUM_MSDF, _decide(stat, _gamma(gamma_empirical)))


def egc_phases(frame: IQFrame, feature: CyclicFeature, reference: int = 0) -> np.ndarray:
    """Phase of every antenna relative to ``reference`` from cyclic correlograms.

    For the conjugate feature the cross term carries arg h_k + arg h_ref and
    the reference auto term 2 arg h_ref; their difference isolates the
    relative phase. The non-conjugate case works the same way.
    """
    if not 0 <= reference < frame.M:
        raise ValueError(f"reference antenna {reference} out of range for M={frame.M}")
    x = frame.samples
    args = (feature.alpha0_hz, feature.tau0_samples, feature.conjugate, frame.sample_period_s)
    auto = cyclic_correlogram(x[reference], *args)
    cross = np.array([cyclic_cross_correlogram(x[k], x[reference], *args)
                      for k in range(frame.M)])
    phi = np.angle(cross) - np.angle(auto)
    phi[reference] = 0.0
    return np.angle(np.exp(1j * phi))


def egc_msdf(frame: IQFrame, feature: CyclicFeature, cfg: MsdfConfig = MsdfConfig(),
             gamma_empirical=None) -> DetectorOutput:
    phi = egc_phases(frame, feature, cfg.reference_antenna)
    combined = np.exp(-1j * phi) @ frame.samples
    stat = msdf_statistic(combined, feature, cfg, frame.sample_period_s)
    return DetectorOutput(stat, DetectorId.EGC_MSDF, _decide(stat, _gamma(gamma_empirical)))


def bmrc_channel_estimate(frame: IQFrame, feature: CyclicFeature) -> np.ndarray | None:
    """Dominant left singular vector of the cyclic covariance, or None if it is zero."""
    ra = cyclic_covariance(frame, feature.alpha0_hz, feature.tau0_samples, feature.conjugate)
    if not np.any(ra):
        return None
    u, _, _ = np.linalg.svd(ra)
    return u[:, 0]


def bmrc_msdf(frame: IQFrame, feature: CyclicFeature, cfg: MsdfConfig = MsdfConfig(),
              gamma_empirical=None, channel=None) -> DetectorOutput:
    """Blind maximal-ratio combining followed by the single-stream MSDF.

    Passing ``channel`` replaces the blind estimate with known CSI.
    """
    if channel is not None:
        h_hat = np.asarray(getattr(channel, "h", channel), dtype=complex)
    else:
        h_hat = bmrc_channel_estimate(frame, feature)
    if h_hat is None:
        warnings.warn("cyclic covariance is zero; falling back to antenna 0", RuntimeWarning,
                      stacklevel=2)
        combined = frame.samples[0]
    else:
        combined = h_hat.conj() @ frame.samples / np.linalg.norm(h_hat)
    stat = msdf_statistic(combined, feature, cfg, frame.sample_period_s)
    return DetectorOutput(stat, DetectorId.BMRC_MSDF, _decide(stat, _gamma(gamma_empirical)))


DETECTORS = {
    DetectorId.EVCSS: evcss,
    DetectorId.SUM_MSDF: sum_msdf,
    DetectorId.EGC_MSDF: egc_msdf,
    DetectorId.BMRC_MSDF: bmrc_msdf,
}
