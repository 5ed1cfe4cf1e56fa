"""Cyclostationary primary-user waveform and a direct cyclic correlogram.

The waveform is real passband BPSK with rectangular pulses. Amplitude is
chosen so the average power is exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import hilbert


class ConfigurationError(ValueError):
    """Raised when a signal or experiment description is inconsistent."""


class NoFeatureError(ValueError):
    """Raised when a requested cyclic frequency carries no feature."""


FEATURE_FLOOR = 0.01


@dataclass(frozen=True)
class SignalSpec:
    carrier_freq_hz: float = 80e3
    symbol_period_s: float = 25e-6
    sample_period_s: float = 1 / 320e3
    amplitude: float = np.sqrt(2.0)
    modulation: str = "BPSK"
    random_phase: bool = False

    def __post_init__(self):
        if self.modulation != "BPSK":
            raise ConfigurationError(f"unsupported modulation {self.modulation!r}")
        if self.sample_period_s <= 0 or self.symbol_period_s <= 0:
            raise ConfigurationError("periods must be positive")
        if not 0 <= self.carrier_freq_hz < 0.5 / self.sample_period_s:
            raise ConfigurationError("carrier must lie below Nyquist")
        sps = self.symbol_period_s / self.sample_period_s
        if abs(sps - round(sps)) > 1e-9 * sps or round(sps) < 1:
            raise ConfigurationError(
                f"symbol period is {sps:g} samples; must be a whole number"
            )

    @property
    def samples_per_symbol(self) -> int:
        return int(round(self.symbol_period_s / self.sample_period_s))

    @property
    def sample_rate_hz(self) -> float:
        return 1.0 / self.sample_period_s


@dataclass(frozen=True)
class CyclicFeature:
    """The (alpha, tau, conjugate) signature the detectors look for.

    ``rss_alpha_mag`` is the magnitude of the unit-power signal's cyclic
    autocorrelation at this point; the analytical model needs it.
    """

    alpha0_hz: float
    tau0_samples: int = 0
    conjugate: bool = True
    rss_alpha_mag: float = 1.0

    def __post_init__(self):
        if self.tau0_samples < 0:
            raise ValueError("tau0_samples must be non-negative")
        if not 0.0 <= self.rss_alpha_mag <= 1.0 + 1e-9:
            raise ValueError("rss_alpha_mag must lie in [0, 1]")


def generate_bpsk(spec: SignalSpec, n_samples: int, seed=None) -> np.ndarray:
    """Rectangular-pulse BPSK on a real carrier; deterministic given ``seed``."""
    if n_samples <= 0:
        raise ValueError("n_samples must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    sps = spec.samples_per_symbol
    n_sym = -(-n_samples // sps)
    symbols = 2.0 * rng.integers(0, 2, size=n_sym) - 1.0
    phase = rng.uniform(0.0, 2 * np.pi) if spec.random_phase else 0.0
    n = np.arange(n_samples)
    carrier = np.cos(2 * np.pi * spec.carrier_freq_hz * spec.sample_period_s * n + phase)
    return spec.amplitude * np.repeat(symbols, sps)[:n_samples] * carrier


def cyclic_correlogram(stream, alpha_hz: float, tau_samples: int, conjugate: bool,
                       sample_period_s: float = 1.0) -> complex:
    """Finite-N cyclic autocorrelation estimate.

    Sums ``x(n) c(x(n - tau)) exp(-j 2 pi alpha n Ts)`` over n = tau..N-1 and
    divides by N-1-tau, where c is complex conjugation for the non-conjugate
    correlation and the identity for the conjugate one.
    """
    return cyclic_cross_correlogram(stream, stream, alpha_hz, tau_samples, conjugate,
                                    sample_period_s)


def cyclic_cross_correlogram(x, y, alpha_hz: float, tau_samples: int, conjugate: bool,
                             sample_period_s: float = 1.0) -> complex:
    """As :func:`cyclic_correlogram` with ``y`` supplying the lagged factor."""
    x = np.asarray(x)
    y = np.asarray(y)
    n_total = x.size
    if n_total == 0:
        raise ValueError("empty stream")
    if y.size != n_total:
        raise ValueError("streams differ in length")
    if not 0 <= tau_samples < n_total - 1:
        raise ValueError(f"lag {tau_samples} out of range for {n_total} samples")
    lead = x[tau_samples:]
    lag = y[: n_total - tau_samples]
    if not conjugate:
        lag = np.conj(lag)
    n = np.arange(tau_samples, n_total)
    rot = np.exp(-2j * np.pi * alpha_hz * sample_period_s * n)
    return complex(np.sum(lead * lag * rot) / (n_total - 1 - tau_samples))


@lru_cache(maxsize=64)
def reference_cyclic_feature(spec: SignalSpec, alpha_hz: float, tau_samples: int = 0,
                             n_samples: int = 1_000_000, seed: int = 12345) -> CyclicFeature:
    """Measure the signal's feature at (alpha, tau) on a long noiseless record.

    The magnitude comes from the real stream itself, which is what the
    receiver sees. For a real stream the conjugate and non-conjugate
    correlations coincide, so the flag is decided on the analytic signal,
    where the two kinds of feature separate.
    """
    s = generate_bpsk(spec, n_samples, seed)
    ts = spec.sample_period_s
    mag = abs(cyclic_correlogram(s, alpha_hz, tau_samples, True, ts))
    z = hilbert(s)
    conj_mag = abs(cyclic_correlogram(z, alpha_hz, tau_samples, True, ts))
    nonconj_mag = abs(cyclic_correlogram(z, alpha_hz, tau_samples, False, ts))
    if mag < FEATURE_FLOOR:
        raise NoFeatureError(
            f"no cyclic feature at alpha={alpha_hz:g} Hz, tau={tau_samples}"
        )
    return CyclicFeature(
        alpha0_hz=alpha_hz,
        tau0_samples=tau_samples,
        conjugate=bool(conj_mag >= nonconj_mag),
        rss_alpha_mag=float(min(mag, 1.0)),
    )


def best_lag(spec: SignalSpec, alpha_hz: float, max_lag: int, conjugate: bool = True,
             n_samples: int = 200_000, seed: int = 12345) -> int:
    """Lag in [0, max_lag] maximising the feature magnitude (picked offline)."""
    s = generate_bpsk(spec, n_samples, seed)
    mags = [abs(cyclic_correlogram(s, alpha_hz, t, conjugate, spec.sample_period_s))
            for t in range(max_lag + 1)]
    return int(np.argmax(mags))
