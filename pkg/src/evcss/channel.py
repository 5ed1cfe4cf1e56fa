"""Flat-fading channels, spatially correlated noise and received-frame synthesis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .matstats import IQFrame


@dataclass(frozen=True)
class ChannelRealization:
    """Per-antenna complex gains for one frame (quasi-static).

    ``model`` is ``"fixed"`` for a deterministic channel or ``"rayleigh"`` for
    an i.i.d. unit-variance draw; SNR bookkeeping depends on which.
    """

    h: np.ndarray
    model: str = "fixed"

    def __post_init__(self):
        h = np.atleast_1d(np.asarray(self.h, dtype=complex))
        if h.ndim != 1 or h.size < 1:
            raise ValueError("channel vector must be 1-D with at least one antenna")
        if self.model not in ("fixed", "rayleigh"):
            raise ValueError(f"unknown channel model {self.model!r}")
        object.__setattr__(self, "h", h)

    @property
    def M(self) -> int:
        return self.h.size

    @classmethod
    def fixed(cls, h) -> "ChannelRealization":
        return cls(np.asarray(h, dtype=complex), "fixed")


@dataclass(frozen=True)
class NoiseModel:
    """Noise of power ``sigma_eta2`` per antenna with covariance
    ``sigma_eta2 * A A^H`` where ``(A A^H)_ij = rho_s**|i-j|``."""

    sigma_eta2: float
    rho_s: float
    chol_A: np.ndarray

    @property
    def M(self) -> int:
        return self.chol_A.shape[0]

    @property
    def covariance(self) -> np.ndarray:
        return self.sigma_eta2 * (self.chol_A @ self.chol_A.conj().T)


def snr_to_noise_power(snr_db: float, h, M: int | None = None) -> float:
    """Noise power giving average SNR E{h^H h} / E{eta^H eta} = 10**(snr_db/10).

    ``h`` is a ChannelRealization or the string ``"rayleigh"``; Rayleigh uses
    the expected channel energy M, a fixed channel its actual ``||h||^2``.
    """
    if isinstance(h, str):
        if h != "rayleigh":
            raise ValueError("string channel must be 'rayleigh'")
        if M is None or M < 1:
            raise ValueError("M >= 1 required")
        energy = float(M)
    else:
        M = h.M if M is None else M
        if M < 1:
            raise ValueError("M >= 1 required")
        energy = float(M) if h.model == "rayleigh" else float(np.vdot(h.h, h.h).real)
    return energy / (M * 10.0 ** (snr_db / 10.0))


def draw_rayleigh(M: int, rng: np.random.Generator) -> ChannelRealization:
    """Circular complex Gaussian gains with E|h_k|^2 = 1, i.i.d. over antennas."""
    if M < 1:
        raise ValueError("M >= 1 required")
    h = (rng.standard_normal(M) + 1j * rng.standard_normal(M)) / np.sqrt(2.0)
    return ChannelRealization(h, "rayleigh")


def spatial_cholesky(rho_s: float, sigma_eta2: float, M: int) -> NoiseModel:
    if not 0.0 <= rho_s < 1.0:
        raise ValueError(f"rho_s must lie in [0, 1), got {rho_s}")
    if sigma_eta2 < 0:
        raise ValueError("noise power must be non-negative")
    corr = toeplitz(rho_s ** np.arange(M))
    return NoiseModel(float(sigma_eta2), float(rho_s), np.linalg.cholesky(corr))


def draw_noise(noise: NoiseModel, N: int, rng: np.random.Generator) -> np.ndarray:
    M = noise.M
    w = (rng.standard_normal((M, N)) + 1j * rng.standard_normal((M, N))) / np.sqrt(2.0)
    return np.sqrt(noise.sigma_eta2) * (noise.chol_A @ w)


def synthesize_frame(soi, h: ChannelRealization, noise: NoiseModel, N: int,
                     rng: np.random.Generator, sample_period_s: float = 1.0) -> IQFrame:
    """``x_k(n) = h_k s(n) + eta_k(n)``; pass ``soi=None`` for a noise-only frame.

    Noise is drawn before anything else so that a given ``rng`` state yields
    the same noise under both hypotheses.
    """
    if h.M != noise.M:
        raise ValueError(f"channel has {h.M} antennas but noise model has {noise.M}")
    eta = draw_noise(noise, N, rng)
    if soi is None:
        return IQFrame(eta, sample_period_s)
    s = np.asarray(soi)
    if s.size < N:
        raise ValueError(f"signal has {s.size} samples, frame needs {N}")
    return IQFrame(np.outer(h.h, s[:N]) + eta, sample_period_s)


def draw_uncertain_snr(mean_snr_db: float, delta_db: float, rng: np.random.Generator) -> float:
    """SNR uniform on [mean - delta, mean + delta] dB."""
    if delta_db < 0:
        raise ValueError("delta_db must be non-negative")
    if delta_db == 0:
        return float(mean_snr_db)
    return float(rng.uniform(mean_snr_db - delta_db, mean_snr_db + delta_db))
