"""Analytical performance of EV-CSS: CFAR thresholds, the true canonical
correlation of a channel/noise pair, and detection probability for fixed
and Rayleigh-faded channels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.linalg import solve_triangular
from scipy.stats import gamma as gamma_dist

from .detectors import ThresholdSpec
from .matstats import chi2_quantile, chi2_sf, noncentral_chi2_cdf

QUAD_TAIL = 1e-8
QUAD_ABS_TOL = 1e-6


class QuadratureError(RuntimeError):
    pass


def dof(M: int, variant="C") -> int:
    """Null degrees of freedom: M(M+1) for the conjugate test, M^2 otherwise."""
    conj = _is_conjugate(variant)
    return M * (M + 1) if conj else M * M


def _is_conjugate(variant) -> bool:
    if isinstance(variant, bool):
        return variant
    v = str(variant).strip().lower()
    if v in ("c", "conj", "conjugate", "c-ccst"):
        return True
    if v in ("nc", "nonconj", "non-conjugate", "nonconjugate", "nc-ccst"):
        return False
    raise ValueError(f"unknown CCST variant {variant!r}")


@dataclass(frozen=True)
class H1Model:
    k_dof: int
    rho: float
    m: int

    def __post_init__(self):
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")

    @property
    def delta2(self) -> float:
        return self.m * self.rho ** 2

    def pd(self, gamma: float) -> float:
        return 1.0 - noncentral_chi2_cdf(gamma, self.k_dof, self.delta2)


def threshold_cfar(pfa: float, M: int, variant="C") -> ThresholdSpec:
    if not 0.0 < pfa < 1.0:
        raise ValueError("pfa must lie strictly between 0 and 1")
    k = dof(M, variant)
    return ThresholdSpec(chi2_quantile(1.0 - pfa, k), k, pfa)


def true_canonical_corr(h, noise, rss_alpha_mag: float) -> float:
    """Population canonical correlation |R| b / (b + sigma^2), b = ||A^-1 h||^2."""
    if not 0.0 <= rss_alpha_mag <= 1.0:
        raise ValueError("rss_alpha_mag must lie in [0, 1]")
    h = np.asarray(getattr(h, "h", h), dtype=complex)
    A = noise.chol_A
    if np.any(np.abs(np.diag(A)) < 1e-300):
        raise np.linalg.LinAlgError("noise factor is singular")
    beta = float(np.sum(np.abs(solve_triangular(A, h, lower=True)) ** 2))
    if beta == 0.0 and noise.sigma_eta2 == 0.0:
        return 0.0
    return beta * rss_alpha_mag / (beta + noise.sigma_eta2)


def pd_fixed_channel(gamma: float, M: int, N: int, rho: float, variant="C") -> float:
    m = N - M - 1
    if m <= 0:
        raise ValueError("need N > M + 1")
    return 1.0 - noncentral_chi2_cdf(gamma, dof(M, variant), m * rho ** 2)


def _pd_given_beta(beta, gamma, k, m, rss, sigma2):
    rho = beta * rss / (beta + sigma2)
    return 1.0 - noncentral_chi2_cdf(gamma, k, m * rho ** 2)


def pd_rayleigh(gamma: float, M: int, N: int, sigma_eta2: float, rss_alpha_mag: float,
                noise=None, variant="C", mc_draws: int = 100_000, seed=0) -> float:
    """Detection probability averaged over i.i.d. unit-variance Rayleigh fading.

    White noise integrates over ``||h||^2 ~ Gamma(M, 1)`` by adaptive
    quadrature. Correlated noise averages over Monte Carlo draws of h instead;
    use :func:`pd_rayleigh_mc` for its standard error.
    """
    if noise is not None and noise.rho_s > 0:
        return pd_rayleigh_mc(gamma, M, N, sigma_eta2, rss_alpha_mag, noise, variant,
                              mc_draws, seed)[0]
    m = N - M - 1
    if m <= 0:
        raise ValueError("need N > M + 1")
    k = dof(M, variant)
    if rss_alpha_mag == 0.0:
        return chi2_sf(gamma, k)
    upper = gamma_dist.ppf(1.0 - QUAD_TAIL, M)

    def integrand(beta):
        return _pd_given_beta(beta, gamma, k, m, rss_alpha_mag, sigma_eta2) * gamma_dist.pdf(beta, M)

    val, err, info, *rest = integrate.quad(integrand, 0.0, upper, epsabs=QUAD_ABS_TOL,
                                           epsrel=1e-8, limit=200, full_output=True)
    if rest and err > QUAD_ABS_TOL:
        raise QuadratureError(f"quadrature did not converge: {rest[0]} (err={err:.2g}, "
                              f"evals={info['neval']})")
    return float(np.clip(val / (1.0 - QUAD_TAIL), 0.0, 1.0))


def pd_rayleigh_mc(gamma: float, M: int, N: int, sigma_eta2: float, rss_alpha_mag: float,
                   noise, variant="C", draws: int = 100_000, seed=0) -> tuple[float, float]:
    """Monte Carlo over channel draws; returns (P_D, standard error)."""
    m = N - M - 1
    k = dof(M, variant)
    rng = np.random.default_rng(seed)
    h = (rng.standard_normal((draws, M)) + 1j * rng.standard_normal((draws, M))) / np.sqrt(2)
    A = noise.chol_A if noise is not None else np.eye(M)
    z = solve_triangular(A, h.T, lower=True)
    beta = np.sum(np.abs(z) ** 2, axis=0)
    rho = beta * rss_alpha_mag / (beta + sigma_eta2)
    # Bin the non-centralities so the mixture CDF is evaluated on a grid.
    d2 = m * rho ** 2
    grid = np.linspace(0.0, d2.max(), 4001)
    pd_grid = np.array([1.0 - noncentral_chi2_cdf(gamma, k, d) for d in grid])
    pd = np.interp(d2, grid, pd_grid)
    return float(pd.mean()), float(pd.std(ddof=1) / np.sqrt(draws))


def average_over_uniform_snr(pd_of_snr, mean_snr_db: float, delta_db: float) -> float:
    """Average a P_D(SNR) curve over SNR uniform on mean +/- delta dB."""
    if delta_db < 0:
        raise ValueError("delta_db must be non-negative")
    if delta_db == 0:
        return float(pd_of_snr(mean_snr_db))
    val, _ = integrate.quad(pd_of_snr, mean_snr_db - delta_db, mean_snr_db + delta_db,
                            epsabs=1e-7, limit=100)
    return float(val / (2 * delta_db))
