"""Covariance estimators, canonical-correlation eigenvalues and chi-square
distribution functions."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammainc, gammaincc, gammaln

COND_LIMIT = 1e12
EIG_CLAMP = 1e-12
EIG_SLACK = 1e-8

# Poisson mixture window: mode +/- (NC_SIGMAS * sd + NC_PAD) terms, hard-capped.
NC_SIGMAS = 12.0
NC_PAD = 30
NC_TERM_CAP = 200_000


class IllConditionedError(np.linalg.LinAlgError):
    """The sample covariance cannot be inverted reliably."""

    def __init__(self, cond: float):
        super().__init__(f"covariance matrix ill-conditioned (cond={cond:.3g})")
        self.cond = cond


class EigenvalueRangeWarning(RuntimeWarning):
    """Squared canonical correlations strayed outside [0, 1] before clamping."""


@dataclass(frozen=True)
class IQFrame:
    """M x N block of antenna samples (antenna-major)."""

    samples: np.ndarray
    sample_period_s: float = 1.0

    def __post_init__(self):
        x = np.asarray(self.samples)
        if x.ndim == 1:
            x = x[np.newaxis, :]
        if x.ndim != 2:
            raise ValueError("frame must be M x N")
        M, N = x.shape
        if M < 1 or N <= M + 1:
            raise ValueError(f"need N > M + 1, got M={M}, N={N}")
        object.__setattr__(self, "samples", x)

    @property
    def M(self) -> int:
        return self.samples.shape[0]

    @property
    def N(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class CovariancePair:
    rxx: np.ndarray
    rxx_alpha: np.ndarray
    tau0: int = 0
    alpha0: float = 0.0
    conjugate: bool = True


def _check_lag(frame: IQFrame, tau0: int):
    if not 0 <= tau0 < frame.N - 2:
        raise ValueError(f"lag {tau0} too large for N={frame.N}")


def lag_covariance(frame: IQFrame, tau0: int = 0) -> np.ndarray:
    _check_lag(frame, tau0)
    x = frame.samples
    N = frame.N
    lead = x[:, tau0:]
    lag = x[:, : N - tau0]
    return lead @ lag.conj().T / (N - 1 - tau0)


@lru_cache(maxsize=32)
def _rotation(alpha_ts: float, start: int, stop: int) -> np.ndarray:
    rot = np.exp(-2j * np.pi * alpha_ts * np.arange(start, stop))
    rot.flags.writeable = False
    return rot


def cyclic_covariance(frame: IQFrame, alpha0: float, tau0: int = 0,
                      conjugate: bool = True) -> np.ndarray:
    """Cyclic cross-correlogram matrix; ``x(n-tau)^T`` replaces ``x(n-tau)^H``
    when ``conjugate`` is set."""
    _check_lag(frame, tau0)
    x = frame.samples
    N = frame.N
    lead = x[:, tau0:] * _rotation(alpha0 * frame.sample_period_s, tau0, N)
    lag = x[:, : N - tau0]
    if not conjugate:
        lag = lag.conj()
    return lead @ lag.T / (N - 1 - tau0)


def covariance_pair(frame: IQFrame, alpha0: float, tau0: int = 0,
                    conjugate: bool = True) -> CovariancePair:
    """Inputs to the canonical-correlation test at (alpha0, tau0).

    Both variates, x(n) and the shifted, lagged copy, have the zero-lag
    covariance, so rxx is taken at lag 0 whatever ``tau0`` is. A lagged
    covariance would not be positive definite.
    """
    _check_lag(frame, tau0)
    return CovariancePair(
        lag_covariance(frame, 0),
        cyclic_covariance(frame, alpha0, tau0, conjugate),
        tau0, alpha0, conjugate,
    )


def _whitened_cross(pair: CovariancePair) -> np.ndarray:
    rxx = np.asarray(pair.rxx, dtype=complex)
    rxx = 0.5 * (rxx + rxx.conj().T)
    cond = np.linalg.cond(rxx)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise IllConditionedError(float(cond))
    try:
        L = np.linalg.cholesky(rxx)
    except np.linalg.LinAlgError:
        raise IllConditionedError(float(cond)) from None
    Linv = np.linalg.inv(L)
    # The second variate is x*(n) for the conjugate test, so its covariance
    # is conj(rxx) with Cholesky factor conj(L).
    right = Linv.T if pair.conjugate else Linv.conj().T
    return Linv @ np.asarray(pair.rxx_alpha, dtype=complex) @ right


def ccst_eigenvalues(pair: CovariancePair) -> np.ndarray:
    """Squared sample canonical correlations, sorted descending.

    These are the eigenvalues of ``Rxx^-1 Ra Ryy^-1 Ra^H``, obtained as the
    eigenvalues of the Hermitian ``W W^H`` after whitening by Cholesky.
    """
    W = _whitened_cross(pair)
    mu2 = np.linalg.eigvalsh(W @ W.conj().T)[::-1]
    if mu2.size and (mu2[0] > 1 + EIG_SLACK or mu2[-1] < -EIG_SLACK):
        warnings.warn(
            f"canonical correlations out of range: [{mu2[-1]:.3g}, {mu2[0]:.3g}]",
            EigenvalueRangeWarning, stacklevel=2,
        )
    return np.clip(mu2, 0.0, 1.0 - EIG_CLAMP)


def block_determinant_lambda(pair: CovariancePair) -> float:
    """Wilks' lambda as a determinant ratio, |[[R, Ra], [Ra^H, Ryy]]| / (|R| |Ryy|).

    Independent of the eigenvalue route; used to cross-check it.
    """
    R = np.asarray(pair.rxx, dtype=complex)
    R = 0.5 * (R + R.conj().T)
    Ryy = R.conj() if pair.conjugate else R
    Ra = np.asarray(pair.rxx_alpha, dtype=complex)
    block = np.block([[R, Ra], [Ra.conj().T, Ryy]])
    s_b, ld_b = np.linalg.slogdet(block)
    s_r, ld_r = np.linalg.slogdet(R)
    s_y, ld_y = np.linalg.slogdet(Ryy)
    return float((s_b / (s_r * s_y)).real * np.exp(ld_b - ld_r - ld_y))


# -- chi-square family -------------------------------------------------------

def _check_dof(k):
    if np.any(np.asarray(k) < 1):
        raise ValueError("degrees of freedom must be >= 1")


def chi2_cdf(x, k_dof):
    """Central chi-square CDF via the regularized lower incomplete gamma."""
    x = np.asarray(x, dtype=float)
    _check_dof(k_dof)
    if np.any(x < 0):
        raise ValueError("x must be non-negative")
    out = gammainc(0.5 * np.asarray(k_dof, dtype=float), 0.5 * x)
    return float(out) if out.ndim == 0 else out


def chi2_sf(x, k_dof):
    x = np.asarray(x, dtype=float)
    _check_dof(k_dof)
    out = gammaincc(0.5 * np.asarray(k_dof, dtype=float), 0.5 * x)
    return float(out) if out.ndim == 0 else out


def _poisson_window(lam: float):
    if lam == 0:
        return np.zeros(1, dtype=int)
    sd = np.sqrt(lam)
    lo = max(0, int(np.floor(lam - NC_SIGMAS * sd)) - NC_PAD)
    hi = int(np.ceil(lam + NC_SIGMAS * sd)) + NC_PAD
    if hi - lo > NC_TERM_CAP:
        raise ValueError(f"non-centrality {2 * lam:g} needs more than {NC_TERM_CAP} terms")
    return np.arange(lo, hi + 1)


def noncentral_chi2_cdf(x, k_dof, delta2):
    """Non-central chi-square CDF as a Poisson(delta2/2) mixture of central CDFs.

    Terms are taken in a window around the Poisson mode wide enough that the
    discarded weight is far below 1e-12.
    """
    _check_dof(k_dof)
    if delta2 < 0:
        raise ValueError("non-centrality must be non-negative")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise ValueError("x must be non-negative")
    lam = 0.5 * float(delta2)
    j = _poisson_window(lam)
    if lam == 0:
        w = np.ones(1)
    else:
        w = np.exp(j * np.log(lam) - lam - gammaln(j + 1.0))
    cdfs = gammainc(0.5 * k_dof + j[:, None], 0.5 * np.atleast_1d(x_arr)[None, :])
    out = np.clip(w @ cdfs, 0.0, 1.0)
    return float(out[0]) if x_arr.ndim == 0 else out.reshape(x_arr.shape)


def chi2_quantile(p: float, k_dof) -> float:
    """Inverse of ``chi2_cdf`` by bracketed root finding."""
    _check_dof(k_dof)
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    hi = max(1.0, 2.0 * k_dof)
    while chi2_cdf(hi, k_dof) < p:
        hi *= 2.0
    return brentq(lambda v: chi2_cdf(v, k_dof) - p, 0.0, hi, xtol=1e-14, rtol=1e-15,
                  maxiter=500)
