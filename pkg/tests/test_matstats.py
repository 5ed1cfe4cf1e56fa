import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evcss.matstats import (CovariancePair, EigenvalueRangeWarning, IllConditionedError,
                            IQFrame, block_determinant_lambda, ccst_eigenvalues, chi2_cdf,
                            chi2_quantile, chi2_sf, covariance_pair, cyclic_covariance,
                            lag_covariance, noncentral_chi2_cdf)

mp.mp.dps = 40


def mp_chi2_cdf(x, k):
    return float(mp.gammainc(mp.mpf(k) / 2, 0, mp.mpf(x) / 2, regularized=True))


def mp_ncx2_cdf(x, k, d2):
    # Poisson mixture summed to convergence in extended precision.
    lam = mp.mpf(d2) / 2
    total, j = mp.mpf(0), 0
    while True:
        w = mp.exp(-lam) * lam ** j / mp.factorial(j)
        term = w * mp.gammainc(mp.mpf(k) / 2 + j, 0, mp.mpf(x) / 2, regularized=True)
        total += term
        if j > lam and w < mp.mpf(10) ** -30:
            return float(total)
        j += 1


def random_complex(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.mark.parametrize("x,k", [(0.5, 1), (6.0, 6), (10.6446, 6), (30.0, 12), (1e-3, 4),
                                 (80.0, 20)])
def test_chi2_cdf_matches_mpmath(x, k):
    assert abs(chi2_cdf(x, k) - mp_chi2_cdf(x, k)) < 1e-10
    assert abs(chi2_sf(x, k) - (1 - mp_chi2_cdf(x, k))) < 1e-10


@pytest.mark.parametrize("x,k,d2", [(10.0, 6, 0.5), (10.6446, 6, 6.9), (40.0, 6, 30.0),
                                    (5.0, 4, 0.01), (200.0, 12, 150.0), (3.0, 2, 20.0)])
def test_noncentral_cdf_matches_mpmath(x, k, d2):
    assert abs(noncentral_chi2_cdf(x, k, d2) - mp_ncx2_cdf(x, k, d2)) < 1e-10


@settings(max_examples=50, deadline=None)
@given(x=st.floats(0, 200), k=st.integers(1, 30))
def test_zero_noncentrality_is_central(x, k):
    assert noncentral_chi2_cdf(x, k, 0.0) == pytest.approx(chi2_cdf(x, k), abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(k=st.integers(1, 30), d2=st.floats(0, 500), x=st.floats(0, 400), dx=st.floats(0, 50))
def test_noncentral_cdf_monotone(k, d2, x, dx):
    assert noncentral_chi2_cdf(x + dx, k, d2) >= noncentral_chi2_cdf(x, k, d2) - 1e-12
    assert noncentral_chi2_cdf(x, k, d2 + 1.0) <= noncentral_chi2_cdf(x, k, d2) + 1e-12


def test_quantile():
    assert chi2_quantile(0.9, 6) == pytest.approx(10.6446, abs=1e-3)
    assert chi2_quantile(0.9, 4) == pytest.approx(7.7794, abs=1e-3)


@settings(max_examples=50, deadline=None)
@given(p=st.floats(1e-6, 1 - 1e-6), k=st.integers(1, 40))
def test_quantile_inverts_cdf(p, k):
    assert chi2_cdf(chi2_quantile(p, k), k) == pytest.approx(p, abs=1e-10)


def test_domain_errors():
    with pytest.raises(ValueError):
        chi2_cdf(1.0, 0)
    with pytest.raises(ValueError):
        chi2_quantile(1.0, 3)
    with pytest.raises(ValueError):
        noncentral_chi2_cdf(1.0, 3, -1.0)


def test_lag_covariance_examples(rng):
    x = np.sqrt(10 / 2) * random_complex(rng, 2, 100_000)
    R = lag_covariance(IQFrame(x))
    np.testing.assert_allclose(np.diag(R).real, [10, 10], rtol=0.03)
    assert abs(R[0, 1]) < 0.3
    np.testing.assert_allclose(lag_covariance(IQFrame(np.ones((2, 50)))), np.ones((2, 2)) * 50 / 49)


def test_cyclic_covariance_of_noise_is_small(rng):
    x = np.sqrt(10 / 2) * random_complex(rng, 2, 100_000)
    assert np.abs(cyclic_covariance(IQFrame(x), 0.5, 0, True)).max() < 0.15


def test_cyclic_covariance_of_noiseless_bpsk(spec):
    from evcss.signals import generate_bpsk
    s = generate_bpsk(spec, 100_000, 3)
    h = np.array([1.0, 1.0])
    Ra = cyclic_covariance(IQFrame(np.outer(h, s), spec.sample_period_s), 160e3, 0, True)
    np.testing.assert_allclose(Ra, np.outer(h, h), atol=1e-3)


def test_eigenvalue_examples():
    pair = CovariancePair(np.eye(2), np.zeros((2, 2)))
    np.testing.assert_array_equal(ccst_eigenvalues(pair), [0, 0])
    pair = CovariancePair(np.eye(2), np.diag([0.5, 0.0]))
    np.testing.assert_allclose(ccst_eigenvalues(pair), [0.25, 0.0], atol=1e-15)


def test_two_by_two_characteristic_polynomial(rng):
    # mu^2 are the roots of det(Ra Ryy^-1 Ra^H - mu^2 Rxx) = 0.
    for _ in range(20):
        B = random_complex(rng, 2, 2)
        R = B @ B.conj().T + np.eye(2)
        Ra = 0.3 * random_complex(rng, 2, 2)
        Ra = Ra + Ra.T  # conjugate cyclic covariances are symmetric
        pair = CovariancePair(R, Ra, conjugate=True)
        mu2 = ccst_eigenvalues(pair)
        P = Ra @ np.linalg.inv(R.conj()) @ Ra.conj().T
        # det(P - t R) = det(R) t^2 - c1 t + det(P) for 2x2 matrices
        c1 = P[0, 0] * R[1, 1] + P[1, 1] * R[0, 0] - P[0, 1] * R[1, 0] - P[1, 0] * R[0, 1]
        roots = np.sort(np.roots([np.linalg.det(R), -c1, np.linalg.det(P)]).real)[::-1]
        if roots.max() < 1:
            np.testing.assert_allclose(mu2, roots, atol=1e-10)


@pytest.mark.parametrize("conjugate", [True, False])
def test_eigenvalues_match_block_determinant(conjugate, rng):
    for _ in range(100):
        x = random_complex(rng, 3, 60)
        pair = covariance_pair(IQFrame(x), 0.23, 1, conjugate)
        lam = float(np.prod(1 - ccst_eigenvalues(pair)))
        assert lam == pytest.approx(block_determinant_lambda(pair), rel=1e-9)


def test_ill_conditioned_rejected():
    x = np.ones((2, 100), dtype=complex)
    with pytest.raises(IllConditionedError) as err:
        ccst_eigenvalues(covariance_pair(IQFrame(x), 0.5))
    assert err.value.cond > 1e12


def test_out_of_range_eigenvalues_warn():
    pair = CovariancePair(np.eye(2), np.diag([1.5, 0.0]))
    with pytest.warns(EigenvalueRangeWarning):
        mu2 = ccst_eigenvalues(pair)
    assert mu2.max() < 1


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), M=st.integers(1, 4), conj=st.booleans())
def test_eigenvalues_in_unit_interval_and_sorted(seed, M, conj):
    rng = np.random.default_rng(seed)
    x = random_complex(rng, M, 40)
    with warnings.catch_warnings():
        warnings.simplefilter("error", EigenvalueRangeWarning)
        mu2 = ccst_eigenvalues(covariance_pair(IQFrame(x), 0.31, 0, conj))
    assert np.all((mu2 >= 0) & (mu2 < 1))
    assert np.all(np.diff(mu2) <= 0)


def test_frame_shape_checks():
    with pytest.raises(ValueError):
        IQFrame(np.zeros((3, 4)))
    assert IQFrame(np.zeros(10)).M == 1


def test_zero_frequency_cyclic_covariance_is_lag_covariance(rng):
    f = IQFrame(random_complex(rng, 3, 200))
    np.testing.assert_allclose(cyclic_covariance(f, 0.0, 0, False), lag_covariance(f, 0),
                               atol=1e-13)


def test_spec_two_by_two_case():
    R = np.array([[2, 0.3], [0.3, 1]], dtype=complex)
    Ra = np.array([[0.4, 0.1], [0.2, 0.3]], dtype=complex)
    pair = CovariancePair(R, Ra, conjugate=False)
    P = np.linalg.inv(R) @ Ra @ np.linalg.inv(R) @ Ra.conj().T
    # Roots of t^2 - tr(P) t + det(P).
    tr, det = np.trace(P), np.linalg.det(P)
    disc = np.sqrt(tr ** 2 - 4 * det)
    roots = np.sort(np.real([(tr + disc) / 2, (tr - disc) / 2]))[::-1]
    np.testing.assert_allclose(ccst_eigenvalues(pair), roots, atol=1e-12)
