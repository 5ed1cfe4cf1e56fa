import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evcss.channel import ChannelRealization, spatial_cholesky, synthesize_frame
from evcss.detectors import (DetectorId, MsdfConfig, bmrc_channel_estimate, bmrc_msdf,
                             egc_msdf, egc_phases, evcss, msdf_statistic, sum_msdf)
from evcss.matstats import IQFrame
from evcss.signals import CyclicFeature, cyclic_correlogram, generate_bpsk

TS = 1 / 320e3


def noisy_frame(spec, h, sigma2, N, seed, rho_s=0.0):
    rng = np.random.default_rng(seed)
    s = generate_bpsk(spec, N, rng)
    noise = spatial_cholesky(rho_s, sigma2, len(h))
    return synthesize_frame(s, ChannelRealization.fixed(h), noise, N, rng, TS)


def test_evcss_statistic_at_known_correlation(spec, feature):
    # h = [1, 1], sigma^2 = 2 gives rho = 2 / (2 + 2) = 0.5, so mu1^2 -> 0.25.
    frame = noisy_frame(spec, [1, 1], 2.0, 200_000, 1)
    out = evcss(frame, feature)
    assert out.eigenvalues_sq[0] == pytest.approx(0.25, abs=0.01)
    assert out.eigenvalues_sq[1] < 1e-3
    m = frame.N - 3
    assert out.statistic == pytest.approx(-m * np.sum(np.log1p(-out.eigenvalues_sq)), rel=1e-12)
    assert out.lam == pytest.approx(np.prod(1 - out.eigenvalues_sq), rel=1e-12)


def test_evcss_arithmetic_example():
    # mu^2 = [0.25, 0] at N = 1000, M = 2 gives T = -997 ln 0.75.
    assert -997 * np.log(0.75) == pytest.approx(286.82, abs=0.01)


def test_evcss_decision(spec, feature):
    frame = noisy_frame(spec, [1, 1], 10.0, 1000, 2)
    out = evcss(frame, feature, threshold=10.6446)
    assert out.detector_id is DetectorId.EVCSS
    assert out.decision == (out.statistic > 10.6446)
    assert evcss(frame, feature).decision is None


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1),
       c=st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False,
                            allow_infinity=False))
def test_evcss_scale_invariant(seed, c):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((2, 300)) + 1j * rng.standard_normal((2, 300))
    f = CyclicFeature(160e3)
    t0 = evcss(IQFrame(x, TS), f).statistic
    t1 = evcss(IQFrame(c * x, TS), f).statistic
    assert t1 == pytest.approx(t0, rel=1e-9)


def test_msdf_noiseless_equals_correlogram(spec, feature):
    s = generate_bpsk(spec, 4096, 3)
    stat = msdf_statistic(s, feature, MsdfConfig(), TS)
    assert stat == pytest.approx(1.0, abs=1e-9)
    assert stat == pytest.approx(abs(cyclic_correlogram(s, 160e3, 0, True, TS)), rel=1e-3)
    signal_norm = msdf_statistic(s, feature, MsdfConfig(normalization="signal"), TS)
    assert signal_norm == pytest.approx(1.0, abs=1e-9)


def test_msdf_noise_is_small(feature, rng):
    w = (rng.standard_normal(4000) + 1j * rng.standard_normal(4000)) / np.sqrt(2)
    assert msdf_statistic(w, feature, MsdfConfig(), TS) < 0.1


def test_msdf_received_normalization_is_scale_invariant(feature, rng):
    w = rng.standard_normal(1024) + 1j * rng.standard_normal(1024)
    cfg = MsdfConfig()
    assert msdf_statistic(7.0 * w, feature, cfg, TS) == pytest.approx(
        msdf_statistic(w, feature, cfg, TS), rel=1e-12)
    sig = MsdfConfig(normalization="signal")
    assert msdf_statistic(3.0 * w, feature, sig, TS) == pytest.approx(
        9.0 * msdf_statistic(w, feature, sig, TS), rel=1e-12)


def test_msdf_smoothing_window(spec, feature):
    s = generate_bpsk(spec, 4096, 3)
    narrow = msdf_statistic(s, feature, MsdfConfig(smoothing_bins=1), TS)
    wide = msdf_statistic(s, feature, MsdfConfig(smoothing_bins=63), TS)
    assert 0 < narrow < wide <= 1.0 + 1e-9


def test_misaligned_cyclic_frequency(spec):
    s = generate_bpsk(spec, 1024, 1)
    with pytest.raises(ValueError, match="between FFT bins"):
        msdf_statistic(s, CyclicFeature(37e3), MsdfConfig(), TS)


@pytest.mark.parametrize("kwargs", [dict(fft_size=100), dict(smoothing_bins=4),
                                    dict(normalization="peak")])
def test_msdf_config_validation(kwargs):
    with pytest.raises(ValueError):
        MsdfConfig(**kwargs)


def test_egc_recovers_phase(spec, feature):
    s = generate_bpsk(spec, 4096, 5)
    h = np.array([1.0, np.exp(1j * np.pi / 3)])
    frame = IQFrame(np.outer(h, s), TS)
    phi = egc_phases(frame, feature)
    assert phi[0] == 0.0
    assert phi[1] == pytest.approx(np.pi / 3, abs=0.01)
    # Co-phased coherent sum: amplitude doubles, statistic is normalised.
    assert egc_msdf(frame, feature).statistic == pytest.approx(1.0, abs=1e-6)


def test_egc_identity_rotation(spec, feature):
    s = generate_bpsk(spec, 2048, 5)
    frame = IQFrame(np.outer([1.0, 1.0], s), TS)
    np.testing.assert_allclose(egc_phases(frame, feature), 0.0, atol=1e-12)
    with pytest.raises(ValueError):
        egc_phases(frame, feature, reference=2)


def test_bmrc_aligns_with_channel(spec, feature):
    s = generate_bpsk(spec, 4096, 7)
    h = np.array([3, 4j]) / 5
    frame = IQFrame(np.outer(h, s), TS)
    h_hat = bmrc_channel_estimate(frame, feature)
    assert abs(np.vdot(h_hat, h)) / np.linalg.norm(h) >= 0.999


def test_bmrc_zero_cyclic_covariance_falls_back(feature):
    frame = IQFrame(np.zeros((2, 512)), TS)
    with pytest.warns(RuntimeWarning):
        assert bmrc_msdf(frame, feature).statistic == 0.0


def test_single_antenna_reductions(spec, feature):
    frame = noisy_frame(spec, [1.0], 1.0, 2048, 11)
    ref = msdf_statistic(frame.samples[0], feature, MsdfConfig(), TS)
    assert sum_msdf(frame, feature).statistic == pytest.approx(ref, rel=1e-12)
    assert egc_msdf(frame, feature).statistic == pytest.approx(ref, rel=1e-12)
    assert bmrc_msdf(frame, feature).statistic == pytest.approx(ref, rel=1e-12)


def test_duplicated_antenna_doubles_sum(spec, feature):
    frame = noisy_frame(spec, [1.0], 1.0, 2048, 12)
    dup = IQFrame(np.vstack([frame.samples, frame.samples]), TS)
    assert sum_msdf(dup, feature).statistic == pytest.approx(
        2 * sum_msdf(frame, feature).statistic, rel=1e-12)


def test_bmrc_perfect_csi(spec, feature):
    frame = noisy_frame(spec, [1, 1j], 1.0, 2048, 13)
    out = bmrc_msdf(frame, feature, channel=ChannelRealization.fixed([1, 1j]))
    combined = np.array([1, -1j]) @ frame.samples / np.sqrt(2)
    assert out.statistic == pytest.approx(msdf_statistic(combined, feature, MsdfConfig(), TS))
