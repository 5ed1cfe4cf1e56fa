"""Monte Carlo experiment engine.

Each trial draws from its own generator seeded by (master seed, sweep point,
phase, trial index), so results do not depend on how trials are split
across workers.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .. import analysis
from ..channel import (ChannelRealization, draw_rayleigh, draw_uncertain_snr,
                       snr_to_noise_power, spatial_cholesky, synthesize_frame)
from ..detectors import DETECTORS, DetectorId, MsdfConfig, bmrc_msdf
from ..matstats import IllConditionedError
from ..signals import CyclicFeature, SignalSpec, generate_bpsk
from .config import ExperimentConfig

log = logging.getLogger(__name__)

WORKERS_ENV = "EVCSS_WORKERS"
CHUNK = 250
MAX_ERROR_RATE = 1e-3

PHASE_CALIBRATION, PHASE_H0, PHASE_H1 = 0, 1, 2


class ExperimentError(RuntimeError):
    pass


@dataclass(frozen=True)
class SweepPoint:
    """Everything a worker needs to simulate trials at one operating point."""

    index: int
    M: int
    N: int
    snr_db: float
    snr_delta_db: float
    rho_s: float
    channel: str
    gains: tuple
    detectors: tuple
    feature: CyclicFeature
    spec: SignalSpec
    msdf: MsdfConfig
    seed: int
    bmrc_perfect_csi: bool = False

    def fixed_channel(self) -> ChannelRealization:
        return ChannelRealization.fixed(self.gains)

    def noise_power(self, snr_db: float) -> float:
        if self.channel == "rayleigh":
            return snr_to_noise_power(snr_db, "rayleigh", self.M)
        return snr_to_noise_power(snr_db, self.fixed_channel(), self.M)


@dataclass
class PointStatistics:
    """Raw statistics per detector; arrays are indexed by trial."""

    point: SweepPoint
    h0: dict = field(default_factory=dict)
    h1: dict = field(default_factory=dict)
    calibration: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)


@dataclass
class SummaryRow:
    experiment: str
    detector: str
    sweep_axis: str
    sweep_value: float
    M: int
    N: int
    snr_db: float
    rho_s: float
    threshold: float
    pfa_emp: float | None
    pfa_stderr: float | None
    pd_emp: float | None
    pd_stderr: float | None
    pd_analytic: float | None
    trials: int
    seed: int


def trial_rng(seed: int, point: int, phase: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(point, phase, trial)))


def simulate_trial(pt: SweepPoint, phase: int, trial: int) -> np.ndarray:
    """Statistics of every configured detector on one synthesized frame."""
    rng = trial_rng(pt.seed, pt.index, phase, trial)
    # Calibration sees the same SNR spread as measurement, so empirical
    # thresholds hold the false-alarm rate averaged over the uncertainty.
    snr = draw_uncertain_snr(pt.snr_db, pt.snr_delta_db, rng)
    noise = spatial_cholesky(pt.rho_s, pt.noise_power(snr), pt.M)
    h = draw_rayleigh(pt.M, rng) if pt.channel == "rayleigh" else pt.fixed_channel()
    soi = generate_bpsk(pt.spec, pt.N, rng) if phase == PHASE_H1 else None
    frame = synthesize_frame(soi, h, noise, pt.N, rng, pt.spec.sample_period_s)
    out = np.empty(len(pt.detectors))
    for i, det in enumerate(pt.detectors):
        try:
            if det is DetectorId.EVCSS:
                out[i] = DETECTORS[det](frame, pt.feature).statistic
            elif det is DetectorId.BMRC_MSDF and pt.bmrc_perfect_csi:
                out[i] = bmrc_msdf(frame, pt.feature, pt.msdf, channel=h).statistic
            else:
                out[i] = DETECTORS[det](frame, pt.feature, pt.msdf).statistic
        except IllConditionedError:
            out[i] = np.nan
    return out


def _chunk(args) -> np.ndarray:
    pt, phase, start, stop = args
    return np.array([simulate_trial(pt, phase, t) for t in range(start, stop)]).reshape(
        stop - start, len(pt.detectors))


def worker_count(requested: int | None = None) -> int:
    if requested:
        return max(1, int(requested))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def simulate(pt: SweepPoint, phase: int, trials: int, workers: int = 1,
             pool: ProcessPoolExecutor | None = None) -> np.ndarray:
    """(trials x detectors) array of statistics; identical for any worker count."""
    jobs = [(pt, phase, s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]
    if pool is None or workers <= 1:
        parts = [_chunk(j) for j in jobs]
    else:
        parts = list(pool.map(_chunk, jobs))
    return np.concatenate(parts, axis=0) if parts else np.zeros((0, len(pt.detectors)))


def make_points(cfg: ExperimentConfig) -> list[SweepPoint]:
    feature = cfg.feature()
    spec = cfg.signal_spec()
    msdf = cfg.msdf()
    axis = cfg.sweep_axis
    values = cfg.sweep_values if axis != "pfa" else (cfg.pfa[0],)
    points = []
    for i, v in enumerate(values):
        get = (lambda name: v if name == axis else getattr(cfg, name)[0])
        M = int(get("antennas"))
        points.append(SweepPoint(
            index=i, M=M, N=int(get("samples")), snr_db=float(get("snr_db")),
            snr_delta_db=float(get("snr_delta_db")), rho_s=float(get("rho_s")),
            channel=cfg.channel,
            gains=tuple(cfg.gains(M)) if cfg.channel == "awgn" else (),
            detectors=cfg.detector_ids(), feature=feature, spec=spec, msdf=msdf,
            seed=cfg.seed, bmrc_perfect_csi=cfg.bmrc_perfect_csi,
        ))
    return points


def collect_statistics(pt: SweepPoint, trials: int, calibration_trials: int = 0,
                       h1: bool = True, workers: int | None = None) -> PointStatistics:
    """Run calibration, then H0 and H1 measurement batches at one point."""
    workers = worker_count(workers)
    stats = PointStatistics(pt)
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        phases = [(PHASE_CALIBRATION, calibration_trials, stats.calibration),
                  (PHASE_H0, trials, stats.h0)]
        if h1:
            phases.append((PHASE_H1, trials, stats.h1))
        for phase, n, target in phases:
            if n == 0:
                continue
            arr = simulate(pt, phase, n, workers, pool)
            for j, det in enumerate(pt.detectors):
                col = arr[:, j]
                bad = int(np.isnan(col).sum())
                stats.errors[det] = stats.errors.get(det, 0) + bad
                if bad > MAX_ERROR_RATE * n:
                    raise ExperimentError(
                        f"{det.value}: {bad} of {n} trials failed at point {pt.index}")
                if bad:
                    log.warning("%s: %d of %d trials failed", det.value, bad, n)
                target[det] = col
    finally:
        if pool is not None:
            pool.shutdown()
    return stats


def empirical_threshold(calibration: np.ndarray, pfa: float) -> float:
    """Smallest calibration order statistic exceeded by at most a pfa fraction."""
    x = np.sort(calibration[~np.isnan(calibration)])
    k = int(math.ceil((1.0 - pfa) * x.size)) - 1
    return float(x[min(max(k, 0), x.size - 1)])


def _rate(stat: np.ndarray, gamma: float):
    s = stat[~np.isnan(stat)]
    p = float(np.mean(s > gamma))
    return p, math.sqrt(p * (1 - p) / s.size)


def analytic_pd(pt: SweepPoint, gamma: float) -> float:
    feat = pt.feature
    variant = feat.conjugate

    def at_snr(snr):
        s2 = pt.noise_power(snr)
        noise = spatial_cholesky(pt.rho_s, s2, pt.M)
        if pt.channel == "rayleigh":
            return analysis.pd_rayleigh(gamma, pt.M, pt.N, s2, feat.rss_alpha_mag, noise,
                                        variant, seed=pt.seed)
        rho = analysis.true_canonical_corr(pt.fixed_channel(), noise, feat.rss_alpha_mag)
        return analysis.pd_fixed_channel(gamma, pt.M, pt.N, rho, variant)

    return analysis.average_over_uniform_snr(at_snr, pt.snr_db, pt.snr_delta_db)


def summarize(cfg: ExperimentConfig, stats: PointStatistics, sweep_value: float,
              pfa: float) -> list[SummaryRow]:
    pt = stats.point
    rows = []
    for det in pt.detectors:
        if det is DetectorId.EVCSS:
            gamma = analysis.threshold_cfar(pfa, pt.M, pt.feature.conjugate).gamma
            pd_an = analytic_pd(pt, gamma) if stats.h1 else None
        else:
            gamma = empirical_threshold(stats.calibration[det], pfa)
            pd_an = None
        pfa_emp, pfa_se = _rate(stats.h0[det], gamma)
        if stats.h1:
            pd_emp, pd_se = _rate(stats.h1[det], gamma)
        else:
            pd_emp = pd_se = None
        rows.append(SummaryRow(
            cfg.experiment, det.value, cfg.sweep_axis, float(sweep_value), pt.M, pt.N,
            pt.snr_db, pt.rho_s, gamma, pfa_emp, pfa_se, pd_emp, pd_se, pd_an,
            cfg.trials, cfg.seed,
        ))
    return rows


def run_experiment(cfg: ExperimentConfig, keep_statistics: list | None = None) -> list[SummaryRow]:
    """Simulate every sweep point of ``cfg`` and aggregate summary rows.

    Pass a list as ``keep_statistics`` to receive the raw PointStatistics.
    """
    rows = []
    need_h1 = cfg.experiment != "h0-dist"
    has_baselines = any(d is not DetectorId.EVCSS for d in cfg.detector_ids())
    for pt in make_points(cfg):
        log.info("point %d: M=%d N=%d snr=%g delta=%g rho_s=%g", pt.index, pt.M, pt.N,
                 pt.snr_db, pt.snr_delta_db, pt.rho_s)
        n_cal = cfg.calibration_factor * cfg.trials if has_baselines else 0
        stats = collect_statistics(pt, cfg.trials, n_cal, need_h1, cfg.workers)
        if keep_statistics is not None:
            keep_statistics.append(stats)
        if cfg.sweep_axis == "pfa":
            for p in cfg.pfa:
                rows.extend(summarize(cfg, stats, p, p))
        else:
            value = cfg.sweep_values[pt.index]
            rows.extend(summarize(cfg, stats, value, cfg.pfa[0]))
    return rows
