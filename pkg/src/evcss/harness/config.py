"""Declarative experiment configuration (flat ``key = value`` files)."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields

from ..detectors import DetectorId, MsdfConfig
from ..signals import CyclicFeature, SignalSpec, reference_cyclic_feature


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


# experiment -> the grid it sweeps
SWEEP_AXES = {
    "h0-dist": "antennas",
    "h1-dist": "antennas",
    "roc": "pfa",
    "pd-vs-snr": "snr_db",
    "pd-vs-n": "samples",
    "pd-vs-m": "antennas",
    "spatial-corr": "rho_s",
    "noise-uncertainty": "snr_delta_db",
}
GRID_FIELDS = ("antennas", "samples", "snr_db", "snr_delta_db", "rho_s", "pfa")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "pd-vs-snr"
    antennas: tuple = (2,)
    samples: tuple = (1000,)
    snr_db: tuple = (-10.0,)
    snr_delta_db: tuple = (0.0,)
    rho_s: tuple = (0.0,)
    pfa: tuple = (0.1,)
    trials: int = 5000
    calibration_factor: int = 10
    channel: str = "rayleigh"
    channel_gains: tuple = ()
    detectors: tuple = ("evcss", "sum_msdf", "egc_msdf", "bmrc_msdf")
    bmrc_perfect_csi: bool = False
    carrier_hz: float = 80e3
    symbol_period_s: float = 25e-6
    sample_rate_hz: float = 320e3
    alpha_hz: float = 160e3
    tau: int = 0
    conjugate: str = "auto"
    fft_size: int = 128
    smoothing_bins: int | None = None
    msdf_normalization: str = "received"
    reference_antenna: int = 0
    seed: int = 1
    workers: int | None = None

    def __post_init__(self):
        validate(self)

    @property
    def sweep_axis(self) -> str:
        return SWEEP_AXES[self.experiment]

    @property
    def sweep_values(self) -> tuple:
        return getattr(self, self.sweep_axis)

    def signal_spec(self) -> SignalSpec:
        return SignalSpec(carrier_freq_hz=self.carrier_hz, symbol_period_s=self.symbol_period_s,
                          sample_period_s=1.0 / self.sample_rate_hz)

    def feature(self) -> CyclicFeature:
        ref = reference_cyclic_feature(self.signal_spec(), self.alpha_hz, self.tau)
        if self.conjugate == "auto":
            return ref
        return dataclasses.replace(ref, conjugate=self.conjugate == "true")

    def msdf(self) -> MsdfConfig:
        return MsdfConfig(self.fft_size, self.reference_antenna, self.smoothing_bins,
                          normalization=self.msdf_normalization)

    def detector_ids(self) -> tuple[DetectorId, ...]:
        return tuple(DetectorId(d) for d in self.detectors)

    def gains(self, M: int):
        if not self.channel_gains:
            return (1.0 + 0j,) * M
        if len(self.channel_gains) != M:
            raise ConfigError(f"channel_gains: {len(self.channel_gains)} values for M={M}")
        return self.channel_gains


def validate(cfg: ExperimentConfig) -> None:
    if cfg.experiment not in SWEEP_AXES:
        raise ConfigError(f"experiment: unknown {cfg.experiment!r}; "
                          f"choose from {', '.join(SWEEP_AXES)}")
    for name in GRID_FIELDS:
        if len(getattr(cfg, name)) == 0:
            raise ConfigError(f"{name}: empty grid")
    for name in GRID_FIELDS:
        if name != cfg.sweep_axis and len(getattr(cfg, name)) != 1:
            raise ConfigError(f"{name}: {cfg.experiment} sweeps {cfg.sweep_axis}; "
                              f"{name} must hold a single value")
    if cfg.trials < 100:
        raise ConfigError("trials: must be at least 100")
    if cfg.calibration_factor < 1:
        raise ConfigError("calibration_factor: must be >= 1")
    if cfg.channel not in ("awgn", "rayleigh"):
        raise ConfigError("channel: must be 'awgn' or 'rayleigh'")
    if any(m < 1 for m in cfg.antennas):
        raise ConfigError("antennas: must be >= 1")
    if any(n <= m + 1 for n in cfg.samples for m in cfg.antennas):
        raise ConfigError("samples: need N > M + 1")
    if any(not 0 < p < 1 for p in cfg.pfa):
        raise ConfigError("pfa: values must lie strictly between 0 and 1")
    if any(not 0 <= r < 1 for r in cfg.rho_s):
        raise ConfigError("rho_s: values must lie in [0, 1)")
    if any(d < 0 for d in cfg.snr_delta_db):
        raise ConfigError("snr_delta_db: must be non-negative")
    if cfg.conjugate not in ("auto", "true", "false"):
        raise ConfigError("conjugate: must be auto, true or false")
    if not cfg.detectors:
        raise ConfigError("detectors: empty list")
    for d in cfg.detectors:
        try:
            DetectorId(d)
        except ValueError:
            raise ConfigError(f"detectors: unknown detector {d!r}") from None
    try:
        cfg.msdf()
        cfg.signal_spec()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# -- text format -------------------------------------------------------------

def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional_int(text: str):
    t = text.strip().lower()
    return None if t in ("", "none", "full", "auto") else int(t)


def _split(text: str) -> list[str]:
    return [p.strip() for p in text.replace(";", ",").split(",") if p.strip()]


_SCALAR = {
    "experiment": lambda t: t.strip().lower(),
    "trials": int,
    "calibration_factor": int,
    "channel": lambda t: t.strip().lower(),
    "bmrc_perfect_csi": _bool,
    "carrier_hz": float,
    "symbol_period_s": float,
    "sample_rate_hz": float,
    "alpha_hz": float,
    "tau": int,
    "conjugate": lambda t: t.strip().lower(),
    "fft_size": int,
    "smoothing_bins": _optional_int,
    "msdf_normalization": lambda t: t.strip().lower(),
    "reference_antenna": int,
    "seed": int,
    "workers": _optional_int,
}
_LIST = {
    "antennas": int,
    "samples": int,
    "snr_db": float,
    "snr_delta_db": float,
    "rho_s": float,
    "pfa": float,
    "channel_gains": lambda t: complex(t.replace(" ", "").replace("i", "j")),
    "detectors": lambda t: t.strip().lower().replace("-", "_"),
}
FIELD_NAMES = tuple(f.name for f in fields(ExperimentConfig))


def parse_value(key: str, text: str):
    if key in _LIST:
        return tuple(_LIST[key](p) for p in _split(text))
    if key in _SCALAR:
        return _SCALAR[key](text)
    raise ConfigError(f"{key}: unknown field")


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        try:
            values[key] = parse_value(key, val)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
    return values


def build_config(values: dict) -> ExperimentConfig:
    unknown = set(values) - set(FIELD_NAMES)
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown field")
    try:
        return ExperimentConfig(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    values = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read()))
    values.update(overrides or {})
    return build_config(values)


def dump_config(cfg: ExperimentConfig) -> str:
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ", ".join(str(x) for x in v)
        elif v is None:
            v = "none"
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"
