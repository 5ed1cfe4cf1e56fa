"""Command-line entry point: ``evcss <subcommand> [--config FILE] [--field value ...]``.

Exit codes: 0 ok, 1 runtime error, 2 configuration/usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields

from .. import analysis
from .config import ConfigError, ExperimentConfig, build_config, parse_config_text, parse_value
from .io import emit_plot_script, write_results
from .runner import ExperimentError, run_experiment

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2

SUBCOMMANDS = {
    "h0-dist": ("h0-dist",),
    "h1-dist": ("h1-dist",),
    "roc": ("roc",),
    "pd-sweep": ("pd-vs-snr", "pd-vs-n", "pd-vs-m", "spatial-corr"),
    "noise-uncertainty": ("noise-uncertainty",),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key = value experiment file")
    p.add_argument("--out", help="CSV output path (default: <experiment>.csv)")
    p.add_argument("--emit-plot", action="store_true", help="write a plotting script next to the CSV")
    p.add_argument("-v", "--verbose", action="store_true")
    for f in fields(ExperimentConfig):
        p.add_argument("--" + f.name.replace("_", "-"), dest="cfg_" + f.name, metavar="VALUE",
                       help=f"override '{f.name}'")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evcss", description="EV-CSS spectrum sensing experiments")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    th = sub.add_parser("threshold", help="print the CFAR threshold for EV-CSS")
    th.add_argument("--pfa", type=float, required=True)
    th.add_argument("--antennas", type=int, required=True)
    th.add_argument("--variant", default="conjugate",
                    choices=["conjugate", "non-conjugate", "C", "NC"])
    for name in SUBCOMMANDS:
        _add_config_flags(sub.add_parser(name))
    return parser


def _overrides(ns) -> dict:
    out = {}
    for key, val in vars(ns).items():
        if key.startswith("cfg_") and val is not None:
            name = key[4:]
            try:
                out[name] = parse_value(name, val)
            except ValueError as exc:
                raise ConfigError(f"{name}: {exc}") from None
    return out


def _run(command: str, ns) -> int:
    allowed = SUBCOMMANDS[command]
    values = {}
    if ns.config is not None:
        with open(ns.config, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read()))
    values.update(_overrides(ns))
    values.setdefault("experiment", allowed[0])
    cfg = build_config(values)
    if cfg.experiment not in allowed:
        raise ConfigError(f"experiment: '{cfg.experiment}' cannot run under '{command}' "
                          f"(expected {', '.join(allowed)})")
    rows = run_experiment(cfg)
    out = write_results(rows, ns.out or f"{cfg.experiment}.csv")
    print(out)
    if ns.emit_plot:
        print(emit_plot_script(out))
    return EXIT_OK


def cli_main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        ns = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if getattr(ns, "verbose", False) else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if ns.command == "threshold":
            try:
                spec = analysis.threshold_cfar(ns.pfa, ns.antennas, ns.variant)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            print(f"{spec.gamma:.6g}")
            return EXIT_OK
        return _run(ns.command, ns)
    except ConfigError as exc:
        print(f"evcss: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ExperimentError, OSError, ValueError, ArithmeticError) as exc:
        print(f"evcss: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
