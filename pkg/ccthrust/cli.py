"""Command-line entry point: ``ccthrust {force,spectrum,polarizability,sweep}``."""

from __future__ import annotations

import argparse
import logging
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from . import __version__, create_services
from .commands.force_commands import run_force_command
from .commands.spectrum_commands import run_polarizability_command, run_spectrum_command
from .commands.sweep_commands import run_sweep_command
from .config import get_config, load_settings
from .errors import CcthrustError
from .utils import configure_logging, create_error_report

logger = logging.getLogger(__name__)

# parser-only entries that are not settings
_NON_SETTINGS = ("command", "config", "handler")


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    particle = parser.add_argument_group("particle and run")
    particle.add_argument("--radius-m", type=float, help="sphere radius in metres (required)")
    rotation = particle.add_mutually_exclusive_group()
    rotation.add_argument("--rot-freq-hz", type=float, help="rotation frequency in Hz (default 10 kHz)")
    rotation.add_argument("--rot-omega-rad-s", type=float, help="rotation angular frequency in rad/s")
    particle.add_argument("--t-env-k", type=float, help="field temperature in K")
    particle.add_argument("--t-particle-k", type=float, help="particle temperature in K")

    material = parser.add_argument_group("material")
    material.add_argument("--material", help="material definition file (default: built-in Omega-particle medium)")
    omega0 = material.add_mutually_exclusive_group()
    omega0.add_argument("--omega0-hz", type=float, help="primary resonance frequency in Hz")
    omega0.add_argument("--omega0-rad-s", type=float, help="primary resonance angular frequency in rad/s")
    material.add_argument("--kappa-strength", type=float, help="chirality strength of the primary resonance")
    material.add_argument("--freeze-gamma", action="store_true", default=None,
                          help="keep gamma fixed in rad/s when omega0 changes")
    material.add_argument("--damping-convention", choices=["gamma_omega", "gamma_omega0"])

    numerics = parser.add_argument_group("numerics")
    numerics.add_argument("--pol-mode", choices=["mie", "quasistatic", "quasistatic-rc"])
    numerics.add_argument("--diff-mode", choices=["auto", "exact", "linearized"])
    numerics.add_argument("--rel-tol", type=float)
    numerics.add_argument("--window-linewidths", type=float,
                          help="half-width of the integration window in resonance linewidths")

    output = parser.add_argument_group("output")
    output.add_argument("--out", choices=["csv", "json"])
    output.add_argument("--output", help="output path, or 'stdout'")
    output.add_argument("--config", help="dotenv-style settings file")
    output.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])


def _add_grid_arguments(parser: argparse.ArgumentParser) -> None:
    grid = parser.add_argument_group("frequency grid")
    grid.add_argument("--omega-min-rad-s", type=float)
    grid.add_argument("--omega-max-rad-s", type=float)
    grid.add_argument("--points", type=int)
    grid.add_argument("--log", action="store_true", default=None, help="geometric spacing")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ccthrust",
        description="Vacuum thrust force on a rotating chiral particle.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    force = sub.add_parser("force", help="integrated force and its three components")
    _add_common_arguments(force)
    force.set_defaults(handler=run_force_command)

    spectrum = sub.add_parser("spectrum", help="spectral densities of the force components")
    _add_common_arguments(spectrum)
    _add_grid_arguments(spectrum)
    spectrum.set_defaults(handler=run_spectrum_command)

    polar = sub.add_parser("polarizability", help="alpha_e, alpha_m, chi on a frequency grid")
    _add_common_arguments(polar)
    _add_grid_arguments(polar)
    polar.set_defaults(handler=run_polarizability_command)

    sweep = sub.add_parser("sweep", help="one-dimensional parameter sweep")
    _add_common_arguments(sweep)
    sweep.add_argument("--var", choices=["rot", "temp", "omega0", "kappa", "radius"])
    sweep.add_argument("--from", dest="value_from", type=float)
    sweep.add_argument("--to", dest="value_to", type=float)
    sweep.add_argument("--points", type=int)
    sweep.add_argument("--log", action="store_true", default=None, help="geometric spacing")
    sweep.add_argument("--temp-target", choices=["both", "env", "particle"])
    sweep.add_argument("--workers", type=int)
    sweep.set_defaults(handler=run_sweep_command)
    return parser


def _cli_values(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in vars(args).items() if v is not None and k not in _NON_SETTINGS}


def main(argv: Optional[List[str]] = None, services: Optional[Dict[str, Any]] = None) -> int:
    """Parse arguments, merge settings sources and dispatch to a command. Returns the exit code."""
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        settings = load_settings(_cli_values(args), args.config)
        config_class = get_config()
        configure_logging(settings.get("log_level", config_class.LOG_LEVEL))
        if services is None:
            services = create_services(config_class)
    except CcthrustError as e:
        configure_logging("INFO")
        return create_error_report("Invalid configuration", e)

    logger.debug("Running '%s' with settings %s", args.command, settings)
    return args.handler(services, settings)


if __name__ == "__main__":
    raise SystemExit(main())
