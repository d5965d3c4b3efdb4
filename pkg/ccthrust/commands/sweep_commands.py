# ccthrust/commands/sweep_commands.py

import logging
from typing import Any, Dict, Mapping

from ccthrust.config import as_bool, require_float
from ccthrust.errors import CcthrustError, ConfigurationError, ConvergenceFailure
from ccthrust.schemas import Spacing, SweepSpec, SweepVariable, TemperatureTarget
from ccthrust.utils import create_error_report

logger = logging.getLogger(__name__)

# ==============================================================================
# 🛠️ Helper Functions
# ==============================================================================


def build_sweep_spec(services: Dict[str, Any], settings: Mapping[str, Any]) -> SweepSpec:
    """SweepSpec from merged settings; the base context comes from the common flags."""
    if settings.get("var") is None:
        raise ConfigurationError("missing required setting 'var'", key="var")
    variable = SweepVariable.from_cli(str(settings["var"]))

    target = str(settings.get("temp_target", TemperatureTarget.BOTH.value)).strip().lower()
    try:
        target = TemperatureTarget(target)
    except ValueError:
        raise ConfigurationError(f"unknown temperature target '{target}'", key="temp_target") from None

    spec = SweepSpec(
        variable=variable,
        value_from=require_float(settings, "value_from"),
        value_to=require_float(settings, "value_to"),
        points=int(require_float(settings, "points", 21)),
        spacing=Spacing.LOG if as_bool(settings.get("log", False)) else Spacing.LINEAR,
        base=services["force_service"].build_context(settings),
        freeze_gamma=as_bool(settings.get("freeze_gamma", False)),
        temperature_target=target,
    )
    services["sweep_service"].validate_value_range(spec)
    return spec

# ==============================================================================
# 🎯 Sweep Command
# ==============================================================================


def run_sweep_command(services: Dict[str, Any], settings: Mapping[str, Any]) -> int:
    """
    One-dimensional sweep of compute_force.

    Failed rows stay in the table; the command exits with the convergence
    code only when every row failed.
    """
    try:
        spec = build_sweep_spec(services, settings)
        workers = int(require_float(settings, "workers", services["config"].WORKERS))
        result = services["sweep_service"].run_sweep(spec, workers=workers)

        markers = result.markers.to_dict()
        for name, marker in markers.items():
            logger.info("Sweep marker %s: %s", name, marker)

        metadata = services["force_service"].describe(spec.base)
        metadata.update({
            "variable": spec.variable.value,
            "spacing": spec.spacing.value,
            "freeze_gamma": spec.freeze_gamma,
            "temperature_target": spec.temperature_target.value,
            "markers": markers,
        })
        services["table_repository"].emit_table(
            [row.to_row(spec.variable) for row in result.rows],
            fmt=str(settings.get("out", services["config"].OUTPUT_FORMAT)),
            output=settings.get("output"),
            kind="sweep",
            metadata=metadata,
        )

        if result.all_failed:
            return create_error_report("Sweep failed", ConvergenceFailure("every sweep point failed"))
        return 0

    except CcthrustError as e:
        return create_error_report("Sweep failed", e)
    except Exception as e:
        return create_error_report("Unexpected error during sweep", e)
