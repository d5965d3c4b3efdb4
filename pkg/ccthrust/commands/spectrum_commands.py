# ccthrust/commands/spectrum_commands.py

import logging
from typing import Any, Dict, Mapping

from ccthrust.errors import CcthrustError
from ccthrust.utils import create_error_report

logger = logging.getLogger(__name__)

# ==============================================================================
# 🛠️ Helper Functions
# ==============================================================================


def _emit_spectrum(services: Dict[str, Any], settings: Mapping[str, Any], kind: str) -> int:
    force_service = services["force_service"]
    ctx = force_service.build_context(settings)
    grid = force_service.frequency_grid(ctx, settings)

    rows = force_service.run_spectrum(ctx, grid, kind)

    services["table_repository"].emit_table(
        rows,
        fmt=str(settings.get("out", services["config"].OUTPUT_FORMAT)),
        output=settings.get("output"),
        kind=kind,
        metadata=force_service.describe(ctx),
    )
    return 0

# ==============================================================================
# 🎯 Spectrum Commands
# ==============================================================================


def run_spectrum_command(services: Dict[str, Any], settings: Mapping[str, Any]) -> int:
    """Spectral densities of the three force components on a frequency grid."""
    try:
        return _emit_spectrum(services, settings, "spectrum")
    except CcthrustError as e:
        return create_error_report("Force spectrum failed", e)
    except Exception as e:
        return create_error_report("Unexpected error during force spectrum", e)


def run_polarizability_command(services: Dict[str, Any], settings: Mapping[str, Any]) -> int:
    """Dipolar response (alpha_e, alpha_m, chi, upsilon) on a frequency grid."""
    try:
        return _emit_spectrum(services, settings, "polarizability")
    except CcthrustError as e:
        return create_error_report("Polarizability spectrum failed", e)
    except Exception as e:
        return create_error_report("Unexpected error during polarizability spectrum", e)
