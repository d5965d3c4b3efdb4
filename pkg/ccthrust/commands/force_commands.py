# ccthrust/commands/force_commands.py

import logging
from typing import Any, Dict, Mapping

from ccthrust.errors import CcthrustError
from ccthrust.utils import create_error_report

logger = logging.getLogger(__name__)

# ==============================================================================
# 🎯 Force Command
# ==============================================================================


def run_force_command(services: Dict[str, Any], settings: Mapping[str, Any]) -> int:
    """Single integrated force; one table row plus a summary on the log."""
    try:
        force_service = services["force_service"]
        table_repository = services["table_repository"]
        config = services["config"]

        ctx = force_service.build_context(settings)
        breakdown = force_service.run_force(ctx)

        table_repository.emit_table(
            [breakdown.to_row()],
            fmt=str(settings.get("out", config.OUTPUT_FORMAT)),
            output=settings.get("output"),
            kind="force",
            metadata=force_service.describe(ctx),
        )
        return 0

    except CcthrustError as e:
        return create_error_report("Force evaluation failed", e)
    except Exception as e:
        return create_error_report("Unexpected error during force evaluation", e)
