# ccthrust/repositories/table_repository.py

import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, TextIO

import numpy as np
import pandas as pd

from ccthrust.errors import ConfigurationError, OutputError
from ccthrust.utils import create_table_envelope

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12e"
STDOUT_TARGETS = (None, "", "-", "stdout")


def _json_value(value: Any) -> Any:
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, complex):
        return {"re": _json_value(value.real), "im": _json_value(value.imag)}
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


class TableRepository:
    """Writes result tables as CSV or JSON to a file or stdout."""

    def __init__(self, stream: Optional[TextIO] = None):
        self._stream = stream

    def render(
        self,
        rows: Sequence[Dict[str, Any]],
        fmt: str = "csv",
        kind: str = "table",
        metadata: Optional[Dict[str, Any]] = None,
    ) -> str:
        """Serialize rows; column order follows the first row."""
        if not rows:
            raise OutputError(f"refusing to write an empty {kind} table")
        fmt = fmt.lower()
        if fmt == "csv":
            frame = pd.DataFrame(list(rows), columns=list(rows[0].keys()))
            return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n", na_rep="nan")
        if fmt == "json":
            envelope = create_table_envelope(kind, [dict(r) for r in rows], metadata)
            return json.dumps(_json_value(envelope), indent=2, allow_nan=False) + "\n"
        raise ConfigurationError(f"unknown output format '{fmt}'", key="out")

    def emit_table(
        self,
        rows: Sequence[Dict[str, Any]],
        fmt: str = "csv",
        output: Optional[str] = None,
        kind: str = "table",
        metadata: Optional[Dict[str, Any]] = None,
    ) -> str:
        """
        Write a table and return the rendered text.

        Args:
            rows: ordered records, all with the same keys
            fmt: 'csv' or 'json'
            output: file path, or None / '-' / 'stdout' for standard output
            kind: table kind stored in the JSON envelope
            metadata: run parameters stored in the JSON envelope

        Raises:
            OutputError: empty table or the target cannot be written
        """
        text = self.render(rows, fmt, kind, metadata)
        try:
            if output in STDOUT_TARGETS:
                stream = self._stream or sys.stdout
                stream.write(text)
                stream.flush()
            else:
                Path(output).write_text(text, encoding="utf-8", newline="\n")
        except OSError as e:
            raise OutputError(f"cannot write {kind} table to {output}: {e}") from e
        logger.info("Wrote %d %s row(s) as %s to %s", len(rows), kind, fmt, output or "stdout")
        return text
