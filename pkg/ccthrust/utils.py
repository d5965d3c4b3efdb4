"""Shared helpers for ccthrust.

Logging setup, cancellation-safe summation, extrapolated numerical
differentiation and the table-envelope constructor used by the output layer.
"""
from __future__ import annotations

import logging
import math
import sys
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
from shewchuk import Expansion

from .schemas import TableEnvelope

PACKAGE_LOGGER = "ccthrust"

logger = logging.getLogger(__name__)


# ==============================================================================
# 🪵 Logging
# ==============================================================================

def configure_logging(level: str = "INFO") -> logging.Logger:
    """Attach one stderr handler to the package logger and set its level."""
    root = logging.getLogger(PACKAGE_LOGGER)
    handler = next((h for h in root.handlers if getattr(h, "_ccthrust", False)), None)
    if handler is None:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        handler._ccthrust = True
        root.addHandler(handler)
    else:
        # stderr may have been swapped since the first call
        handler.stream = sys.stderr
    root.setLevel(getattr(logging, str(level).upper(), logging.INFO))
    return root


# ==============================================================================
# 🧮 Numerics
# ==============================================================================

def compensated_sum(terms: Iterable[float]) -> float:
    """Sum floats through an exact expansion and round once at the end."""
    total = Expansion()
    for term in terms:
        total = total + float(term)
    return float(total)


def ridders_derivative(
    func: Callable[[float], Any],
    x: float,
    h: float,
    max_steps: int = 10,
    shrink: float = 1.4,
    safe: float = 2.0,
) -> Tuple[Any, float]:
    """
    Derivative of func at x by Ridders' extrapolation of central differences.

    h is the initial step; it should be a distance over which func changes
    appreciably. Works for scalar or array-valued func (complex allowed).
    Returns (derivative, error estimate in the max norm).
    """
    if h == 0.0:
        raise ValueError("initial step must be nonzero")

    def norm(v) -> float:
        return float(np.max(np.abs(v)))

    shrink2 = shrink * shrink
    table: Dict[Tuple[int, int], Any] = {}
    hh = h
    table[0, 0] = (np.asarray(func(x + hh)) - np.asarray(func(x - hh))) / (2.0 * hh)
    err = math.inf
    best = table[0, 0]
    for i in range(1, max_steps):
        hh /= shrink
        table[0, i] = (np.asarray(func(x + hh)) - np.asarray(func(x - hh))) / (2.0 * hh)
        fac = shrink2
        for j in range(1, i + 1):
            table[j, i] = (table[j - 1, i] * fac - table[j - 1, i - 1]) / (fac - 1.0)
            fac *= shrink2
            errt = max(norm(table[j, i] - table[j - 1, i]), norm(table[j, i] - table[j - 1, i - 1]))
            if errt <= err:
                err = errt
                best = table[j, i]
        if norm(table[i, i] - table[i - 1, i - 1]) >= safe * err:
            break
    return best, err


# ==============================================================================
# 📤 Output envelopes
# ==============================================================================

def create_table_envelope(kind: str, rows: List[Dict[str, Any]], metadata: Optional[Dict[str, Any]] = None) -> Dict:
    """Standard JSON document for a table of rows."""
    return TableEnvelope(kind=kind, rows=rows, metadata=metadata or {}).to_dict()


def create_error_report(message: str, error: BaseException) -> int:
    """Log a failed command and return the process exit code for the error."""
    code = getattr(error, "exit_code", 1)
    if code == 1:
        logger.exception("%s: %s", message, error)
    else:
        logger.error("%s: %s", message, error)
    return code


# Exported interface
__all__ = [
    "configure_logging",
    "compensated_sum",
    "ridders_derivative",
    "create_table_envelope",
    "create_error_report",
    "logger",
]
