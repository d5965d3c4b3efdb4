"""
Sweep service module.
Runs one-dimensional parameter sweeps and derives fit, zero-crossing and extremum markers.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from functools import partial
from typing import Any, Dict, List, Optional

import numpy as np
from scipy.optimize import bisect, minimize_scalar
from scipy.stats import linregress

from ccthrust.errors import CcthrustError, ConfigurationError, DomainError
from ccthrust.physics.force_kernel import compute_force
from ccthrust.schemas import (
    RunContext,
    SweepMarkers,
    SweepResult,
    SweepRow,
    SweepSpec,
    SweepVariable,
    TemperatureTarget,
)
from ccthrust.services.force_service import TWO_PI, ForceService

logger = logging.getLogger(__name__)

# relative bracket width at which a zero crossing counts as located
CROSSING_RTOL = 1e-4
EXTREMUM_XTOL = 1e-4

FIT_VARIABLES = (SweepVariable.ROTATION, SweepVariable.TEMPERATURE, SweepVariable.KAPPA_STRENGTH)
CROSSING_VARIABLES = (SweepVariable.OMEGA0, SweepVariable.RADIUS)


def context_for(spec: SweepSpec, value: float) -> RunContext:
    """The base context with the swept quantity set to value."""
    base = spec.base
    var = spec.variable
    if var is SweepVariable.ROTATION:
        return replace(base, Omega=TWO_PI * value)
    if var is SweepVariable.TEMPERATURE:
        if spec.temperature_target is TemperatureTarget.ENV:
            return replace(base, T_env=value)
        if spec.temperature_target is TemperatureTarget.PARTICLE:
            return replace(base, T_particle=value)
        return replace(base, T_env=value, T_particle=value)
    material = base.particle.material
    if var is SweepVariable.OMEGA0:
        primary = material.primary.rescaled(TWO_PI * value, keep_relative_damping=not spec.freeze_gamma)
        return base.with_material(material.with_primary(primary))
    if var is SweepVariable.KAPPA_STRENGTH:
        return base.with_material(material.with_kappa_strength(value))
    return base.with_particle(replace(base.particle, radius=value))


def evaluate_row(spec: SweepSpec, value: float) -> SweepRow:
    """One grid point; failures are kept in the row instead of aborting the sweep."""
    value = float(value)
    try:
        return SweepRow(value=value, breakdown=compute_force(context_for(spec, value)))
    except CcthrustError as e:
        logger.warning("Sweep point %s=%.6e failed: %s", spec.variable.value, value, e)
        return SweepRow(value=value, error=f"{type(e).__name__}: {e}")


def _f_tot(spec: SweepSpec, value: float) -> float:
    return compute_force(context_for(spec, float(value))).f_tot


class SweepService:
    """
    Service for parameter sweeps.
    Rows are evaluated serially or in a process pool; the result is always in grid order.
    """

    def __init__(self, force_service: ForceService, workers: int = 1):
        """
        Initialize the SweepService.

        Args:
            force_service: builds the base context of a sweep
            workers: default number of worker processes
        """
        self.force_service = force_service
        self.workers = max(1, int(workers))

    def run_sweep(self, spec: SweepSpec, workers: Optional[int] = None) -> SweepResult:
        """
        Evaluate compute_force over the grid and derive markers.

        Raises nothing for individual failures; callers check SweepResult.all_failed.
        """
        workers = self.workers if workers is None else max(1, int(workers))
        grid = [float(v) for v in spec.grid()]
        task = partial(evaluate_row, spec)

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(task, grid))
        else:
            rows = [task(v) for v in grid]

        markers = self.markers(spec, rows)
        failed = sum(1 for r in rows if not r.converged)
        logger.info(
            "Sweep over %s: %d points, %d failed, markers %s",
            spec.variable.value, len(rows), failed, sorted(markers.to_dict().keys()),
        )
        return SweepResult(spec=spec, rows=rows, markers=markers)

    # ==========================================================================
    # 📍 Markers
    # ==========================================================================

    def markers(self, spec: SweepSpec, rows: List[SweepRow]) -> SweepMarkers:
        good = [r for r in rows if r.converged]
        markers = SweepMarkers()
        if len(good) < 2:
            return markers
        x = np.array([r.value for r in good])
        y = np.array([r.breakdown.f_tot for r in good])

        if spec.variable in FIT_VARIABLES:
            markers.linear_fit = self.linear_fit(x, y)
        if spec.variable in CROSSING_VARIABLES:
            markers.zero_crossings = self.zero_crossings(spec, x, y)
        if len(good) >= 3:
            markers.extremum = self.extremum(spec, x, y)
        return markers

    @staticmethod
    def linear_fit(x: np.ndarray, y: np.ndarray) -> Optional[Dict[str, float]]:
        if np.ptp(x) == 0.0:
            return None
        if np.ptp(y) == 0.0:
            # constant data: exact fit with zero slope
            return {"slope": 0.0, "intercept": float(y[0]), "r_squared": 1.0}
        fit = linregress(x, y)
        return {"slope": float(fit.slope), "intercept": float(fit.intercept), "r_squared": float(fit.rvalue ** 2)}

    def _wavelength(self, spec: SweepSpec, value: float) -> float:
        c = spec.base.constants.c
        if spec.variable is SweepVariable.OMEGA0:
            return c / value
        return TWO_PI * c / spec.base.particle.material.primary.omega0

    def zero_crossings(self, spec: SweepSpec, x: np.ndarray, y: np.ndarray) -> List[Dict[str, float]]:
        """Sign changes of f_tot between neighbouring rows, refined by bisection."""
        crossings = []
        for i in range(len(x) - 1):
            a, b = float(x[i]), float(x[i + 1])
            fa, fb = float(y[i]), float(y[i + 1])
            if fa == 0.0:
                crossings.append({"value": a, "lo": a, "hi": a, "wavelength_m": self._wavelength(spec, a)})
                continue
            if fa * fb >= 0.0:
                continue
            try:
                root = bisect(partial(_f_tot, spec), a, b, xtol=1e-300, rtol=CROSSING_RTOL)
            except (CcthrustError, ValueError, RuntimeError) as e:
                logger.warning("Could not refine zero crossing in [%.6e, %.6e]: %s", a, b, e)
                root = a - fa * (b - a) / (fb - fa)
            crossings.append({"value": float(root), "lo": a, "hi": b, "wavelength_m": self._wavelength(spec, root)})
        if len(y) and y[-1] == 0.0:
            last = float(x[-1])
            crossings.append({"value": last, "lo": last, "hi": last, "wavelength_m": self._wavelength(spec, last)})
        return crossings

    def extremum(self, spec: SweepSpec, x: np.ndarray, y: np.ndarray) -> Dict[str, float]:
        """Largest |f_tot|, refined by golden-section search when it is interior."""
        i = int(np.argmax(np.abs(y)))
        best = {"value": float(x[i]), "f_tot_N": float(y[i]), "refined": False}
        if i == 0 or i == len(x) - 1:
            return best

        def objective(v: float) -> float:
            return -abs(_f_tot(spec, v))

        try:
            res = minimize_scalar(
                objective,
                bracket=(float(x[i - 1]), float(x[i]), float(x[i + 1])),
                method="golden",
                tol=EXTREMUM_XTOL,
            )
        except (CcthrustError, ValueError, RuntimeError) as e:
            logger.warning("Golden-section refinement of the extremum failed: %s", e)
            return best
        if float(x[i - 1]) <= res.x <= float(x[i + 1]) and -res.fun >= abs(best["f_tot_N"]):
            best = {"value": float(res.x), "f_tot_N": math.copysign(-float(res.fun), y[i]), "refined": True}
        return best

    # ==========================================================================
    # 🧱 Spec building
    # ==========================================================================

    @staticmethod
    def validate_value_range(spec: SweepSpec) -> None:
        """Reject grids that leave the physical domain of the swept variable."""
        lo = min(spec.value_from, spec.value_to)
        if spec.variable in (SweepVariable.OMEGA0, SweepVariable.RADIUS) and lo <= 0.0:
            raise ConfigurationError(f"{spec.variable.value} sweeps need positive values", key="from")
        if spec.variable is SweepVariable.TEMPERATURE and lo < 0.0:
            raise ConfigurationError("temperature sweeps need values >= 0", key="from")
        try:
            context_for(spec, spec.value_from)
            context_for(spec, spec.value_to)
        except DomainError as e:
            raise ConfigurationError(str(e), key="from") from e


# ==============================================================================
# 🎯 Service Factory Function
# ==============================================================================

def create_sweep_service(services: Dict[str, Any], workers: int = 1) -> SweepService:
    """
    Factory function to create a SweepService from the services registry.

    Raises:
        RuntimeError: if the force service has not been registered
    """
    force_service = services.get("force_service")
    if force_service is None:
        raise RuntimeError(
            "ForceService not found in services. "
            "Make sure it's initialized in create_services()."
        )
    return SweepService(force_service=force_service, workers=workers)
