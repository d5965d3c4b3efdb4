"""
Adaptive Gauss-Kronrod (G7/K15) integration on finite intervals and the half line.

Each panel carries the 15-point Kronrod value and the QUADPACK error
estimate built from the embedded 7-point Gauss rule. The worst panel,
measured against the current per-component tolerance, is bisected until
every component meets max(rel_tol*|I|, abs_tol_floor, 50*eps*int|f|).
The semi-infinite piece is mapped with omega = a/(1 - t), t in [0, 1).
Integrands may return scalars or 1-d arrays.
"""

from __future__ import annotations

import logging
import math
from typing import Callable, List, Sequence

import numpy as np

from ..errors import ConvergenceFailure, DomainError, NumericFailureError
from ..schemas import QuadratureResult, QuadratureSettings, RunContext

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps

# Kronrod abscissae (positive half, descending) and weights, QUADPACK qk15
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# full 15-node layout on [-1, 1], ascending
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_GAUSS_WEIGHTS = np.zeros(15)
_GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
_GAUSS_WEIGHTS[7] = _WG[3]
_GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]


class _PanelStore:
    """Growable arrays of panel data; row order is creation order, not position."""

    def __init__(self, width: int, capacity: int):
        self.n = 0
        self.lo = np.empty(capacity)
        self.hi = np.empty(capacity)
        self.tail = np.zeros(capacity, dtype=bool)
        self.value = np.empty((capacity, width))
        self.error = np.empty((capacity, width))
        self.resabs = np.empty((capacity, width))

    def put(self, row: int, lo: float, hi: float, tail: bool, value, error, resabs) -> None:
        self.lo[row], self.hi[row], self.tail[row] = lo, hi, tail
        self.value[row], self.error[row], self.resabs[row] = value, error, resabs
        self.n = max(self.n, row + 1)


def _evaluate_panel(f: Callable, lo: float, hi: float):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    raw = [f(center + half * t) for t in _NODES]
    samples = [np.atleast_1d(np.asarray(r, dtype=float)) for r in raw]
    values = np.vstack(samples)
    if not np.all(np.isfinite(values)):
        bad = [center + half * t for t, row in zip(_NODES, values) if not np.all(np.isfinite(row))]
        raise NumericFailureError(f"integrand is not finite at {bad[0]:.6e}", argument=bad[0])

    resk = _KRONROD_WEIGHTS @ values
    resg = _GAUSS_WEIGHTS @ values
    resabs = _KRONROD_WEIGHTS @ np.abs(values)
    resasc = _KRONROD_WEIGHTS @ np.abs(values - 0.5 * resk)

    dhalf = abs(half)
    result = resk * half
    resabs = resabs * dhalf
    resasc = resasc * dhalf
    error = np.abs((resk - resg) * half)

    scaled = np.where(
        (resasc != 0.0) & (error != 0.0),
        resasc * np.minimum(1.0, (200.0 * error / np.where(resasc != 0.0, resasc, 1.0)) ** 1.5),
        error,
    )
    scaled = np.maximum(scaled, 50.0 * _EPS * resabs)
    return result, scaled, resabs


def _tail_transform(f: Callable, anchor: float) -> Callable:
    def mapped(t: float):
        one_minus = 1.0 - t
        omega = anchor / one_minus
        return np.asarray(f(omega), dtype=float) * (anchor / (one_minus * one_minus))

    return mapped


def _adaptive(f: Callable, edges: Sequence[float], tail_anchor, settings: QuadratureSettings) -> QuadratureResult:
    shape = {}

    def integrand(x):
        out = f(x)
        shape.setdefault("scalar", np.ndim(out) == 0)
        return out

    segments = [(float(a), float(b), False) for a, b in zip(edges[:-1], edges[1:]) if b > a]
    tail_f = _tail_transform(integrand, tail_anchor) if tail_anchor is not None else None
    if tail_anchor is not None:
        segments.append((0.0, 1.0, True))
    if not segments:
        raise DomainError("integration domain is empty")

    first = _evaluate_panel(tail_f if segments[0][2] else integrand, segments[0][0], segments[0][1])
    width = first[0].shape[0]
    store = _PanelStore(width, len(segments) + settings.max_subdivisions + 1)
    store.put(0, *segments[0], *first)
    for row, (lo, hi, tail) in enumerate(segments[1:], start=1):
        store.put(row, lo, hi, tail, *_evaluate_panel(tail_f if tail else integrand, lo, hi))

    evaluations = 15 * store.n
    subdivisions = 0
    while True:
        n = store.n
        total = store.value[:n].sum(axis=0)
        total_error = store.error[:n].sum(axis=0)
        roundoff = 50.0 * _EPS * store.resabs[:n].sum(axis=0)
        tolerance = np.maximum.reduce([
            settings.rel_tol * np.abs(total),
            np.full(width, settings.abs_tol_floor),
            roundoff,
        ])
        if np.all(total_error <= tolerance):
            break

        ratio = (store.error[:n] / tolerance).max(axis=1)
        worst = int(np.argmax(ratio))
        if subdivisions >= settings.max_subdivisions:
            lo, hi = store.lo[worst], store.hi[worst]
            if store.tail[worst]:
                lo = tail_anchor / (1.0 - lo)
                hi = math.inf if hi >= 1.0 else tail_anchor / (1.0 - hi)
            raise ConvergenceFailure(
                f"quadrature did not converge after {subdivisions} subdivisions; "
                f"worst panel [{lo:.6e}, {hi:.6e}] with local error {store.error[worst].max():.3e}",
                panel=(float(lo), float(hi)),
                local_error=float(store.error[worst].max()),
                subdivisions=subdivisions,
            )

        lo, hi, tail = store.lo[worst], store.hi[worst], bool(store.tail[worst])
        mid = 0.5 * (lo + hi)
        func = tail_f if tail else integrand
        store.put(worst, lo, mid, tail, *_evaluate_panel(func, lo, mid))
        store.put(n, mid, hi, tail, *_evaluate_panel(func, mid, hi))
        evaluations += 30
        subdivisions += 1

    n = store.n
    order = np.lexsort((store.lo[:n], store.tail[:n]))
    value = store.value[:n][order].sum(axis=0)
    error = store.error[:n][order].sum(axis=0)
    logger.debug("quadrature converged: %d panels, %d subdivisions, %d evaluations", n, subdivisions, evaluations)
    if shape.get("scalar"):
        value, error = float(value[0]), float(error[0])
    return QuadratureResult(value=value, abs_error_estimate=error, evaluations=evaluations, subdivisions=subdivisions)


def integrate_interval(f: Callable, edges: Sequence[float], settings: QuadratureSettings) -> QuadratureResult:
    """Integrate f over [edges[0], edges[-1]] starting from the given panels."""
    edges = sorted(float(e) for e in edges)
    if len(edges) < 2:
        raise DomainError("integrate_interval needs at least two edges")
    return _adaptive(f, edges, None, settings)


def integrate_half_line(f: Callable, breakpoints: Sequence[float], settings: QuadratureSettings) -> QuadratureResult:
    """Integrate f over (0, inf); the last breakpoint anchors the mapped tail."""
    points = sorted({float(b) for b in breakpoints if b > 0.0})
    if not points:
        raise DomainError("integrate_half_line needs at least one positive breakpoint")
    return _adaptive(f, [0.0] + points, points[-1], settings)


def thermal_cutoff(ctx: RunContext, settings: QuadratureSettings) -> float:
    """tail_cut_multiplier * k_B * max(T, 1 K) / hbar."""
    k = ctx.constants
    return settings.tail_cut_multiplier * k.k_B * max(ctx.T_max, 1.0) / k.hbar


def _graded_offsets(span: float, width: float) -> List[float]:
    offsets = [span]
    while offsets[-1] > 0.3 * width:
        offsets.append(0.5 * offsets[-1])
    return offsets


def auto_breakpoints(ctx: RunContext, settings: QuadratureSettings) -> List[float]:
    """Resonance-graded breakpoints, the rotation frequency, the thermal cutoff and the tail anchor."""
    points = []
    if ctx.Omega != 0.0:
        points.append(abs(ctx.Omega))
    for res in ctx.particle.material.resonances:
        width = res.gamma if res.gamma > 0.0 else 1e-3 * res.omega0
        span = settings.resonance_halfwidths * width
        points.append(res.omega0)
        for offset in _graded_offsets(span, width):
            points.extend((res.omega0 - offset, res.omega0 + offset))
    points.append(thermal_cutoff(ctx, settings))
    positive = sorted({p for p in points if p > 0.0})
    positive.append(2.0 * positive[-1])
    return positive
