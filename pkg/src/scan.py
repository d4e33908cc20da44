"""
Parameter sweeps over particle number, trap exponent, deformation parameter or temperature.

Grid points are evaluated on a thread pool; rows always come back in grid order.
"""

import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from enum import StrEnum
from functools import partial
from typing import Any

import numpy as np

from .bounds import xi1_bound
from .condensation import rel_shift_first_order, solve_tc, spherical_shift_exponent
from .config import RunConfig
from .errors import DomainError
from .fluctuations import fluctuation_report
from .logging_rich import logger
from .model import Species
from .output import Column
from .specfun import DEFAULT_ACCURACY, Accuracy


class ScanAxis(StrEnum):
    N = 'N'
    S1 = 's1'
    XI1 = 'xi1'
    T = 'T'


AXIS_UNITS = {ScanAxis.N: '', ScanAxis.S1: '', ScanAxis.XI1: '', ScanAxis.T: 'K'}

_SHIFT_COLUMNS = [
    Column('gamma'),
    Column('t0', 'K'),
    Column('tc', 'K'),
    Column('rel_shift'),
    Column('rel_shift_first_order'),
    Column('xi1_bound'),
]
_FLUCTUATION_COLUMNS = [
    Column('regime'),
    Column('anomaly'),
    Column('variance'),
    Column('normalized_variance'),
    Column('regularized'),
]


def scan_columns(axis: ScanAxis) -> list[Column]:
    """Output columns for a scan along ``axis``, the scanned value first."""
    value = Column(axis.value, AXIS_UNITS[axis])
    if axis is ScanAxis.T:
        return [value, *_FLUCTUATION_COLUMNS]
    if axis is ScanAxis.S1:
        return [value, Column('n_exponent'), *_SHIFT_COLUMNS]
    return [value, *_SHIFT_COLUMNS]


def scan_grid(start: float, stop: float, points: int, log: bool = True) -> np.ndarray:
    """
    ``points`` values from ``start`` to ``stop`` inclusive, geometric or evenly spaced.

    :raises DomainError: On fewer than 2 points, or a log grid that does not stay positive.
    """
    if points < 2:
        raise DomainError(f'A scan needs at least 2 points, got {points}.')
    if log:
        if not (start > 0 and stop > 0):
            raise DomainError(f'A log scan needs positive limits, got {start:g}..{stop:g}.')
        return np.geomspace(start, stop, points)
    return np.linspace(start, stop, points)


def _shift_row(config: RunConfig, resolution: float, axis: ScanAxis, value: float) -> dict:
    species, n_total, s = config.species, config.n_total, None
    if axis is ScanAxis.N:
        n_total = value
    elif axis is ScanAxis.XI1:
        species = Species(mass=species.mass, xi1=value)
    elif axis is ScanAxis.S1:
        s = value
    trap = config.trap(s=s, species=species)
    result = solve_tc(trap, species, n_total, config.constants)
    row: dict[str, Any] = {
        axis.value: value,
        'gamma': result.gamma,
        't0': result.t0,
        'tc': result.tc,
        'rel_shift': result.rel_shift,
        'rel_shift_first_order': rel_shift_first_order(trap, species, n_total, config.constants),
        'xi1_bound': xi1_bound(trap, species.mass, n_total, resolution, config.constants).xi1_bound,
    }
    if axis is ScanAxis.S1:
        row['n_exponent'] = spherical_shift_exponent(value)
    return row


def _fluctuation_row(
    config: RunConfig, epsilon_min: float | None, accuracy: Accuracy, value: float
) -> dict:
    trap, species = config.trap(), config.species
    report = fluctuation_report(
        trap, species, value, config.n_total, epsilon_min, config.constants, accuracy
    )
    return {
        ScanAxis.T.value: value,
        'regime': report.regime,
        'anomaly': report.anomaly,
        'variance': report.variance,
        'normalized_variance': report.normalized_variance,
        'regularized': report.regularized,
    }


def run_scan(
    config: RunConfig,
    axis: ScanAxis,
    grid: np.ndarray,
    resolution: float,
    epsilon_min: float | None = None,
    workers: int = 4,
    accuracy: Accuracy = DEFAULT_ACCURACY,
) -> list[dict[str, Any]]:
    """
    Evaluate ``config`` at every grid value along ``axis``.

    The first failing point stops the scan and its exception propagates.
    """
    if axis is ScanAxis.S1 and any(not math.isfinite(v) for v in grid):
        raise DomainError('Scan over s1 needs finite exponents.')
    evaluate: Callable[[float], dict]
    if axis is ScanAxis.T:
        evaluate = partial(_fluctuation_row, config, epsilon_min, accuracy)
    else:
        evaluate = partial(_shift_row, config, resolution, axis)

    logger.debug(f'Scanning {axis.value} over {len(grid)} points with {workers} workers')
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(evaluate, (float(v) for v in grid)))
