"""Bounds on the deformation parameter from a measured resolution on ``Delta T_c / T0``."""

import math
from collections.abc import Iterable
from dataclasses import dataclass

from .condensation import rel_shift_first_order
from .errors import DomainError
from .model import SI, PhysicalConstants, PowerLawTrap, Species, shape_parameter

DEFAULT_RESOLUTION = 1e-2


@dataclass(frozen=True)
class BoundResult:
    """
    ``|xi1| <= xi1_bound`` for a shift that stays below ``resolution``.

    ``shift_per_xi1`` is the fractional ``T_c`` shift for ``xi1 = 1``. Trap summary, mass and
    particle number are echoed so a result stands on its own.
    """

    xi1_bound: float
    shift_per_xi1: float
    resolution: float
    mass: float
    n_total: float
    gamma: float


def xi1_bound(
    trap: PowerLawTrap,
    mass: float,
    n_total: float,
    resolution: float = DEFAULT_RESOLUTION,
    constants: PhysicalConstants = SI,
) -> BoundResult:
    """
    Largest ``|xi1|`` whose first-order shift stays within ``resolution``.

    The shift is linear in ``xi1``, so the bound is ``resolution / |shift at xi1 = 1|``.
    """
    if not resolution > 0:
        raise DomainError(f'Resolution must be positive, got {resolution}.')
    sensitivity = rel_shift_first_order(trap, Species(mass=mass, xi1=1.0), n_total, constants)
    if sensitivity == 0 or not math.isfinite(sensitivity):
        raise DomainError(f'Trap gives a degenerate shift sensitivity ({sensitivity}).')
    return BoundResult(
        xi1_bound=resolution / abs(sensitivity),
        shift_per_xi1=sensitivity,
        resolution=resolution,
        mass=mass,
        n_total=n_total,
        gamma=shape_parameter(trap),
    )


def bound_ladder(
    trap: PowerLawTrap,
    mass: float,
    n_values: Iterable[float],
    resolution: float = DEFAULT_RESOLUTION,
    constants: PhysicalConstants = SI,
) -> list[BoundResult]:
    """:func:`xi1_bound` for each particle number, in the given order."""
    return [xi1_bound(trap, mass, n, resolution, constants) for n in n_values]
