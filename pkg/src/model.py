"""
Physical constants, particle species and power-law trap geometry.

The trap is ``U(r) = sum_i A_i |r_i / a_i|^s_i`` where ``r_i`` is the radial coordinate of an
``n_i``-dimensional subspace and ``sum_i n_i = 3``. A subspace with ``s = inf`` is a hard wall at
``r_i = a_i`` (a box along those directions).

Everything is strict SI: J, m, kg, s, K.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import StrEnum

from scipy import constants as si
from scipy import integrate

from .errors import DomainError
from .specfun import gamma_fn, log_gamma_fn

PLANCK_MASS_EV = 1.2e28
"""Planck mass in eV/c^2."""


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = si.hbar
    k_boltzmann: float = si.k
    c_light: float = si.c
    planck_mass: float = PLANCK_MASS_EV * si.e / si.c**2

    def __post_init__(self):
        for name in ('hbar', 'k_boltzmann', 'c_light', 'planck_mass'):
            if not getattr(self, name) > 0:
                raise DomainError(f'Physical constant `{name}` must be positive.')


SI = PhysicalConstants()


@dataclass(frozen=True)
class Species:
    """
    Particle with mass in kg and the dimensionless deformation parameter ``xi1``.

    ``xi1`` may have either sign.
    """

    mass: float
    xi1: float = 0.0

    def __post_init__(self):
        if not self.mass > 0:
            raise DomainError(f'Particle mass must be positive, got {self.mass}.')


def alpha_of(species: Species, constants: PhysicalConstants = SI) -> float:
    """Velocity scale ``alpha = xi1 m c / (2 M_p)`` of the linear momentum term, in m/s."""
    return species.xi1 * species.mass * constants.c_light / (2 * constants.planck_mass)


class FrequencyUnit(StrEnum):
    ANGULAR = 'rad/s'
    LINEAR = 'Hz'


def angular_frequency(value: float, unit: str | FrequencyUnit) -> float:
    """Convert a trap frequency to rad/s. The unit is required, there is no default."""
    try:
        unit = FrequencyUnit(unit)
    except ValueError:
        raise DomainError(
            f'Unknown frequency unit `{unit}`, expected one of: '
            + ', '.join(f'`{u.value}`' for u in FrequencyUnit)
        )
    if not value > 0:
        raise DomainError(f'Trap frequency must be positive, got {value}.')
    return value if unit is FrequencyUnit.ANGULAR else 2 * math.pi * value


def unit_ball_volume(n: int) -> float:
    """Volume of the unit ball in ``n`` dimensions, ``pi^(n/2) / Gamma(n/2 + 1)``."""
    return math.pi ** (n / 2) / gamma_fn(n / 2 + 1)


@dataclass(frozen=True)
class TrapSubspace:
    """
    One term ``A |r/a|^s`` of the potential, acting on an ``n``-dimensional subspace.

    :param n: Sub-dimension, 1, 2 or 3.
    :param s: Exponent, ``math.inf`` for a box.
    :param A: Energy scale in J.
    :param a: Length scale in m. For a box, the radius of the wall.
    """

    n: int
    s: float
    A: float
    a: float

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise DomainError(f'Sub-dimension must be 1, 2 or 3, got {self.n}.')
        if not self.s > 0:
            raise DomainError(f'Trap exponent must be positive, got {self.s}.')
        if not self.A > 0:
            raise DomainError(f'Trap energy scale must be positive, got {self.A}.')
        if not self.a > 0:
            raise DomainError(f'Trap length scale must be positive, got {self.a}.')

    @property
    def is_box(self) -> bool:
        return math.isinf(self.s)

    @property
    def n_over_s(self) -> float:
        return 0.0 if self.is_box else self.n / self.s

    @classmethod
    def harmonic_scales(
        cls, n: int, s: float, omega: float, mass: float, constants: PhysicalConstants = SI
    ) -> 'TrapSubspace':
        """Subspace with ``A = hbar omega / 2``, ``a = sqrt(hbar / (m omega))``; omega in rad/s."""
        return cls(
            n=n,
            s=s,
            A=constants.hbar * omega / 2,
            a=math.sqrt(constants.hbar / (mass * omega)),
        )

    @classmethod
    def box(cls, n: int, volume: float) -> 'TrapSubspace':
        """
        Hard-wall subspace enclosing ``volume`` (a length for ``n = 1``, an area for ``n = 2``).

        The energy scale plays no role for a box and is set to 1 J.
        """
        if not volume > 0:
            raise DomainError(f'Box volume must be positive, got {volume}.')
        return cls(n=n, s=math.inf, A=1.0, a=(volume / unit_ball_volume(n)) ** (1 / n))

    def potential(self, radius: float) -> float:
        if self.is_box:
            return 0.0 if radius <= self.a else math.inf
        return self.A * (radius / self.a) ** self.s

    def thermal_radius(self, kT: float) -> float:
        """Radius where this term reaches ``kT``. For a box, the wall radius."""
        if self.is_box:
            return self.a
        return self.a * (kT / self.A) ** (1 / self.s)


@dataclass(frozen=True)
class PowerLawTrap:
    subspaces: tuple[TrapSubspace, ...]

    def __post_init__(self):
        object.__setattr__(self, 'subspaces', tuple(self.subspaces))
        if not 1 <= len(self.subspaces) <= 3:
            raise DomainError(f'A trap has 1 to 3 subspaces, got {len(self.subspaces)}.')
        total = sum(sub.n for sub in self.subspaces)
        if total != 3:
            raise DomainError(f'Sub-dimensions must add up to 3, got {total}.')

    @property
    def has_box(self) -> bool:
        return any(sub.is_box for sub in self.subspaces)

    @classmethod
    def harmonic(
        cls, omegas: Sequence[float], mass: float, constants: PhysicalConstants = SI
    ) -> 'PowerLawTrap':
        """Cartesian anisotropic harmonic trap, frequencies in rad/s."""
        if len(omegas) != 3:
            raise DomainError(f'A Cartesian harmonic trap needs 3 frequencies, got {len(omegas)}.')
        return cls(
            tuple(TrapSubspace.harmonic_scales(1, 2.0, w, mass, constants) for w in omegas)
        )

    @classmethod
    def spherical(
        cls, s: float, omega0: float, mass: float, constants: PhysicalConstants = SI
    ) -> 'PowerLawTrap':
        """``U(r) = A (r/a)^s`` with harmonic-oscillator scales set by ``omega0`` (rad/s)."""
        return cls((TrapSubspace.harmonic_scales(3, s, omega0, mass, constants),))

    @classmethod
    def box(cls, volume: float) -> 'PowerLawTrap':
        """Spherical hard-wall box of the given volume in m^3."""
        return cls((TrapSubspace.box(3, volume),))

    def radial_coordinates(self, position: Sequence[float]) -> list[float]:
        """Split a Cartesian 3-vector into consecutive ``n_i`` blocks and return their norms."""
        if len(position) != 3:
            raise DomainError(f'Position must have 3 coordinates, got {len(position)}.')
        radii, start = [], 0
        for sub in self.subspaces:
            radii.append(math.hypot(*position[start : start + sub.n]))
            start += sub.n
        return radii

    def potential(self, position: Sequence[float]) -> float:
        """``U(r)`` in J; ``inf`` outside a box wall."""
        return sum(
            sub.potential(r)
            for sub, r in zip(self.subspaces, self.radial_coordinates(position), strict=True)
        )

    def thermal_radii(self, kT: float) -> list[float]:
        return [sub.thermal_radius(kT) for sub in self.subspaces]


def shape_parameter(trap: PowerLawTrap) -> float:
    """``gamma = 3/2 + sum_l n_l / s_l``; box subspaces add nothing."""
    return 1.5 + sum(sub.n_over_s for sub in trap.subspaces)


def geometric_constant(trap: PowerLawTrap) -> float:
    """``C``: product of the unit-ball volumes of the subspaces (8 for a Cartesian trap)."""
    return math.prod(unit_ball_volume(sub.n) for sub in trap.subspaces)


def log_characteristic_volume(trap: PowerLawTrap) -> float:
    """
    ``ln V_char``, summed subspace by subspace.

    Small exponents put ``A^(n/s)`` and ``Gamma(n/s + 1)`` far outside the float range; their logs
    stay finite.
    """
    total = -math.log(geometric_constant(trap))
    for sub in trap.subspaces:
        total -= sub.n * math.log(sub.a)
        if not sub.is_box:
            total += sub.n_over_s * math.log(sub.A) - log_gamma_fn(sub.n_over_s + 1)
    return total


def characteristic_volume(trap: PowerLawTrap) -> float:
    """
    ``V_char = prod A_l^(n_l/s_l) a_l^(-n_l) / (C prod Gamma(n_l/s_l + 1))``.

    An inverse volume for a box. Units are ``J^(sum n/s) m^-3``. Underflows to 0 for small
    exponents; use :func:`log_characteristic_volume` in products.
    """
    return math.exp(log_characteristic_volume(trap))


def geometric_mean_frequency(omegas: Sequence[float]) -> float:
    return math.prod(omegas) ** (1 / len(omegas))


def trap_partition_quadrature(trap: PowerLawTrap, beta: float, rel_tol: float = 1e-10) -> float:
    """
    ``int d^3r exp(-beta U(r))`` by direct quadrature, one radial integral per subspace.

    The Boltzmann factor separates over subspaces; each radial integral carries the surface area
    ``n * unit_ball_volume(n) * r^(n-1)``. Used to check the closed form
    ``C prod a^n (beta A)^(-n/s) Gamma(n/s + 1)``.
    """
    total = 1.0
    for sub in trap.subspaces:
        surface = sub.n * unit_ball_volume(sub.n)
        if sub.is_box:
            total *= surface * sub.a**sub.n / sub.n
            continue
        # Integrate in units of the thermal radius, where the exponent is simply x^s.
        radius = sub.thermal_radius(1 / beta)
        value, _ = integrate.quad(
            lambda x, n=sub.n, s=sub.s: x ** (n - 1) * math.exp(-(x**s)),
            0,
            math.inf,
            epsabs=0,
            epsrel=rel_tol,
            limit=200,
        )
        total *= surface * radius**sub.n * value
    return total
