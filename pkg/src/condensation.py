"""
Number equation, spatial density and the condensation temperature of the deformed gas.

Conventions:

* ``x = k_B T`` is used as the working variable; temperatures are returned in K.
* The first-order term in ``alpha`` comes from expanding ``exp(-beta alpha p)`` inside the
  momentum integral, which gives ``alpha m^2 / (pi^2 hbar^3)`` in the number equation and the
  coefficient ``sqrt(8 m / pi)`` in the implicit equation for ``T_c``.
* At condensation the fugacity is 1 and the ground-state population is 0 (thermodynamic limit).
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass

from scipy import optimize

from .errors import ConvergenceError, DomainError
from .logging_rich import logger
from .model import (
    SI,
    PhysicalConstants,
    PowerLawTrap,
    Species,
    alpha_of,
    characteristic_volume,
    geometric_mean_frequency,
    log_characteristic_volume,
    shape_parameter,
)
from .specfun import DEFAULT_ACCURACY, Accuracy, bose_fn, riemann_zeta

SMALLNESS_WARNING = 0.01
"""Above this ``m alpha^2 / 2 / k_B T`` the first-order expansion is not trusted."""

ROOT_REL_TOL = 1e-12
BRACKET_FACTORS = (2, 4, 8, 16)
"""Brackets ``[T0/k, k T0]`` tried in turn until one contains a sign change."""


@dataclass(frozen=True)
class ThermoPoint:
    """Temperature in K and fugacity ``z = exp(mu / k_B T)`` in ``[0, 1]``."""

    temperature: float
    fugacity: float

    def __post_init__(self):
        if not self.temperature > 0:
            raise DomainError(f'Temperature must be positive, got {self.temperature}.')
        if not 0 <= self.fugacity <= 1:
            raise DomainError(f'Fugacity must be in [0, 1], got {self.fugacity}.')

    @classmethod
    def from_chemical_potential(
        cls, temperature: float, mu: float, constants: PhysicalConstants = SI
    ) -> 'ThermoPoint':
        if not temperature > 0:
            raise DomainError(f'Temperature must be positive, got {temperature}.')
        return cls(temperature, math.exp(mu / (constants.k_boltzmann * temperature)))

    def kT(self, constants: PhysicalConstants = SI) -> float:
        return constants.k_boltzmann * self.temperature

    def chemical_potential(self, constants: PhysicalConstants = SI) -> float:
        if self.fugacity == 0:
            return -math.inf
        return self.kT(constants) * math.log(self.fugacity)


@dataclass(frozen=True)
class TcResult:
    t0: float
    tc: float
    rel_shift: float
    alpha: float
    smallness_ratio: float
    gamma: float


def smallness_ratio(
    species: Species, temperature: float, constants: PhysicalConstants = SI
) -> float:
    """``(m alpha^2 / 2) / (k_B T)``, which must stay small for the expansion in ``alpha``."""
    alpha = alpha_of(species, constants)
    return species.mass * alpha**2 / 2 / (constants.k_boltzmann * temperature)


def _check_smallness(ratio: float, temperature: float) -> None:
    if ratio > SMALLNESS_WARNING:
        logger.warning(
            f'm alpha^2/2 is {ratio:.3g} of k_B T at T={temperature:.6g} K; '
            f'the first-order expansion in alpha is not reliable there.'
        )


def thermal_coefficient(mass: float, constants: PhysicalConstants) -> float:
    """``(m / (2 pi hbar^2))^(3/2)``."""
    return (mass / (2 * math.pi * constants.hbar**2)) ** 1.5


def trap_power(trap: PowerLawTrap, kT: float, exponent: float) -> float:
    """``P (kT)^exponent`` with ``P = 1 / V_char``, formed in log space."""
    return math.exp(exponent * math.log(kT) - log_characteristic_volume(trap))


def linear_coefficient(mass: float, constants: PhysicalConstants) -> float:
    """``m^2 / (pi^2 hbar^3)``, coefficient of ``alpha`` in the number equation."""
    return mass**2 / (math.pi**2 * constants.hbar**3)


def number_of_particles(
    trap: PowerLawTrap,
    species: Species,
    point: ThermoPoint,
    n0: float = 0.0,
    constants: PhysicalConstants = SI,
    accuracy: Accuracy = DEFAULT_ACCURACY,
) -> float:
    """
    Total number of particles at first order in ``alpha``.

    ``N = n0 + P [ (m/2 pi hbar^2)^(3/2) g_gamma(z) (kT)^gamma
    - alpha m^2/(pi^2 hbar^3) g_(gamma-1/2)(z) (kT)^(gamma-1/2) ]``
    with ``P = C prod A^(-n/s) a^n Gamma(n/s + 1)``.

    :raises DivergenceError: If a Bose function diverges at ``z = 1`` (box trap with
        ``alpha != 0``).
    """
    gamma = shape_parameter(trap)
    alpha = alpha_of(species, constants)
    kT = point.kT(constants)
    _check_smallness(smallness_ratio(species, point.temperature, constants), point.temperature)

    count = (
        thermal_coefficient(species.mass, constants)
        * bose_fn(gamma, point.fugacity, accuracy)
        * trap_power(trap, kT, gamma)
    )
    if alpha != 0:
        count -= (
            alpha
            * linear_coefficient(species.mass, constants)
            * bose_fn(gamma - 0.5, point.fugacity, accuracy)
            * trap_power(trap, kT, gamma - 0.5)
        )
    return n0 + count


def spatial_density(
    trap: PowerLawTrap,
    species: Species,
    point: ThermoPoint,
    position: Sequence[float],
    constants: PhysicalConstants = SI,
    accuracy: Accuracy = DEFAULT_ACCURACY,
) -> float:
    """
    Number density in m^-3 at a Cartesian position.

    ``lambda^-3 g_3/2(w) - alpha lambda^-2 (2m / pi hbar) g_1(w)
    + alpha^2 lambda^-1 (m^2 / 2 pi hbar^2) g_1/2(w)``
    with ``w = exp(beta (mu + m alpha^2/2 - U(r)))``.

    :raises DomainError: If ``w > 1``, i.e. the point is over-saturated.
    :raises DivergenceError: If ``w = 1`` and ``alpha != 0``.
    """
    U = trap.potential(position)
    if math.isinf(U) or point.fugacity == 0:
        return 0.0

    m, hbar = species.mass, constants.hbar
    alpha = alpha_of(species, constants)
    kT = point.kT(constants)
    log_w = math.log(point.fugacity) + (m * alpha**2 / 2 - U) / kT
    if log_w > 0:
        raise DomainError(
            f'Local fugacity exp(beta(mu_eff - U)) = {math.exp(log_w):.6g} exceeds 1 '
            f'at position {tuple(position)}.'
        )
    w = math.exp(log_w)

    wavelength = math.sqrt(2 * math.pi * hbar**2 / (m * kT))
    density = bose_fn(1.5, w, accuracy) / wavelength**3
    if alpha != 0:
        density -= alpha * (2 * m / (math.pi * hbar)) * bose_fn(1.0, w, accuracy) / wavelength**2
        density += (
            alpha**2 * (m**2 / (2 * math.pi * hbar**2)) * bose_fn(0.5, w, accuracy) / wavelength
        )
    return density


def t0(
    trap: PowerLawTrap,
    species: Species,
    n_total: float,
    constants: PhysicalConstants = SI,
) -> float:
    """
    Condensation temperature of the undeformed gas in K.

    ``k_B T0 = [N V_char / zeta(gamma) (2 pi hbar^2 / m)^(3/2)]^(1/gamma)``. For a box
    (``gamma = 3/2``) this is the usual ``zeta(3/2)`` result with ``V_char = 1/V``.
    """
    if not n_total >= 1:
        raise DomainError(f'Number of particles must be at least 1, got {n_total}.')
    gamma = shape_parameter(trap)
    log_kT0 = (
        math.log(n_total)
        + log_characteristic_volume(trap)
        + 1.5 * math.log(2 * math.pi * constants.hbar**2 / species.mass)
        - math.log(riemann_zeta(gamma))
    ) / gamma
    return math.exp(log_kT0) / constants.k_boltzmann


def shift_coefficient(
    trap: PowerLawTrap, species: Species, constants: PhysicalConstants = SI
) -> float:
    """
    ``B`` in ``x^gamma = x0^gamma + alpha B x^(gamma - 1/2)`` (``x = k_B T``), in sqrt(kg).

    ``B = sqrt(8 m / pi) zeta(gamma - 1/2) / zeta(gamma)``. A box has ``zeta(1)`` there, so its
    coefficient is replaced by ``sqrt(2 pi m) (zeta(3) / zeta(3/2))^(1/3)``, the value that
    reproduces the closed-form box shift.
    """
    gamma = shape_parameter(trap)
    m = species.mass
    if gamma <= 1.5:
        return math.sqrt(2 * math.pi * m) * (riemann_zeta(3) / riemann_zeta(1.5)) ** (1 / 3)
    return math.sqrt(8 * m / math.pi) * riemann_zeta(gamma - 0.5) / riemann_zeta(gamma)


def _relative_root(gamma: float, strength: float) -> float:
    """
    Solve ``(1 + d)^gamma - 1 = strength (1 + d)^(gamma - 1/2)`` for ``d = T_c / T0 - 1``.

    Written in terms of ``d`` so that tiny shifts keep full relative precision.
    """

    def residual(d: float) -> float:
        log_t = math.log1p(d)
        return math.expm1(gamma * log_t) - strength * math.exp((gamma - 0.5) * log_t)

    for factor in BRACKET_FACTORS:
        lo, hi = 1 / factor - 1, factor - 1
        f_lo, f_hi = residual(lo), residual(hi)
        if f_lo * f_hi < 0:
            logger.debug(f'T_c bracket T0 x {1 / factor:g}..{factor:g}, strength={strength:.6g}')
            estimate = abs(strength) / gamma
            return optimize.brentq(
                residual,
                lo,
                hi,
                xtol=max(estimate * 1e-15, 1e-300),
                rtol=ROOT_REL_TOL,
                maxiter=200,
            )

    raise ConvergenceError(
        'No sign change for the T_c equation within T0/16..16 T0',
        diagnostic={'strength': strength, 'gamma': gamma, 'f_lo': f_lo, 'f_hi': f_hi},
    )


def solve_tc(
    trap: PowerLawTrap,
    species: Species,
    n_total: float,
    constants: PhysicalConstants = SI,
) -> TcResult:
    """
    Deformed condensation temperature from the implicit equation
    ``(k T_c)^gamma = (k T0)^gamma + alpha B (k T_c)^(gamma - 1/2)``.

    ``T_c > T0`` for ``alpha > 0`` and ``T_c = T0`` exactly for ``alpha = 0``.
    """
    gamma = shape_parameter(trap)
    alpha = alpha_of(species, constants)
    temperature0 = t0(trap, species, n_total, constants)

    if alpha == 0:
        shift = 0.0
    else:
        kT0 = constants.k_boltzmann * temperature0
        strength = alpha * shift_coefficient(trap, species, constants) / math.sqrt(kT0)
        shift = _relative_root(gamma, strength)

    tc = temperature0 * (1 + shift)
    ratio = smallness_ratio(species, tc, constants)
    _check_smallness(ratio, tc)
    return TcResult(
        t0=temperature0,
        tc=tc,
        rel_shift=shift,
        alpha=alpha,
        smallness_ratio=ratio,
        gamma=gamma,
    )


def rel_shift_first_order(
    trap: PowerLawTrap,
    species: Species,
    n_total: float,
    constants: PhysicalConstants = SI,
) -> float:
    """``Delta T_c / T0 = (alpha / gamma) B (k T0)^(-1/2)``, scaling as ``N^(-1/(2 gamma))``."""
    gamma = shape_parameter(trap)
    alpha = alpha_of(species, constants)
    kT0 = constants.k_boltzmann * t0(trap, species, n_total, constants)
    return alpha * shift_coefficient(trap, species, constants) / (gamma * math.sqrt(kT0))


def omega_prefactor(
    trap: PowerLawTrap, species: Species, constants: PhysicalConstants = SI
) -> float:
    """``Omega`` in ``Delta T_c / T0 = alpha Omega N^(-1/(2 gamma))``, in s/m."""
    gamma = shape_parameter(trap)
    kT0_single = constants.k_boltzmann * t0(trap, species, 1, constants)
    return shift_coefficient(trap, species, constants) / (gamma * math.sqrt(kT0_single))


def spherical_shift_exponent(s1: float) -> float:
    """N-exponent of the shift in a spherical ``r^s1`` trap, ``-s1 / (3 (s1 + 2))``; box -1/3."""
    if not s1 > 0:
        raise DomainError(f'Trap exponent must be positive, got {s1}.')
    if math.isinf(s1):
        return -1 / 3
    return -s1 / (3 * (s1 + 2))


def harmonic_rel_shift(
    omegas: Sequence[float],
    species: Species,
    n_total: float,
    constants: PhysicalConstants = SI,
) -> float:
    """
    Closed form for the anisotropic harmonic trap (frequencies in rad/s):
    ``alpha zeta(5/2) / (3 zeta(3)^(5/6)) sqrt(8 m / (pi hbar omega_bar)) N^(-1/6)``.
    """
    alpha = alpha_of(species, constants)
    omega_bar = geometric_mean_frequency(omegas)
    return (
        alpha
        * riemann_zeta(2.5)
        / (3 * riemann_zeta(3) ** (5 / 6))
        * math.sqrt(8 * species.mass / (math.pi * constants.hbar * omega_bar))
        * n_total ** (-1 / 6)
    )


def box_rel_shift(
    volume: float,
    species: Species,
    n_total: float,
    constants: PhysicalConstants = SI,
) -> float:
    """Box limit ``alpha 2 m (V zeta(3))^(1/3) / (3 hbar) N^(-1/3)``, volume in m^3."""
    alpha = alpha_of(species, constants)
    return (
        alpha
        * 2
        * species.mass
        * (volume * riemann_zeta(3)) ** (1 / 3)
        / (3 * constants.hbar)
        * n_total ** (-1 / 3)
    )


def thermodynamic_limit_product(trap: PowerLawTrap, n_total: float) -> float:
    """``N V_char``, the quantity held fixed in the thermodynamic limit."""
    return n_total * characteristic_volume(trap)


def solve_fugacity(
    trap: PowerLawTrap,
    species: Species,
    temperature: float,
    n_total: float,
    constants: PhysicalConstants = SI,
    accuracy: Accuracy = DEFAULT_ACCURACY,
) -> float:
    """
    Fugacity at which the number equation (no condensate) holds ``n_total`` particles.

    :raises ConvergenceError: If ``temperature`` is at or below the condensation point, where no
        ``z < 1`` can hold that many particles.
    """
    if not n_total > 0:
        raise DomainError(f'Number of particles must be positive, got {n_total}.')

    def excess(z: float) -> float:
        point = ThermoPoint(temperature, z)
        return number_of_particles(trap, species, point, 0.0, constants, accuracy) - n_total

    # A box with alpha != 0 has g_1(1) in the number equation; stop just short of it.
    z_max = 1.0 if shape_parameter(trap) > 1.5 else 1 - 1e-12
    capacity = excess(z_max)
    if capacity <= 0:
        raise ConvergenceError(
            f'Temperature {temperature:.6g} K cannot hold {n_total:.6g} particles outside the '
            f'condensate (at or below the condensation point)',
            diagnostic={'z_max': z_max, 'n_excess_at_z_max': capacity},
        )
    return optimize.brentq(excess, 0.0, z_max, xtol=1e-300, rtol=ROOT_REL_TOL, maxiter=200)
