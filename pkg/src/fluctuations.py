"""
Particle-number fluctuations and isothermal compressibility of the deformed gas.

The grand-canonical dispersion ``<dN^2> = k_B T (dN/dmu)`` is taken from the number equation,
assuming the condensate itself does not fluctuate. Below ``T_c`` the fugacity is 1 and the Bose
functions become zeta functions; for ``gamma <= 5/2`` the ``alpha`` term then has a zeta argument
``<= 1`` and diverges. Evaluating it at the lowest energy of the system instead,
``z = exp(-beta_c (eps_min - m alpha^2/2))``, keeps it finite.
"""

import dataclasses
import math
from dataclasses import dataclass
from enum import StrEnum

from .condensation import (
    ThermoPoint,
    linear_coefficient,
    solve_fugacity,
    solve_tc,
    t0,
    thermal_coefficient,
    trap_power,
)
from .errors import DomainError, RegularizationRequiredError
from .logging_rich import logger
from .model import (
    SI,
    PhysicalConstants,
    PowerLawTrap,
    Species,
    alpha_of,
    shape_parameter,
)
from .specfun import DEFAULT_ACCURACY, Accuracy, bose_fn, riemann_zeta

ANOMALY_THRESHOLD = 2.5
"""At or below this shape parameter the ``alpha`` term diverges below ``T_c``."""


class Regime(StrEnum):
    ABOVE = 'above'
    BELOW = 'below'


class Anomaly(StrEnum):
    NORMAL = 'normal'
    ANOMALOUS = 'anomalous'


@dataclass(frozen=True)
class FluctuationReport:
    """
    Number fluctuations at one temperature.

    ``compressibility`` stays ``None`` until a mean density is supplied
    (see :func:`with_compressibility`). ``epsilon_min`` is set only when the report is regularized.
    """

    variance: float
    normalized_variance: float
    regime: Regime
    anomaly: Anomaly
    gamma: float
    temperature: float
    t0: float
    regularized: bool = False
    epsilon_min: float | None = None
    compressibility: float | None = None


def classify_anomaly(gamma: float, alpha: float) -> Anomaly:
    """Below ``T_c`` the fluctuations are anomalous iff ``gamma <= 5/2`` and ``alpha != 0``."""
    if not gamma > 1.5:
        raise DomainError(f'Fluctuations need a shape parameter above 3/2, got gamma={gamma}.')
    if gamma <= ANOMALY_THRESHOLD and alpha != 0:
        return Anomaly.ANOMALOUS
    return Anomaly.NORMAL


def _deformation_factor(mass: float, kT: float) -> float:
    """``sqrt(8 m / (pi k_B T))``, in s/m."""
    return math.sqrt(8 * mass / (math.pi * kT))


def variance_above_tc(
    trap: PowerLawTrap,
    species: Species,
    temperature: float,
    fugacity: float,
    n_total: float,
    t0_value: float | None = None,
    constants: PhysicalConstants = SI,
    accuracy: Accuracy = DEFAULT_ACCURACY,
) -> FluctuationReport:
    """
    ``<dN^2> = [g_(gamma-1)(z) - alpha g_(gamma-3/2)(z) sqrt(8m / pi kT)] / zeta(gamma)
    (T/T0)^gamma N`` for ``T > T_c``. Always normal, whatever the sign of ``alpha``.

    :param t0_value: Undeformed condensation temperature; computed from the trap if not given.
    :raises DomainError: If ``fugacity >= 1`` or the point is otherwise invalid.
    """
    gamma = shape_parameter(trap)
    alpha = alpha_of(species, constants)
    classify_anomaly(gamma, alpha)
    point = ThermoPoint(temperature, fugacity)
    if fugacity >= 1:
        raise DomainError(f'Above T_c the fugacity is below 1, got z={fugacity}.')
    if t0_value is None:
        t0_value = t0(trap, species, n_total, constants)

    zeta_gamma = riemann_zeta(gamma)
    bracket = bose_fn(gamma - 1, fugacity, accuracy) / zeta_gamma
    if alpha != 0:
        bracket -= (
            alpha
            * bose_fn(gamma - 1.5, fugacity, accuracy)
            / zeta_gamma
            * _deformation_factor(species.mass, point.kT(constants))
        )
    variance = bracket * (temperature / t0_value) ** gamma * n_total
    return FluctuationReport(
        variance=variance,
        normalized_variance=variance / n_total,
        regime=Regime.ABOVE,
        anomaly=Anomaly.NORMAL,
        gamma=gamma,
        temperature=temperature,
        t0=t0_value,
    )


def regularized_fugacity(
    epsilon_min: float,
    species: Species,
    tc: float,
    constants: PhysicalConstants = SI,
) -> float:
    """
    ``exp(-(eps_min - m alpha^2/2) / k_B T_c)``.

    :raises DomainError: If ``eps_min <= m alpha^2 / 2`` (the fugacity would not be below 1).
    """
    alpha = alpha_of(species, constants)
    gap = epsilon_min - species.mass * alpha**2 / 2
    if not gap > 0:
        raise DomainError(
            f'eps_min={epsilon_min:.6g} J must exceed m alpha^2/2='
            f'{species.mass * alpha**2 / 2:.6g} J to regularize.'
        )
    return math.exp(-gap / (constants.k_boltzmann * tc))


def variance_below_tc(
    trap: PowerLawTrap,
    species: Species,
    temperature: float,
    n_total: float,
    t0_value: float | None = None,
    epsilon_min: float | None = None,
    tc: float | None = None,
    constants: PhysicalConstants = SI,
    accuracy: Accuracy = DEFAULT_ACCURACY,
) -> FluctuationReport:
    """
    ``<dN^2> = [zeta(gamma-1) - alpha zeta(gamma-3/2) sqrt(8m / pi kT)] / zeta(gamma)
    (T/T0)^gamma N`` for ``T < T_c``.

    With ``epsilon_min`` the zeta functions are replaced by Bose functions of
    :func:`regularized_fugacity`, evaluated at the deformed ``T_c``. That is mandatory when a
    zeta argument would be ``<= 1``: the ``alpha`` term for ``gamma <= 5/2``, the leading term for
    ``gamma <= 2``.

    :param tc: Deformed condensation temperature; solved for if needed and not given.
    :raises RegularizationRequiredError: If a term diverges and no ``epsilon_min`` is given.
    """
    gamma = shape_parameter(trap)
    alpha = alpha_of(species, constants)
    anomaly = classify_anomaly(gamma, alpha)
    if not temperature > 0:
        raise DomainError(f'Temperature must be positive, got {temperature}.')
    if t0_value is None:
        t0_value = t0(trap, species, n_total, constants)

    alpha_diverges = alpha != 0 and gamma - 1.5 <= 1
    leading_diverges = gamma - 1 <= 1
    if (alpha_diverges or leading_diverges) and epsilon_min is None:
        divergent = f'zeta({gamma - 1.5:g})' if alpha_diverges else f'zeta({gamma - 1:g})'
        raise RegularizationRequiredError(
            f'Below T_c the fluctuations contain {divergent}, which diverges for gamma={gamma:g}; '
            f'an eps_min is needed to regularize them.'
        )

    if epsilon_min is None:
        leading = riemann_zeta(gamma - 1)
        alpha_factor = riemann_zeta(gamma - 1.5) if alpha != 0 else 0.0
    else:
        if tc is None:
            tc = solve_tc(trap, species, n_total, constants).tc
        z_reg = regularized_fugacity(epsilon_min, species, tc, constants)
        if leading_diverges:
            logger.warning(
                f'Leading fluctuation term zeta({gamma - 1:g}) diverges for gamma={gamma:g} even '
                f'without deformation; regularized with eps_min.'
            )
        if alpha_diverges:
            logger.warning(
                f'Anomalous fluctuations for gamma={gamma:g} <= 5/2; alpha term regularized with '
                f'eps_min={epsilon_min:.6g} J.'
            )
        leading = bose_fn(gamma - 1, z_reg, accuracy)
        alpha_factor = bose_fn(gamma - 1.5, z_reg, accuracy) if alpha != 0 else 0.0

    kT = constants.k_boltzmann * temperature
    bracket = (leading - alpha * alpha_factor * _deformation_factor(species.mass, kT)) / (
        riemann_zeta(gamma)
    )
    variance = bracket * (temperature / t0_value) ** gamma * n_total
    return FluctuationReport(
        variance=variance,
        normalized_variance=variance / n_total,
        regime=Regime.BELOW,
        anomaly=anomaly,
        gamma=gamma,
        temperature=temperature,
        t0=t0_value,
        regularized=epsilon_min is not None,
        epsilon_min=epsilon_min,
    )


def variance_from_number_equation(
    trap: PowerLawTrap,
    species: Species,
    point: ThermoPoint,
    constants: PhysicalConstants = SI,
    accuracy: Accuracy = DEFAULT_ACCURACY,
) -> float:
    """
    ``k_B T dN/dmu`` taken directly from the number equation, using ``z d/dz g_nu = g_(nu-1)``.

    Same content as :func:`variance_above_tc` but without the normalization by ``T0``.
    """
    gamma = shape_parameter(trap)
    alpha = alpha_of(species, constants)
    kT = point.kT(constants)
    variance = (
        thermal_coefficient(species.mass, constants)
        * bose_fn(gamma - 1, point.fugacity, accuracy)
        * trap_power(trap, kT, gamma)
    )
    if alpha != 0:
        variance -= (
            alpha
            * linear_coefficient(species.mass, constants)
            * bose_fn(gamma - 1.5, point.fugacity, accuracy)
            * trap_power(trap, kT, gamma - 0.5)
        )
    return variance


def isothermal_compressibility(
    report: FluctuationReport,
    rho: float,
    n_total: float,
    temperature: float,
    constants: PhysicalConstants = SI,
) -> float:
    """``kappa_T = <dN^2> / (rho N k_B T)``, in 1/Pa for ``rho`` in m^-3."""
    if not rho > 0:
        raise DomainError(f'Mean density must be positive, got {rho}.')
    if not n_total >= 1:
        raise DomainError(f'Number of particles must be at least 1, got {n_total}.')
    if not temperature > 0:
        raise DomainError(f'Temperature must be positive, got {temperature}.')
    return report.variance / (rho * n_total * constants.k_boltzmann * temperature)


def with_compressibility(
    report: FluctuationReport,
    rho: float,
    n_total: float,
    constants: PhysicalConstants = SI,
) -> FluctuationReport:
    """Copy of ``report`` with :func:`isothermal_compressibility` filled in."""
    kappa = isothermal_compressibility(report, rho, n_total, report.temperature, constants)
    return dataclasses.replace(report, compressibility=kappa)


def mean_density(
    trap: PowerLawTrap,
    n_total: float,
    temperature: float,
    constants: PhysicalConstants = SI,
) -> float:
    """
    ``N / ((4 pi / 3) prod R_i^n_i)`` with ``R_i`` the thermal radius of each subspace.

    For an isotropic harmonic trap this is ``N / (4 pi R^3 / 3)`` with ``U(R) = k_B T``.
    """
    radii = trap.thermal_radii(constants.k_boltzmann * temperature)
    volume = 4 * math.pi / 3 * math.prod(r**sub.n for r, sub in zip(radii, trap.subspaces))
    return n_total / volume


def default_epsilon_min(
    trap: PowerLawTrap, species: Species, constants: PhysicalConstants = SI
) -> float:
    """
    Ground-state energy estimate: for each subspace the minimum over ``r`` of
    ``hbar^2 / (2 m r^2) + A (r/a)^s``, summed.

    The minimum sits at ``r^(s+2) = hbar^2 a^s / (m A s)``; a box contributes
    ``hbar^2 / (2 m a^2)``.
    """
    hbar, m = constants.hbar, species.mass
    total = 0.0
    for sub in trap.subspaces:
        if sub.is_box:
            total += hbar**2 / (2 * m * sub.a**2)
            continue
        # Logarithms keep a^s representable for steep traps.
        r = math.exp(
            (2 * math.log(hbar) + sub.s * math.log(sub.a) - math.log(m * sub.A * sub.s))
            / (sub.s + 2)
        )
        total += hbar**2 / (2 * m * r**2) + sub.potential(r)
    return total


def fluctuation_report(
    trap: PowerLawTrap,
    species: Species,
    temperature: float,
    n_total: float,
    epsilon_min: float | None = None,
    constants: PhysicalConstants = SI,
    accuracy: Accuracy = DEFAULT_ACCURACY,
) -> FluctuationReport:
    """
    Fluctuations at ``temperature``, on whichever side of the deformed ``T_c`` it falls.

    Above ``T_c`` the fugacity comes from the number equation; at or below, the condensate
    formulas apply (regularized with ``epsilon_min`` if given).
    """
    critical = solve_tc(trap, species, n_total, constants)
    if temperature > critical.tc:
        fugacity = solve_fugacity(trap, species, temperature, n_total, constants, accuracy)
        return variance_above_tc(
            trap, species, temperature, fugacity, n_total, critical.t0, constants, accuracy
        )
    return variance_below_tc(
        trap,
        species,
        temperature,
        n_total,
        critical.t0,
        epsilon_min,
        critical.tc,
        constants,
        accuracy,
    )
