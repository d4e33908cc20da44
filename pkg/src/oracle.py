"""
Brute-force semiclassical phase-space integrals, with no expansion in ``alpha``.

With ``u = p / sqrt(2 m k_B T)``, ``eta = alpha sqrt(2 m / k_B T)`` and ``w = beta U`` the number
of particles is

    N = 4 pi (2 m k_B T)^(3/2) / (2 pi hbar)^3 * G / Gamma(q)
        * int dw w^(q-1) int du u^2 / (exp(u^2 + eta u + w - beta mu) - 1)

where ``q = sum n/s`` runs over the finite subspaces and ``G = prod C_n R^n Gamma(n/s + 1)`` uses
the thermal radii ``R`` (a box subspace contributes its volume instead). The momentum integral is
innermost. The outer integral is done in ``t = w^q``, which absorbs the ``w^(q-1)`` weight.

None of this goes through the Bose-function series, so it is an independent check on the
first-order formulas.
"""

import math
import warnings
from dataclasses import dataclass

from scipy import integrate, optimize

from .condensation import BRACKET_FACTORS, ROOT_REL_TOL, rel_shift_first_order, t0
from .errors import AccuracyError, ConvergenceError, DivergenceError, DomainError
from .logging_rich import logger
from .model import (
    SI,
    PhysicalConstants,
    PowerLawTrap,
    Species,
    alpha_of,
    shape_parameter,
    unit_ball_volume,
)
from .pyproject import Settings
from .specfun import gamma_fn

ACCURACY_SLACK = 10
"""An outer error estimate above ``ACCURACY_SLACK * rel_tol`` is reported as a failure."""


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Tolerance and integration cutoffs for the phase-space quadrature.

    :param rel_tol: Relative tolerance of the outer integral, at most ``1e-6``.
    :param momentum_cutoff_factor: Upper momentum limit in units of ``sqrt(2 m k_B T)``.
    :param radial_cutoff_factor: Radial limit in thermal radii; the potential is integrated up to
        ``beta U = radial_cutoff_factor^2``.
    """

    rel_tol: float = 1e-8
    momentum_cutoff_factor: float = 10.0
    radial_cutoff_factor: float = 10.0
    limit: int = 200

    def __post_init__(self):
        if not 0 < self.rel_tol <= 1e-6:
            raise DomainError(f'Quadrature rel_tol must be in (0, 1e-6], got {self.rel_tol}.')
        for name in ('momentum_cutoff_factor', 'radial_cutoff_factor'):
            if not getattr(self, name) >= 10:
                raise DomainError(f'`{name}` must be at least 10, got {getattr(self, name)}.')

    @classmethod
    def from_settings(cls, settings: Settings) -> 'QuadratureSpec':
        return cls(
            rel_tol=settings.quadrature_rel_tol,
            momentum_cutoff_factor=settings.momentum_cutoff_factor,
            radial_cutoff_factor=settings.radial_cutoff_factor,
        )


@dataclass(frozen=True)
class OracleComparison:
    """
    One row of the ``alpha`` convergence study.

    ``oracle_shift`` is measured against the quadrature's own ``alpha = 0`` temperature so that
    quadrature error common to both cancels. ``ratio`` is the previous row's discrepancy divided
    by this one's; it tends to 4 when ``alpha`` is halved and the discrepancy is ``O(alpha^2)``.
    """

    xi1: float
    alpha: float
    t0: float
    oracle_t0: float
    oracle_tc: float
    oracle_shift: float
    first_order_shift: float
    discrepancy: float
    ratio: float | None = None


def spectrum_infimum(species: Species, constants: PhysicalConstants = SI) -> float:
    """
    Lowest value of ``p^2/2m + alpha p + U`` over phase space, in J.

    0 for ``alpha >= 0``; ``-m alpha^2 / 2`` at ``p = -m alpha`` otherwise.
    """
    alpha = alpha_of(species, constants)
    return 0.0 if alpha >= 0 else -species.mass * alpha**2 / 2


def _spatial_measure(trap: PowerLawTrap, kT: float) -> tuple[float, float]:
    """``(q, G)`` of the potential's density of states ``G w^(q-1) / Gamma(q)``."""
    q, measure = 0.0, 1.0
    for sub in trap.subspaces:
        ball = unit_ball_volume(sub.n)
        if sub.is_box:
            measure *= ball * sub.a**sub.n
        else:
            q += sub.n_over_s
            measure *= ball * sub.thermal_radius(kT) ** sub.n * gamma_fn(sub.n_over_s + 1)
    return q, measure


def _bose_factor(x: float) -> float:
    if x <= 0:
        # Only the isolated minimum itself, which has zero measure.
        return 0.0
    return math.exp(-x) / -math.expm1(-x)


def _integrate(
    trap: PowerLawTrap,
    species: Species,
    temperature: float,
    gap: float,
    spec: QuadratureSpec,
    constants: PhysicalConstants,
) -> float:
    """
    Phase-space integral with ``gap = beta (mu_min - mu) >= 0``.

    The kinetic part is shifted so that its minimum is 0, which keeps the exponent exact next to
    the minimum even when ``gap = 0``.
    """
    kT = constants.k_boltzmann * temperature
    alpha = alpha_of(species, constants)
    eta = alpha * math.sqrt(2 * species.mass / kT)
    u_min = -eta / 2 if alpha < 0 else 0.0
    u_max = spec.momentum_cutoff_factor + u_min

    if alpha < 0:

        def kinetic(u: float) -> float:
            return (u - u_min) ** 2

    else:

        def kinetic(u: float) -> float:
            return u * (u + eta)

    epsrel = spec.rel_tol / 10
    points = [u_min] if u_min > 0 else None

    def momentum(w: float) -> float:
        offset = w + gap
        value, _ = integrate.quad(
            lambda u: u * u * _bose_factor(kinetic(u) + offset),
            0,
            u_max,
            points=points,
            epsabs=0,
            epsrel=epsrel,
            limit=spec.limit,
        )
        return value

    q, measure = _spatial_measure(trap, kT)
    prefactor = 4 * math.pi * (2 * species.mass * kT) ** 1.5 / (2 * math.pi * constants.hbar) ** 3

    with warnings.catch_warnings():
        warnings.simplefilter('ignore', integrate.IntegrationWarning)
        if q == 0:
            return prefactor * measure * momentum(0.0)
        t_max = (spec.radial_cutoff_factor**2) ** q
        value, error = integrate.quad(
            lambda t: momentum(t ** (1 / q)),
            0,
            t_max,
            epsabs=0,
            epsrel=spec.rel_tol,
            limit=spec.limit,
        )

    logger.debug(
        f'Phase-space quadrature T={temperature:.6g} K, gap={gap:.3g}: {value:.10g} +- {error:.2g}'
    )
    if error > ACCURACY_SLACK * spec.rel_tol * abs(value):
        raise AccuracyError(
            f'Phase-space quadrature did not reach rel_tol={spec.rel_tol:g} '
            f'at T={temperature:.6g} K',
            estimate=prefactor * measure * value / gamma_fn(q + 1),
            error=prefactor * measure * error / gamma_fn(q + 1),
        )
    return prefactor * measure * value / gamma_fn(q + 1)


def full_number_quadrature(
    trap: PowerLawTrap,
    species: Species,
    temperature: float,
    mu: float,
    spec: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = SI,
) -> float:
    """
    ``N = (2 pi hbar)^-3 int d^3r d^3p / (exp(beta (eps - mu)) - 1)`` for the full dispersion
    ``eps = p^2/2m + alpha p + U(r)``.

    :param mu: Chemical potential in J, strictly below :func:`spectrum_infimum`. ``-inf`` gives 0.
    :raises DomainError: If ``mu`` reaches the bottom of the spectrum.
    :raises AccuracyError: If the outer quadrature misses its tolerance.
    """
    if not temperature > 0:
        raise DomainError(f'Temperature must be positive, got {temperature}.')
    mu_min = spectrum_infimum(species, constants)
    if not mu < mu_min:
        raise DomainError(
            f'Chemical potential {mu:.6g} J must lie below the bottom of the spectrum '
            f'{mu_min:.6g} J.'
        )
    if math.isinf(mu):
        return 0.0
    gap = (mu_min - mu) / (constants.k_boltzmann * temperature)
    return _integrate(trap, species, temperature, gap, spec, constants)


def oracle_tc(
    trap: PowerLawTrap,
    species: Species,
    n_total: float,
    spec: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = SI,
) -> float:
    """
    Condensation temperature in K from the unexpanded number equation, with the chemical potential
    at the bottom of the spectrum.

    :raises DivergenceError: For ``alpha < 0`` when ``sum n/s <= 1/2``: the minimum then lies on a
        momentum shell and the phase-space integral never saturates.
    :raises ConvergenceError: If no bracket around ``T0`` holds the root.
    """
    if not n_total >= 1:
        raise DomainError(f'Number of particles must be at least 1, got {n_total}.')
    alpha = alpha_of(species, constants)
    if alpha < 0 and shape_parameter(trap) - 1.5 <= 0.5:
        raise DivergenceError(
            f'With alpha < 0 the phase-space integral diverges at the bottom of the spectrum for '
            f'gamma={shape_parameter(trap):g} <= 2; there is no condensation point.'
        )

    def excess(temperature: float) -> float:
        count = _integrate(trap, species, temperature, 0.0, spec, constants)
        return count / n_total - 1

    guess = t0(trap, species, n_total, constants)
    for factor in BRACKET_FACTORS:
        lo, hi = guess / factor, guess * factor
        f_lo, f_hi = excess(lo), excess(hi)
        if f_lo * f_hi < 0:
            logger.debug(f'Oracle T_c bracket {lo:.6g}..{hi:.6g} K')
            return optimize.brentq(excess, lo, hi, xtol=guess * 1e-15, rtol=ROOT_REL_TOL)

    raise ConvergenceError(
        'No sign change for the full number equation within T0/16..16 T0',
        diagnostic={'t0': guess, 'f_lo': f_lo, 'f_hi': f_hi},
    )


def compare_with_first_order(
    trap: PowerLawTrap,
    species: Species,
    n_total: float,
    halvings: int = 0,
    spec: QuadratureSpec = QuadratureSpec(),
    constants: PhysicalConstants = SI,
) -> list[OracleComparison]:
    """
    Oracle shift against :func:`~src.condensation.rel_shift_first_order` for ``xi1`` and
    ``halvings`` successive halvings of it.
    """
    if halvings < 0:
        raise DomainError(f'Number of halvings cannot be negative, got {halvings}.')
    undeformed = Species(mass=species.mass)
    reference = oracle_tc(trap, undeformed, n_total, spec, constants)
    analytic_t0 = t0(trap, undeformed, n_total, constants)

    rows: list[OracleComparison] = []
    for k in range(halvings + 1):
        current = Species(mass=species.mass, xi1=species.xi1 / 2**k)
        tc = oracle_tc(trap, current, n_total, spec, constants)
        oracle_shift = tc / reference - 1
        first_order = rel_shift_first_order(trap, current, n_total, constants)
        discrepancy = oracle_shift - first_order
        ratio = None
        if rows and discrepancy != 0:
            ratio = rows[-1].discrepancy / discrepancy
        rows.append(
            OracleComparison(
                xi1=current.xi1,
                alpha=alpha_of(current, constants),
                t0=analytic_t0,
                oracle_t0=reference,
                oracle_tc=tc,
                oracle_shift=oracle_shift,
                first_order_shift=first_order,
                discrepancy=discrepancy,
                ratio=ratio,
            )
        )
    return rows
