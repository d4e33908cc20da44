"""
Gamma, Riemann zeta and Bose-Einstein functions.

``g_nu(z) = sum_k z^k / k^nu`` is summed directly up to ``z = 0.99``; closer to 1 the series needs
too many terms for small ``nu``, so the integral representation

    g_nu(z) = 1/Gamma(nu) * int_0^inf x^(nu-1) / (exp(x)/z - 1) dx

is integrated adaptively instead. At ``z = 1`` the function is ``zeta(nu)``.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import AccuracyError, DivergenceError, DomainError
from .logging_rich import logger

SERIES_Z_MAX = 0.99
"""Largest fugacity evaluated by the power series."""

# Series tail is pushed this far below ``rel_tol`` so that neighbouring fugacities (finite
# differences) see the same truncation.
_SERIES_MARGIN = 1e-6


@dataclass(frozen=True)
class Accuracy:
    """
    Tolerance for special-function evaluation.

    :param rel_tol: Relative tolerance, ``0 < rel_tol <= 1e-6``.
    :param max_terms: Cap on the number of series terms, at least 100. A fugacity needing more
        terms is evaluated through the integral representation.
    """

    rel_tol: float = 1e-10
    max_terms: int = 10_000

    def __post_init__(self):
        if not 0 < self.rel_tol <= 1e-6:
            raise DomainError(f'rel_tol must be in (0, 1e-6], got {self.rel_tol}.')
        if self.max_terms < 100:
            raise DomainError(f'max_terms must be at least 100, got {self.max_terms}.')


DEFAULT_ACCURACY = Accuracy()


def gamma_fn(x: float) -> float:
    """Gamma function for ``x > 0``."""
    if not x > 0:
        raise DomainError(f'Gamma function is only evaluated for x > 0, got {x}.')
    return float(special.gamma(x))


def log_gamma_fn(x: float) -> float:
    """``ln Gamma(x)`` for ``x > 0``, finite where Gamma itself overflows."""
    if not x > 0:
        raise DomainError(f'Gamma function is only evaluated for x > 0, got {x}.')
    return float(special.gammaln(x))


def riemann_zeta(nu: float) -> float:
    """Riemann zeta function for ``nu > 1``; it diverges at ``nu = 1``."""
    if not nu > 1:
        raise DomainError(f'Riemann zeta is only evaluated for nu > 1, got {nu}.')
    return float(special.zeta(nu, 1))


def _series_terms(z: float, accuracy: Accuracy) -> int:
    # Tail after K terms is below z^(K+1) / (1 - z); the sum itself is at least z.
    target = accuracy.rel_tol * _SERIES_MARGIN * (1 - z)
    return max(1, math.ceil(math.log(target) / math.log(z)))


def _bose_series(nu: float, z: float, terms: int) -> float:
    k = np.arange(1, terms + 1, dtype=float)
    summands = np.exp(k * math.log(z) - nu * np.log(k))
    # Smallest first.
    return float(np.sum(summands[::-1]))


def bose_fn_integral(nu: float, z: float, accuracy: Accuracy = DEFAULT_ACCURACY) -> float:
    """
    ``g_nu(z)`` from its integral representation, for ``nu > 0`` and ``0 < z < 1``.

    The integrand peaks at ``x ~ -ln z``, so the range is split there; the ``x^(nu-1)`` endpoint
    singularity on the first piece is handled by an algebraic quadrature weight.

    :raises AccuracyError: If the quadrature error estimate exceeds ``10 * rel_tol``.
    """
    if not nu > 0:
        raise DomainError(f'Bose function order must be positive, got nu={nu}.')
    if not 0 < z < 1:
        raise DomainError(f'Integral representation needs 0 < z < 1, got z={z}.')

    shift = -math.log(z)

    def bose_factor(x: float) -> float:
        y = x + shift
        return math.exp(-y) / -math.expm1(-y)

    def integrand(x: float) -> float:
        return x ** (nu - 1) * bose_factor(x)

    epsrel = accuracy.rel_tol / 10
    pieces = []
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', integrate.IntegrationWarning)
        head = min(shift, 1.0)
        pieces.append(
            integrate.quad(
                bose_factor, 0, head, weight='alg', wvar=(nu - 1, 0), epsabs=0, epsrel=epsrel
            )
        )
        if head < 1:
            breaks = np.geomspace(head, 1, 2 + int(math.log10(1 / head)))[1:-1]
            pieces.append(
                integrate.quad(
                    integrand,
                    head,
                    1,
                    points=list(breaks) or None,
                    epsabs=0,
                    epsrel=epsrel,
                    limit=200,
                )
            )
        pieces.append(integrate.quad(integrand, 1, np.inf, epsabs=0, epsrel=epsrel, limit=200))

    value = sum(piece[0] for piece in pieces)
    error = sum(piece[1] for piece in pieces)
    if error > 10 * accuracy.rel_tol * abs(value):
        raise AccuracyError(
            f'Bose function g_{nu:g}({z:g}) did not reach rel_tol={accuracy.rel_tol:g}',
            estimate=value / gamma_fn(nu),
            error=error / gamma_fn(nu),
        )
    return value / gamma_fn(nu)


def bose_fn(nu: float, z: float, accuracy: Accuracy = DEFAULT_ACCURACY) -> float:
    """
    Bose-Einstein function ``g_nu(z)`` for ``nu > 0`` and fugacity ``0 <= z <= 1``.

    :raises DivergenceError: At ``z = 1`` with ``nu <= 1``.
    :raises DomainError: For ``nu <= 0`` or ``z`` outside ``[0, 1]``.
    """
    if not nu > 0:
        raise DomainError(f'Bose function order must be positive, got nu={nu}.')
    if not 0 <= z <= 1:
        raise DomainError(f'Fugacity must be in [0, 1], got z={z}.')

    if z == 0:
        return 0.0
    if z == 1:
        if nu <= 1:
            raise DivergenceError(f'g_nu(z) diverges for z=1 when nu <= 1 (nu={nu}).')
        return riemann_zeta(nu)

    if z <= SERIES_Z_MAX:
        terms = _series_terms(z, accuracy)
        if terms <= accuracy.max_terms:
            return _bose_series(nu, z, terms)
        logger.debug(
            f'g_{nu:g}({z:g}) needs {terms} series terms, over max_terms; integrating instead.'
        )

    return bose_fn_integral(nu, z, accuracy)
