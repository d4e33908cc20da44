import math

import pytest
from scipy import constants as si

from src.errors import DomainError
from src.model import (
    SI,
    FrequencyUnit,
    PowerLawTrap,
    Species,
    TrapSubspace,
    alpha_of,
    angular_frequency,
    characteristic_volume,
    geometric_constant,
    geometric_mean_frequency,
    log_characteristic_volume,
    shape_parameter,
    trap_partition_quadrature,
    unit_ball_volume,
)

MASS = 15e-26


@pytest.fixture
def harmonic():
    return PowerLawTrap.harmonic([10, 10, 20], MASS)


@pytest.fixture
def cylindrical():
    """Radial ``r^4`` in the xy plane, harmonic along z."""
    return PowerLawTrap(
        (
            TrapSubspace.harmonic_scales(2, 4.0, 30.0, MASS),
            TrapSubspace.harmonic_scales(1, 2.0, 10.0, MASS),
        )
    )


class TestConstantsAndSpecies:
    def test_si_defaults(self):
        assert SI.hbar == si.hbar
        assert SI.k_boltzmann == si.k
        assert SI.planck_mass == pytest.approx(2.14e-8, rel=0.01)

    def test_alpha(self):
        """Test alpha = xi1 m c / (2 M_p)."""
        species = Species(mass=MASS, xi1=2.0)
        expected = 2.0 * MASS * si.c / (2 * SI.planck_mass)
        assert alpha_of(species) == pytest.approx(expected, rel=1e-15)

    def test_alpha_sign_follows_xi1(self):
        assert alpha_of(Species(MASS, -1.0)) < 0 < alpha_of(Species(MASS, 1.0))
        assert alpha_of(Species(MASS)) == 0

    def test_mass_must_be_positive(self):
        with pytest.raises(DomainError, match='mass'):
            Species(mass=0)


class TestFrequency:
    def test_angular_passes_through(self):
        assert angular_frequency(10, 'rad/s') == 10

    def test_hz_converted(self):
        assert angular_frequency(10, FrequencyUnit.LINEAR) == pytest.approx(20 * math.pi)

    def test_unknown_unit(self):
        with pytest.raises(DomainError, match='Unknown frequency unit'):
            angular_frequency(10, 'kHz')

    def test_geometric_mean(self):
        assert geometric_mean_frequency([10, 10, 20]) == pytest.approx(2000 ** (1 / 3))


class TestTrapSubspace:
    def test_harmonic_scales(self):
        sub = TrapSubspace.harmonic_scales(1, 2.0, 10.0, MASS)
        assert sub.A == pytest.approx(SI.hbar * 10 / 2)
        assert sub.a == pytest.approx(math.sqrt(SI.hbar / (MASS * 10)))

    def test_box_encloses_volume(self):
        sub = TrapSubspace.box(3, 1e-15)
        assert sub.is_box
        assert sub.n_over_s == 0
        assert unit_ball_volume(3) * sub.a**3 == pytest.approx(1e-15)

    def test_box_potential(self):
        sub = TrapSubspace.box(3, 1e-15)
        assert sub.potential(sub.a / 2) == 0
        assert sub.potential(sub.a * 1.01) == math.inf

    def test_thermal_radius(self):
        sub = TrapSubspace.harmonic_scales(3, 1.0, 10.0, MASS)
        kT = 1e-31
        assert sub.potential(sub.thermal_radius(kT)) == pytest.approx(kT)

    @pytest.mark.parametrize(
        'kwargs', [dict(n=4, s=2, A=1, a=1), dict(n=1, s=0, A=1, a=1), dict(n=1, s=2, A=-1, a=1)]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            TrapSubspace(**kwargs)


class TestPowerLawTrap:
    def test_dimensions_must_add_to_three(self):
        with pytest.raises(DomainError, match='add up to 3'):
            PowerLawTrap((TrapSubspace(2, 2.0, 1.0, 1.0),))

    def test_harmonic_needs_three_frequencies(self):
        with pytest.raises(DomainError):
            PowerLawTrap.harmonic([10, 10], MASS)

    def test_radial_coordinates(self, cylindrical):
        assert cylindrical.radial_coordinates([3.0, 4.0, -5.0]) == [5.0, 5.0]

    def test_potential_sums_subspaces(self, harmonic):
        a0 = harmonic.subspaces[0].a
        a2 = harmonic.subspaces[2].a
        expected = harmonic.subspaces[0].A + harmonic.subspaces[2].A
        assert harmonic.potential([a0, 0.0, a2]) == pytest.approx(expected)

    def test_potential_outside_box(self):
        trap = PowerLawTrap.box(1e-15)
        assert trap.potential([1e-3, 0, 0]) == math.inf
        assert trap.has_box

    def test_thermal_radii(self, harmonic):
        kT = 1e-31
        for sub, radius in zip(harmonic.subspaces, harmonic.thermal_radii(kT)):
            assert sub.potential(radius) == pytest.approx(kT)


class TestGeometry:
    """Shape parameter, C and the characteristic volume."""

    def test_harmonic_gamma(self, harmonic):
        assert shape_parameter(harmonic) == 3.0

    def test_box_gamma(self):
        assert shape_parameter(PowerLawTrap.box(1e-15)) == 1.5

    @pytest.mark.parametrize('s, gamma', [(1, 4.5), (2, 3.0), (3, 2.5), (6, 2.0)])
    def test_spherical_gamma(self, s, gamma):
        assert shape_parameter(PowerLawTrap.spherical(s, 10.0, MASS)) == pytest.approx(gamma)

    def test_cartesian_constant(self, harmonic):
        assert geometric_constant(harmonic) == pytest.approx(8.0)

    def test_spherical_constant(self):
        assert geometric_constant(PowerLawTrap.spherical(1, 10, MASS)) == pytest.approx(
            4 * math.pi / 3
        )

    def test_cylindrical_constant(self):
        trap = PowerLawTrap((TrapSubspace(2, 2.0, 1.0, 1.0), TrapSubspace(1, 2.0, 1.0, 1.0)))
        assert geometric_constant(trap) == pytest.approx(2 * math.pi)

    def test_box_characteristic_volume(self):
        assert characteristic_volume(PowerLawTrap.box(1e-15)) == pytest.approx(1e15)

    def test_product_form(self, cylindrical):
        radial, axial = cylindrical.subspaces
        expected = (
            radial.A**0.5
            * radial.a**-2
            * axial.A**0.5
            * axial.a**-1
            / (geometric_constant(cylindrical) * math.gamma(1.5) * math.gamma(1.5))
        )
        assert characteristic_volume(cylindrical) == pytest.approx(expected, rel=1e-12)

    def test_log_form(self, cylindrical):
        assert log_characteristic_volume(cylindrical) == pytest.approx(
            math.log(characteristic_volume(cylindrical)), rel=1e-12
        )

    def test_reordering_invariant(self, cylindrical):
        reordered = PowerLawTrap(tuple(reversed(cylindrical.subspaces)))
        assert geometric_constant(reordered) == pytest.approx(geometric_constant(cylindrical))
        assert characteristic_volume(reordered) == pytest.approx(
            characteristic_volume(cylindrical), rel=1e-12
        )

    def test_small_exponent_stays_finite(self):
        """Test ``A^(n/s)`` far below the float range only shows up in the log."""
        trap = PowerLawTrap.spherical(0.01, 10, MASS)
        assert characteristic_volume(trap) == 0.0
        assert math.isfinite(log_characteristic_volume(trap))
        assert log_characteristic_volume(trap) < -1e4


class TestTrapPartitionQuadrature:
    """Brute-force check of C and the Gamma factors."""

    @pytest.mark.parametrize(
        'trap',
        [
            PowerLawTrap.harmonic([10, 10, 20], MASS),
            PowerLawTrap.spherical(1, 10.0, MASS),
            PowerLawTrap.spherical(6, 10.0, MASS),
            PowerLawTrap(
                (
                    TrapSubspace.harmonic_scales(2, 4.0, 30.0, MASS),
                    TrapSubspace.harmonic_scales(1, 2.0, 10.0, MASS),
                )
            ),
        ],
        ids=['harmonic', 'linear', 'r6', 'cylindrical'],
    )
    def test_matches_closed_form(self, trap):
        kT = 1e-31
        q = shape_parameter(trap) - 1.5
        closed = kT**q / characteristic_volume(trap)
        assert trap_partition_quadrature(trap, 1 / kT) == pytest.approx(closed, rel=1e-8)

    def test_box_is_volume(self):
        trap = PowerLawTrap.box(1e-15)
        assert trap_partition_quadrature(trap, 1e31) == pytest.approx(1e-15)
