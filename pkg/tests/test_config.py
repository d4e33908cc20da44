import copy
import json
import math

import pytest

from src.config import SubspaceConfig, load_run_config, parse_run_config
from src.errors import ConfigError, DomainError
from src.model import SI, FrequencyUnit, PowerLawTrap, shape_parameter
from src.pyproject import Settings

HARMONIC = {
    'species': {'mass': 1.5e-25, 'xi1': 1.0},
    'trap': [
        {'n': 1, 's': 2, 'frequency': 10, 'unit': 'rad/s'},
        {'n': 1, 's': 2, 'frequency': 10, 'unit': 'rad/s'},
        {'n': 1, 's': 2, 'frequency': 20, 'unit': 'rad/s'},
    ],
    'n_total': 1e6,
}


@pytest.fixture
def data():
    return copy.deepcopy(HARMONIC)


@pytest.fixture
def config_file(tmp_path, data):
    path = tmp_path / 'harmonic.json'
    path.write_text(json.dumps(data))
    return path


class TestParseRunConfig:
    """Test parse_run_config function."""

    def test_harmonic(self, data):
        config = parse_run_config(data)
        assert config.species.mass == 1.5e-25
        assert config.species.xi1 == 1.0
        assert config.n_total == 1e6
        assert config.constants == SI
        assert config.temperature is None
        assert config.trap() == PowerLawTrap.harmonic([10, 10, 20], 1.5e-25)

    def test_xi1_defaults_to_zero(self, data):
        del data['species']['xi1']
        assert parse_run_config(data).species.xi1 == 0.0

    def test_hz_converted(self, data):
        for sub in data['trap']:
            sub['unit'] = 'Hz'
        omegas = [2 * math.pi * w for w in (10, 10, 20)]
        trap = parse_run_config(data).trap()
        for sub, expected in zip(trap.subspaces, PowerLawTrap.harmonic(omegas, 1.5e-25).subspaces):
            assert sub.A == pytest.approx(expected.A)
            assert sub.a == pytest.approx(expected.a)

    def test_box(self):
        config = parse_run_config(
            {
                'species': {'mass': 1.5e-25},
                'trap': [{'n': 3, 's': 'inf', 'volume': 1e-15}],
                'n_total': 1e6,
            }
        )
        assert config.trap().has_box
        assert shape_parameter(config.trap()) == 1.5

    def test_raw_scales(self):
        config = parse_run_config(
            {
                'species': {'mass': 1.5e-25},
                'trap': [{'n': 2, 's': 4, 'A': 1e-30, 'a': 1e-5}, {'n': 1, 's': 'inf', 'a': 1e-4}],
                'n_total': 1e6,
            }
        )
        first, second = config.trap().subspaces
        assert (first.A, first.a, first.s) == (1e-30, 1e-5, 4.0)
        assert second.is_box
        assert second.a == 1e-4

    def test_optional_keys(self, data):
        data.update(
            temperature=4.5e-9,
            fugacity=0.5,
            resolution=5e-2,
            epsilon_min=1e-33,
            rho=1e19,
            quadrature={'rel_tol': 1e-10},
            constants={'hbar': 1e-34},
        )
        config = parse_run_config(data)
        assert config.temperature == 4.5e-9
        assert config.fugacity == 0.5
        assert config.resolution == 5e-2
        assert config.epsilon_min == 1e-33
        assert config.rho == 1e19
        assert config.quadrature == {'rel_tol': 1e-10}
        assert config.constants.hbar == 1e-34
        assert config.constants.k_boltzmann == SI.k_boltzmann

    @pytest.mark.parametrize(
        'change, match',
        [
            ({'colour': 'red'}, 'Unknown key'),
            ({'n_total': 0.5}, 'at least 1'),
            ({'n_total': True}, 'must be a number'),
            ({'fugacity': 1.0}, r'\[0, 1\)'),
            ({'temperature': -1.0}, 'positive'),
            ({'temperature': float('nan')}, 'finite'),
            ({'trap': []}, '1 to 3'),
            ({'species': {'xi1': 1.0}}, 'species.mass'),
            ({'quadrature': {'rel_tol': 1e-3}}, 'quadrature'),
            ({'constants': {'speed': 1.0}}, 'Unknown key'),
        ],
    )
    def test_invalid(self, data, change, match):
        data.update(change)
        with pytest.raises(ConfigError, match=match):
            parse_run_config(data)

    @pytest.mark.parametrize('key', ['species', 'trap', 'n_total'])
    def test_missing_required(self, data, key):
        del data[key]
        with pytest.raises(ConfigError, match=f'Missing required key `{key}`'):
            parse_run_config(data)

    def test_dimensions_must_add_to_three(self, data):
        data['trap'] = data['trap'][:2]
        with pytest.raises(ConfigError, match='add up to 3'):
            parse_run_config(data)

    def test_not_an_object(self):
        with pytest.raises(ConfigError, match='must be an object'):
            parse_run_config([1, 2, 3])


class TestSubspaceConfig:
    """Test SubspaceConfig.parse and build."""

    @pytest.mark.parametrize(
        'data, match',
        [
            ({'n': 1, 's': 2, 'frequency': 10}, 'unit` is required'),
            ({'n': 1, 's': 2, 'frequency': 10, 'unit': 'kHz'}, 'rad/s'),
            ({'n': 1, 's': 2, 'frequency': 10, 'unit': 'Hz', 'a': 1e-5}, 'exactly one'),
            ({'n': 1, 's': 2}, 'exactly one'),
            ({'n': 3, 's': 2, 'volume': 1e-15}, 's` = "inf"'),
            ({'n': 3, 's': 'inf', 'frequency': 10, 'unit': 'Hz'}, 'use `volume`'),
            ({'n': 1, 's': 2, 'a': 1e-5}, 'both `A` and `a`'),
            ({'n': 4, 's': 2, 'A': 1.0, 'a': 1.0}, '1, 2 or 3'),
            ({'n': 1, 's': 2, 'A': 1.0, 'a': 1.0, 'unit': 'Hz'}, 'only goes with'),
            ({'s': 2, 'A': 1.0, 'a': 1.0}, 'both `n` and `s`'),
        ],
    )
    def test_invalid(self, data, match):
        with pytest.raises(ConfigError, match=match):
            SubspaceConfig.parse(data, 'trap[0]')

    def test_shorthand(self):
        assert SubspaceConfig.parse({'n': 3, 's': 2, 'A': 1, 'a': 1}, 't').shorthand == 'raw'
        sub = SubspaceConfig.parse({'n': 3, 's': 2, 'frequency': 1, 'unit': 'Hz'}, 't')
        assert sub.shorthand == 'harmonic'
        assert sub.unit is FrequencyUnit.LINEAR

    def test_build_with_new_exponent(self):
        """Test a changed s keeps the harmonic scales."""
        sub = SubspaceConfig.parse({'n': 3, 's': 2, 'frequency': 10, 'unit': 'rad/s'}, 't')
        built = sub.build(1.5e-25)
        changed = sub.build(1.5e-25, s=4.0)
        assert changed.s == 4.0
        assert (changed.A, changed.a) == (built.A, built.a)

    def test_box_exponent_cannot_change(self):
        sub = SubspaceConfig.parse({'n': 3, 's': 'inf', 'volume': 1e-15}, 't')
        with pytest.raises(DomainError):
            sub.build(1.5e-25, s=2.0)


class TestRunConfig:
    """Test RunConfig methods."""

    def test_trap_with_new_exponent(self):
        config = parse_run_config(
            {
                'species': {'mass': 1.5e-25},
                'trap': [{'n': 3, 's': 2, 'frequency': 10, 'unit': 'rad/s'}],
                'n_total': 1e6,
            }
        )
        assert shape_parameter(config.trap(s=1.0)) == pytest.approx(4.5)

    def test_exponent_change_needs_single_subspace(self, data):
        with pytest.raises(ConfigError, match='single subspace'):
            parse_run_config(data).trap(s=1.0)

    def test_quadrature_spec(self, data):
        data['quadrature'] = {'rel_tol': 1e-10}
        spec = parse_run_config(data).quadrature_spec(Settings(radial_cutoff_factor=20.0))
        assert spec.rel_tol == 1e-10
        assert spec.radial_cutoff_factor == 20.0

    def test_resolution_or(self, data):
        settings = Settings(resolution=0.2)
        assert parse_run_config(data).resolution_or(settings) == 0.2
        data['resolution'] = 0.05
        assert parse_run_config(data).resolution_or(settings) == 0.05

    def test_echo(self, data):
        data['temperature'] = 4.5e-9
        echo = parse_run_config(data).echo()
        assert echo['mass'] == 1.5e-25
        assert echo['temperature'] == 4.5e-9
        assert 'fugacity' not in echo
        assert [sub['s'] for sub in echo['trap']] == [2.0, 2.0, 2.0]
        assert echo['trap'][0]['A'] == pytest.approx(SI.hbar * 10 / 2)

    def test_echo_box(self):
        config = parse_run_config(
            {
                'species': {'mass': 1.5e-25},
                'trap': [{'n': 3, 's': 'inf', 'volume': 1e-15}],
                'n_total': 1e6,
            }
        )
        assert config.echo()['trap'][0]['s'] == 'inf'


class TestLoadRunConfig:
    """Test load_run_config function."""

    def test_load(self, config_file):
        assert load_run_config(config_file).n_total == 1e6

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match='Could not read'):
            load_run_config(tmp_path / 'missing.json')

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"species": ')
        with pytest.raises(ConfigError, match='not valid JSON'):
            load_run_config(path)
