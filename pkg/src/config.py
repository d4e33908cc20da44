"""
JSON run configuration.

One document per invocation::

    {
      "species": {"mass": 1.5e-25, "xi1": 1.0},
      "trap": [
        {"n": 1, "s": 2, "frequency": 10, "unit": "rad/s"},
        {"n": 1, "s": 2, "frequency": 10, "unit": "rad/s"},
        {"n": 1, "s": 2, "frequency": 20, "unit": "rad/s"}
      ],
      "n_total": 1e6
    }

Each trap subspace is given by exactly one of raw scales (``A`` in J, ``a`` in m), the harmonic
shorthand (``frequency`` with a mandatory ``unit`` of ``rad/s`` or ``Hz``) or the box shorthand
(``volume``, only with ``"s": "inf"``). Optional keys: ``temperature`` (K), ``fugacity``,
``resolution``, ``epsilon_min`` (J), ``rho`` (m^-3), ``quadrature`` and ``constants``.
"""

import json
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from .errors import ConfigError, DomainError
from .model import (
    SI,
    FrequencyUnit,
    PhysicalConstants,
    PowerLawTrap,
    Species,
    TrapSubspace,
    angular_frequency,
)
from .oracle import QuadratureSpec
from .pyproject import Settings

TOP_LEVEL_KEYS = {
    'species',
    'trap',
    'n_total',
    'temperature',
    'fugacity',
    'resolution',
    'epsilon_min',
    'rho',
    'quadrature',
    'constants',
}
SUBSPACE_KEYS = {'n', 's', 'A', 'a', 'frequency', 'unit', 'volume'}
SPECIES_KEYS = {'mass', 'xi1'}
SHORTHANDS = {'raw': ('A', 'a'), 'harmonic': ('frequency',), 'box': ('volume',)}


def _number(value: Any, name: str) -> float:
    # bool is an int subclass; `true` is never a physical quantity.
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f'`{name}` must be a number, got {value!r}.')
    if not math.isfinite(value):
        raise ConfigError(f'`{name}` must be finite, got {value!r}.')
    return float(value)


def _positive(value: Any, name: str) -> float:
    number = _number(value, name)
    if not number > 0:
        raise ConfigError(f'`{name}` must be positive, got {value!r}.')
    return number


def _check_keys(data: Any, allowed: set[str], where: str) -> dict[str, Any]:
    if not isinstance(data, dict):
        raise ConfigError(f'`{where}` must be an object, got {type(data).__name__}.')
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f'Unknown key(s) in `{where}`: {", ".join(unknown)}.')
    return data


@dataclass(frozen=True)
class SubspaceConfig:
    """
    One trap subspace as written in the config.

    Kept unresolved so that a scan over ``s`` can rebuild the subspace with the same scales.
    """

    n: int
    s: float
    A: float | None = None
    a: float | None = None
    frequency: float | None = None
    unit: FrequencyUnit | None = None
    volume: float | None = None

    @property
    def shorthand(self) -> str:
        if self.frequency is not None:
            return 'harmonic'
        if self.volume is not None:
            return 'box'
        return 'raw'

    @classmethod
    def parse(cls, data: Any, where: str) -> 'SubspaceConfig':
        data = _check_keys(data, SUBSPACE_KEYS, where)
        if 'n' not in data or 's' not in data:
            raise ConfigError(f'`{where}` needs both `n` and `s`.')
        n = data['n']
        if isinstance(n, bool) or not isinstance(n, int) or n not in (1, 2, 3):
            raise ConfigError(f'`{where}.n` must be 1, 2 or 3, got {n!r}.')
        s = math.inf if data['s'] == 'inf' else _positive(data['s'], f'{where}.s')

        forms = [name for name, keys in SHORTHANDS.items() if any(key in data for key in keys)]
        if len(forms) != 1:
            raise ConfigError(
                f'`{where}` needs exactly one of raw `A`/`a`, `frequency`/`unit` or `volume`, '
                f'got {forms or "none"}.'
            )
        form = forms[0]
        if 'unit' in data and form != 'harmonic':
            raise ConfigError(f'`{where}.unit` only goes with `frequency`.')

        if form == 'harmonic':
            if math.isinf(s):
                raise ConfigError(f'`{where}` is a box (`s` = "inf"); use `volume` instead.')
            if 'unit' not in data:
                raise ConfigError(
                    f'`{where}.unit` is required with `frequency`: '
                    + ' or '.join(f'"{u.value}"' for u in FrequencyUnit)
                    + '.'
                )
            try:
                unit = FrequencyUnit(data['unit'])
            except ValueError:
                raise ConfigError(f'`{where}.unit` must be "rad/s" or "Hz", got {data["unit"]!r}.')
            return cls(
                n=n, s=s, frequency=_positive(data['frequency'], f'{where}.frequency'), unit=unit
            )

        if form == 'box':
            if not math.isinf(s):
                raise ConfigError(f'`{where}.volume` needs `s` = "inf".')
            return cls(n=n, s=s, volume=_positive(data['volume'], f'{where}.volume'))

        if 'a' not in data or ('A' not in data and not math.isinf(s)):
            raise ConfigError(f'`{where}` needs both `A` and `a`.')
        return cls(
            n=n,
            s=s,
            A=_positive(data.get('A', 1.0), f'{where}.A'),
            a=_positive(data['a'], f'{where}.a'),
        )

    def build(
        self, mass: float, constants: PhysicalConstants = SI, s: float | None = None
    ) -> TrapSubspace:
        """
        Resolve to SI scales. ``s`` replaces the configured exponent, keeping the scales.

        :raises DomainError: If the resolved subspace is invalid.
        """
        s = self.s if s is None else s
        if self.shorthand == 'harmonic':
            assert self.frequency is not None and self.unit is not None
            omega = angular_frequency(self.frequency, self.unit)
            return TrapSubspace.harmonic_scales(self.n, s, omega, mass, constants)
        if self.shorthand == 'box':
            assert self.volume is not None
            if not math.isinf(s):
                raise DomainError(f'A box subspace has no finite exponent to change to s={s:g}.')
            return TrapSubspace.box(self.n, self.volume)
        assert self.A is not None and self.a is not None
        return TrapSubspace(n=self.n, s=s, A=self.A, a=self.a)


@dataclass(frozen=True)
class RunConfig:
    species: Species
    subspaces: tuple[SubspaceConfig, ...]
    n_total: float
    constants: PhysicalConstants = SI
    temperature: float | None = None
    fugacity: float | None = None
    resolution: float | None = None
    epsilon_min: float | None = None
    rho: float | None = None
    quadrature: dict[str, float] = field(default_factory=dict)

    def trap(self, s: float | None = None, species: Species | None = None) -> PowerLawTrap:
        """
        Build the trap. ``s`` replaces the exponent of a single-subspace trap.

        ``species`` matters for the harmonic shorthand, whose length scale depends on the mass.
        """
        species = species or self.species
        if s is not None and len(self.subspaces) != 1:
            raise ConfigError('Changing `s` needs a trap with a single subspace.')
        try:
            return PowerLawTrap(
                tuple(sub.build(species.mass, self.constants, s) for sub in self.subspaces)
            )
        except DomainError as e:
            raise ConfigError(f'Invalid trap: {e}')

    def quadrature_spec(self, settings: Settings) -> QuadratureSpec:
        """Quadrature settings from ``pyproject.toml`` with the config's ``quadrature`` on top."""
        try:
            return replace(QuadratureSpec.from_settings(settings), **self.quadrature)
        except DomainError as e:
            raise ConfigError(f'Invalid `quadrature`: {e}')

    def resolution_or(self, settings: Settings) -> float:
        return self.resolution if self.resolution is not None else settings.resolution

    def echo(self) -> dict[str, Any]:
        """Resolved SI inputs (frequencies converted, shorthands expanded) for output records."""
        trap = self.trap()
        inputs: dict[str, Any] = {
            'mass': self.species.mass,
            'xi1': self.species.xi1,
            'n_total': self.n_total,
            'trap': [
                {'n': sub.n, 's': 'inf' if sub.is_box else sub.s, 'A': sub.A, 'a': sub.a}
                for sub in trap.subspaces
            ],
        }
        for name in ('temperature', 'fugacity', 'resolution', 'epsilon_min', 'rho'):
            value = getattr(self, name)
            if value is not None:
                inputs[name] = value
        return inputs


def _parse_constants(data: Any) -> PhysicalConstants:
    names = {f.name for f in fields(PhysicalConstants)}
    data = _check_keys(data, names, 'constants')
    values = {key: _positive(value, f'constants.{key}') for key, value in data.items()}
    return PhysicalConstants(**values)


def _parse_quadrature(data: Any) -> dict[str, float]:
    names = {'rel_tol', 'momentum_cutoff_factor', 'radial_cutoff_factor'}
    data = _check_keys(data, names, 'quadrature')
    overrides = {key: _positive(value, f'quadrature.{key}') for key, value in data.items()}
    try:
        # Validate now rather than at first use.
        replace(QuadratureSpec(), **overrides)
    except DomainError as e:
        raise ConfigError(f'Invalid `quadrature`: {e}')
    return overrides


def parse_run_config(data: Any) -> RunConfig:
    """
    Validate a decoded JSON document and build a :class:`RunConfig`.

    :raises ConfigError: On any schema violation; the message names the offending key.
    """
    data = _check_keys(data, TOP_LEVEL_KEYS, 'config')
    for key in ('species', 'trap', 'n_total'):
        if key not in data:
            raise ConfigError(f'Missing required key `{key}`.')

    species_data = _check_keys(data['species'], SPECIES_KEYS, 'species')
    if 'mass' not in species_data:
        raise ConfigError('Missing required key `species.mass`.')
    species = Species(
        mass=_positive(species_data['mass'], 'species.mass'),
        xi1=_number(species_data.get('xi1', 0.0), 'species.xi1'),
    )

    trap_data = data['trap']
    if not isinstance(trap_data, list) or not 1 <= len(trap_data) <= 3:
        raise ConfigError('`trap` must be a list of 1 to 3 subspaces.')
    subspaces = tuple(
        SubspaceConfig.parse(item, f'trap[{i}]') for i, item in enumerate(trap_data)
    )
    total = sum(sub.n for sub in subspaces)
    if total != 3:
        raise ConfigError(f'Sub-dimensions `n` must add up to 3, got {total}.')

    n_total = _positive(data['n_total'], 'n_total')
    if n_total < 1:
        raise ConfigError(f'`n_total` must be at least 1, got {n_total:g}.')

    optional: dict[str, Any] = {}
    for key in ('temperature', 'resolution', 'epsilon_min', 'rho'):
        if key in data:
            optional[key] = _positive(data[key], key)
    if 'fugacity' in data:
        fugacity = _number(data['fugacity'], 'fugacity')
        if not 0 <= fugacity < 1:
            raise ConfigError(f'`fugacity` must be in [0, 1), got {fugacity:g}.')
        optional['fugacity'] = fugacity
    if 'quadrature' in data:
        optional['quadrature'] = _parse_quadrature(data['quadrature'])
    if 'constants' in data:
        optional['constants'] = _parse_constants(data['constants'])

    config = RunConfig(species=species, subspaces=subspaces, n_total=n_total, **optional)
    config.trap()
    return config


def load_run_config(path: str | Path) -> RunConfig:
    """
    Read and validate a JSON run configuration.

    :raises ConfigError: If the file can't be read, isn't valid JSON or fails validation.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f'Could not read config `{path}`: {e.strerror or e}.')
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f'Config `{path}` is not valid JSON: {e}.')
    return parse_run_config(data)
