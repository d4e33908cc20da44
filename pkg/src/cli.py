"""
Condensation temperature, fluctuations and deformation bounds for Bose gases in power-law traps.

Every command reads a JSON run configuration (`--config`) and writes one JSON document or CSV
table (`--format`) to stdout or `--output`. Exit codes: 0 success, 2 configuration error,
3 numerical error.
"""

from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Annotated

import numpy as np
import typer

from . import __version__
from .bounds import bound_ladder
from .condensation import (
    ThermoPoint,
    rel_shift_first_order,
    solve_fugacity,
    solve_tc,
    spatial_density,
)
from .config import RunConfig, load_run_config
from .errors import ConfigError, PlbecError
from .fluctuations import (
    default_epsilon_min,
    fluctuation_report,
    mean_density,
    with_compressibility,
)
from .logging_rich import get_logger, logger
from .oracle import compare_with_first_order
from .output import STDOUT, Column, OutputFormat, Record, write
from .pyproject import Settings, load_settings
from .scan import ScanAxis, run_scan, scan_columns, scan_grid
from .specfun import Accuracy

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

app = typer.Typer(
    help=__doc__,
    no_args_is_help=True,
    add_completion=False,
    rich_markup_mode='markdown',
)

ConfigAnnotation = Annotated[
    Path,
    typer.Option('--config', '-c', help='JSON run configuration.', show_default=False),
]
OutputAnnotation = Annotated[
    str,
    typer.Option('--output', '-o', help='File to write the result to, `-` for stdout.'),
]
FormatAnnotation = Annotated[
    OutputFormat,
    typer.Option('--format', '-f', help='Output format.', case_sensitive=False),
]
RegularizeAnnotation = Annotated[
    bool,
    typer.Option(
        help='Below T_c, regularize divergent terms with an estimated ground-state energy when '
        'the config has no `epsilon_min`.',
    ),
]


class Direction(StrEnum):
    X = 'x'
    Y = 'y'
    Z = 'z'


@dataclass
class State:
    settings: Settings = field(default_factory=Settings)

    @property
    def accuracy(self) -> Accuracy:
        return Accuracy(self.settings.rel_tol, self.settings.max_terms)


state = State()


@contextmanager
def exit_on_error() -> Iterator[None]:
    """Log library errors and turn them into the documented exit codes."""
    try:
        yield
    except ConfigError as e:
        logger.error(f'Configuration error: {e}')
        raise typer.Exit(EXIT_CONFIG)
    except PlbecError as e:
        logger.error(f'{type(e).__name__}: {e}')
        raise typer.Exit(EXIT_NUMERICAL)
    except typer.Exit:
        raise
    except (ArithmeticError, RuntimeError) as e:
        # brentq raises RuntimeError when it runs out of iterations.
        logger.error(f'Numerical failure: {type(e).__name__}: {e}')
        raise typer.Exit(EXIT_NUMERICAL)


def _version_callback(value: bool):
    if value:
        typer.echo(f'plbec {__version__}')
        raise typer.Exit()


@app.callback()
def main_callback(
    verbose: Annotated[bool, typer.Option('--verbose', '-v', help='Log solver details.')] = False,
    version: Annotated[
        bool,
        typer.Option(
            '--version', callback=_version_callback, is_eager=True, help='Show version and exit.'
        ),
    ] = False,
):
    """Read ``[tool.plbec]`` settings and set up logging."""
    try:
        state.settings = load_settings()
    except ValueError as e:
        get_logger().error(f'Configuration error: {e}')
        raise typer.Exit(EXIT_CONFIG)
    settings = state.settings
    get_logger('DEBUG' if verbose else settings.logging_level, settings.logging_format)


def _epsilon_min(config: RunConfig, regularize: bool) -> float | None:
    if config.epsilon_min is not None or not regularize:
        return config.epsilon_min
    epsilon_min = default_epsilon_min(config.trap(), config.species, config.constants)
    logger.info(f'Using estimated ground-state energy eps_min={epsilon_min:.6g} J')
    return epsilon_min


@app.command(name='tc')
def cmd_tc(
    config: ConfigAnnotation,
    output: OutputAnnotation = STDOUT,
    fmt: FormatAnnotation = OutputFormat.JSON,
):
    """
    Undeformed and deformed condensation temperatures and the relative shift.
    """
    with exit_on_error():
        run = load_run_config(config)
        trap = run.trap()
        result = solve_tc(trap, run.species, run.n_total, run.constants)
        record = Record(
            command='tc',
            inputs=run.echo(),
            columns=[
                Column('gamma'),
                Column('t0', 'K'),
                Column('tc', 'K'),
                Column('rel_shift'),
                Column('rel_shift_first_order'),
                Column('alpha', 'm/s'),
                Column('smallness_ratio'),
            ],
        )
        record.add(
            gamma=result.gamma,
            t0=result.t0,
            tc=result.tc,
            rel_shift=result.rel_shift,
            rel_shift_first_order=rel_shift_first_order(
                trap, run.species, run.n_total, run.constants
            ),
            alpha=result.alpha,
            smallness_ratio=result.smallness_ratio,
        )
        write(record, fmt, output)


@app.command(name='density')
def cmd_density(
    config: ConfigAnnotation,
    direction: Annotated[
        Direction, typer.Option('--direction', help='Cartesian axis to step along.')
    ] = Direction.X,
    r_max: Annotated[
        float | None,
        typer.Option(
            '--r-max',
            help='Largest distance from the centre in m. Defaults to 3 thermal radii.',
            show_default=False,
        ),
    ] = None,
    points: Annotated[int, typer.Option(help='Number of grid points.')] = 50,
    output: OutputAnnotation = STDOUT,
    fmt: FormatAnnotation = OutputFormat.CSV,
):
    """
    Number density along one Cartesian axis through the trap centre.

    Needs `temperature` in the config, plus `fugacity` when that temperature is below T_c.
    """
    with exit_on_error():
        run = load_run_config(config)
        if run.temperature is None:
            raise ConfigError('`density` needs `temperature`.')
        if points < 2:
            raise ConfigError(f'`--points` must be at least 2, got {points}.')
        trap = run.trap()
        fugacity = run.fugacity
        if fugacity is None:
            tc = solve_tc(trap, run.species, run.n_total, run.constants).tc
            if run.temperature <= tc:
                raise ConfigError(
                    f'T={run.temperature:.6g} K is not above T_c={tc:.6g} K; give `fugacity`.'
                )
            fugacity = solve_fugacity(
                trap, run.species, run.temperature, run.n_total, run.constants, state.accuracy
            )
        point = ThermoPoint(run.temperature, fugacity)

        index = 'xyz'.index(direction.value)
        # Thermal radius of the subspace that holds this axis.
        start = 0
        for sub, radius in zip(trap.subspaces, trap.thermal_radii(point.kT(run.constants))):
            if start <= index < start + sub.n:
                break
            start += sub.n
        extent = r_max if r_max is not None else 3 * radius
        if not extent > 0:
            raise ConfigError(f'`--r-max` must be positive, got {extent}.')

        record = Record(
            command='density',
            inputs=run.echo() | {'fugacity': fugacity},
            columns=[
                Column('x', 'm'),
                Column('y', 'm'),
                Column('z', 'm'),
                Column('density', 'm^-3'),
            ],
            table=True,
        )
        for distance in np.linspace(0, extent, points):
            position = [0.0, 0.0, 0.0]
            position[index] = float(distance)
            density = spatial_density(
                trap, run.species, point, position, run.constants, state.accuracy
            )
            record.add(x=position[0], y=position[1], z=position[2], density=density)
        write(record, fmt, output)


@app.command(name='fluct')
def cmd_fluct(
    config: ConfigAnnotation,
    regularize: RegularizeAnnotation = False,
    output: OutputAnnotation = STDOUT,
    fmt: FormatAnnotation = OutputFormat.JSON,
):
    """
    Particle-number fluctuations and isothermal compressibility at the config's `temperature`.

    The mean density is `rho` from the config, or the thermal-ellipsoid estimate.
    """
    with exit_on_error():
        run = load_run_config(config)
        if run.temperature is None:
            raise ConfigError('`fluct` needs `temperature`.')
        trap = run.trap()
        report = fluctuation_report(
            trap,
            run.species,
            run.temperature,
            run.n_total,
            _epsilon_min(run, regularize),
            run.constants,
            state.accuracy,
        )
        rho = run.rho or mean_density(trap, run.n_total, run.temperature, run.constants)
        report = with_compressibility(report, rho, run.n_total, run.constants)
        record = Record(
            command='fluct',
            inputs=run.echo() | {'rho': rho},
            columns=[
                Column('regime'),
                Column('anomaly'),
                Column('gamma'),
                Column('temperature', 'K'),
                Column('t0', 'K'),
                Column('variance'),
                Column('normalized_variance'),
                Column('regularized'),
                Column('epsilon_min', 'J'),
                Column('compressibility', '1/Pa'),
            ],
        )
        record.add(
            regime=report.regime,
            anomaly=report.anomaly,
            gamma=report.gamma,
            temperature=report.temperature,
            t0=report.t0,
            variance=report.variance,
            normalized_variance=report.normalized_variance,
            regularized=report.regularized,
            epsilon_min=report.epsilon_min,
            compressibility=report.compressibility,
        )
        write(record, fmt, output)


@app.command(name='bound')
def cmd_bound(
    config: ConfigAnnotation,
    n_values: Annotated[
        list[float] | None,
        typer.Option(
            '--n',
            help='Particle number, repeat for a ladder. Defaults to `n_total`.',
            show_default=False,
        ),
    ] = None,
    output: OutputAnnotation = STDOUT,
    fmt: FormatAnnotation = OutputFormat.JSON,
):
    """
    Bound on |xi1| from the experimental resolution on the relative T_c shift.
    """
    with exit_on_error():
        run = load_run_config(config)
        resolution = run.resolution_or(state.settings)
        values = n_values or [run.n_total]
        if any(not n >= 1 for n in values):
            raise ConfigError('Every `--n` must be at least 1.')
        results = bound_ladder(run.trap(), run.species.mass, values, resolution, run.constants)
        record = Record(
            command='bound',
            inputs=run.echo() | {'resolution': resolution},
            columns=[
                Column('n_total'),
                Column('xi1_bound'),
                Column('shift_per_xi1'),
                Column('resolution'),
                Column('gamma'),
                Column('mass', 'kg'),
            ],
            table=len(results) > 1,
        )
        for result in results:
            record.add(
                n_total=result.n_total,
                xi1_bound=result.xi1_bound,
                shift_per_xi1=result.shift_per_xi1,
                resolution=result.resolution,
                gamma=result.gamma,
                mass=result.mass,
            )
        write(record, fmt, output)


@app.command(name='scan')
def cmd_scan(
    config: ConfigAnnotation,
    axis: Annotated[ScanAxis, typer.Option(help='Quantity to sweep.')],
    start: Annotated[float, typer.Option(help='First grid value.')],
    stop: Annotated[float, typer.Option(help='Last grid value.')],
    points: Annotated[int, typer.Option(help='Number of grid points.')] = 10,
    log: Annotated[bool, typer.Option('--log/--linear', help='Grid spacing.')] = True,
    regularize: RegularizeAnnotation = False,
    output: OutputAnnotation = STDOUT,
    fmt: FormatAnnotation = OutputFormat.CSV,
):
    """
    Sweep `N`, the exponent `s1` of a single-subspace trap, `xi1` or the temperature `T`.

    `N`, `s1` and `xi1` tabulate T_c and the bound on xi1; `T` tabulates fluctuations.
    """
    with exit_on_error():
        run = load_run_config(config)
        try:
            grid = scan_grid(start, stop, points, log)
        except PlbecError as e:
            raise ConfigError(str(e))
        resolution = run.resolution_or(state.settings)
        rows = run_scan(
            run,
            axis,
            grid,
            resolution,
            _epsilon_min(run, regularize) if axis is ScanAxis.T else None,
            state.settings.scan_workers,
            state.accuracy,
        )
        record = Record(
            command='scan',
            inputs=run.echo()
            | {'axis': axis.value, 'spacing': 'log' if log else 'linear', 'resolution': resolution},
            columns=scan_columns(axis),
            table=True,
        )
        for row in rows:
            record.add(**row)
        write(record, fmt, output)


@app.command(name='oracle-check')
def cmd_oracle_check(
    config: ConfigAnnotation,
    halvings: Annotated[
        int, typer.Option(help='Repeat the comparison with xi1 halved this many times.')
    ] = 0,
    output: OutputAnnotation = STDOUT,
    fmt: FormatAnnotation = OutputFormat.JSON,
):
    """
    Compare the first-order T_c shift with the full phase-space quadrature.

    Slow: every row solves the unexpanded number equation by nested quadrature.
    """
    with exit_on_error():
        run = load_run_config(config)
        if halvings < 0:
            raise ConfigError(f'`--halvings` cannot be negative, got {halvings}.')
        spec = run.quadrature_spec(state.settings)
        rows = compare_with_first_order(
            run.trap(), run.species, run.n_total, halvings, spec, run.constants
        )
        record = Record(
            command='oracle-check',
            inputs=run.echo() | {'quadrature_rel_tol': spec.rel_tol},
            columns=[
                Column('xi1'),
                Column('alpha', 'm/s'),
                Column('t0', 'K'),
                Column('oracle_t0', 'K'),
                Column('oracle_t0_rel_error'),
                Column('oracle_tc', 'K'),
                Column('oracle_shift'),
                Column('first_order_shift'),
                Column('discrepancy'),
                Column('ratio'),
            ],
            table=True,
        )
        for row in rows:
            record.add(
                xi1=row.xi1,
                alpha=row.alpha,
                t0=row.t0,
                oracle_t0=row.oracle_t0,
                oracle_t0_rel_error=row.oracle_t0 / row.t0 - 1,
                oracle_tc=row.oracle_tc,
                oracle_shift=row.oracle_shift,
                first_order_shift=row.first_order_shift,
                discrepancy=row.discrepancy,
                ratio=row.ratio,
            )
        write(record, fmt, output)


def main():
    """Entry point for the ``plbec`` CLI."""
    app()


if __name__ == '__main__':
    main()
