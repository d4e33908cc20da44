import tomllib
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, cast

SECTION_NAME = 'plbec'


def find_pyproject_toml(start_path: str | Path | None = None) -> Path:
    """
    Find ``pyproject.toml`` by walking up the directory tree from start_path.

    :param start_path: Directory to start searching from. Defaults to current working directory.
    :returns: Path to ``pyproject.toml``.
    :raises FileNotFoundError: If ``pyproject.toml`` is not found.
    """
    if start_path is None:
        start_path = Path.cwd()

    current = Path(start_path).resolve()

    for parent in [current] + list(current.parents):
        pyproject_path = parent / 'pyproject.toml'
        if pyproject_path.exists():
            return pyproject_path

    raise FileNotFoundError('pyproject.toml not found.')


def read_package_config(
    package_name: str = SECTION_NAME, pyproject_path: str | Path | None = None
) -> dict[str, Any]:
    """
    Read the ``[tool.<package_name>]`` section of ``pyproject.toml``.

    :param package_name: Name of the section under ``[tool]``.
    :param pyproject_path: Path to pyproject.toml. If None, searches for it automatically.
    :returns: Dictionary with the section contents, empty dict if the section is missing.

    :raises FileNotFoundError: If ``pyproject.toml`` is not found.
    :raises ValueError: If ``pyproject.toml`` is malformed.
    """
    if pyproject_path is None:
        pyproject_path = find_pyproject_toml()

    try:
        with open(pyproject_path, 'rb') as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ValueError(f'Error reading {pyproject_path}: {e}')

    return cast(dict[str, Any], data.get('tool', {}).get(package_name, {}))


@dataclass(frozen=True)
class Settings:
    """
    Numerical and logging defaults.

    Anything given in a run config overrides these; these override the built-in values.
    """

    rel_tol: float = 1e-10
    max_terms: int = 10_000
    resolution: float = 1e-2
    quadrature_rel_tol: float = 1e-8
    momentum_cutoff_factor: float = 10.0
    radial_cutoff_factor: float = 10.0
    scan_workers: int = 4
    logging_level: str = 'INFO'
    logging_format: str = '%(message)s'


class PackageConfig:
    """
    Lazy access to the ``[tool.plbec]`` settings of the nearest ``pyproject.toml``.
    """

    def __init__(self, package: str = SECTION_NAME, pyproject_path: str | Path | None = None):
        """
        Initialize ``PackageConfig``.

        :param package: Section name under ``[tool]``.
        :param pyproject_path: Path to ``pyproject.toml``. Searched for when not given.
        """
        self.package = package
        self.pyproject_path = pyproject_path
        self._config: dict[str, Any] | None = None

    @property
    def config(self) -> dict[str, Any]:
        """Section contents, read on first access. A missing file counts as an empty section."""
        if self._config is None:
            try:
                self._config = read_package_config(self.package, self.pyproject_path)
            except FileNotFoundError:
                self._config = {}
        return self._config

    def settings(self) -> Settings:
        """
        Build :class:`Settings`, coercing each known key to the type of its default.

        Unknown keys are ignored so that a newer ``pyproject.toml`` doesn't break an older tool.

        :raises ValueError: If a known key holds a value of the wrong type.
        """
        values = {}
        for field_ in fields(Settings):
            if field_.name not in self.config:
                continue
            raw = self.config[field_.name]
            kind = type(field_.default)
            try:
                values[field_.name] = kind(raw)
            except (TypeError, ValueError):
                raise ValueError(
                    f'Setting `{field_.name}` in section `tool.{self.package}` must be '
                    f'{kind.__name__}, got {raw!r}.'
                )
        return Settings(**values)


def load_settings(pyproject_path: str | Path | None = None) -> Settings:
    """Shortcut for ``PackageConfig(pyproject_path=...).settings()``."""
    return PackageConfig(pyproject_path=pyproject_path).settings()
