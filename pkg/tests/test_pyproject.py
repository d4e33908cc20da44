from unittest.mock import patch

import pytest

from src.pyproject import (
    SECTION_NAME,
    PackageConfig,
    Settings,
    find_pyproject_toml,
    load_settings,
    read_package_config,
)


@pytest.fixture
def pyproject_file(tmp_path):
    """Fixture providing a ``pyproject.toml`` with a ``[tool.plbec]`` section."""
    path = tmp_path / 'pyproject.toml'
    path.write_text(
        """[tool.plbec]
rel_tol = 1e-12
resolution = 5e-2
scan_workers = 2
logging_level = "DEBUG"
"""
    )
    return path


class TestFindPyprojectToml:
    """Test find_pyproject_toml function."""

    def test_find_pyproject_toml_in_current_directory(self, pyproject_file):
        """Test finding pyproject.toml in the start directory."""
        assert find_pyproject_toml(pyproject_file.parent) == pyproject_file

    def test_find_pyproject_toml_multiple_levels(self, pyproject_file):
        """Test finding pyproject.toml multiple levels up."""
        deep_subdir = pyproject_file.parent / 'level1' / 'level2' / 'level3'
        deep_subdir.mkdir(parents=True)

        assert find_pyproject_toml(deep_subdir) == pyproject_file

    def test_find_pyproject_toml_not_found(self, tmp_path):
        """Test FileNotFoundError when pyproject.toml is not found."""
        subdir = tmp_path / 'subdir'
        subdir.mkdir()

        with patch('src.pyproject.Path.exists', return_value=False):
            with pytest.raises(FileNotFoundError, match='pyproject.toml not found'):
                find_pyproject_toml(subdir)

    @patch('src.pyproject.Path.cwd')
    def test_find_pyproject_toml_default_start_path(self, mock_cwd, pyproject_file):
        """Test default start_path uses current working directory."""
        mock_cwd.return_value = pyproject_file.parent

        assert find_pyproject_toml() == pyproject_file

    def test_find_pyproject_toml_resolves_path(self, pyproject_file):
        """Test that paths with ``..`` are resolved."""
        subdir = pyproject_file.parent / 'subdir'
        subdir.mkdir()

        assert find_pyproject_toml(subdir / '..' / 'subdir') == pyproject_file


class TestReadPackageConfig:
    """Test read_package_config function."""

    def test_read_package_config_with_path(self, pyproject_file):
        """Test reading the section with explicit path."""
        result = read_package_config(SECTION_NAME, pyproject_file)
        assert result == {
            'rel_tol': 1e-12,
            'resolution': 5e-2,
            'scan_workers': 2,
            'logging_level': 'DEBUG',
        }

    def test_read_package_config_without_path(self, pyproject_file):
        """Test reading the section with auto-discovery."""
        with patch('src.pyproject.find_pyproject_toml', return_value=pyproject_file):
            assert read_package_config()['scan_workers'] == 2

    def test_read_package_config_no_section(self, tmp_path):
        """Test reading config with [tool] but no [tool.plbec] section."""
        pyproject_file = tmp_path / 'pyproject.toml'
        pyproject_file.write_text('[tool.other]\nconfig = "value"\n')

        assert read_package_config(SECTION_NAME, pyproject_file) == {}

    def test_read_package_config_malformed_toml(self, tmp_path):
        """Test handling malformed TOML."""
        pyproject_file = tmp_path / 'pyproject.toml'
        pyproject_file.write_text('[tool.plbec\nmalformed toml')

        with pytest.raises(ValueError, match='Error reading .*'):
            read_package_config(SECTION_NAME, pyproject_file)

    def test_read_package_config_file_not_found_auto_discovery(self):
        """Test FileNotFoundError when auto-discovery fails."""
        with patch('src.pyproject.find_pyproject_toml', side_effect=FileNotFoundError()):
            with pytest.raises(FileNotFoundError):
                read_package_config()


class TestPackageConfig:
    """Test PackageConfig class."""

    def test_package_config_lazy_loading(self, pyproject_file):
        """Test the section is read on first access and cached."""
        config = PackageConfig(pyproject_path=pyproject_file)
        assert config._config is None

        result = config.config
        assert result['resolution'] == 5e-2
        assert config.config is result

    def test_package_config_file_not_found(self):
        """Test a missing pyproject.toml counts as an empty section."""
        with patch('src.pyproject.read_package_config', side_effect=FileNotFoundError()):
            config = PackageConfig()
            assert config.config == {}
            assert config.settings() == Settings()

    def test_package_config_reads_once(self, pyproject_file):
        """Test settings come from the cached section even if the file changes afterwards."""
        config = PackageConfig(pyproject_path=pyproject_file)
        assert config.settings().scan_workers == 2

        pyproject_file.write_text('[tool.plbec]\nscan_workers = 8\n')
        assert config.settings().scan_workers == 2
        assert load_settings(pyproject_file).scan_workers == 8


class TestSettings:
    """Test building Settings from the section."""

    def test_settings_override_defaults(self, pyproject_file):
        """Test values present in the file replace the defaults, others stay."""
        settings = load_settings(pyproject_file)

        assert settings.rel_tol == 1e-12
        assert settings.resolution == 5e-2
        assert settings.scan_workers == 2
        assert settings.logging_level == 'DEBUG'
        assert settings.max_terms == Settings.max_terms
        assert settings.quadrature_rel_tol == Settings.quadrature_rel_tol

    def test_settings_coerce_int_to_float(self, tmp_path):
        """Test an integer in the file is accepted for a float setting."""
        pyproject_file = tmp_path / 'pyproject.toml'
        pyproject_file.write_text('[tool.plbec]\nmomentum_cutoff_factor = 20\n')

        settings = load_settings(pyproject_file)
        assert settings.momentum_cutoff_factor == 20.0
        assert isinstance(settings.momentum_cutoff_factor, float)

    def test_settings_unknown_keys_ignored(self, tmp_path):
        """Test unknown keys don't break loading."""
        pyproject_file = tmp_path / 'pyproject.toml'
        pyproject_file.write_text('[tool.plbec]\nsomething_new = 1\n')

        assert load_settings(pyproject_file) == Settings()

    def test_settings_wrong_type(self, tmp_path):
        """Test a value of the wrong type names the key."""
        pyproject_file = tmp_path / 'pyproject.toml'
        pyproject_file.write_text('[tool.plbec]\nrel_tol = "tight"\n')

        with pytest.raises(ValueError, match='rel_tol'):
            load_settings(pyproject_file)

    def test_project_pyproject_defaults(self):
        """Test the repository's own ``[tool.plbec]`` matches the built-in defaults."""
        assert load_settings(find_pyproject_toml(__file__)) == Settings()
