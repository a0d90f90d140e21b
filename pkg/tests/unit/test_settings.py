"""Unit tests for ``quantikit/config/settings.py``.

The Settings class is the single point where environment variables enter
the toolkit. We make sure reloading via ``importlib`` picks up changes and
that the enumeration caps have sensible defaults.
"""
from __future__ import annotations

import importlib

import pytest

pytestmark = pytest.mark.unit


def _reload_settings():
    """Reload the Settings module so class-level os.environ.get() reruns."""
    import quantikit.config.settings as settings_module

    return importlib.reload(settings_module).Settings


class TestSettings:
    def test_presheaf_cap_defaults_to_4096(self, monkeypatch):
        monkeypatch.delenv("QUANTIKIT_CAP", raising=False)
        Settings = _reload_settings()
        assert Settings.PRESHEAF_CAP == 4096

    def test_presheaf_cap_picked_up_from_env(self, monkeypatch):
        monkeypatch.setenv("QUANTIKIT_CAP", "128")
        Settings = _reload_settings()
        assert Settings.PRESHEAF_CAP == 128

    def test_oracle_workers_default_to_sequential(self, monkeypatch):
        monkeypatch.delenv("QUANTIKIT_ORACLE_WORKERS", raising=False)
        Settings = _reload_settings()
        assert Settings.ORACLE_WORKERS == 1

    def test_log_level_defaults_to_info(self, monkeypatch):
        monkeypatch.delenv("LOG_LEVEL", raising=False)
        Settings = _reload_settings()
        assert Settings.LOG_LEVEL == "INFO"

    def test_log_level_overridable(self, monkeypatch):
        monkeypatch.setenv("LOG_LEVEL", "DEBUG")
        Settings = _reload_settings()
        assert Settings.LOG_LEVEL == "DEBUG"

    def test_probe_caps(self, monkeypatch):
        monkeypatch.delenv("QUANTIKIT_PROBE_OBJECT_CAP", raising=False)
        monkeypatch.delenv("QUANTIKIT_PROBE_LATTICE_CAP", raising=False)
        Settings = _reload_settings()
        assert Settings.PROBE_OBJECT_CAP == 4
        assert Settings.PROBE_LATTICE_CAP == 8

    @pytest.mark.parametrize("env, key", [
        ("QUANTIKIT_DIAGONAL_CAP", "DIAGONAL_CAP"),
        ("QUANTIKIT_PROBE_OBJECT_CAP", "PROBE_OBJECT_CAP"),
        ("QUANTIKIT_PROBE_LATTICE_CAP", "PROBE_LATTICE_CAP"),
        ("QUANTIKIT_FUNCTOR_SOURCE_CAP", "FUNCTOR_SOURCE_CAP"),
        ("QUANTIKIT_FUNCTOR_TARGET_CAP", "FUNCTOR_TARGET_CAP"),
    ])
    def test_every_size_cap_is_overridable(self, monkeypatch, env, key):
        monkeypatch.setenv(env, "3")
        Settings = _reload_settings()
        assert getattr(Settings, key) == 3

    def test_presheaf_cap_does_not_touch_other_caps(self, monkeypatch):
        monkeypatch.setenv("QUANTIKIT_CAP", "2")
        monkeypatch.delenv("QUANTIKIT_DIAGONAL_CAP", raising=False)
        Settings = _reload_settings()
        assert Settings.PRESHEAF_CAP == 2
        assert Settings.DIAGONAL_CAP == 64

    def test_get_all_returns_dict_of_settings(self):
        Settings = _reload_settings()
        all_settings = Settings.get_all()
        assert isinstance(all_settings, dict)
        assert "DIAGONAL_CAP" in all_settings
        assert "get_all" not in all_settings
