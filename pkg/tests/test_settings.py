"""Tests for settings module."""

import sys
from pathlib import Path

import pytest
from pydantic import ValidationError

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from lorenz_qubit.settings import Settings


class TestSettings:
    def setup_method(self) -> None:
        self.settings = Settings()

    def test_defaults(self) -> None:
        assert self.settings.DEBUG is False
        assert self.settings.WORKERS == 1
        assert self.settings.PHYSICAL_TOL == 1e-9
        assert self.settings.OUTPUT_DIR == "."

    def test_debug_parsing(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test LORQ_DEBUG boolean parsing from environment."""
        monkeypatch.setenv("LORQ_DEBUG", "true")
        assert Settings().DEBUG is True

        monkeypatch.setenv("LORQ_DEBUG", "false")
        assert Settings().DEBUG is False

    def test_numeric_fields(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("LORQ_WORKERS", "8")
        monkeypatch.setenv("LORQ_PHYSICAL_TOL", "1e-6")
        settings = Settings()
        assert settings.WORKERS == 8
        assert settings.PHYSICAL_TOL == 1e-6

    def test_unprefixed_variables_ignored(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("WORKERS", "8")
        assert Settings().WORKERS == 1

    def test_rejects_non_positive_workers(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("LORQ_WORKERS", "0")
        with pytest.raises(ValidationError):
            Settings()
