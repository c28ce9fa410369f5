"""Tests for bblab/config.py."""

from __future__ import annotations

from pathlib import Path

import pytest

from bblab import config


class TestResolveOutputPath:
    def test_without_report_dir(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setattr(config, "REPORT_DIR", None)
        assert config.resolve_output_path("out.json") == Path("out.json")

    def test_relative_joins_report_dir(
        self, monkeypatch: pytest.MonkeyPatch, tmp_path: Path
    ) -> None:
        monkeypatch.setattr(config, "REPORT_DIR", tmp_path)
        assert config.resolve_output_path("a/out.json") == tmp_path / "a" / "out.json"

    def test_absolute_is_kept(self, monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
        monkeypatch.setattr(config, "REPORT_DIR", tmp_path / "reports")
        target = tmp_path / "elsewhere.json"
        assert config.resolve_output_path(target) == target


class TestSettings:
    def test_version_matches_pyproject(self) -> None:
        assert config.VERSION == "0.1.0"

    def test_glue_bound_is_positive(self) -> None:
        assert config.DEFAULT_GLUE_BOUND > 0

    def test_log_level_is_upper_case(self) -> None:
        assert config.LOG_LEVEL == config.LOG_LEVEL.upper()
