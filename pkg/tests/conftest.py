"""
Fixtures compartilhadas: cache e saídas isolados por teste.
"""
from pathlib import Path

import pytest

from arith.catalog import builtin_spec
from config.settings import settings

SPECS_DIR = Path(__file__).resolve().parent.parent / "specs"


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "cache_dir", str(tmp_path / "cache"))
    monkeypatch.setattr(settings, "output_dir", str(tmp_path / "out"))
    # a CLI ajusta estes campos em tempo de execução
    monkeypatch.setattr(settings, "worker_count", settings.worker_count)
    monkeypatch.setattr(settings, "fit_factor", settings.fit_factor)
    return tmp_path


@pytest.fixture
def specs_dir() -> Path:
    return SPECS_DIR


@pytest.fixture
def unit():
    return builtin_spec("unit")


@pytest.fixture
def liouville():
    return builtin_spec("liouville")
