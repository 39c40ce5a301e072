import csv
from pathlib import Path

import pytest

from stresskit import textprep

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "data" / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def config() -> textprep.PipelineConfig:
    return textprep.PipelineConfig.default()


@pytest.fixture
def write_csv(tmp_path):
    """Write rows to a temp CSV and return its path."""

    def _write(rows, name="data.csv"):
        path = tmp_path / name
        with open(path, "w", newline="", encoding="utf-8") as handle:
            csv.writer(handle).writerows(rows)
        return path

    return _write
