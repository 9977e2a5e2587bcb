"""Shared fixtures: a staged copy of the sample corpus and one full ingest.

The ingest is session scoped because it is the expensive step; tests that
mutate the resulting store copy it first.
"""

from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from archeodb.config import load_config
from archeodb.pipeline import run_pipeline
from archeodb.store import load

FIXTURES = Path(__file__).parent / "fixtures"


def stage_fixtures(destination: Path) -> Path:
    """Copy the fixture tree so runs write their store under tmp."""
    shutil.copytree(FIXTURES, destination, dirs_exist_ok=True)
    return destination / "pipeline.yaml"


class IngestRun:
    """Everything a read-only test needs from the shared ingest."""

    def __init__(self, root: Path, config, report):
        self.root = root
        self.config = config
        self.report = report
        self.store_dir = config.store_dir

    def snapshot(self):
        return load(self.store_dir)


@pytest.fixture(scope="session")
def ingested(tmp_path_factory) -> IngestRun:
    root = tmp_path_factory.mktemp("run")
    config_path = stage_fixtures(root)
    config = load_config(config_path)
    report = run_pipeline(config)
    return IngestRun(root, config, report)


@pytest.fixture(scope="session")
def snapshot(ingested):
    return ingested.snapshot()


@pytest.fixture
def store_copy(ingested, tmp_path) -> Path:
    """Fresh copy of the persisted store for tests that mutate it."""
    destination = tmp_path / "store"
    shutil.copytree(ingested.store_dir, destination)
    return destination
