"""Fixtures for the experiment tests."""

import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest


@pytest.fixture
def experiment() -> dict[str, Any]:
    """Small valid experiment on the Ornstein-Uhlenbeck model."""
    return {
        "model": {"name": "ornstein", "parameters": {"a": 1.0}},
        "grid": {"h": 0.02, "horizon": 2.0},
        "seeds": {"master": 7, "trials": 40, "chunk_size": 16},
        "tasks": [
            {"task": "check_conditions"},
            {"task": "contraction_curve", "params": {"horizon": 1.0}},
        ],
    }


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[Any], Path]:
    """Write a document (or raw text) as an experiment file."""

    def write(document: Any) -> Path:
        path = tmp_path / "experiment.json"
        path.write_text(document if isinstance(document, str) else json.dumps(document))
        return path

    return write
