"""
Unit tests for experiment configuration files.
"""

from collections.abc import Callable
from pathlib import Path
from typing import Any

import pytest

from lib.errors import ConfigError
from lib.experiment import load_config


@pytest.mark.unit
class TestLoadConfig:
    """Tests for load_config on valid files."""

    def test_valid(self, experiment: dict[str, Any], write_config: Callable[[Any], Path]) -> None:
        config = load_config(write_config(experiment))

        assert config.build_model().name == "ornstein"
        assert [task.label for task in config.tasks] == ["check_conditions", "contraction_curve"]
        assert config.seeds.workers == 1
        assert config.output.formats == ["json", "csv"]

    def test_inline_table(
        self, experiment: dict[str, Any], write_config: Callable[[Any], Path]
    ) -> None:
        experiment["model"] = {"table": {"drift_matrix": [[-1.0]], "r0": 0.2}}

        config = load_config(write_config(experiment))

        assert config.build_model().dim == 1

    def test_explicit_segment_values(
        self, experiment: dict[str, Any], write_config: Callable[[Any], Path]
    ) -> None:
        values = [[0.1 * k] for k in range(11)]
        experiment["tasks"] = [{"task": "simulate", "params": {"xi": {"values": values}, "t": 0.4}}]

        config = load_config(write_config(experiment))

        assert config.tasks[0].parsed().xi.values == values  # type: ignore[attr-defined]


@pytest.mark.unit
class TestConfigErrors:
    """Every invalid file is rejected before anything runs."""

    def test_unreadable_json(self, write_config: Callable[[Any], Path]) -> None:
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(write_config("{"))

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")

    @pytest.mark.parametrize(
        ("section", "value"),
        [
            ("model", {"name": "nope"}),
            ("model", {"name": "ornstein", "parameters": {"speed": 2.0}}),
            ("model", {"name": "ornstein", "table": {"drift_matrix": [[-1.0]]}}),
            ("grid", {"h": 0.0, "horizon": 2.0}),
            ("grid", {"h": 0.03, "horizon": 2.0}),
            ("seeds", {"trials": 0}),
            ("tasks", []),
            ("tasks", [{"task": "nope"}]),
            ("tasks", [{"task": "exp_moment", "params": {"surprise": 1}}]),
            ("tasks", [{"task": "contraction_curve", "params": {"horizon": 3.0}}]),
            ("tasks", [{"task": "simulate", "params": {"t": 0.333}}]),
            ("tasks", [{"task": "simulate", "params": {"xi": {"values": [[0.0], [1.0]]}}}]),
            ("tasks", [{"task": "simulate", "params": {"xi": {"constant": [1.0, 2.0]}}}]),
            ("tasks", [{"task": "simulate", "params": {"xi": {"constant": 1.0, "linear": [0, 1]}}}]),
            ("tasks", [{"task": "harnack_check", "params": {"observable": {"name": "nope"}}}]),
            ("tasks", [{"task": "wasserstein_cauchy", "params": {"t1": 1.0, "t2": 0.5}}]),
            ("output", {"formats": ["xml"]}),
        ],
    )
    def test_invalid(
        self,
        experiment: dict[str, Any],
        write_config: Callable[[Any], Path],
        section: str,
        value: Any,
    ) -> None:
        experiment[section] = value

        with pytest.raises(ConfigError):
            load_config(write_config(experiment))

    def test_time_beyond_horizon_names_the_task(
        self, experiment: dict[str, Any], write_config: Callable[[Any], Path]
    ) -> None:
        experiment["tasks"] = [{"task": "tv_decay", "name": "late", "params": {"t_grid": [2.0]}}]

        with pytest.raises(ConfigError, match="late"):
            load_config(write_config(experiment))

    def test_unknown_top_level_key(
        self, experiment: dict[str, Any], write_config: Callable[[Any], Path]
    ) -> None:
        experiment["plots"] = True

        with pytest.raises(ConfigError):
            load_config(write_config(experiment))
