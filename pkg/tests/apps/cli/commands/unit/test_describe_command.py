"""
Unit tests for describe CLI command.
"""

from typing import Any

import pytest

from apps.cli.commands import describe


@pytest.mark.unit
class TestDescribeCommand:
    """Test describe command functionality."""

    def test_command_definition(self) -> None:
        """Test that command definition is properly structured."""
        assert describe.DEFINITION["name"] == "describe"
        assert [arg["name"] for arg in describe.DEFINITION["arguments"]] == ["task"]

    def test_known_task(self, capsys: Any) -> None:
        """Test the description of a registered task."""
        assert describe.main(task="tv_decay") == 0
        assert "burn_in" in capsys.readouterr().out

    def test_unknown_task(self, capsys: Any) -> None:
        """Test that an unknown task is an error."""
        assert describe.main(task="nope") == 2
        assert "nope" in capsys.readouterr().err
