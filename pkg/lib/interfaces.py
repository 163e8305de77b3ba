"""Interfaces shared by the library and the applications."""

from abc import ABC, abstractmethod


class IReporter(ABC):
    """
    Sink for user-facing output of long Monte Carlo runs.

    Progress is counted in trials: ``start_progress`` receives the trial budget of one
    estimator call and ``on_progress`` the size of each finished chunk.
    """

    @abstractmethod
    def on_message(self, *messages: str) -> None:
        """Show one line per message."""

    @abstractmethod
    def start_progress(self, total: int) -> None:
        """Begin a run of ``total`` trials."""

    @abstractmethod
    def stop_progress(self) -> None:
        """End the current run, also after a failure."""

    @abstractmethod
    def on_progress(self, value: int) -> None:
        """Advance by ``value`` finished trials."""
