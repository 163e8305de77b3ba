"""Reporter used when nobody watches the console: tests, library calls and batch runs."""

from lib.interfaces import IReporter
from lib.logging import get_logger

logger = get_logger(__name__)


class NullReporter(IReporter):
    """
    Drops trial progress and forwards runner messages to the debug log.

    Runner messages such as the certified rate of the model stay recoverable with
    ``--log-level DEBUG`` even when no console reporter is attached.
    """

    def on_message(self, *messages: str) -> None:
        for message in messages:
            logger.debug(message)

    def start_progress(self, total: int) -> None:
        pass

    def stop_progress(self) -> None:
        pass

    def on_progress(self, value: int) -> None:
        pass
