"""Console reporter for experiment runs started from the CLI."""

from typing import NoReturn

from tqdm import tqdm

from lib.interfaces import IReporter


class ConsoleReporter(IReporter):
    """
    Prints runner messages and draws one transient tqdm bar per estimator call.

    The bar counts trials; it is replaced when the next estimator starts and removed
    from the terminal when it closes.
    """

    def __init__(self, *, show_progress: bool = True) -> None:
        self._show_progress = show_progress
        self._progress_bar: tqdm[NoReturn] | None = None

    def on_message(self, *messages: str) -> None:
        # tqdm.write keeps an open bar on its own line
        for message in messages:
            tqdm.write(message)

    def start_progress(self, total: int) -> None:
        self.stop_progress()
        if self._show_progress:
            self._progress_bar = tqdm(total=total, unit="trial", leave=False, dynamic_ncols=True)

    def stop_progress(self) -> None:
        if self._progress_bar is not None:
            self._progress_bar.close()
            self._progress_bar = None

    def on_progress(self, value: int) -> None:
        if self._progress_bar is not None:
            self._progress_bar.update(value)
