"""Queue-based worker pool for Monte Carlo trial chunks.

Chunks are pulled from an asyncio queue by a fixed number of workers; each chunk runs in
a thread so numpy kernels can overlap. Results keep the input order, so any reduction
over them is independent of the worker count.
"""

import asyncio
from collections.abc import Callable
from dataclasses import dataclass

import nest_asyncio  # type: ignore

from lib.logging import get_logger

# Enable nested event loops to allow asyncio.run() in async contexts
nest_asyncio.apply()  # type: ignore

logger = get_logger(__name__)


@dataclass
class PoolConfig:
    """Configuration for the trial pool."""

    num_workers: int = 1
    on_progress: Callable[[int], None] | None = None
    # Progress units reported per finished item (defaults to 1)
    weight: Callable[[object], int] | None = None


@dataclass
class WorkItem[TInput]:
    """A single chunk in the queue."""

    index: int
    data: TInput


@dataclass
class PoolResult[TOutput]:
    """Results in input order; failed items hold their exception."""

    results: list[TOutput | Exception]
    total_processed: int
    total_failed: int

    def unwrap(self) -> list[TOutput]:
        """Results with the first failure (in input order) re-raised."""
        for result in self.results:
            if isinstance(result, Exception):
                raise result
        return self.results  # type: ignore[return-value]


class TrialBatchProcessor[TInput, TOutput]:
    """
    Run a synchronous function over items with queue-based workers.

    Example usage:

        processor = TrialBatchProcessor(items=chunks, processor_func=simulate_chunk)
        outputs = asyncio.run(processor.process()).unwrap()
    """

    def __init__(
        self,
        *,
        items: list[TInput],
        processor_func: Callable[[TInput], TOutput],
        config: PoolConfig | None = None,
    ) -> None:
        """
        Initialize the processor.

        Args:
            items: Items to process
            processor_func: Function applied to each item in a worker thread
            config: Pool configuration (defaults to PoolConfig())

        """
        self._items = items
        self._processor_func = processor_func
        self._config = config or PoolConfig()

    async def process(self) -> PoolResult[TOutput]:
        """Process all items and return them in input order."""
        results: list[TOutput | Exception | None] = [None] * len(self._items)

        queue: asyncio.Queue[WorkItem[TInput]] = asyncio.Queue()
        for index, item in enumerate(self._items):
            queue.put_nowait(WorkItem(index=index, data=item))

        workers = [
            asyncio.create_task(self._worker(queue, results))
            for _ in range(max(1, self._config.num_workers))
        ]
        await asyncio.gather(*workers)

        total_failed = sum(1 for result in results if isinstance(result, Exception))
        return PoolResult(
            results=results,  # type: ignore[arg-type]
            total_processed=len(self._items) - total_failed,
            total_failed=total_failed,
        )

    async def _worker(
        self,
        queue: asyncio.Queue[WorkItem[TInput]],
        results: list[TOutput | Exception | None],
    ) -> None:
        while True:
            try:
                work_item = queue.get_nowait()
            except asyncio.QueueEmpty:
                break

            try:
                results[work_item.index] = await asyncio.to_thread(
                    self._processor_func, work_item.data
                )
                self._report_progress(work_item.data)
            except Exception as e:  # noqa: BLE001
                logger.error(f"Chunk {work_item.index}: {e}")
                results[work_item.index] = e
            finally:
                queue.task_done()

    def _report_progress(self, data: TInput) -> None:
        if not self._config.on_progress:
            return
        weight = self._config.weight(data) if self._config.weight else 1
        try:
            self._config.on_progress(weight)
        except Exception as e:  # noqa: BLE001
            logger.warning(f"Progress callback failed: {e}")


def run_pool[TInput, TOutput](
    items: list[TInput],
    processor_func: Callable[[TInput], TOutput],
    config: PoolConfig | None = None,
) -> list[TOutput]:
    """Process ``items`` synchronously through the pool and re-raise the first failure."""
    processor = TrialBatchProcessor[TInput, TOutput](
        items=items, processor_func=processor_func, config=config
    )
    return asyncio.run(processor.process()).unwrap()
