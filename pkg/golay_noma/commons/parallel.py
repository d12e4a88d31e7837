from concurrent.futures import Executor, ProcessPoolExecutor
from typing import Callable, Iterable, Optional, TypeVar

from loguru import logger

T = TypeVar("T")
R = TypeVar("R")


class OrderedWorkerPool:
    """
    A process pool whose `map` always returns results in task order.

    With `workers <= 1` everything runs in the calling process, so a single worker and many
    workers execute the same code path and yield identical results. Functions and tasks handed
    to a multi-worker pool must be picklable (module-level functions, plain data).
    """

    def __init__(self, workers: int = 1) -> None:
        self.workers = max(1, workers)
        self._executor: Optional[Executor] = None

    def __enter__(self) -> "OrderedWorkerPool":
        if self.workers > 1:
            logger.debug(f"[WORKER POOL] Starting process pool with {self.workers} workers")
            self._executor = ProcessPoolExecutor(max_workers=self.workers)
        return self

    def __exit__(self, *exc_info: object) -> None:
        if self._executor is not None:
            self._executor.shutdown()
            self._executor = None

    def map(self, func: Callable[[T], R], tasks: Iterable[T]) -> list[R]:
        task_list = list(tasks)
        if self._executor is None or len(task_list) <= 1:
            return [func(task) for task in task_list]
        return list(self._executor.map(func, task_list))


def ordered_map(func: Callable[[T], R], tasks: Iterable[T], workers: int = 1) -> list[R]:
    with OrderedWorkerPool(workers) as pool:
        return pool.map(func, tasks)
