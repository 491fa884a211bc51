import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

logger = logging.getLogger(__name__)


def ordered_map(
    fn: Callable,
    items: Sequence,
    workers: int = 1,
    initializer: Callable | None = None,
    initargs: Iterable = (),
) -> list:
    """
    Apply ``fn`` to every item, results in item order.

    With one worker everything runs in-process; otherwise a process pool is used.
    Callers merge the ordered results, so output never depends on the schedule.
    """
    if workers <= 1 or len(items) <= 1:
        if initializer is not None:
            initializer(*initargs)
        return [fn(item) for item in items]

    n_workers = min(workers, len(items))
    logger.debug("Dispatching %d work items to %d processes", len(items), n_workers)
    with ProcessPoolExecutor(max_workers=n_workers, initializer=initializer, initargs=tuple(initargs)) as pool:
        return list(pool.map(fn, items))
