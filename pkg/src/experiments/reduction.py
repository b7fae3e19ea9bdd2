"""Order-preserving chunked evaluation with a deterministic merge"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, Tuple

from ..config.settings import CHUNK_SIZE

logger = logging.getLogger(__name__)


def chunk_bounds(count: int, chunk_size: int = CHUNK_SIZE) -> List[Tuple[int, int]]:
    """Half-open [start, stop) chunks; boundaries depend only on count and chunk_size"""
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
    return [(start, min(start + chunk_size, count)) for start in range(0, count, chunk_size)]


def _evaluate_chunk(task: Tuple[Callable, Sequence]) -> List:
    func, items = task
    return [func(item) for item in items]


def ordered_chunks(func: Callable, indices: Sequence, workers: int = 1,
                   chunk_size: int = CHUNK_SIZE) -> List:
    """func(i) for every index, in index order.

    The index list is cut into fixed chunks; with workers > 1 the chunks run
    in a process pool whose map preserves order, so the result never depends
    on the worker count. func must be picklable for the pool.
    """
    indices = list(indices)
    tasks = [(func, indices[start:stop]) for start, stop in chunk_bounds(len(indices), chunk_size)]
    if workers > 1 and len(tasks) > 1:
        logger.info(f"Evaluating {len(indices)} indices in {len(tasks)} chunks on {workers} workers")
        with ProcessPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(_evaluate_chunk, tasks))
    else:
        parts = [_evaluate_chunk(task) for task in tasks]
    return [value for part in parts for value in part]


def merge_sum(values: Sequence[float]) -> float:
    """Correctly rounded sum, independent of how the values were produced"""
    return math.fsum(values)
