import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Generic, List, Sequence, TypeVar

import numpy as np
from loguru import logger
from tqdm import tqdm

from config import settings
from qes.models import SolveStats

T = TypeVar("T")


class MultistartRunner(Generic[T]):
    """Runs one independent worker call per start point.

    Results come back in start order whatever the thread count, so a merge
    over them is deterministic for a fixed seed.
    """

    def __init__(self, worker: Callable[[np.ndarray], T], threads: int = 1, label: str = "multistart"):
        self.worker = worker
        self.threads = max(1, int(threads))
        self.label = label
        self.start_time = 0.0

    def run(self, starts: Sequence[np.ndarray]) -> List[T]:
        self.start_time = time.time()
        logger.debug(f"{self.label}: {len(starts)} starts on {self.threads} thread(s)")

        results: List[T] = []
        with tqdm(total=len(starts), desc=self.label, disable=not settings.show_progress, leave=False) as progress:
            if self.threads == 1:
                for start in starts:
                    results.append(self.worker(start))
                    progress.update(1)
            else:
                with ThreadPoolExecutor(max_workers=self.threads) as pool:
                    for result in pool.map(self.worker, starts):
                        results.append(result)
                        progress.update(1)
        return results

    @property
    def elapsed(self) -> float:
        return time.time() - self.start_time

    def print_summary(self, stats: SolveStats, level: str = "DEBUG"):
        def log(message: str):
            logger.log(level, message)

        log("=" * 70)
        log(f"SOLVE SUMMARY ({self.label})")
        log("=" * 70)
        log(f"Total time: {self.elapsed:.2f} s")
        log(f"Starts: {stats.starts:,}")
        log(f"Converged: {stats.converged:,}")
        log(f"Diverged or stalled: {stats.diverged:,}")
        log(f"Rejected (separation): {stats.rejected_separation:,}")
        log(f"Rejected (pole): {stats.rejected_pole:,}")
        log(f"Rejected (certification): {stats.rejected_certification:,}")
        if stats.rejected_reality:
            log(f"Rejected (reality): {stats.rejected_reality:,}")
        log(f"Duplicates: {stats.duplicates:,}")
        log(f"Accepted: {stats.accepted:,}")
        log("=" * 70)
