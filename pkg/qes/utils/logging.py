"""Console output for long validation runs and per-operation wall-clock timings."""

import time
from contextlib import contextmanager
from functools import wraps
from typing import Any, Callable, Dict, Iterator, List

import numpy as np
from rich.console import Console

# stderr keeps stdout free for documents written without --output
console = Console(stderr=True)


def log_step(step: str, message: str, style: str = "bold cyan") -> None:
    console.print(f"[{style}]{step}[/{style}]: {message}")


def log_info(message: str) -> None:
    console.print(f"[bold blue]ℹ[/bold blue] {message}")


def log_warning(message: str) -> None:
    console.print(f"[bold yellow]⚠[/bold yellow] {message}")


def log_verdict(name: str, passed: bool, duration_ms: float) -> None:
    if passed:
        console.print(f"[bold green]✓[/bold green] {name}: pass ({duration_ms:.0f} ms)")
    else:
        console.print(f"[bold red]✗[/bold red] {name}: [red]FAIL[/red] ({duration_ms:.0f} ms)")


class PerformanceMonitor:
    def __init__(self):
        self.metrics: Dict[str, List[float]] = {}

    def record(self, operation: str, duration_ms: float) -> None:
        self.metrics.setdefault(operation, []).append(duration_ms)

    @contextmanager
    def measure(self, operation: str) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.record(operation, 1000.0 * (time.perf_counter() - start))

    def last(self, operation: str) -> float:
        return self.metrics[operation][-1]

    def get_stats(self, operation: str) -> Dict[str, float]:
        if operation not in self.metrics:
            return {}
        times = np.asarray(self.metrics[operation])
        return {
            "count": int(times.size),
            "total_ms": float(times.sum()),
            "median_ms": float(np.median(times)),
            "max_ms": float(times.max()),
        }

    def summary(self) -> Dict[str, Dict[str, float]]:
        return {operation: self.get_stats(operation) for operation in sorted(self.metrics)}

    def reset(self) -> None:
        self.metrics.clear()


performance_monitor = PerformanceMonitor()


def timeit(func: Callable) -> Callable:
    """Record each call under the function's name and echo its duration."""

    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        with performance_monitor.measure(func.__name__):
            result = func(*args, **kwargs)
        log_step(func.__name__, f"completed in {performance_monitor.last(func.__name__) / 1000.0:.3f}s", "bold magenta")
        return result

    return wrapper
