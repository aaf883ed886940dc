from qes.utils.logging import PerformanceMonitor, performance_monitor, timeit


def test_monitor_stats():
    monitor = PerformanceMonitor()
    for ms in (4.0, 1.0, 2.0):
        monitor.record("solve", ms)
    stats = monitor.get_stats("solve")
    assert stats == {"count": 3, "total_ms": 7.0, "median_ms": 2.0, "max_ms": 4.0}
    assert monitor.last("solve") == 2.0
    assert monitor.get_stats("missing") == {}


def test_measure_records_even_on_error():
    monitor = PerformanceMonitor()
    try:
        with monitor.measure("newton"):
            raise ValueError
    except ValueError:
        pass
    assert monitor.get_stats("newton")["count"] == 1
    assert list(monitor.summary()) == ["newton"]


def test_timeit_records_under_function_name():
    performance_monitor.reset()

    @timeit
    def certify():
        return 42

    assert certify() == 42
    assert performance_monitor.get_stats("certify")["count"] == 1
    performance_monitor.reset()
