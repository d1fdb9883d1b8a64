"""Run metrics: step and trajectory counters, experiment timings.

Metrics are observability only. They are never written to run artifacts, so
wall-clock timings cannot break byte-identical output.
"""

import threading
import time
from collections import defaultdict
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any

from src.config import get_settings


@dataclass
class Metric:
    """A single recorded counter update or timing."""

    name: str
    value: float
    tags: dict[str, str] = field(default_factory=dict)
    timestamp: float = field(default_factory=time.time)


class MetricsCollector:
    """Thread-safe counters and timings.

    Ensemble workers increment ``flow.steps`` and ``flow.trajectories`` from
    several threads at once.
    """

    def __init__(self, enabled: bool = True):
        self.enabled = enabled
        self.metrics: list[Metric] = []
        self.counters: dict[str, int] = defaultdict(int)
        self.timers: dict[str, list[float]] = defaultdict(list)
        self._lock = threading.Lock()

    def increment(self, name: str, value: int = 1, tags: dict[str, str] | None = None):
        """Add ``value`` to a counter."""
        if not self.enabled:
            return
        with self._lock:
            self.counters[name] += value
            self.metrics.append(Metric(name, float(self.counters[name]), tags or {}))

    def record_timing(self, name: str, duration: float, tags: dict[str, str] | None = None):
        """Record a duration in seconds."""
        if not self.enabled:
            return
        with self._lock:
            self.timers[name].append(duration)
            self.metrics.append(Metric(name, duration, tags or {}))

    @contextmanager
    def timed(self, name: str, tags: dict[str, str] | None = None) -> Iterator[dict[str, str]]:
        """Time a block; the yielded tags gain ``status`` success or error."""
        tags = dict(tags or {})
        start = time.perf_counter()
        try:
            yield tags
        except BaseException:
            tags["status"] = "error"
            raise
        else:
            tags["status"] = "success"
        finally:
            self.record_timing(name, time.perf_counter() - start, tags)

    def counter(self, name: str) -> int:
        with self._lock:
            return self.counters.get(name, 0)

    def snapshot(self) -> dict[str, int]:
        """Copy of every counter, for computing per-run deltas."""
        with self._lock:
            return dict(self.counters)

    def since(self, before: dict[str, int]) -> dict[str, int]:
        """Counters that changed since ``before``, as differences."""
        now = self.snapshot()
        return {
            name: value - before.get(name, 0)
            for name, value in sorted(now.items())
            if value != before.get(name, 0)
        }

    def get_stats(self, name: str) -> dict[str, Any] | None:
        """Count, min, max, mean and total of a timing."""
        with self._lock:
            values = list(self.timers.get(name, ()))
        if not values:
            return None
        return {
            "count": len(values),
            "min": min(values),
            "max": max(values),
            "mean": sum(values) / len(values),
            "sum": sum(values),
        }

    def reset(self):
        with self._lock:
            self.metrics.clear()
            self.counters.clear()
            self.timers.clear()


_metrics_collector: MetricsCollector | None = None


def get_metrics() -> MetricsCollector:
    """Global collector, enabled according to ``Settings.enable_metrics``."""
    global _metrics_collector
    if _metrics_collector is None:
        _metrics_collector = MetricsCollector(enabled=get_settings().enable_metrics)
    return _metrics_collector
