"""Round-trip-time tracking and the delay-adaptive safety margin.

The controller timestamps each command and the remote side echoes the newest
command sequence number in every state packet.  Matching echo to send time on
the controller's own clock yields one RTT sample per command; a fixed-size
sliding window turns those into a mean and deviation.  The margin

    sigma = k_sigma * v_max * (rtt_mean + rtt_dev + solve_time)

is the distance the plant can travel during one worst-case information delay;
it inflates every obstacle's keep-out radius.
"""

from __future__ import annotations

import math
import threading
from collections import deque
from dataclasses import dataclass

from .core import SafetyParams


@dataclass
class RttSample:
    """One measured round trip: value and when it completed (seconds)."""

    rtt: float
    stamp: float

    def __post_init__(self):
        if not (self.rtt >= 0.0 and math.isfinite(self.rtt)):
            raise ValueError(f"rtt must be finite and >= 0, got {self.rtt}")


@dataclass
class RttStats:
    mean: float
    deviation: float
    count: int


class RttWindow:
    """Sliding window of the most recent RTT samples.

    push() and estimate() take a lock so the transport side can record
    samples while the control thread reads statistics.
    """

    def __init__(self, capacity: int = 30):
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self._samples: deque[RttSample] = deque(maxlen=capacity)
        self._lock = threading.Lock()

    def __len__(self) -> int:
        with self._lock:
            return len(self._samples)

    def push(self, sample: RttSample) -> None:
        """Append a sample, evicting the oldest once the window is full."""
        with self._lock:
            self._samples.append(sample)

    def clear(self) -> None:
        with self._lock:
            self._samples.clear()

    def estimate(self) -> RttStats:
        """Arithmetic mean and sample standard deviation of the window.

        The deviation uses the n-1 divisor and is 0.0 with fewer than two
        samples; an empty window reports (0.0, 0.0, 0).
        """
        with self._lock:
            values = [s.rtt for s in self._samples]
        n = len(values)
        if n == 0:
            return RttStats(0.0, 0.0, 0)
        mean = sum(values) / n
        if n < 2:
            return RttStats(mean, 0.0, n)
        var = sum((v - mean) ** 2 for v in values) / (n - 1)
        return RttStats(mean, math.sqrt(var), n)


def safety_margin(
    stats: RttStats,
    params: SafetyParams,
    solve_time: float,
    include_deviation: bool = True,
) -> float:
    """Delay-adaptive obstacle margin in meters.

    Worst-case stale-information time is the mean RTT plus (optionally) one
    deviation plus the controller's own compute time; the margin is how far
    the plant can move in that time at the commanded speed bound.  With an
    empty window this is k_sigma * v_max * solve_time, and 0 when k_sigma = 0.
    """
    if not (solve_time >= 0.0 and math.isfinite(solve_time)):
        raise ValueError(f"solve_time must be finite and >= 0, got {solve_time}")
    delay = stats.mean + solve_time
    if include_deviation:
        delay += stats.deviation
    return params.k_sigma * params.v_max_norm * delay
