"""One-way message channel with injected transport delay.

Each message sent through a DelayChannel is held for a sampled delay and
released by poll() once simulated (or wall) time passes its delivery time.
Delays can reorder messages; receivers that need ordering either enable the
FIFO option or discard stale sequence numbers themselves.

Delay models: none, constant, gaussian (truncated below at zero by
resampling), uniform, and a recorded trace replayed cyclically.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np


class DelayModel:
    """Base class; subclasses implement sample(rng) -> delay in seconds."""

    def sample(self, rng: np.random.Generator) -> float:
        raise NotImplementedError


@dataclass
class NoDelay(DelayModel):
    def sample(self, rng: np.random.Generator) -> float:
        return 0.0


@dataclass
class ConstantDelay(DelayModel):
    delay: float

    def __post_init__(self):
        if not (self.delay >= 0.0 and math.isfinite(self.delay)):
            raise ValueError(f"delay must be finite and >= 0, got {self.delay}")

    def sample(self, rng: np.random.Generator) -> float:
        return self.delay


@dataclass
class GaussianDelay(DelayModel):
    mean: float
    std: float

    _MAX_RESAMPLES = 1000

    def __post_init__(self):
        if not (self.mean >= 0.0 and math.isfinite(self.mean)):
            raise ValueError(f"mean must be finite and >= 0, got {self.mean}")
        if not (self.std >= 0.0 and math.isfinite(self.std)):
            raise ValueError(f"std must be finite and >= 0, got {self.std}")

    def sample(self, rng: np.random.Generator) -> float:
        # truncate below at zero by resampling, not clipping, so the
        # positive part keeps its shape
        for _ in range(self._MAX_RESAMPLES):
            s = rng.normal(self.mean, self.std)
            if s >= 0.0:
                return float(s)
        return 0.0


@dataclass
class UniformDelay(DelayModel):
    low: float
    high: float

    def __post_init__(self):
        if not (0.0 <= self.low <= self.high and math.isfinite(self.high)):
            raise ValueError(
                f"need 0 <= low <= high, got low={self.low} high={self.high}"
            )

    def sample(self, rng: np.random.Generator) -> float:
        return float(rng.uniform(self.low, self.high))


class TraceDelay(DelayModel):
    """Replays a recorded list of delays, cycling when it runs out."""

    def __init__(self, values: Sequence[float]):
        vals = [float(v) for v in values]
        if not vals:
            raise ValueError("trace must contain at least one delay")
        for v in vals:
            if not (v >= 0.0 and math.isfinite(v)):
                raise ValueError(f"trace delays must be finite and >= 0, got {v}")
        self.values = vals
        self._index = 0

    def sample(self, rng: np.random.Generator) -> float:
        v = self.values[self._index]
        self._index = (self._index + 1) % len(self.values)
        return v


def sample_delay(model: DelayModel, rng: np.random.Generator) -> float:
    """Draw one delay (seconds, always >= 0) from the model."""
    d = model.sample(rng)
    return d if d > 0.0 else 0.0


@dataclass(order=True)
class _InFlight:
    deliver_time: float
    order: int
    payload: Any = field(compare=False)


class DelayChannel:
    """Holds messages in flight and releases them in delivery-time order.

    Ties in delivery time are broken by send order.  With fifo=True a
    message is never scheduled before one sent earlier, which models an
    ordered transport (e.g. TCP) on top of the same delay distribution.
    """

    def __init__(self, model: DelayModel, rng: np.random.Generator, fifo: bool = False):
        self.model = model
        self.rng = rng
        self.fifo = fifo
        self._heap: list[_InFlight] = []
        self._order = 0
        self._last_scheduled = -math.inf
        self.sent_count = 0
        self.delivered_count = 0

    @property
    def pending(self) -> int:
        return len(self._heap)

    def send(self, payload: Any, now: float) -> float:
        """Enqueue `payload` at time `now`; returns its delivery time."""
        deliver = now + sample_delay(self.model, self.rng)
        if self.fifo and deliver < self._last_scheduled:
            deliver = self._last_scheduled
        self._last_scheduled = max(self._last_scheduled, deliver)
        heapq.heappush(self._heap, _InFlight(deliver, self._order, payload))
        self._order += 1
        self.sent_count += 1
        return deliver

    def poll(self, now: float) -> list[Any]:
        """All payloads whose delivery time has passed, oldest delivery first."""
        out = []
        while self._heap and self._heap[0].deliver_time <= now:
            out.append(heapq.heappop(self._heap).payload)
        self.delivered_count += len(out)
        return out


def load_trace(path) -> TraceDelay:
    """Read a delay trace file: one delay in seconds per line, '#' comments."""
    values = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values.append(float(line))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from None
    return TraceDelay(values)


def parse_delay_spec(spec: str) -> DelayModel:
    """Parse a command-line delay description into a model.

    Grammar (numeric parameters in milliseconds):

        none | constant:D | gaussian:MEAN,STD | uniform:LO,HI | trace:FILE

    Trace files themselves hold seconds per line (see load_trace).
    """
    spec = spec.strip()
    kind, _, arg = spec.partition(":")
    kind = kind.strip().lower()
    if kind == "none":
        if arg:
            raise ValueError(f"'none' takes no parameters: {spec!r}")
        return NoDelay()
    if kind == "trace":
        if not arg:
            raise ValueError(f"trace needs a file path: {spec!r}")
        return load_trace(arg)

    def ms_args(n):
        parts = [p.strip() for p in arg.split(",")] if arg else []
        if len(parts) != n:
            raise ValueError(f"{kind} needs {n} parameter(s): {spec!r}")
        try:
            return [float(p) / 1000.0 for p in parts]
        except ValueError:
            raise ValueError(f"bad numeric parameter in {spec!r}") from None

    if kind == "constant":
        return ConstantDelay(*ms_args(1))
    if kind == "gaussian":
        return GaussianDelay(*ms_args(2))
    if kind == "uniform":
        return UniformDelay(*ms_args(2))
    raise ValueError(f"unknown delay model {kind!r}")


def bundled_trace_path() -> Path:
    """Path of the synthetic LAN delay trace shipped with the package."""
    return Path(__file__).parent / "data" / "trace_lan.txt"
