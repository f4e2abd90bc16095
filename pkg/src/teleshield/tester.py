"""Scripted operator: steers toward waypoints, blind to obstacles.

Emits a desired velocity pointing at the current target with a magnitude
that tapers near it:

    speed = v_low                          d <= d_low
            v_high                         d >= d_high
            v_low + ramp(s)*(v_high-v_low) in between, s = (d-d_low)/(d_high-d_low)

The operator never sees obstacles; collision avoidance is entirely the
controller's job, which is exactly what makes this a useful stress source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import Vec3, as_vec3, vec3


@dataclass
class TesterConfig:
    d_low: float = 0.15
    d_high: float = 0.50
    v_low: float = 0.05
    v_high: float = 0.50
    arrive_radius: float = 0.10
    # shaping of the taper on [0, 1]; identity = linear ramp
    ramp: Callable[[float], float] = field(default=lambda s: s)

    def __post_init__(self):
        if not (0.0 < self.d_low < self.d_high):
            raise ValueError(f"need 0 < d_low < d_high, got {self.d_low}, {self.d_high}")
        if not (0.0 <= self.v_low <= self.v_high):
            raise ValueError(f"need 0 <= v_low <= v_high, got {self.v_low}, {self.v_high}")
        if not self.arrive_radius > 0.0:
            raise ValueError(f"arrive_radius must be positive, got {self.arrive_radius}")


@dataclass
class TaskScript:
    """Waypoint list with a cursor; done when the cursor runs off the end."""

    targets: list
    index: int = 0

    def __post_init__(self):
        self.targets = [as_vec3(t) for t in self.targets]
        if not self.targets:
            raise ValueError("script needs at least one target")

    @property
    def done(self) -> bool:
        return self.index >= len(self.targets)

    @property
    def current_target(self) -> Vec3 | None:
        return None if self.done else self.targets[self.index]

    @property
    def remaining(self) -> int:
        return len(self.targets) - self.index


def desired_velocity(position: Vec3, script: TaskScript, config: TesterConfig) -> Vec3:
    """Velocity the scripted operator would command from `position`."""
    target = script.current_target
    if target is None:
        return vec3(0.0, 0.0, 0.0)
    delta = target - as_vec3(position)
    d = float(np.linalg.norm(delta))
    if d < 1e-12:
        return vec3(0.0, 0.0, 0.0)
    if d <= config.d_low:
        speed = config.v_low
    elif d >= config.d_high:
        speed = config.v_high
    else:
        s = (d - config.d_low) / (config.d_high - config.d_low)
        frac = min(1.0, max(0.0, config.ramp(s)))
        speed = config.v_low + frac * (config.v_high - config.v_low)
    return delta * (speed / d)


def advance(script: TaskScript, position: Vec3, config: TesterConfig) -> TaskScript:
    """Move the cursor past every target already within arrive_radius."""
    pos = as_vec3(position)
    while not script.done:
        d = float(np.linalg.norm(script.targets[script.index] - pos))
        if d > config.arrive_radius:
            break
        script.index += 1
    return script
