"""Shared vocabulary for the teleoperation stack.

Everything downstream (barrier, controller, channel, plant) talks in terms of
the small value types defined here.  All quantities are SI: meters, seconds,
meters per second.  Vectors are float64 numpy arrays of shape (3,).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

Vec3 = np.ndarray


def vec3(x: float, y: float = 0.0, z: float = 0.0) -> Vec3:
    """Build a 3-vector from components."""
    return np.array([x, y, z], dtype=float)


def as_vec3(v) -> Vec3:
    """Coerce to a finite float64 array of shape (3,).

    Raises ValueError on wrong shape or non-finite entries; we never let a
    NaN travel further into the control path than the parse boundary.
    """
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected 3 components, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"non-finite vector {a!r}")
    return a


@dataclass
class RobotState:
    """Measured plant state at `stamp` (position m, velocity m/s)."""

    position: Vec3
    velocity: Vec3
    stamp: float

    def __post_init__(self):
        self.position = as_vec3(self.position)
        self.velocity = as_vec3(self.velocity)
        self.stamp = float(self.stamp)

    def copy(self) -> "RobotState":
        return RobotState(self.position.copy(), self.velocity.copy(), self.stamp)


@dataclass
class VelocityCommand:
    """Velocity setpoint sent to the plant.  `seq` increases monotonically."""

    u: Vec3
    stamp: float
    seq: int

    def __post_init__(self):
        self.u = as_vec3(self.u)
        self.stamp = float(self.stamp)
        self.seq = int(self.seq)


@dataclass
class Obstacle:
    """Sphere: center (m) and radius (m > 0)."""

    center: Vec3
    radius: float

    def __post_init__(self):
        self.center = as_vec3(self.center)
        self.radius = float(self.radius)
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"obstacle radius must be positive, got {self.radius}")


@dataclass
class SafetyParams:
    """Parameters of the obstacle-avoidance constraint and the delay margin.

    r_rob        robot collision radius (circumscribed sphere), m
    d_min        minimum allowed surface-to-surface distance, m
    gamma        barrier decay rate per control step, in (0, 1]
    k_sigma      gain of the delay-adaptive margin
    v_max_norm   bound on the commanded speed magnitude, m/s
    """

    r_rob: float
    d_min: float = 0.01
    gamma: float = 0.5
    k_sigma: float = 1.0
    v_max_norm: float = 0.87

    def __post_init__(self):
        if not (self.r_rob > 0.0):
            raise ValueError(f"r_rob must be positive, got {self.r_rob}")
        if not (self.d_min >= 0.0):
            raise ValueError(f"d_min must be >= 0, got {self.d_min}")
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")
        if not (self.k_sigma >= 0.0):
            raise ValueError(f"k_sigma must be >= 0, got {self.k_sigma}")
        if not (self.v_max_norm > 0.0):
            raise ValueError(f"v_max_norm must be positive, got {self.v_max_norm}")


@dataclass
class InputLimits:
    """Per-component box bound on commanded velocity: |u_i| <= u_b."""

    u_b: float = 0.5

    def __post_init__(self):
        if not (self.u_b > 0.0 and math.isfinite(self.u_b)):
            raise ValueError(f"u_b must be positive, got {self.u_b}")

    @property
    def lower(self) -> Vec3:
        return np.full(3, -self.u_b)

    @property
    def upper(self) -> Vec3:
        return np.full(3, self.u_b)


def circumscribed_radius(width: float, length: float, height: float) -> float:
    """Radius of the smallest sphere containing a box with the given sides.

    Half the space diagonal.  Used as the robot collision radius so sphere
    clearance implies box clearance regardless of attitude.
    """
    for name, s in (("width", width), ("length", length), ("height", height)):
        if not (s > 0.0 and math.isfinite(s)):
            raise ValueError(f"{name} must be positive, got {s}")
    return 0.5 * math.sqrt(width * width + length * length + height * height)


def clamp_input(u: Vec3, limits: InputLimits) -> Vec3:
    """Clamp a commanded velocity component-wise into the input box."""
    return np.clip(as_vec3(u), -limits.u_b, limits.u_b)


def clamp_norm(v: Vec3, max_norm: float) -> Vec3:
    """Scale `v` down so its Euclidean norm does not exceed `max_norm`."""
    v = as_vec3(v)
    n = float(np.linalg.norm(v))
    if n <= max_norm or n == 0.0:
        return v
    return v * (max_norm / n)
