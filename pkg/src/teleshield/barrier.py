"""Spherical-obstacle barrier function and its discrete decay condition.

The barrier value is the surface-to-surface clearance beyond the required
margin:

    h(p) = ||p - c|| - (r_obs + r_rob + d_min) - sigma

h > 0 means the robot keeps more than d_min + sigma of clearance to the
obstacle surface.  The delay margin sigma inflates the keep-out radius and is
subtracted last, so h(p; sigma) == h(p; 0) - sigma holds bitwise.

The discrete decay condition bounds how fast the barrier may shrink over one
control step:

    h(x_next) - (1 - gamma) * h(x_curr) >= 0        gamma in (0, 1]

A nonnegative residual keeps the safe set forward invariant for the discrete
dynamics; gamma = 1 reduces it to plain h(x_next) >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Obstacle, Vec3, as_vec3

# Below this center distance the gradient direction is undefined; we refuse
# rather than return garbage.
CENTER_EPS = 1e-9


@dataclass
class BarrierParams:
    """One obstacle plus the margins that inflate its keep-out radius."""

    obstacle: Obstacle
    r_rob: float
    d_min: float
    sigma: float = 0.0
    gamma: float = 0.5

    def __post_init__(self):
        if not (self.r_rob > 0.0):
            raise ValueError(f"r_rob must be positive, got {self.r_rob}")
        if not (self.d_min >= 0.0):
            raise ValueError(f"d_min must be >= 0, got {self.d_min}")
        if not (self.sigma >= 0.0):
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError(f"gamma must be in (0, 1], got {self.gamma}")

    @property
    def hard_radius(self) -> float:
        """Keep-out radius without the delay margin."""
        return self.obstacle.radius + self.r_rob + self.d_min

    @property
    def inflated_radius(self) -> float:
        """Keep-out radius including the delay margin."""
        return self.hard_radius + self.sigma


def barrier_value(position: Vec3, params: BarrierParams) -> float:
    d = float(np.linalg.norm(as_vec3(position) - params.obstacle.center))
    # sigma subtracted as the final operation: h(p; s) == h(p; 0) - s bitwise
    return (d - params.hard_radius) - params.sigma


def barrier_gradient(position: Vec3, params: BarrierParams) -> Vec3:
    """Gradient of the barrier w.r.t. position: the unit vector away from
    the obstacle center.  Independent of sigma."""
    delta = as_vec3(position) - params.obstacle.center
    d = float(np.linalg.norm(delta))
    if d < CENTER_EPS:
        raise ValueError("barrier gradient undefined at the obstacle center")
    return delta / d


def dcbf_residual(x_next: Vec3, x_curr: Vec3, params: BarrierParams) -> float:
    """Residual of the discrete decay condition; feasible iff >= 0."""
    return barrier_value(x_next, params) - (1.0 - params.gamma) * barrier_value(
        x_curr, params
    )
