"""Remote plant: a free-floating body tracking velocity commands.

Two fidelity levels share one interface:

  IdealPlant     applied velocity equals the commanded one instantly
  ForcePidPlant  a PID loop on velocity error produces a force on a point
                 mass, so commands are tracked with lag and overshoot

step() advances the plant by one fixed internal period (default 100 Hz) and
holds the last command between updates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RobotState, Vec3, as_vec3, vec3


@dataclass
class PlantState:
    """Plant snapshot: kinematics plus the force currently applied (N)."""

    position: Vec3
    velocity: Vec3
    force: Vec3
    stamp: float

    def as_robot_state(self) -> RobotState:
        return RobotState(self.position.copy(), self.velocity.copy(), self.stamp)


class IdealPlant:
    """Integrates the commanded velocity exactly."""

    def __init__(self, position: Vec3, dt: float = 0.01, t0: float = 0.0):
        if not dt > 0.0:
            raise ValueError(f"dt must be positive, got {dt}")
        self.dt = dt
        self.t = float(t0)
        self.position = as_vec3(position).copy()
        self.velocity = vec3(0.0, 0.0, 0.0)

    def step(self, u_cmd: Vec3) -> PlantState:
        u = as_vec3(u_cmd)
        self.position = self.position + self.dt * u
        self.velocity = u.copy()
        self.t += self.dt
        return self.state()

    def state(self) -> PlantState:
        return PlantState(
            self.position.copy(), self.velocity.copy(), vec3(0, 0, 0), self.t
        )


class ForcePidPlant:
    """Point mass driven by a PID force loop on velocity error.

    force = kp * e + ki * integral(e) + kd * de/dt, e = u_cmd - v.
    The integral term is clamped per axis (anti-windup) so a long saturation
    or a large setpoint change cannot wind it up.
    """

    def __init__(
        self,
        position: Vec3,
        mass: float = 1.0,
        kp: float = 10.0,
        ki: float = 2.0,
        kd: float = 0.0,
        integral_limit: float = 2.0,
        dt: float = 0.01,
        t0: float = 0.0,
    ):
        if not (mass > 0.0 and dt > 0.0):
            raise ValueError(f"mass and dt must be positive, got {mass}, {dt}")
        self.mass = mass
        self.kp, self.ki, self.kd = kp, ki, kd
        self.integral_limit = integral_limit
        self.dt = dt
        self.t = float(t0)
        self.position = as_vec3(position).copy()
        self.velocity = vec3(0.0, 0.0, 0.0)
        self._integral = vec3(0.0, 0.0, 0.0)
        self._prev_error = vec3(0.0, 0.0, 0.0)
        self._force = vec3(0.0, 0.0, 0.0)

    def step(self, u_cmd: Vec3) -> PlantState:
        u = as_vec3(u_cmd)
        error = u - self.velocity
        self._integral = np.clip(
            self._integral + error * self.dt,
            -self.integral_limit,
            self.integral_limit,
        )
        derivative = (error - self._prev_error) / self.dt
        self._prev_error = error
        self._force = self.kp * error + self.ki * self._integral + self.kd * derivative
        accel = self._force / self.mass
        # semi-implicit Euler: update velocity first, then integrate position
        self.velocity = self.velocity + self.dt * accel
        self.position = self.position + self.dt * self.velocity
        self.t += self.dt
        return self.state()

    def state(self) -> PlantState:
        return PlantState(
            self.position.copy(), self.velocity.copy(), self._force.copy(), self.t
        )
