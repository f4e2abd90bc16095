"""Task generation and a plain-text task format.

A task is a workspace box, a start position, a set of spherical obstacles
and an ordered list of waypoint targets.  generate_task() draws feasible
tasks by rejection sampling: start and targets keep a configurable clearance
from every inflated obstacle, and obstacles keep a gap from each other so a
robot-sized sphere can always pass between them.

The text format is line-oriented, meters everywhere, with floats written by
repr() so parse(format(task)) reproduces the task bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    Obstacle,
    SafetyParams,
    Vec3,
    as_vec3,
    circumscribed_radius,
    vec3,
)

# generation defaults, meters
WORKSPACE_LO = (0.45, 0.0, 0.45)
WORKSPACE_HI = (7.6, 0.0, 7.6)
RADIUS_RANGE = (0.2, 0.8)
TARGET_CLEARANCE = 0.8     # surface clearance of start/targets beyond keep-out
OBSTACLE_GAP = 1.2         # surface-to-surface gap between obstacles
MAX_ATTEMPTS = 10_000


@dataclass
class TaskSpec:
    seed: int
    workspace_lo: Vec3
    workspace_hi: Vec3
    start: Vec3
    obstacles: list
    targets: list

    def __post_init__(self):
        self.seed = int(self.seed)
        self.workspace_lo = as_vec3(self.workspace_lo)
        self.workspace_hi = as_vec3(self.workspace_hi)
        self.start = as_vec3(self.start)
        self.obstacles = list(self.obstacles)
        self.targets = [as_vec3(t) for t in self.targets]
        if np.any(self.workspace_lo > self.workspace_hi):
            raise ValueError("workspace_lo must be <= workspace_hi component-wise")
        if not self.targets:
            raise ValueError("task needs at least one target")


class TaskGenerationError(RuntimeError):
    """Rejection sampling hit the attempt cap without a feasible draw."""


def _min_surface_clearance(point: Vec3, obstacles, r_rob: float, d_min: float) -> float:
    if not obstacles:
        return math.inf
    return min(
        float(np.linalg.norm(point - o.center)) - (o.radius + r_rob + d_min)
        for o in obstacles
    )


def validate_task(task: TaskSpec, safety: SafetyParams, clearance: float = 0.0) -> None:
    """Raise ValueError if start or any target violates the keep-out regions."""
    for name, p in [("start", task.start)] + [
        (f"target {i}", t) for i, t in enumerate(task.targets)
    ]:
        c = _min_surface_clearance(p, task.obstacles, safety.r_rob, safety.d_min)
        if c < clearance:
            raise ValueError(f"{name} has clearance {c:.3f} m < {clearance} m")


def generate_task(
    seed: int,
    n_obstacles: tuple[int, int] = (2, 6),
    n_targets: tuple[int, int] = (3, 6),
    workspace_lo=WORKSPACE_LO,
    workspace_hi=WORKSPACE_HI,
    radius_range: tuple[float, float] = RADIUS_RANGE,
    target_clearance: float = TARGET_CLEARANCE,
    obstacle_gap: float = OBSTACLE_GAP,
    safety: SafetyParams | None = None,
    max_attempts: int = MAX_ATTEMPTS,
) -> TaskSpec:
    """Draw a feasible task, planar in y (the workspace is a vertical slab)."""
    if safety is None:
        safety = SafetyParams(r_rob=circumscribed_radius(0.25, 0.25, 0.1))
    rng = np.random.default_rng(seed)
    lo, hi = as_vec3(workspace_lo), as_vec3(workspace_hi)

    def sample_point():
        p = rng.uniform(lo, hi)
        return as_vec3(p)

    n_obs = int(rng.integers(n_obstacles[0], n_obstacles[1] + 1))
    n_tgt = int(rng.integers(n_targets[0], n_targets[1] + 1))

    obstacles: list[Obstacle] = []
    attempts = 0
    while len(obstacles) < n_obs:
        attempts += 1
        if attempts > max_attempts:
            raise TaskGenerationError(
                f"no feasible obstacle layout after {max_attempts} attempts"
            )
        center = sample_point()
        radius = float(rng.uniform(*radius_range))
        ok = all(
            float(np.linalg.norm(center - o.center)) - (o.radius + radius)
            >= obstacle_gap
            for o in obstacles
        )
        if ok:
            obstacles.append(Obstacle(center, radius))

    def sample_clear_point():
        nonlocal attempts
        while True:
            attempts += 1
            if attempts > max_attempts:
                raise TaskGenerationError(
                    f"no clear point found after {max_attempts} attempts"
                )
            p = sample_point()
            if (
                _min_surface_clearance(p, obstacles, safety.r_rob, safety.d_min)
                >= target_clearance
            ):
                return p

    attempts = 0
    start = sample_clear_point()
    targets = [sample_clear_point() for _ in range(n_tgt)]
    return TaskSpec(seed, lo, hi, start, obstacles, targets)


# -- text format --------------------------------------------------------------


def _fmt_vec(v: Vec3) -> str:
    return " ".join(repr(float(c)) for c in v)


def format_task(task: TaskSpec) -> str:
    lines = [
        "# task: workspace, start, obstacles (center radius), targets; meters",
        f"seed = {task.seed}",
        f"workspace_lo = {_fmt_vec(task.workspace_lo)}",
        f"workspace_hi = {_fmt_vec(task.workspace_hi)}",
        f"start = {_fmt_vec(task.start)}",
    ]
    for o in task.obstacles:
        lines.append(f"obstacle = {_fmt_vec(o.center)} {repr(float(o.radius))}")
    for t in task.targets:
        lines.append(f"target = {_fmt_vec(t)}")
    return "\n".join(lines) + "\n"


def parse_task(text: str) -> TaskSpec:
    fields: dict = {"obstacles": [], "targets": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, parts = key.strip(), value.split()
        try:
            nums = [float(p) for p in parts]
        except ValueError:
            raise ValueError(f"line {lineno}: bad number in {raw!r}") from None
        if key == "seed":
            fields["seed"] = int(parts[0])
        elif key in ("workspace_lo", "workspace_hi", "start"):
            if len(nums) != 3:
                raise ValueError(f"line {lineno}: {key} needs 3 numbers")
            fields[key] = vec3(*nums)
        elif key == "obstacle":
            if len(nums) != 4:
                raise ValueError(f"line {lineno}: obstacle needs center + radius")
            fields["obstacles"].append(Obstacle(vec3(*nums[:3]), nums[3]))
        elif key == "target":
            if len(nums) != 3:
                raise ValueError(f"line {lineno}: target needs 3 numbers")
            fields["targets"].append(vec3(*nums))
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    missing = {"seed", "workspace_lo", "workspace_hi", "start"} - fields.keys()
    if missing:
        raise ValueError(f"missing fields: {sorted(missing)}")
    return TaskSpec(
        fields["seed"],
        fields["workspace_lo"],
        fields["workspace_hi"],
        fields["start"],
        fields["obstacles"],
        fields["targets"],
    )
