"""Deterministic closed-loop simulation of delayed teleoperation.

One ClosedLoop owns the whole chain:

    operator -> [controller: predict, margin, MPC] -> downlink delay ->
    plant (100 Hz) -> uplink delay -> controller telemetry + RTT samples

Time is logical: tick k is t = k * (1 / plant_rate), so two runs with equal
seeds produce identical trajectories byte for byte.  The controller runs at
control_rate, the plant publishes state at publish_rate, and every state
packet echoes the newest command sequence number the plant has seen, which
is what the RTT estimator feeds on.

The operator is pluggable: the batch harness uses ScriptedOperator (drives
toward the task's waypoints, blind to obstacles), the teleop service feeds
commands from a network client.  Both see the same delayed telemetry the
controller sees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import DelayChannel, parse_delay_spec
from .core import (
    InputLimits,
    RobotState,
    SafetyParams,
    Vec3,
    VelocityCommand,
    as_vec3,
    circumscribed_radius,
    clamp_norm,
    vec3,
)
from .mpc import (
    MpcConfig,
    MpcController,
    MpcProblem,
    first_input,
    predict_state,
    shifted_warm_start,
)
from .plant import ForcePidPlant, IdealPlant
from .rtt import RttSample, RttWindow, safety_margin
from .tasks import TaskSpec
from .tester import TaskScript, TesterConfig, advance, desired_velocity

# robot body: a 0.25 x 0.25 x 0.1 m box, collision radius of its
# circumscribed sphere
ROBOT_RADIUS = circumscribed_radius(0.25, 0.25, 0.1)


def default_safety() -> SafetyParams:
    return SafetyParams(r_rob=ROBOT_RADIUS)


@dataclass
class StatePacket:
    state: RobotState
    echo_seq: int


@dataclass
class CommandPacket:
    u: Vec3
    stamp: float
    seq: int


@dataclass
class RunConfig:
    """Everything about a run except the task itself."""

    delay_spec: str = "none"
    margin: bool = True
    seed: int = 0
    time_limit: float = 120.0
    plant: str = "ideal"            # "ideal" | "forcepid"
    control_rate: float = 10.0
    publish_rate: float = 50.0
    plant_rate: float = 100.0
    # deterministic stand-in for controller compute time fed to the margin
    # (and logged); None switches to smoothed measured wall time
    solve_time_model: float | None = 0.010
    include_rtt_deviation: bool = True
    fifo: bool = False
    stop_on_collision: bool = True
    rtt_capacity: int = 30
    mpc: MpcConfig = field(default_factory=MpcConfig)
    safety: SafetyParams = field(default_factory=default_safety)
    tester: TesterConfig = field(default_factory=TesterConfig)

    def __post_init__(self):
        for rate in (self.control_rate, self.publish_rate, self.plant_rate):
            if not rate > 0.0:
                raise ValueError(f"rates must be positive, got {rate}")
        for name in ("control_rate", "publish_rate"):
            ratio = self.plant_rate / getattr(self, name)
            if abs(ratio - round(ratio)) > 1e-9:
                raise ValueError(f"plant_rate must be a multiple of {name}")
        if self.plant not in ("ideal", "forcepid"):
            raise ValueError(f"unknown plant {self.plant!r}")


@dataclass
class TickRow:
    """One controller-tick log entry; mirrors the CSV columns."""

    t: float
    px: float
    py: float
    pz: float
    ux: float
    uy: float
    uz: float
    sigma_k: float
    min_surf_dist: float
    solve_ms: float
    rtt_est_ms: float


@dataclass
class RunResult:
    success: bool
    collision: bool
    dmin_violation: bool
    targets_reached: int
    targets_total: int
    duration: float
    min_surface_distance: float
    rows: list
    commands_sent: int = 0
    commands_delivered: int = 0
    states_sent: int = 0
    states_delivered: int = 0


class ScriptedOperator:
    """Waypoint-following operator; reads the script the loop advances."""

    def __init__(self, config: TesterConfig):
        self.config = config

    def command(self, state: RobotState, now: float, script: TaskScript) -> Vec3:
        return desired_velocity(state.position, script, self.config)


class ClosedLoop:
    def __init__(self, task: TaskSpec, config: RunConfig, operator=None):
        self.task = task
        self.config = config
        self.operator = operator or ScriptedOperator(config.tester)
        self.script = TaskScript(list(task.targets))

        seq = np.random.SeedSequence(config.seed)
        rng_down, rng_up = (np.random.default_rng(s) for s in seq.spawn(2))
        self.downlink = DelayChannel(parse_delay_spec(config.delay_spec), rng_down,
                                     fifo=config.fifo)
        self.uplink = DelayChannel(parse_delay_spec(config.delay_spec), rng_up,
                                   fifo=config.fifo)

        plant_cls = {"ideal": IdealPlant, "forcepid": ForcePidPlant}[config.plant]
        self.plant = plant_cls(task.start, dt=1.0 / config.plant_rate)

        self.controller = MpcController(config.mpc)
        self.rtt = RttWindow(config.rtt_capacity)

        self.dt = 1.0 / config.plant_rate
        self._ticks_per_control = round(config.plant_rate / config.control_rate)
        self._ticks_per_publish = round(config.plant_rate / config.publish_rate)

        self.tick = 0
        self.seq = 0
        self.latest_state: RobotState | None = None
        self.last_sigma = 0.0
        self.last_rtt_mean = 0.0
        self.last_solve_time = config.solve_time_model or 0.0
        self._send_times: dict[int, float] = {}
        self._sent_u: dict[int, Vec3] = {}
        self._warm: np.ndarray | None = None
        self.last_solution = None
        self._u_prev = vec3(0.0, 0.0, 0.0)
        self._plant_cmd = vec3(0.0, 0.0, 0.0)
        self._plant_echo = -1
        self.latest_echo = -1

        self.rows: list[TickRow] = []
        self.collision = False
        self.dmin_violation = False
        self.min_surface_distance = self._surface_distance(self.plant.position)
        self.finished = False

    # -- helpers -------------------------------------------------------------

    @property
    def now(self) -> float:
        return self.tick * self.dt

    def _surface_distance(self, position: Vec3) -> float:
        if not self.task.obstacles:
            return math.inf
        r = self.config.safety.r_rob
        return min(
            float(np.linalg.norm(position - o.center)) - o.radius - r
            for o in self.task.obstacles
        )

    def current_sigma(self) -> float:
        """Margin the controller would apply right now."""
        stats = self.rtt.estimate()
        return safety_margin(
            stats,
            self.config.safety,
            self.last_solve_time,
            include_deviation=self.config.include_rtt_deviation,
        )

    # -- one plant tick --------------------------------------------------------

    def step(self):
        if self.finished:
            return
        now = self.now
        cfg = self.config

        # plant side: publish state with the newest command seq echoed
        if self.tick % self._ticks_per_publish == 0:
            snap = self.plant.state()
            packet = StatePacket(
                RobotState(snap.position, snap.velocity, now), self._plant_echo
            )
            self.uplink.send(packet, now)

        # controller side: ingest telemetry, record RTTs
        for packet in self.uplink.poll(now):
            if (
                self.latest_state is None
                or packet.state.stamp > self.latest_state.stamp
            ):
                self.latest_state = packet.state
                self.latest_echo = packet.echo_seq
            s = packet.echo_seq
            if s >= 0 and s in self._send_times:
                self.rtt.push(RttSample(now - self._send_times[s], now))
                for k in [k for k in self._send_times if k <= s]:
                    del self._send_times[k]

        if self.tick % self._ticks_per_control == 0 and self.latest_state is not None:
            self._control_step(now)

        # plant side: newest command wins, stale seq ignored
        for packet in self.downlink.poll(now):
            if packet.seq > self._plant_echo:
                self._plant_echo = packet.seq
                self._plant_cmd = packet.u

        self.plant.step(self._plant_cmd)
        self.tick += 1

        surf = self._surface_distance(self.plant.position)
        if surf < self.min_surface_distance:
            self.min_surface_distance = surf
        if surf < cfg.safety.d_min:
            self.dmin_violation = True
        if surf < 0.0:
            self.collision = True
            if cfg.stop_on_collision:
                self.finished = True
        if self.script.done or self.now >= cfg.time_limit:
            self.finished = True

    def _control_step(self, now: float):
        cfg = self.config
        state = self.latest_state

        # prime the RTT window before any motion: send zero-velocity pings
        # until the first echo closes the loop, so the margin never starts
        # from an empty estimate while moving
        if self.rtt.estimate().count == 0:
            sigma = self.current_sigma() if cfg.margin else 0.0
            self._send_command(vec3(0.0, 0.0, 0.0), now, sigma, solve_ms=0.0)
            return

        advance(self.script, state.position, cfg.tester)
        u_des = clamp_norm(
            as_vec3(self.operator.command(state, now, self.script)),
            cfg.safety.v_max_norm,
        )

        if cfg.margin:
            sigma = self.current_sigma()
            # dead-reckon over the state age with the command the plant has
            # confirmed applying (the echoed seq); commands still in flight
            # have unknown application times, so their effect is left to the
            # margin, which is sized as v_max times the information age
            e = self.latest_echo
            held = self._sent_u.get(e)
            self._sent_u = {k: v for k, v in self._sent_u.items() if k >= e}
            log = [] if held is None else [VelocityCommand(held, state.stamp, e)]
            x_hat = predict_state(state, now, log)
        else:
            # delay-naive baseline: no margin, no age compensation; the
            # controller acts on the state exactly as received
            sigma = 0.0
            x_hat = state.position

        problem = MpcProblem(
            x_hat=x_hat,
            u_prev=self._u_prev,
            u_des=u_des,
            obstacles=self.task.obstacles,
            safety=cfg.safety,
            sigma=sigma,
        )
        solution = self.controller.solve(problem, warm_start=self._warm)
        self._warm = shifted_warm_start(solution.u_seq)
        self.last_solution = solution

        if cfg.solve_time_model is not None:
            self.last_solve_time = cfg.solve_time_model
        else:
            self.last_solve_time = 0.9 * self.last_solve_time + 0.1 * solution.solve_time

        cmd = first_input(solution, cfg.mpc.limits, now, self.seq)
        self._send_command(cmd.u, now, sigma, solve_ms=self.last_solve_time * 1000.0)

    def _send_command(self, u: Vec3, now: float, sigma: float, solve_ms: float):
        cmd = VelocityCommand(u, now, self.seq)
        self._send_times[self.seq] = now
        self._sent_u[self.seq] = cmd.u
        self.seq += 1
        self.downlink.send(CommandPacket(cmd.u, cmd.stamp, cmd.seq), now)
        self._u_prev = cmd.u

        stats = self.rtt.estimate()
        self.last_rtt_mean = stats.mean
        self.last_sigma = sigma
        p = self.plant.position
        self.rows.append(
            TickRow(
                t=now,
                px=float(p[0]), py=float(p[1]), pz=float(p[2]),
                ux=float(cmd.u[0]), uy=float(cmd.u[1]), uz=float(cmd.u[2]),
                sigma_k=sigma,
                min_surf_dist=self._surface_distance(p),
                solve_ms=solve_ms,
                rtt_est_ms=stats.mean * 1000.0,
            )
        )

    # -- batch run --------------------------------------------------------------

    def run(self) -> RunResult:
        while not self.finished:
            self.step()
        reached = self.script.index
        return RunResult(
            success=self.script.done and not self.collision,
            collision=self.collision,
            dmin_violation=self.dmin_violation,
            targets_reached=reached,
            targets_total=len(self.script.targets),
            duration=self.now,
            min_surface_distance=self.min_surface_distance,
            rows=self.rows,
            commands_sent=self.downlink.sent_count,
            commands_delivered=self.downlink.delivered_count,
            states_sent=self.uplink.sent_count,
            states_delivered=self.uplink.delivered_count,
        )
