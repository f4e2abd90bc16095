"""WebSocket bridge between a live operator and the closed loop.

One operator at a time drives the simulated robot over a JSON-per-frame
protocol. Inbound commands land in a latest-value slot that the control
loop reads synchronously, so a control tick never waits on the network.
The server clamps every command to the speed bound before it reaches the
slot, and the controller applies its own limits and barrier constraints
after that, so a misbehaving client cannot bypass safety.

Server frames all carry a monotone ``seq`` and the loop's logical clock
``t``:

    state    30 Hz   pose/velocity as the *controller* sees them (i.e.
                     after the uplink delay), current margin, RTT mean,
                     distance to the nearest inflated surface
    task     on connect and never again for a fixed task
    metrics  2 Hz    rolling counters and solve-time percentiles
    busy     sent to a second client before closing it
    error    reply to a malformed or unknown frame (connection is kept)

Client frames:

    {"type": "command", "seq": 17, "u": [0.3, 0.0, 0.0]}
    {"type": "config", "delay": {"kind": "constant", "d_ms": 200},
     "margin": true}

Command frames with ``seq`` at or below the last accepted one are
dropped. A client that goes quiet for longer than the deadman window
(wall clock) is treated as commanding zero velocity, as is no client at
all. ``config`` swaps the delay model on both links and/or toggles the
delay-adaptive margin while the loop keeps running.
"""

from __future__ import annotations

import asyncio
import json
import math
import time
from collections import deque

import numpy as np
import websockets

from .channel import parse_delay_spec
from .core import as_vec3, clamp_norm
from .loop import ClosedLoop, RunConfig
from .tasks import TaskSpec

__all__ = ["RemoteOperator", "TeleopService", "wire_to_delay_spec", "delay_spec_to_wire"]


def _finite_or_none(x: float) -> float | None:
    # JSON has no Infinity; an unbounded distance goes out as null
    x = float(x)
    return x if math.isfinite(x) else None


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{name} must be a number")
    v = float(value)
    if not math.isfinite(v):
        raise ValueError(f"{name} must be finite")
    return v


def wire_to_delay_spec(delay) -> str:
    """Translate a config frame's delay object into a delay spec string."""
    if not isinstance(delay, dict):
        raise ValueError("delay must be an object with a 'kind' field")
    kind = delay.get("kind")
    if kind == "none":
        return "none"
    if kind == "constant":
        return f"constant:{_number(delay.get('d_ms'), 'd_ms')}"
    if kind == "gaussian":
        mean = _number(delay.get("mean_ms"), "mean_ms")
        std = _number(delay.get("std_ms"), "std_ms")
        return f"gaussian:{mean},{std}"
    if kind == "uniform":
        lo = _number(delay.get("lo_ms"), "lo_ms")
        hi = _number(delay.get("hi_ms"), "hi_ms")
        return f"uniform:{lo},{hi}"
    raise ValueError(f"unknown delay kind {kind!r}")


def delay_spec_to_wire(spec: str) -> dict:
    """Inverse of wire_to_delay_spec, for reporting the active model."""
    name, _, args = spec.partition(":")
    if name == "constant":
        return {"kind": "constant", "d_ms": float(args)}
    if name == "gaussian":
        mean, std = (float(a) for a in args.split(","))
        return {"kind": "gaussian", "mean_ms": mean, "std_ms": std}
    if name == "uniform":
        lo, hi = (float(a) for a in args.split(","))
        return {"kind": "uniform", "lo_ms": lo, "hi_ms": hi}
    return {"kind": name}


class RemoteOperator:
    """Latest-value command slot with a deadman switch.

    The loop calls command() with its logical clock, but the deadman
    watches the wall clock: it exists to catch an operator or a link
    that stopped talking, which is a real-time condition regardless of
    how fast the simulation is being paced.
    """

    def __init__(self, deadman: float = 0.5, clock=time.monotonic):
        if not (deadman > 0.0):
            raise ValueError(f"deadman must be positive, got {deadman}")
        self.deadman = deadman
        self.clock = clock
        self._u = np.zeros(3)
        self._received_at: float | None = None

    def set(self, u) -> None:
        self._u = as_vec3(u)
        self._received_at = self.clock()

    def clear(self) -> None:
        self._received_at = None

    @property
    def engaged(self) -> bool:
        """True while the deadman is holding the command at zero."""
        return (
            self._received_at is None
            or self.clock() - self._received_at > self.deadman
        )

    def command(self, state, now, script):
        if self.engaged:
            return np.zeros(3)
        return self._u.copy()


class TeleopService:
    """Serve one closed loop to one WebSocket operator.

    pace is simulated seconds per wall second: 1.0 is real time, larger
    runs the world faster (useful in tests), 0 means free-run with a
    cooperative yield each tick.
    """

    def __init__(
        self,
        task: TaskSpec,
        run_config: RunConfig | None = None,
        *,
        host: str = "127.0.0.1",
        port: int = 8765,
        state_rate: float = 30.0,
        metrics_rate: float = 2.0,
        deadman: float = 0.5,
        pace: float = 1.0,
        clock=time.monotonic,
    ):
        if state_rate <= 0 or metrics_rate <= 0:
            raise ValueError("broadcast rates must be positive")
        if pace < 0:
            raise ValueError(f"pace must be >= 0, got {pace}")
        config = run_config or RunConfig(
            time_limit=math.inf, stop_on_collision=False, solve_time_model=None
        )
        if config.stop_on_collision:
            # a live session reports the collision and keeps serving
            raise ValueError("the service requires stop_on_collision=False")
        self.task = task
        self.operator = RemoteOperator(deadman, clock=clock)
        self.loop = ClosedLoop(task, config, operator=self.operator)
        self.host = host
        self.port = port
        self.state_period = 1.0 / state_rate
        self.metrics_period = 1.0 / metrics_rate
        self.pace = pace
        self.clock = clock
        self.started = asyncio.Event()
        self._client = None
        self._occupied = False
        self._seq = 0
        self._last_cmd_seq = -1
        self._delay_wire = delay_spec_to_wire(config.delay_spec)
        # incremental scan of loop.rows for the metrics frame
        self._row_cursor = 0
        self._dmin_ticks = 0
        self._solve_recent: deque[float] = deque(maxlen=200)

    # ---------------------------------------------------------------- frames

    def _frame(self, kind: str, **fields) -> str:
        self._seq += 1
        msg = {"type": kind, "seq": self._seq, "t": float(self.loop.now)}
        msg.update(fields)
        return json.dumps(msg, separators=(",", ":"), allow_nan=False)

    def _state_frame(self) -> str | None:
        state = self.loop.latest_state
        if state is None:
            return None
        sigma = self.loop.current_sigma() if self.loop.config.margin else 0.0
        stats = self.loop.rtt.estimate()
        return self._frame(
            "state",
            pos=[float(c) for c in state.position],
            vel=[float(c) for c in state.velocity],
            sigma_k=float(sigma),
            rtt_mean_ms=float(stats.mean * 1000.0),
            min_surf_dist=_finite_or_none(
                self.loop._surface_distance(state.position)
            ),
            targets_remaining=int(self.loop.script.remaining),
        )

    def _task_frame(self) -> str:
        t = self.task
        safety = self.loop.config.safety
        return self._frame(
            "task",
            workspace_lo=[float(c) for c in t.workspace_lo],
            workspace_hi=[float(c) for c in t.workspace_hi],
            start=[float(c) for c in t.start],
            obstacles=[
                {
                    "center": [float(c) for c in o.center],
                    "radius": float(o.radius),
                }
                for o in t.obstacles
            ],
            targets=[[float(c) for c in p] for p in t.targets],
            r_rob=float(safety.r_rob),
            d_min=float(safety.d_min),
            v_max=float(safety.v_max_norm),
            u_b=float(self.loop.config.mpc.limits.u_b),
        )

    def _metrics_frame(self) -> str:
        self._scan_rows()
        solves = sorted(self._solve_recent)
        p50 = float(np.percentile(solves, 50)) if solves else 0.0
        p95 = float(np.percentile(solves, 95)) if solves else 0.0
        lp = self.loop
        stats = lp.rtt.estimate()
        sigma = lp.current_sigma() if lp.config.margin else 0.0
        return self._frame(
            "metrics",
            targets_reached=int(lp.script.index),
            targets_total=len(lp.script.targets),
            task_done=bool(lp.script.done),
            collision=bool(lp.collision),
            dmin_violation=bool(lp.dmin_violation),
            dmin_violation_ticks=int(self._dmin_ticks),
            min_surface_distance=_finite_or_none(lp.min_surface_distance),
            solve_ms_p50=p50,
            solve_ms_p95=p95,
            rtt_mean_ms=float(stats.mean * 1000.0),
            rtt_std_ms=float(stats.deviation * 1000.0),
            rtt_count=int(stats.count),
            sigma_k=float(sigma),
            margin=bool(lp.config.margin),
            delay=self._delay_wire,
            deadman_engaged=bool(self.operator.engaged),
        )

    def _scan_rows(self) -> None:
        rows = self.loop.rows
        d_min = self.loop.config.safety.d_min
        while self._row_cursor < len(rows):
            row = rows[self._row_cursor]
            self._row_cursor += 1
            if row.solve_ms > 0.0:
                self._solve_recent.append(row.solve_ms)
            if row.min_surf_dist < d_min:
                self._dmin_ticks += 1

    # --------------------------------------------------------------- inbound

    def _on_command(self, msg: dict) -> None:
        seq = msg.get("seq")
        if isinstance(seq, bool) or not isinstance(seq, int):
            raise ValueError("command seq must be an integer")
        u = msg.get("u")
        if not isinstance(u, list) or len(u) != 3:
            raise ValueError("command u must be a list of three numbers")
        vec = np.array([_number(c, "u component") for c in u])
        if seq <= self._last_cmd_seq:
            return  # stale or replayed frame, drop without complaint
        self._last_cmd_seq = seq
        # clamp before the slot: nothing faster than v_max reaches the loop
        self.operator.set(clamp_norm(vec, self.loop.config.safety.v_max_norm))

    def _on_config(self, msg: dict) -> None:
        if "delay" in msg:
            spec = wire_to_delay_spec(msg["delay"])
            model = parse_delay_spec(spec)
            # swap in place; packets already in flight keep their old
            # delivery times, exactly like a real link changing behavior
            self.loop.uplink.model = model
            self.loop.downlink.model = model
            self.loop.config.delay_spec = spec
            self._delay_wire = delay_spec_to_wire(spec)
        if "margin" in msg:
            margin = msg["margin"]
            if not isinstance(margin, bool):
                raise ValueError("margin must be true or false")
            self.loop.config.margin = margin

    async def _ingest(self, ws, raw) -> None:
        try:
            msg = json.loads(raw)
            if not isinstance(msg, dict):
                raise ValueError("frame must be a JSON object")
            kind = msg.get("type")
            if kind == "command":
                self._on_command(msg)
            elif kind == "config":
                self._on_config(msg)
            else:
                raise ValueError(f"unknown frame type {kind!r}")
        except (ValueError, KeyError, TypeError) as exc:
            await ws.send(self._frame("error", message=str(exc)))

    async def _handle_client(self, ws) -> None:
        # the flag flips before the first await so two simultaneous
        # connects cannot both claim the operator slot
        if self._occupied:
            await ws.send(self._frame("busy", message="operator slot is taken"))
            await ws.close(1013, "busy")
            return
        self._occupied = True
        self._last_cmd_seq = -1
        try:
            # task frame goes out before broadcasts may target this client,
            # so the first frame a client sees is always the task
            await ws.send(self._task_frame())
            self._client = ws
            async for raw in ws:
                await self._ingest(ws, raw)
        except websockets.ConnectionClosed:
            pass
        finally:
            self._client = None
            self.operator.clear()  # deadman engages immediately
            self._occupied = False

    # ----------------------------------------------------------------- tasks

    async def _run_loop(self) -> None:
        lp = self.loop
        wall0 = self.clock()
        sim0 = lp.now
        while not lp.finished:
            lp.step()
            if self.pace > 0:
                ahead = (lp.now - sim0) / self.pace - (self.clock() - wall0)
                await asyncio.sleep(ahead if ahead > 0 else 0)
            else:
                await asyncio.sleep(0)

    async def _broadcast(self, period: float, make_frame) -> None:
        while True:
            ws = self._client
            if ws is not None:
                frame = make_frame()
                if frame is not None:
                    try:
                        await ws.send(frame)
                    except websockets.ConnectionClosed:
                        pass
            await asyncio.sleep(period)

    async def serve_forever(self) -> None:
        """Run the loop and the server until cancelled.

        The loop stops ticking once it finishes (time limit or all
        targets reached) but the server keeps answering clients so the
        final state stays visible. Raises OSError if the port is taken.
        """
        async with websockets.serve(
            self._handle_client, self.host, self.port
        ) as server:
            if self.port == 0:
                self.port = server.sockets[0].getsockname()[1]
            self.started.set()
            tasks = [
                asyncio.create_task(self._run_loop()),
                asyncio.create_task(
                    self._broadcast(self.state_period, self._state_frame)
                ),
                asyncio.create_task(
                    self._broadcast(self.metrics_period, self._metrics_frame)
                ),
                asyncio.create_task(server.serve_forever()),
            ]
            try:
                # a crash in any worker brings the service down loudly
                # instead of leaving a half-dead server running
                await asyncio.gather(*tasks)
            finally:
                for task in tasks:
                    task.cancel()
                await asyncio.gather(*tasks, return_exceptions=True)
