"""Receding-horizon velocity controller with obstacle decay constraints.

The plant model inside the horizon is a single integrator on position,

    x_{i+1} = x_i + dt * u_i,        i = 0 .. N-1

so the states are affine in the stacked input vector U in R^{3N} and are
eliminated.  The tracking objective is then an exact quadratic in U:

    J(U) = sum_i (x_i - ref_i)' Q (x_i - ref_i)      i = 1 .. N-1
         + (x_N - ref_N)' P (x_N - ref_N)
         + sum_i (u_i - u_des)' R (u_i - u_des)
         + sum_i (u_i - u_{i-1})' S (u_i - u_{i-1})   u_{-1} = previous input

with ref_i = x_hat + i * dt * u_des, the path the operator's command would
trace from the delay-compensated state.

Obstacle avoidance enters through the discrete barrier decay condition per
obstacle and step, softened with a nonnegative slack omega:

    residual_{j,i}(U) >= -omega_{j,i}

For fixed U the optimal slack is omega* = max(0, -residual), so slack never
appears as a decision variable; it becomes a penalty on the violation.  The
default penalty is the exact (L1) one with slope
s = slack_weight * slack_hardness, smoothed by a tiny quadratic knee of
width slack_knee so the subproblems stay C1:

    penalty(w) = s * w^2 / (2*knee)          w <  knee
                 s * (w - knee/2)            w >= knee

An exact penalty behaves like hard constraints precisely when its slope
exceeds the constraint multipliers.  Here the residual gradient w.r.t. one
input component is at most dt, while the tracking gradient component can
reach roughly 60 with the default weights (state chain ~20, input rate ~40),
so multipliers reach the several-hundreds; the default hardness factor puts
the slope at 2000, comfortably above.  Feasible instances then solve with
slack below the knee width (sub-millimeter), and infeasible starts degrade
gracefully along the linear part instead of failing.  A plain quadratic
penalty slack_weight * omega^2 is available via config; at the default
weight it tolerates centimeter-scale planned violations under operator
pressure, which is measurably unsafe in closed loop.

Each SQP iteration linearizes the residuals and solves the resulting convex
piecewise-quadratic subproblem exactly (iterating on the classification of
each constraint into inactive / knee / linear zones, with a dense box-QP
per classification).  Steps are globalized with a trust region on the
penalty merit of the true residuals: the subproblem box is the input box
intersected with an infinity-norm ball around the iterate, and the ball
shrinks or grows with the agreement between predicted and actual merit
decrease.  Without the trust region the linear penalty rewards arbitrarily
long retreat steps from infeasible iterates, which overshoot into poor
local basins.  The solver is deterministic and total: it never raises on
infeasible instances.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .barrier import CENTER_EPS, BarrierParams, barrier_value
from .boxqp import solve_box_qp
from .core import (
    InputLimits,
    Obstacle,
    RobotState,
    SafetyParams,
    Vec3,
    VelocityCommand,
    as_vec3,
    clamp_input,
    clamp_norm,
)


def _psd_3x3(m, name):
    a = np.asarray(m, dtype=float)
    if a.shape != (3, 3):
        raise ValueError(f"{name} must be 3x3, got {a.shape}")
    if not np.allclose(a, a.T, atol=1e-12):
        raise ValueError(f"{name} must be symmetric")
    if np.min(np.linalg.eigvalsh(a)) < -1e-12:
        raise ValueError(f"{name} must be positive semidefinite")
    return a


@dataclass
class MpcConfig:
    horizon: int = 10
    dt: float = 0.1
    q_state: np.ndarray = field(default_factory=lambda: 10.0 * np.eye(3))
    r_input: np.ndarray = field(default_factory=lambda: np.eye(3))
    p_terminal: np.ndarray = field(default_factory=lambda: 10.0 * np.eye(3))
    s_smooth: np.ndarray = field(default_factory=lambda: 10.0 * np.eye(3))
    slack_weight: float = 100.0
    slack_penalty: str = "exact"      # "exact" (L1 with knee) | "quadratic"
    slack_hardness: float = 20.0      # exact-penalty slope = weight * hardness
    slack_knee: float = 1e-3
    limits: InputLimits = field(default_factory=InputLimits)
    sqp_max_iter: int = 20
    step_tol: float = 1e-4    # inf-norm on the input plan, m/s
    qp_tol: float = 1e-10
    max_vset_rounds: int = 15
    screen_obstacles: bool = True
    screen_pad: float = 0.05
    time_budget: float | None = None

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        self.q_state = _psd_3x3(self.q_state, "q_state")
        self.r_input = _psd_3x3(self.r_input, "r_input")
        self.p_terminal = _psd_3x3(self.p_terminal, "p_terminal")
        self.s_smooth = _psd_3x3(self.s_smooth, "s_smooth")
        if not self.slack_weight > 0.0:
            raise ValueError(f"slack_weight must be positive, got {self.slack_weight}")
        if self.slack_penalty not in ("exact", "quadratic"):
            raise ValueError(f"unknown slack_penalty {self.slack_penalty!r}")
        if not self.slack_hardness > 0.0:
            raise ValueError(
                f"slack_hardness must be positive, got {self.slack_hardness}"
            )
        if not self.slack_knee > 0.0:
            raise ValueError(f"slack_knee must be positive, got {self.slack_knee}")
        if self.sqp_max_iter < 1:
            raise ValueError("sqp_max_iter must be >= 1")


@dataclass
class MpcProblem:
    """One control-step instance.

    u_des is clamped to the commanded-speed bound at construction, so the
    invariant ||u_des|| <= v_max_norm holds no matter what the transport
    delivered.  sigma is the delay margin for this step.
    """

    x_hat: Vec3
    u_prev: Vec3
    u_des: Vec3
    obstacles: list
    safety: SafetyParams
    sigma: float = 0.0

    def __post_init__(self):
        self.x_hat = as_vec3(self.x_hat)
        self.u_prev = as_vec3(self.u_prev)
        self.u_des = clamp_norm(self.u_des, self.safety.v_max_norm)
        self.obstacles = list(self.obstacles)
        if not (self.sigma >= 0.0 and math.isfinite(self.sigma)):
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma}")

    def barrier_params(self, obstacle: Obstacle) -> BarrierParams:
        return BarrierParams(
            obstacle=obstacle,
            r_rob=self.safety.r_rob,
            d_min=self.safety.d_min,
            sigma=self.sigma,
            gamma=self.safety.gamma,
        )


@dataclass
class MpcSolution:
    u_seq: np.ndarray        # (N, 3) planned inputs
    x_pred: np.ndarray       # (N+1, 3) exact rollout of u_seq from x_hat
    omega: np.ndarray        # (n_obstacles, N) slack, zeros where inactive
    objective: float         # tracking cost + slack penalty at the solution
    iterations: int
    solve_time: float        # wall seconds spent in solve()
    converged: bool


def rollout(x_hat: Vec3, u_seq: np.ndarray, dt: float) -> np.ndarray:
    """Integrate the input plan forward; x_pred[0] is x_hat itself."""
    n = u_seq.shape[0]
    x = np.empty((n + 1, 3))
    x[0] = x_hat
    for i in range(n):
        x[i + 1] = x[i] + dt * u_seq[i]
    return x


def build_reference(x_hat: Vec3, u_des: Vec3, n_steps: int, dt: float) -> np.ndarray:
    """Operator-intent reference: drift from x_hat at u_des, (n_steps+1, 3)."""
    i = np.arange(n_steps + 1).reshape(-1, 1)
    return as_vec3(x_hat) + i * dt * as_vec3(u_des)


def predict_state(state: RobotState, now: float, commands) -> Vec3:
    """Dead-reckon the measured position over its age.

    Integrates each command's piecewise-constant segment over the window
    (state.stamp, now]; commands must be in stamp order, and the newest one
    extends to `now`.  Callers choose what belongs in the log: the closed
    loop passes only the command the plant has confirmed applying, so the
    unknown in-flight tail stays the margin's responsibility.  With an empty
    log or now <= stamp the measured position is returned unchanged.
    """
    pos = state.position.copy()
    t0 = state.stamp
    if now <= t0 or not commands:
        return pos
    stamps = [c.stamp for c in commands]
    for k, cmd in enumerate(commands):
        seg_start = max(stamps[k], t0)
        seg_end = min(stamps[k + 1] if k + 1 < len(commands) else now, now)
        if seg_end > seg_start:
            pos = pos + (seg_end - seg_start) * cmd.u
    return pos


def shifted_warm_start(u_seq: np.ndarray) -> np.ndarray:
    """Shift a previous plan one step, repeating the last input."""
    return np.vstack([u_seq[1:], u_seq[-1:]])


def tracking_cost(config: MpcConfig, problem: MpcProblem, u_seq: np.ndarray) -> float:
    """Literal evaluation of the tracking objective (no slack terms)."""
    n = config.horizon
    x = rollout(problem.x_hat, u_seq, config.dt)
    ref = build_reference(problem.x_hat, problem.u_des, n, config.dt)
    j = 0.0
    for i in range(1, n):
        e = x[i] - ref[i]
        j += float(e @ config.q_state @ e)
    e = x[n] - ref[n]
    j += float(e @ config.p_terminal @ e)
    for i in range(n):
        e = u_seq[i] - problem.u_des
        j += float(e @ config.r_input @ e)
        de = u_seq[i] - (u_seq[i - 1] if i > 0 else problem.u_prev)
        j += float(de @ config.s_smooth @ de)
    return j


def slack_penalty_value(config: MpcConfig, violations) -> float:
    """Penalty paid for nonnegative constraint violations (the slack values)."""
    v = np.asarray(violations, dtype=float).reshape(-1)
    if config.slack_penalty == "quadratic":
        return config.slack_weight * float(v @ v)
    s = config.slack_weight * config.slack_hardness
    k = config.slack_knee
    knee = v < k
    return s * (
        float(v[knee] @ v[knee]) / (2.0 * k) + float(np.sum(v[~knee] - 0.5 * k))
    )


def soft_objective(
    config: MpcConfig, problem: MpcProblem, u_seq: np.ndarray, obstacle_indices=None
) -> float:
    """The full minimized objective: tracking cost plus slack penalty."""
    r = exact_residuals(config, problem, u_seq, obstacle_indices)
    return tracking_cost(config, problem, u_seq) + slack_penalty_value(
        config, np.maximum(0.0, -r)
    )


def exact_residuals(
    config: MpcConfig, problem: MpcProblem, u_seq: np.ndarray, obstacle_indices=None
) -> np.ndarray:
    """Decay-condition residuals along the rollout, shape (n_obs * N,).

    Row order: obstacle-major, then step (the same order as
    linearize_constraints).
    """
    if obstacle_indices is None:
        obstacle_indices = range(len(problem.obstacles))
    n = config.horizon
    x = rollout(problem.x_hat, u_seq, config.dt)
    rows = []
    for j in obstacle_indices:
        params = problem.barrier_params(problem.obstacles[j])
        d = np.linalg.norm(x - params.obstacle.center, axis=1)
        h = (d - params.hard_radius) - params.sigma
        one_m_g = 1.0 - params.gamma
        for i in range(n):
            rows.append(h[i + 1] - one_m_g * h[i])
    return np.array(rows)


def linearize_constraints(
    config: MpcConfig, problem: MpcProblem, u_seq: np.ndarray, obstacle_indices=None
):
    """First-order model of the residuals around the plan u_seq.

    Returns (A, r0) with A of shape (n_obs * N, 3N) such that

        residual(U) ~= r0 + A @ (U - vec(u_seq))

    The gradient block of row (j, i) w.r.t. input l is
    dt * (g_{i+1} - (1-gamma) * g_i) for l < i, dt * g_{i+1} for l = i and
    zero for l > i, where g_i is the unit barrier gradient at state i.
    """
    if obstacle_indices is None:
        obstacle_indices = range(len(problem.obstacles))
    n = config.horizon
    dt = config.dt
    x = rollout(problem.x_hat, u_seq, dt)
    blocks, r0s = [], []
    for j in obstacle_indices:
        params = problem.barrier_params(problem.obstacles[j])
        delta = x - params.obstacle.center
        d = np.linalg.norm(delta, axis=1)
        # fixed fallback direction keeps the solver total even at the center
        grads = np.where(
            (d > CENTER_EPS)[:, None], delta / np.maximum(d, CENTER_EPS)[:, None],
            np.array([1.0, 0.0, 0.0]),
        )
        h = (d - params.hard_radius) - params.sigma
        one_m_g = 1.0 - params.gamma
        a = np.zeros((n, 3 * n))
        for i in range(n):
            if i > 0:
                inner = dt * (grads[i + 1] - one_m_g * grads[i])
                a[i, : 3 * i] = np.tile(inner, i)
            a[i, 3 * i : 3 * i + 3] = dt * grads[i + 1]
        blocks.append(a)
        r0s.append(h[1:] - one_m_g * h[:-1])
    if not blocks:
        return np.zeros((0, 3 * n)), np.zeros(0)
    return np.vstack(blocks), np.concatenate(r0s)


class MpcController:
    """SQP solver for the soft-constrained tracking problem.

    The tracking Hessian depends only on the configuration, so it is
    assembled once; each solve only rebuilds the linear term and the
    constraint linearizations.
    """

    def __init__(self, config: MpcConfig | None = None):
        self.config = config or MpcConfig()
        self._assemble_tracking_quadratic()

    # -- quadratic assembly -------------------------------------------------

    def _assemble_tracking_quadratic(self):
        cfg = self.config
        n = cfg.horizon
        dt = cfg.dt
        # state weight at step i: Q for 1..N-1, P at N
        w = [None] + [cfg.q_state] * (n - 1) + [cfg.p_terminal]
        # cum_w[l] = sum_{i>l} W_i ; cum_iw[l] = sum_{i>l} i * W_i
        cum_w = [np.zeros((3, 3)) for _ in range(n)]
        cum_iw = [np.zeros((3, 3)) for _ in range(n)]
        acc_w, acc_iw = np.zeros((3, 3)), np.zeros((3, 3))
        for l in range(n - 1, -1, -1):
            acc_w = acc_w + w[l + 1]
            acc_iw = acc_iw + (l + 1) * w[l + 1]
            cum_w[l] = acc_w.copy()
            cum_iw[l] = acc_iw.copy()

        h = np.zeros((3 * n, 3 * n))
        for l in range(n):
            for m in range(n):
                h[3 * l : 3 * l + 3, 3 * m : 3 * m + 3] = (
                    2.0 * dt * dt * cum_w[max(l, m)]
                )
        for i in range(n):
            sl = slice(3 * i, 3 * i + 3)
            h[sl, sl] += 2.0 * cfg.r_input + 2.0 * cfg.s_smooth
            if i + 1 < n:
                h[sl, sl] += 2.0 * cfg.s_smooth
                nxt = slice(3 * i + 3, 3 * i + 6)
                h[sl, nxt] += -2.0 * cfg.s_smooth
                h[nxt, sl] += -2.0 * cfg.s_smooth
        self._h_track = h
        self._cum_iw = cum_iw

    def _linear_term(self, problem: MpcProblem) -> np.ndarray:
        cfg = self.config
        n = cfg.horizon
        g = np.zeros(3 * n)
        for l in range(n):
            # state tracking: ref_i - x_hat = i*dt*u_des
            g[3 * l : 3 * l + 3] = -2.0 * cfg.dt * cfg.dt * (
                self._cum_iw[l] @ problem.u_des
            ) - 2.0 * (cfg.r_input @ problem.u_des)
        g[0:3] += -2.0 * (cfg.s_smooth @ problem.u_prev)
        return g

    # -- obstacle screening -------------------------------------------------

    def screen_obstacles(self, problem: MpcProblem) -> list[int]:
        """Indices of obstacles that could influence the horizon.

        An obstacle whose barrier value at x_hat exceeds the worst-case
        travel within the horizon plus the largest decay demand can never
        yield an active or violated constraint, so dropping it leaves the
        optimum unchanged.
        """
        cfg = self.config
        if not cfg.screen_obstacles:
            return list(range(len(problem.obstacles)))
        vmax = math.sqrt(3.0) * cfg.limits.u_b
        reach = cfg.horizon * cfg.dt * vmax
        decay = cfg.dt * vmax / problem.safety.gamma
        cutoff = reach + decay + cfg.screen_pad
        keep = []
        for j, obs in enumerate(problem.obstacles):
            params = problem.barrier_params(obs)
            hval = float(np.linalg.norm(problem.x_hat - obs.center)) - (
                params.hard_radius + params.sigma
            )
            if hval <= cutoff:
                keep.append(j)
        return keep

    # -- merit and subproblem -----------------------------------------------

    def _merit(self, problem: MpcProblem, u_seq: np.ndarray, idx) -> float:
        return soft_objective(self.config, problem, u_seq, idx)

    def _model_merit(self, problem, u, u_lin, a, r0) -> float:
        r = r0 + a @ (u - u_lin)
        return tracking_cost(
            self.config, problem, u.reshape(-1, 3)
        ) + slack_penalty_value(self.config, np.maximum(0.0, -r))

    def _solve_subproblem(self, problem, g_track, u_lin, a, r0, lb, ub):
        """Global minimizer of the local model: tracking quadratic plus the
        penalty on the linearized residuals.

        The model is convex and C1 but only piecewise quadratic.  Each round
        classifies every constraint row by penalty zone (inactive, quadratic
        knee, linear tail) and solves the plain box QP that classification
        implies; a self-consistent classification is the global model
        minimizer.  When the classification flips instead, the iterate has
        hopped over the thin knee band where active rows settle, so the
        model is minimized exactly along the segment to the QP point: the
        1-D minimizer lands inside the band and the next classification
        stabilizes.  The best point seen is returned if rounds run out.
        """
        cfg = self.config
        exact = cfg.slack_penalty == "exact"
        w = cfg.slack_weight * cfg.slack_hardness if exact else cfg.slack_weight
        quad_coeff = w / cfg.slack_knee if exact else 2.0 * w
        d = r0 - a @ u_lin  # residual_lin(U) = d + a @ U

        def classify(uvec):
            r = d + a @ uvec
            z = np.zeros(len(r), dtype=np.int8)
            if exact:
                z[r < -1e-12] = 1
                z[r <= -cfg.slack_knee] = 2
            else:
                z[r < -1e-12] = 1
            return tuple(z.tolist())

        def solve_for(zones, x0):
            zarr = np.asarray(zones, dtype=np.int8)
            hm, gm = self._h_track, g_track
            zq = zarr == 1
            if zq.any():
                aq, dq = a[zq], d[zq]
                hm = hm + quad_coeff * aq.T @ aq
                gm = gm + quad_coeff * aq.T @ dq
            if exact:
                zl = zarr == 2
                if zl.any():
                    gm = gm - w * np.sum(a[zl], axis=0)
            return solve_box_qp(hm, gm, lb, ub, x0=x0, tol=cfg.qp_tol).x

        def segment_min(u_c, u_q):
            # exact minimizer of the model on [u_c, u_q]: between residual
            # zone crossings the model is a 1-D quadratic in alpha, so one
            # sweep over the crossings finds the global segment minimum
            p = u_q - u_c
            r_c = d + a @ u_c
            rs = a @ p
            knee = cfg.slack_knee

            def piece_at(j, al):
                t = -(r_c[j] + al * rs[j])  # violation of row j
                if t <= 0.0:
                    return 0
                if exact and t >= knee:
                    return 2
                return 1

            def contrib(j, piece):
                aj, bj = -r_c[j], -rs[j]
                if piece == 1:
                    return (
                        0.5 * quad_coeff * bj * bj,
                        quad_coeff * aj * bj,
                        0.5 * quad_coeff * aj * aj,
                    )
                if piece == 2:
                    return 0.0, w * bj, w * (aj - 0.5 * knee)
                return 0.0, 0.0, 0.0

            events = []  # (alpha, row) where a row changes penalty piece
            targets = (0.0, -knee) if exact else (0.0,)
            for j in range(len(r_c)):
                if rs[j] != 0.0:
                    for tgt in targets:
                        al = (tgt - r_c[j]) / rs[j]
                        if 0.0 < al < 1.0:
                            events.append((float(al), j))
            events.sort()
            bounds = [0.0] + [e[0] for e in events] + [1.0]

            c2 = 0.5 * float(p @ self._h_track @ p)
            c1 = float((self._h_track @ u_c + g_track) @ p)
            c0 = 0.0
            pieces = {}
            mid0 = 0.5 * (bounds[0] + bounds[1])
            for j in range(len(r_c)):
                pieces[j] = piece_at(j, mid0)
                dc2, dc1, dc0 = contrib(j, pieces[j])
                c2 += dc2
                c1 += dc1
                c0 += dc0

            best_a, best_v = 0.0, c0
            for i in range(len(bounds) - 1):
                left, right = bounds[i], bounds[i + 1]
                cands = [right]
                if c2 > 0.0:
                    st = -c1 / (2.0 * c2)
                    if left < st < right:
                        cands.append(st)
                for al in cands:
                    v = (c2 * al + c1) * al + c0
                    if v < best_v:
                        best_a, best_v = al, v
                if i < len(events):
                    al_e, j = events[i]
                    dc2, dc1, dc0 = contrib(j, pieces[j])
                    c2 -= dc2
                    c1 -= dc1
                    c0 -= dc0
                    mid = 0.5 * (al_e + bounds[i + 2])
                    pieces[j] = piece_at(j, mid)
                    dc2, dc1, dc0 = contrib(j, pieces[j])
                    c2 += dc2
                    c1 += dc1
                    c0 += dc0
            return u_c + best_a * p

        u = u_lin.copy()
        best_u, best_m = u, self._model_merit(problem, u, u_lin, a, r0)
        seen = set()
        for _ in range(cfg.max_vset_rounds):
            zones = classify(u)
            if zones in seen:
                break
            seen.add(zones)
            u_q = solve_for(zones, u)
            u_new = u_q if classify(u_q) == zones else segment_min(u, u_q)
            m = self._model_merit(problem, u_new, u_lin, a, r0)
            if m < best_m:
                best_u, best_m = u_new, m
            if np.array_equal(u_new, u):
                break
            u = u_new
        return best_u

    # -- main entry -----------------------------------------------------------

    def solve(self, problem: MpcProblem, warm_start: np.ndarray | None = None) -> MpcSolution:
        t_start = time.perf_counter()
        cfg = self.config
        n = cfg.horizon
        lb = np.tile(cfg.limits.lower, n)
        ub = np.tile(cfg.limits.upper, n)

        if warm_start is not None:
            u = np.asarray(warm_start, dtype=float).reshape(n, 3).copy()
        else:
            u = np.tile(clamp_input(problem.u_des, cfg.limits), (n, 1))
        u = np.clip(u, cfg.limits.lower, cfg.limits.upper)

        idx = self.screen_obstacles(problem)
        g_track = self._linear_term(problem)
        # a start already inside an inflated zone can only be patched by
        # slack, so such solves are best-effort, never "converged"
        start_feasible = all(
            barrier_value(problem.x_hat, problem.barrier_params(problem.obstacles[j]))
            > 0.0
            for j in idx
        )

        converged = False
        iterations = 0
        radius = 0.25
        phi = self._merit(problem, u, idx)
        for iterations in range(1, cfg.sqp_max_iter + 1):
            u_flat = u.reshape(-1)
            a, r0 = linearize_constraints(cfg, problem, u, idx)
            lb_tr = np.maximum(lb, u_flat - radius)
            ub_tr = np.minimum(ub, u_flat + radius)
            u_star = self._solve_subproblem(problem, g_track, u_flat, a, r0, lb_tr, ub_tr)
            step = float(np.max(np.abs(u_star - u_flat), initial=0.0))
            predicted = phi - self._model_merit(problem, u_star, u_flat, a, r0)

            if predicted <= 1e-12 * (1.0 + abs(phi)) or step <= cfg.step_tol:
                # model cannot improve around u: stationary for the merit
                converged = True
                break

            phi_new = self._merit(problem, u_star.reshape(n, 3), idx)
            rho = (phi - phi_new) / predicted
            if rho >= 0.05:
                u = u_star.reshape(n, 3)
                phi = phi_new
                if step <= cfg.step_tol:
                    converged = True
                    break
            if rho >= 0.75 and step >= 0.9 * radius:
                radius = min(2.0 * radius, 1.0)
            elif rho < 0.25:
                radius = max(0.25 * radius, 1e-6)
                if radius <= 1e-6 and rho < 0.05:
                    break
            if (
                cfg.time_budget is not None
                and time.perf_counter() - t_start > cfg.time_budget
            ):
                break

        x_pred = rollout(problem.x_hat, u, cfg.dt)
        omega = np.zeros((len(problem.obstacles), n))
        if idx:
            r = exact_residuals(cfg, problem, u, idx).reshape(len(idx), n)
            omega[idx, :] = np.maximum(0.0, -r)
        objective = tracking_cost(cfg, problem, u) + slack_penalty_value(cfg, omega)
        return MpcSolution(
            u_seq=u,
            x_pred=x_pred,
            omega=omega,
            objective=objective,
            iterations=iterations,
            solve_time=time.perf_counter() - t_start,
            converged=converged and start_feasible,
        )


def first_input(
    solution: MpcSolution, limits: InputLimits, stamp: float, seq: int
) -> VelocityCommand:
    """The command actually sent: the plan's first input, clamped."""
    return VelocityCommand(clamp_input(solution.u_seq[0], limits), stamp, seq)
