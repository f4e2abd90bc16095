"""Primal active-set solver for small strictly convex box-constrained QPs.

    minimize   0.5 * x' H x + g' x
    subject to lb <= x <= ub        (element-wise)

H must be symmetric positive definite.  The method maintains a working set
of bounds held at equality, solves the free-variable Newton system exactly,
steps to the nearest blocking bound, and releases the bound with the most
negative multiplier when no further progress is possible.  For a strictly
convex objective this terminates finitely; ties are broken by lowest index
to avoid cycling on degenerate steps.

Problems here are tiny (tens of variables), so dense numpy factorizations
beat any sparse machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class BoxQpResult:
    x: np.ndarray
    iterations: int
    converged: bool


def solve_box_qp(
    H: np.ndarray,
    g: np.ndarray,
    lb: np.ndarray,
    ub: np.ndarray,
    x0: np.ndarray | None = None,
    tol: float = 1e-10,
    max_iter: int | None = None,
) -> BoxQpResult:
    H = np.asarray(H, dtype=float)
    g = np.asarray(g, dtype=float)
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    n = g.shape[0]
    if H.shape != (n, n):
        raise ValueError(f"H shape {H.shape} does not match g length {n}")
    if np.any(lb > ub):
        raise ValueError("infeasible box: lb > ub somewhere")
    if max_iter is None:
        max_iter = 20 * n + 100

    H = 0.5 * (H + H.T)  # tolerate tiny asymmetry from accumulation
    x = np.clip(np.zeros(n) if x0 is None else np.asarray(x0, dtype=float), lb, ub)
    # working set: -1 held at lower, +1 held at upper, 0 free
    active = np.zeros(n, dtype=np.int8)

    for it in range(1, max_iter + 1):
        grad = H @ x + g
        free = active == 0
        p = np.zeros(n)
        if free.any():
            idx = np.flatnonzero(free)
            p[idx] = np.linalg.solve(H[np.ix_(idx, idx)], -grad[idx])

        if float(np.max(np.abs(p), initial=0.0)) <= tol:
            # stationary on the free set; check bound multipliers
            worst_i, worst_lam = -1, -tol
            for i in np.flatnonzero(active != 0):
                lam = grad[i] if active[i] == -1 else -grad[i]
                if lam < worst_lam:
                    worst_i, worst_lam = i, lam
            if worst_i < 0:
                return BoxQpResult(x, it, True)
            active[worst_i] = 0
            continue

        # ratio test: largest step along p staying inside the box
        alpha, block_i, block_side = 1.0, -1, 0
        for i in np.flatnonzero(free):
            if p[i] > tol:
                a = (ub[i] - x[i]) / p[i]
                side = 1
            elif p[i] < -tol:
                a = (lb[i] - x[i]) / p[i]
                side = -1
            else:
                continue
            if a < alpha:
                alpha, block_i, block_side = a, i, side

        x = x + max(alpha, 0.0) * p
        if block_i >= 0:
            x[block_i] = ub[block_i] if block_side == 1 else lb[block_i]
            active[block_i] = block_side
        x = np.clip(x, lb, ub)  # scrub float drift off the bounds

    return BoxQpResult(x, max_iter, False)
