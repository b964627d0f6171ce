"""Batched Levenberg-Marquardt for many small least-squares problems at once."""

from __future__ import annotations

import numpy as np


def batched_lm(fun, x0, iters: int = 80, radius: float | None = None, floor: float = 1e-30):
    """Minimize ``|r(x)|^2`` independently for every row of ``x0``.

    ``fun(x)`` maps a batch ``(B, n)`` to residuals ``(B, m)`` and Jacobians
    ``(B, m, n)``.  Rows leave the active set once their cost is below
    ``floor`` or their damping has saturated or progress stalls.  ``radius`` clips steps to a ball.
    Returns the final batch and its costs.
    """
    x = np.array(x0, dtype=float)
    n = x.shape[1]
    r, J = fun(x)
    cost_all = np.sum(r * r, axis=1)
    active = np.arange(len(x))
    cost = cost_all.copy()
    damp = np.full(len(x), 1e-3)
    eye = np.eye(n)
    for _ in range(iters):
        keep = (cost > floor) & (damp < 1e10)
        if not np.any(keep):
            break
        active, r, J, cost, damp = active[keep], r[keep], J[keep], cost[keep], damp[keep]
        JtJ = np.transpose(J, (0, 2, 1)) @ J
        g = np.einsum("bmi,bm->bi", J, r)
        diag = np.einsum("bii->bi", JtJ) + 1e-12
        H = JtJ + damp[:, None, None] * eye * diag[:, :, None]
        trial = x[active] - np.linalg.solve(H, g[:, :, None])[:, :, 0]
        if radius is not None:
            nrm = np.linalg.norm(trial, axis=1)
            over = nrm > radius
            trial[over] *= (radius / nrm[over])[:, None]
        rt, Jt = fun(trial)
        ct = np.sum(rt * rt, axis=1)
        better = ct < cost
        stalled = better & (cost - ct <= 1e-10 * cost)
        x[active[better]] = trial[better]
        cost_all[active[better]] = ct[better]
        r = np.where(better[:, None], rt, r)
        J = np.where(better[:, None, None], Jt, J)
        cost = np.where(better, ct, cost)
        damp = np.where(better, np.maximum(damp / 5.0, 1e-12), damp * 4.0)
        damp[stalled] = np.inf
    return x, cost_all
