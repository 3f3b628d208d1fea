"""Gauss-Newton correction: single-point refinement and batched multistart.

The single-point corrector uses least-squares steps (np.linalg.lstsq), so it
handles square, overdetermined, and underdetermined systems alike; on a
rank-deficient Jacobian the minimum-norm step keeps it on the zero set's
nearest sheet.  The batched solver trades that robustness for throughput:
regularized normal equations solved for the whole seed population at once,
with divergent rows pruned between sweeps.
"""

from __future__ import annotations

import numpy as np

from .errors import BoundaryExitError, ConvergenceError


def refine(system, z0, tol=1e-10, max_iter=50, boundary_floor=0.0):
    """Drive the residual below tol from z0; returns the corrected point.

    Raises ConvergenceError after max_iter sweeps, BoundaryExitError if the
    iterate leaves the chart interior (margin below boundary_floor).
    """
    z = np.array(z0, dtype=float)
    best = None
    for _ in range(max_iter):
        F = system.residual(z)
        r = float(np.linalg.norm(F))
        if not np.isfinite(r):
            raise ConvergenceError("residual is not finite")
        if r <= tol:
            return z
        J = system.jacobian(z)
        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        # backtrack: plain Gauss-Newton overshoots on strongly curved residuals
        for _ in range(8):
            trial = z + step
            rt = float(np.linalg.norm(system.residual(trial)))
            if np.isfinite(rt) and rt < r:
                break
            step = 0.5 * step
        else:
            raise ConvergenceError(f"corrector stalled at residual {r:.3e}")
        z = trial
        if system.boundary_margin(z) < boundary_floor:
            raise BoundaryExitError("corrector left the chart interior")
        best = r
    raise ConvergenceError(f"no convergence in {max_iter} iterations (residual {best:.3e})")


def _gn_step(J, F, damping=1e-12):
    """Batched Gauss-Newton step via regularized normal equations.

    J: (B, k, m), F: (B, k).  Uses J^T J + lam I for k >= m and the
    minimum-norm form J^T (J J^T + lam I)^{-1} otherwise.
    """
    k, m = J.shape[-2:]
    Jt = np.swapaxes(J, -1, -2)
    if k >= m:
        A = Jt @ J
        lam = damping * (1.0 + np.trace(A, axis1=-2, axis2=-1) / m)
        A = A + lam[:, None, None] * np.eye(m)
        rhs = -(Jt @ F[..., None])
        return np.linalg.solve(A, rhs)[..., 0]
    A = J @ Jt
    lam = damping * (1.0 + np.trace(A, axis1=-2, axis2=-1) / k)
    A = A + lam[:, None, None] * np.eye(k)
    w = np.linalg.solve(A, -F[..., None])
    return (Jt @ w)[..., 0]


def gauss_newton_batch(
    system,
    seeds,
    tol=1e-11,
    max_iter=30,
    prune_after=3,
    prune_level=0.5,
    max_step=0.25,
    margin_floor=1e-3,
):
    """Run Gauss-Newton on every seed at once; return the converged points.

    Seeds that blow up, stop being finite, or stay above prune_level after
    prune_after sweeps are dropped.  Returns an array (C, m) of points with
    residual norm <= tol whose boundary margin exceeds margin_floor; the
    floor discards the exact but degenerate zeros sitting on the chart
    boundary (coincident-vertex configurations), which are strong Newton
    attractors but carry no geometry.
    """
    Z = np.array(seeds, dtype=float)
    if Z.ndim != 2 or Z.shape[0] == 0:
        return np.empty((0, Z.shape[-1] if Z.ndim == 2 else 0))
    done = []
    for sweep in range(max_iter):
        F = system.residual(Z)
        rn = np.linalg.norm(F, axis=-1)
        ok = np.isfinite(rn)
        conv = ok & (rn <= tol)
        if np.any(conv):
            done.append(Z[conv])
        keep = ok & ~conv
        if sweep >= prune_after:
            keep &= rn < prune_level
        Z, F = Z[keep], F[keep]
        if Z.shape[0] == 0:
            break
        J = system.jacobian(Z)
        step = _gn_step(J, F)
        ns = np.linalg.norm(step, axis=-1, keepdims=True)
        step = np.where(ns > max_step, step * (max_step / np.maximum(ns, 1e-300)), step)
        Z = Z + step
    if not done:
        return np.empty((0, np.shape(seeds)[-1]))
    out = np.vstack(done)
    margins = system.boundary_margins(out)
    return out[margins > margin_floor]


def smallest_singular_ratio(system, z):
    """sigma_min / sigma_max of the Jacobian; near zero means a solution family."""
    s = np.linalg.svd(system.jacobian(np.asarray(z, dtype=float)), compute_uv=False)
    return float(s[-1] / s[0]) if s[0] > 0 else 0.0
