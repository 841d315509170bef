"""Jacobian-free Newton-Krylov solver: Newton outer loop, restarted GMRES inner loop.

Jacobian-vector products are first-order finite differences

    J v ~ (F(x + sigma v) - F(x)) / sigma,
    sigma = fd_epsilon_scale * sqrt(machine eps) * (1 + ||x||) / ||v||,

and the inner tolerance follows a safeguarded residual-ratio schedule
eta_j = min(eta_max, 0.5 sqrt(||F_j|| / ||F_0||)).  No line search; failures
surface as a non-convergence flag with the best iterate preserved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EPS = np.finfo(float).eps


class SolverError(RuntimeError):
    """Non-finite values encountered during the nonlinear solve."""


@dataclass(frozen=True)
class SolverConfig:
    max_newton: int = 500
    max_gmres: int = 1000
    eta_max: float = 0.9
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    fd_epsilon_scale: float = 1.0
    gmres_restart: int = 100

    def __post_init__(self):
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if not (0.0 < self.eta_max < 1.0):
            raise ValueError("eta_max must lie in (0, 1)")
        if self.max_newton < 1 or self.max_gmres < 1 or self.gmres_restart < 1:
            raise ValueError("iteration limits must be positive")


@dataclass
class NewtonStats:
    newton_iters: int = 0
    gmres_iters: int = 0
    residual_norms: list[float] = field(default_factory=list)
    converged: bool = False


def gmres(matvec, rhs, tol, max_iter: int = 1000, restart: int = 100):
    """Restarted GMRES with modified Gram-Schmidt and Givens rotations.

    Returns (solution, achieved relative residual, iterations).  Hitting the
    iteration cap is reported through the residual, not raised: an inexact
    Newton step may still make progress.
    """
    rhs = np.asarray(rhs, dtype=float)
    n = rhs.size
    bnorm = float(np.linalg.norm(rhs))
    if bnorm == 0.0:
        return np.zeros(n), 0.0, 0

    x = np.zeros(n)
    total = 0
    relres = 1.0
    while total < max_iter:
        r = rhs - matvec(x) if total > 0 else rhs.copy()
        rnorm = float(np.linalg.norm(r))
        relres = rnorm / bnorm
        if relres <= tol:
            break
        m = min(restart, max_iter - total)
        V = np.empty((m + 1, n))
        H = np.zeros((m + 1, m))
        cs = np.zeros(m)
        sn = np.zeros(m)
        g = np.zeros(m + 1)
        V[0] = r / rnorm
        g[0] = rnorm
        j_used = 0
        breakdown = False
        for j in range(m):
            # copy: a matvec may return its argument (e.g. the identity map),
            # and the orthogonalization below must not touch the stored basis
            w = np.array(matvec(V[j]), dtype=float, copy=True)
            if not np.all(np.isfinite(w)):
                raise SolverError("non-finite value in matvec output")
            for i in range(j + 1):
                H[i, j] = V[i] @ w
                w -= H[i, j] * V[i]
            hnorm = float(np.linalg.norm(w))
            H[j + 1, j] = hnorm
            if hnorm > 0.0:
                V[j + 1] = w / hnorm
            # apply accumulated rotations, then the new one
            for i in range(j):
                t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
                H[i, j] = t
            denom = math.hypot(H[j, j], H[j + 1, j])
            if denom == 0.0:
                j_used = j
                breakdown = True
                break
            cs[j], sn[j] = H[j, j] / denom, H[j + 1, j] / denom
            H[j, j] = denom
            H[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            total += 1
            j_used = j + 1
            relres = abs(g[j + 1]) / bnorm
            if relres <= tol or hnorm == 0.0 or total >= max_iter:
                break
        if j_used > 0:
            y = np.zeros(j_used)
            for i in range(j_used - 1, -1, -1):
                y[i] = (g[i] - H[i, i + 1 : j_used] @ y[i + 1 :]) / H[i, i]
            x = x + y @ V[:j_used]
        if relres <= tol or breakdown:
            break
    return x, relres, total


def newton_solve(residual_fn, x0, cfg: SolverConfig):
    """Inexact Newton iteration on residual_fn, starting from x0.

    Returns (x, converged, NewtonStats).  Convergence means
    ||F|| <= abs_tol + rel_tol * ||F_0||.  On non-convergence the best
    iterate encountered is returned with converged=False.
    """
    x = np.array(x0, dtype=float, copy=True)
    F = np.asarray(residual_fn(x), dtype=float)
    if not np.all(np.isfinite(F)):
        raise SolverError("residual is non-finite at the initial guess")
    f0 = float(np.linalg.norm(F))
    stop = cfg.abs_tol + cfg.rel_tol * f0
    stats = NewtonStats(residual_norms=[f0])
    best_norm, best_x = f0, x.copy()

    fnorm = f0
    while fnorm > stop and stats.newton_iters < cfg.max_newton:
        eta = min(cfg.eta_max, 0.5 * math.sqrt(fnorm / f0))
        xnorm = float(np.linalg.norm(x))
        sigma0 = cfg.fd_epsilon_scale * math.sqrt(EPS) * (1.0 + xnorm)
        Fx = F

        def jv(v):
            vnorm = float(np.linalg.norm(v))
            if vnorm == 0.0:
                return np.zeros_like(v)
            sigma = sigma0 / vnorm
            return (residual_fn(x + sigma * v) - Fx) / sigma

        dx, _, inner = gmres(
            jv, -F, eta, max_iter=cfg.max_gmres, restart=cfg.gmres_restart
        )
        stats.gmres_iters += inner
        x = x + dx
        F = np.asarray(residual_fn(x), dtype=float)
        if not np.all(np.isfinite(F)):
            raise SolverError("residual became non-finite during Newton iteration")
        fnorm = float(np.linalg.norm(F))
        stats.newton_iters += 1
        stats.residual_norms.append(fnorm)
        if fnorm < best_norm:
            best_norm, best_x = fnorm, x.copy()

    stats.converged = fnorm <= stop
    if not stats.converged:
        x = best_x
    return x, stats.converged, stats
