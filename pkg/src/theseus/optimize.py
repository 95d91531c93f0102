"""Quasi-Newton minimization with random restarts.

Dense inverse-Hessian BFGS with a strong-Wolfe line search; parameter
counts stay in the hundreds, so limited-memory variants are unnecessary.
Non-finite values abort the run and report it as non-converged, leaving
the restart loop to try fresh starting conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GraphError

WOLFE_C1 = 1e-4
WOLFE_C2 = 0.9


@dataclass(frozen=True)
class OptimizerConfig:
    alpha: float = 0.05
    f_limit: float = 0.95
    omega_limit: float = 1.0
    c_limit: int = 10
    max_iterations: int = 500
    gradient_tolerance: float = 1e-8
    init_range: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.f_limit <= 1:
            raise GraphError(f"f_limit {self.f_limit} outside (0, 1]")
        if not 0 <= self.alpha < 1:
            raise GraphError(f"alpha {self.alpha} outside [0, 1)")
        if self.c_limit < 1:
            raise GraphError("c_limit must be >= 1")
        if self.init_range <= 0 or self.omega_limit <= 0:
            raise GraphError("init_range and omega_limit must be positive")


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    iterations: int
    converged: bool
    n_evaluations: int = 0


@dataclass
class RestartResult:
    x: np.ndarray
    loss: float
    fidelity: float
    qualified: bool
    restarts_used: int


def random_init(length: int, cfg: OptimizerConfig, rng: np.random.Generator | None = None):
    """I.i.d. uniform on [-init_range, +init_range], reproducible from the seed."""
    if length <= 0:
        raise GraphError("parameter count must be positive")
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    return rng.uniform(-cfg.init_range, cfg.init_range, length)


class _Recorder:
    """Wraps f to count evaluations, track the best point, and flag non-finites."""

    def __init__(self, fun):
        self.fun = fun
        self.count = 0
        self.best_f = np.inf
        self.best_x = None
        self.bad = False

    def __call__(self, x):
        self.count += 1
        f, g = self.fun(x)
        if not np.isfinite(f) or not np.all(np.isfinite(g)):
            self.bad = True
            return np.inf, np.full_like(np.asarray(x, float), np.nan)
        if f < self.best_f:
            self.best_f = f
            self.best_x = np.array(x, copy=True)
        return f, g


def _line_search(fun, x, p, f0, g0, max_steps=30):
    """Strong Wolfe search along p.  Returns (alpha, f, g) or None."""
    d0 = float(np.dot(g0, p))
    if d0 >= 0:
        return None

    def phi(a):
        f, g = fun(x + a * p)
        return f, g, float(np.dot(g, p)) if np.all(np.isfinite(g)) else np.nan

    def zoom(lo, f_lo, hi, f_hi, d_lo):
        for _ in range(max_steps):
            a = 0.5 * (lo + hi)
            f, g, d = phi(a)
            if not np.isfinite(f):
                return None
            if f > f0 + WOLFE_C1 * a * d0 or f >= f_lo:
                hi, f_hi = a, f
            else:
                if abs(d) <= -WOLFE_C2 * d0:
                    return a, f, g
                if d * (hi - lo) >= 0:
                    hi, f_hi = lo, f_lo
                lo, f_lo, d_lo = a, f, d
            if abs(hi - lo) < 1e-16:
                break
        return (lo, f_lo, None) if f_lo < f0 else None

    a_prev, f_prev, d_prev = 0.0, f0, d0
    a = 1.0
    for it in range(max_steps):
        f, g, d = phi(a)
        if not np.isfinite(f):
            a = 0.5 * (a_prev + a)
            continue
        if f > f0 + WOLFE_C1 * a * d0 or (f >= f_prev and it > 0):
            return zoom(a_prev, f_prev, a, f, d_prev)
        if abs(d) <= -WOLFE_C2 * d0:
            return a, f, g
        if d >= 0:
            return zoom(a, f, a_prev, f_prev, d)
        a_prev, f_prev, d_prev = a, f, d
        a *= 2.0
    return None


def minimize(fun: Callable, x0, cfg: OptimizerConfig) -> MinimizeResult:
    """BFGS descent from x0; returns the best point seen.

    ``fun(x)`` must return (value, gradient).  Terminates on gradient norm
    below ``cfg.gradient_tolerance``, on ``cfg.max_iterations``, or when the
    line search cannot make progress.  Any non-finite value aborts the run
    (converged=False); the caller restarts.
    """
    rec = _Recorder(fun)
    x = np.array(x0, dtype=np.float64, copy=True)
    n = len(x)
    f, g = rec(x)
    if rec.bad:
        return MinimizeResult(x, np.inf, 0, False, rec.count)
    h = np.eye(n)
    converged = False
    k = 0
    for k in range(1, cfg.max_iterations + 1):
        gnorm = float(np.linalg.norm(g))
        if gnorm < cfg.gradient_tolerance:
            converged = True
            break
        p = -h @ g
        ls = _line_search(rec, x, p, f, g)
        if rec.bad:
            break
        if ls is None:
            converged = float(np.linalg.norm(g)) < 10 * cfg.gradient_tolerance
            break
        a, f_new, g_new = ls
        if g_new is None:
            _, g_new = rec(x + a * p)
            if rec.bad:
                break
        s = a * p
        y = g_new - g
        x = x + s
        f, g = f_new, g_new
        sy = float(np.dot(s, y))
        if sy > 1e-12 * float(np.linalg.norm(s)) * float(np.linalg.norm(y)) and sy > 0:
            if k == 1:
                h *= sy / float(np.dot(y, y))
            rho = 1.0 / sy
            hy = h @ y
            h -= rho * (np.outer(s, hy) + np.outer(hy, s))
            h += rho * (rho * float(np.dot(y, hy)) + 1.0) * np.outer(s, s)
    else:
        k = cfg.max_iterations
    if float(np.linalg.norm(g)) < cfg.gradient_tolerance:
        converged = True
    best_x = rec.best_x if rec.best_x is not None else x
    return MinimizeResult(best_x, rec.best_f, k, converged and not rec.bad, rec.count)


def optimize_with_restarts(
    fun,
    length: int,
    cfg: OptimizerConfig,
    warm_start: np.ndarray | None = None,
    seed_salt: int = 0,
) -> RestartResult:
    """Up to c_limit runs; stops at the first qualifying solution.

    Qualification: fidelity >= f_limit and max |component| <= omega_limit.
    ``fun`` must be callable as fun(x) -> (loss, grad) and expose
    ``fun.fidelity(x)``.  The first restart may reuse ``warm_start``.
    """
    best = None
    for r in range(cfg.c_limit):
        if r == 0 and warm_start is not None:
            x0 = np.asarray(warm_start, dtype=np.float64)
        else:
            rng = np.random.default_rng(
                np.random.SeedSequence((cfg.seed, seed_salt, r))
            )
            x0 = random_init(length, cfg, rng)
        res = minimize(fun, x0, cfg)
        if not np.isfinite(res.fun):
            continue
        fid = fun.fidelity(res.x)
        qualified = fid >= cfg.f_limit and float(np.max(np.abs(res.x))) <= cfg.omega_limit
        if qualified:
            return RestartResult(res.x, res.fun, fid, True, r + 1)
        if best is None or res.fun < best.loss:
            best = RestartResult(res.x, res.fun, fid, False, r + 1)
    if best is None:
        best = RestartResult(np.zeros(length), np.inf, 0.0, False, cfg.c_limit)
    best.restarts_used = cfg.c_limit
    return best
