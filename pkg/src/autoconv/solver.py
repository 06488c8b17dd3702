"""Minimization of the truncated objective over degree-T candidates.

The quadratically-constrained form with auxiliary variables is
unnecessary: the truncated objective is a smooth convex quartic in the
free coefficients (a sum of fourth powers of affine channels), so a
limited-memory quasi-Newton iteration with a strong-Wolfe line search
converges to the unique minimizer without an external solver. Runs are
deterministic: no randomness, fixed reduction trees, and identical
results for identical configs regardless of thread count.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .spectral import (
    FourierCoefficients,
    ObjectiveBreakdown,
    OddChannelKernel,
    build_coefficients,
    objective,
)
from .util import csum

PI4 = float(np.pi ** 4)


class LineSearchError(RuntimeError):
    """Raised when the line search fails away from a stationary point."""

    def __init__(self, message: str, iterate: np.ndarray):
        super().__init__(f"{message}; iterate dump: "
                         f"{np.array2string(iterate, threshold=16)}")
        self.iterate = iterate


@dataclass(frozen=True)
class SolverConfig:
    """Inputs of a solve: truncation degrees and stopping tolerances.

    ``init`` is None for the all-zeros start (the constant candidate) or
    an explicit length-T vector; use :func:`warm_start_extend` to build
    one from a previous solution.
    """

    T: int
    R: int
    grad_tol: float = 1e-10
    rel_obj_tol: float = 1e-12
    max_iterations: int = 100_000
    memory: int = 10
    init: np.ndarray | None = None

    def __post_init__(self):
        if self.T < 0 or self.R < 1:
            raise ValueError("need T >= 0 and R >= 1")
        if self.grad_tol <= 0 or self.rel_obj_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 1 or self.memory < 1:
            raise ValueError("max_iterations and memory must be >= 1")
        if self.R < self.T:
            warnings.warn("R < T: odd-channel truncation is coarser than "
                          "the coefficient degree", stacklevel=2)
        if self.init is not None:
            arr = np.ascontiguousarray(self.init, dtype=np.float64)
            if arr.shape != (self.T,):
                raise ValueError("init vector must have length T")
            if not np.all(np.isfinite(arr)):
                raise ValueError("init vector must be finite")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, "init", arr)


@dataclass(frozen=True)
class FourierSolution:
    coeffs: FourierCoefficients
    R: int
    breakdown: ObjectiveBreakdown
    grad_norm: float
    iterations: int
    converged: bool
    stop_reason: str = ""

    @property
    def T(self) -> int:
        return self.coeffs.T


def warm_start_extend(prev: FourierSolution, newT: int) -> np.ndarray:
    """Previous coefficients copied into a longer vector, new entries zero."""
    newT = int(newT)
    if newT < prev.T:
        raise ValueError(f"newT = {newT} < previous T = {prev.T}")
    out = np.zeros(newT)
    out[:prev.T] = prev.coeffs.values
    return out


def _dot(a: np.ndarray, b: np.ndarray) -> float:
    # deterministic inner product (no BLAS)
    return csum(a * b)


def _value_and_grad(kernel: OddChannelKernel, x: np.ndarray):
    """Objective total and gradient in one streaming pass."""
    even = csum(x ** 4)
    odd_parts = []
    acc = np.zeros(x.size)
    for _, q, C in kernel.blocks():
        L = kernel.channel_block(C, q, x)
        odd_parts.append(csum(L ** 4))
        if x.size:
            acc = acc + (C * (L ** 3)[:, None]).sum(axis=0)
    import math
    fval = 0.5 + even + (16.0 / PI4) * math.fsum(odd_parts)
    grad = 4.0 * x ** 3 + (128.0 / PI4) * acc
    if not (np.isfinite(fval) and np.all(np.isfinite(grad))):
        raise OverflowError("objective overflow during solve")
    return fval, grad


def _wolfe_line_search(fg, x, f0, g0, d, step0, c1=1e-4, c2=0.9,
                       max_iter=30, zoom_iter=40):
    """Strong-Wolfe search along d; returns (x, f, g, n_evals, ok, stalled).

    Standard bracket-and-zoom with bisection; ``stalled`` marks failures
    where no measurable decrease exists along d (machine-precision floor).
    """
    dg0 = _dot(g0, d)
    if dg0 >= 0:
        return x, f0, g0, 0, False, False

    def phi(a):
        xa = x + a * d
        fa, ga = fg(xa)
        return xa, fa, ga, _dot(ga, d)

    evals = 0
    a_prev, f_prev, dg_prev = 0.0, f0, dg0
    a = step0
    best = None
    for _ in range(max_iter):
        xa, fa, ga, dga = phi(a)
        evals += 1
        if fa < f0 and (best is None or fa < best[1]):
            best = (xa, fa, ga)
        if fa > f0 + c1 * a * dg0 or (evals > 1 and fa >= f_prev):
            lo, f_lo, dg_lo, hi = a_prev, f_prev, dg_prev, a
            break
        if abs(dga) <= -c2 * dg0:
            return xa, fa, ga, evals, True, False
        if dga >= 0:
            lo, f_lo, dg_lo, hi = a, fa, dga, a_prev
            break
        a_prev, f_prev, dg_prev = a, fa, dga
        a *= 2.0
    else:
        if best is not None:
            return best[0], best[1], best[2], evals, True, False
        return x, f0, g0, evals, False, False

    for _ in range(zoom_iter):
        a = 0.5 * (lo + hi)
        xa, fa, ga, dga = phi(a)
        evals += 1
        if fa < f0 and (best is None or fa < best[1]):
            best = (xa, fa, ga)
        if fa > f0 + c1 * a * dg0 or fa >= f_lo:
            hi = a
        else:
            if abs(dga) <= -c2 * dg0:
                return xa, fa, ga, evals, True, False
            if dga * (hi - lo) >= 0:
                hi = lo
            lo, f_lo, dg_lo = a, fa, dga
        if abs(hi - lo) <= 1e-18 * max(1.0, abs(lo)):
            break
    if best is not None:
        return best[0], best[1], best[2], evals, True, False
    return x, f0, g0, evals, False, True


def solve(config: SolverConfig, progress=None) -> FourierSolution:
    """Minimize the truncated objective; returns the converged candidate.

    Convergence means the gradient max-norm fell below ``grad_tol`` or the
    relative objective decrease stayed below ``rel_obj_tol`` over the final
    window. Hitting the iteration cap returns the best iterate flagged
    non-converged instead of raising.
    """
    T, R = config.T, config.R
    if T == 0:
        coeffs = build_coefficients([])
        br = objective(coeffs, R)
        return FourierSolution(coeffs=coeffs, R=R, breakdown=br,
                               grad_norm=0.0, iterations=0, converged=True,
                               stop_reason="no free variables")

    kernel = OddChannelKernel(T, R)
    fg = lambda v: _value_and_grad(kernel, v)

    x = np.zeros(T) if config.init is None else config.init.copy()
    f, g = fg(x)
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    rho_hist: list[float] = []

    iterations = 0
    converged = False
    reason = "iteration cap reached"
    small_window = 0

    for it in range(1, config.max_iterations + 1):
        gnorm = float(np.max(np.abs(g))) if g.size else 0.0
        if gnorm <= config.grad_tol:
            converged, reason = True, "gradient tolerance"
            break

        # two-loop recursion
        d = -g
        if s_hist:
            alphas = []
            for s, y, rho in zip(reversed(s_hist), reversed(y_hist),
                                 reversed(rho_hist)):
                a = rho * _dot(s, d)
                alphas.append(a)
                d = d - a * y
            y_last, s_last = y_hist[-1], s_hist[-1]
            d = d * (_dot(s_last, y_last) / _dot(y_last, y_last))
            for (s, y, rho), a in zip(zip(s_hist, y_hist, rho_hist),
                                      reversed(alphas)):
                b = rho * _dot(y, d)
                d = d + s * (a - b)
        if _dot(g, d) >= 0:
            d = -g
            s_hist.clear(), y_hist.clear(), rho_hist.clear()

        step0 = 1.0 if s_hist else min(1.0, 1.0 / max(1.0, gnorm))
        xn, fn, gn, evals, ok, stalled = _wolfe_line_search(
            fg, x, f, g, d, step0)
        iterations = it

        if not ok:
            if stalled or fn >= f:
                converged, reason = True, "line search stalled at machine precision"
                break
            raise LineSearchError(
                f"line search failed at iteration {it} (f = {f:.17g}, "
                f"max|g| = {gnorm:.3e})", x)

        s, y = xn - x, gn - g
        sy = _dot(s, y)
        if sy > 1e-12 * np.sqrt(_dot(s, s) * _dot(y, y)):
            s_hist.append(s)
            y_hist.append(y)
            rho_hist.append(1.0 / sy)
            if len(s_hist) > config.memory:
                s_hist.pop(0), y_hist.pop(0), rho_hist.pop(0)

        rel_dec = (f - fn) / max(1.0, abs(fn))
        x, f, g = xn, fn, gn
        if progress is not None and it % 50 == 0:
            progress(it, f, float(np.max(np.abs(g))))
        if 0.0 <= rel_dec < config.rel_obj_tol:
            small_window += 1
            if small_window >= 3:
                converged, reason = True, "objective decrease below tolerance"
                break
        else:
            small_window = 0

    coeffs = build_coefficients(x)
    br = objective(coeffs, R, kernel=kernel)
    gnorm = float(np.max(np.abs(g))) if g.size else 0.0
    return FourierSolution(coeffs=coeffs, R=R, breakdown=br, grad_norm=gnorm,
                           iterations=iterations, converged=converged,
                           stop_reason=reason)
