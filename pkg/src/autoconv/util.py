"""Deterministic reductions and scalar search helpers.

Every sum in this package funnels through :func:`csum` (or the block
accumulators built on it) so that results are bit-identical across runs
and across thread counts: chunks are reduced with numpy's fixed pairwise
tree and the chunk partials are combined exactly with ``math.fsum``.
"""

from __future__ import annotations

import math

import numpy as np

EPS = float(np.finfo(np.float64).eps)

# Fixed chunk width for the reduction tree. Changing it changes low-order
# bits of results, so it is a constant, not a parameter.
_CHUNK = 4096


def csum(x) -> float:
    """Compensated deterministic sum of a 1-D array of floats."""
    a = np.ascontiguousarray(x, dtype=np.float64)
    n = a.size
    if n == 0:
        return 0.0
    head = n - (n % _CHUNK)
    parts = []
    if head:
        parts.extend(a[:head].reshape(-1, _CHUNK).sum(axis=1).tolist())
    if head < n:
        parts.append(float(a[head:].sum()))
    return math.fsum(parts)


def csum_with_budget(x) -> tuple[float, float]:
    """Sum plus a conservative rounding-error budget.

    The budget is (number of terms) * eps * (sum of magnitudes), the
    worst-case bound for naive accumulation; the actual compensated error
    is orders of magnitude smaller, so certificates built on this budget
    stay on the safe side.
    """
    a = np.ascontiguousarray(x, dtype=np.float64)
    s = csum(a)
    budget = a.size * EPS * csum(np.abs(a))
    return s, budget


class PartialSums:
    """Accumulates block partial sums, combined exactly at the end."""

    def __init__(self):
        self._parts: list[float] = []
        self._abs_parts: list[float] = []
        self._count = 0

    def add(self, block) -> None:
        a = np.ascontiguousarray(block, dtype=np.float64)
        self._parts.append(csum(a))
        self._abs_parts.append(csum(np.abs(a)))
        self._count += a.size

    def total(self) -> float:
        return math.fsum(self._parts)

    def abs_total(self) -> float:
        return math.fsum(self._abs_parts)

    def fp_budget(self) -> float:
        return self._count * EPS * self.abs_total()


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_minimize(fn, lo: float, hi: float, tol: float,
                            max_iter: int = 200) -> tuple[float, float]:
    """Golden-section search for the minimum of a unimodal ``fn`` on [lo, hi].

    Returns the best evaluated point and value (endpoints included).
    """
    if not lo < hi:
        raise ValueError("empty search interval")
    best_x, best_f = lo, fn(lo)
    f_hi = fn(hi)
    if f_hi < best_f:
        best_x, best_f = hi, f_hi
    a, b = lo, hi
    c = b - (b - a) * _INVPHI
    d = a + (b - a) * _INVPHI
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if fc < best_f:
            best_x, best_f = c, fc
        if fd < best_f:
            best_x, best_f = d, fd
        if abs(b - a) <= tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - (b - a) * _INVPHI
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + (b - a) * _INVPHI
            fd = fn(d)
    return best_x, best_f
