"""Fourier-side representation of candidates and exact objective machinery.

A candidate is a real even unit-mass function on [-1/2, 1/2] held by its
cosine coefficients ``f_1..f_T``::

    f(x) = 1 + 2 * sum_{k=1..T} f_k cos(2 pi k x),

so the zeroth coefficient is pinned to 1 and the mass constraint is
structural. Extending f by zero to a 2-periodic function F, the squared
L2 norm of the self-convolution splits into an even-frequency part
``sum_m f_m^4`` and an odd-frequency part driven by the linear channels

    L_m(f) = 1/(2m-1) + 2 * sum_k (2m-1) f_k (-1)^k / ((2m-1)^2 - 4 k^2),

namely ``total = 1/2 + sum_{m<=T} f_m^4 + (16/pi^4) sum_{m<=R} L_m^4``.
The channels for m = 1..R form a dense R x T coupling table; it is
streamed in fixed-size row blocks with deterministic reductions, and
optionally cached for repeated evaluation at the same (T, R).

All operations here are pure functions of immutable inputs; results are
bit-identical across runs and thread counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .util import EPS, PartialSums, csum

PI4 = math.pi ** 4

# Row-block width for streaming the odd-channel coupling table. Fixed so
# the reduction tree (and therefore every low-order bit) never depends on
# memory mode or problem size.
BLOCK_ROWS = 8192

# Above this many table entries the blocks are regenerated on the fly
# instead of being cached (still the same arithmetic).
CACHE_ENTRY_CAP = 200_000_000


@dataclass(frozen=True)
class FourierCoefficients:
    """Cosine coefficients f_1..f_T of an even unit-mass candidate."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.values, dtype=np.float64)
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise ValueError(
                f"non-finite coefficient at index {int(bad[0]) + 1}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def T(self) -> int:
        return int(self.values.size)

    def coeff(self, k: int) -> float:
        """f_hat(k); 1 at k = 0, symmetric in k, zero beyond degree T."""
        k = abs(int(k))
        if k == 0:
            return 1.0
        if k > self.T:
            return 0.0
        return float(self.values[k - 1])

    def abs_coeff_sum(self) -> float:
        """sum_{|k|<=T} |f_hat(k)| = 1 + 2 sum |f_k|."""
        return 1.0 + 2.0 * csum(np.abs(self.values))

    def decay_constant(self) -> float:
        """C with |F_hat(m)| <= C/|m| for odd |m| >= 4T."""
        return (2.0 / math.pi) * self.abs_coeff_sum()

    def evaluate(self, x) -> np.ndarray:
        """Evaluate the (period-1) trigonometric polynomial pointwise."""
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        if self.T == 0:
            return np.ones_like(x)
        k = np.arange(1, self.T + 1, dtype=np.float64)
        phases = np.cos(2.0 * math.pi * np.outer(x, k))
        return 1.0 + 2.0 * (phases * self.values).sum(axis=1)


def build_coefficients(values) -> FourierCoefficients:
    """Validate and wrap a coefficient vector; T is its length."""
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    return FourierCoefficients(arr)


@dataclass(frozen=True)
class ObjectiveBreakdown:
    """Truncated objective split into its even and odd parts.

    total == 1/2 + even_sum + odd_sum holds exactly (same float adds).
    """

    R: int
    even_sum: float
    odd_sum: float
    total: float


@dataclass(frozen=True)
class PeriodTwoSpectrum:
    """Coefficients F_hat(m), |m| <= M, of the period-2 zero extension."""

    M: int
    coeffs: np.ndarray  # index m + M

    def __getitem__(self, m: int) -> float:
        m = int(m)
        if abs(m) > self.M:
            raise KeyError(f"|m| > M = {self.M}")
        return float(self.coeffs[m + self.M])

    def power_sum(self, p: float = 4.0) -> float:
        """sum_{|m| <= M} |F_hat(m)|^p with the fixed reduction order."""
        return csum(np.abs(self.coeffs) ** p)


@dataclass(frozen=True)
class FlatnessReport:
    """Deviation of the three-fold convolution from the flat target."""

    grid: np.ndarray
    values: np.ndarray
    target: float
    max_deviation: float
    tail_budget: float


class OddChannelKernel:
    """Streams the coupling rows (2m-1)(-1)^k / ((2m-1)^2 - 4k^2).

    Rows are generated in fixed blocks of ``BLOCK_ROWS``; when the full
    table fits under ``CACHE_ENTRY_CAP`` entries the blocks are kept for
    reuse (the solver re-evaluates thousands of times at fixed (T, R)).
    The denominator is never zero: odd minus even squares.
    """

    def __init__(self, T: int, rows: int, cache: bool | None = None):
        self.T = int(T)
        self.rows = int(rows)
        if cache is None:
            cache = self.T * self.rows <= CACHE_ENTRY_CAP
        self._cache: list[np.ndarray] | None = [] if cache else None
        self._k = np.arange(1, self.T + 1, dtype=np.float64)
        self._sign = np.where(np.arange(1, self.T + 1) % 2 == 0, 1.0, -1.0)

    def _make_block(self, m0: int, m1: int) -> np.ndarray:
        q = 2.0 * np.arange(m0 + 1, m1 + 1, dtype=np.float64) - 1.0
        if self.T == 0:
            return np.empty((m1 - m0, 0))
        denom = q[:, None] ** 2 - 4.0 * self._k[None, :] ** 2
        return (q[:, None] / denom) * self._sign[None, :]

    def blocks(self):
        """Yields (m0, q, C) with q = 2m-1 for rows m0+1..m0+len(q)."""
        if self._cache is not None and self._cache:
            m0 = 0
            for C in self._cache:
                m1 = m0 + C.shape[0]
                q = 2.0 * np.arange(m0 + 1, m1 + 1, dtype=np.float64) - 1.0
                yield m0, q, C
                m0 = m1
            return
        for m0 in range(0, self.rows, BLOCK_ROWS):
            m1 = min(m0 + BLOCK_ROWS, self.rows)
            C = self._make_block(m0, m1)
            if self._cache is not None:
                self._cache.append(C)
            q = 2.0 * np.arange(m0 + 1, m1 + 1, dtype=np.float64) - 1.0
            yield m0, q, C

    def channel_block(self, C, q, values, base_scale: float = 1.0):
        """L rows for one block: base_scale/q + 2 * C @ values (fixed order)."""
        L = base_scale / q
        if self.T:
            L = L + 2.0 * (C * values).sum(axis=1)
        return L

    def channel_abs_block(self, C, q, values_abs, base_scale: float = 1.0):
        """Row magnitude totals, used for rounding-error budgets."""
        A = abs(base_scale) / q
        if self.T:
            A = A + 2.0 * (np.abs(C) * values_abs).sum(axis=1)
        return A


def odd_channel(f: FourierCoefficients, m: int) -> float:
    """The m-th odd channel L_m(f) (frequency 2m-1), exact finite sum."""
    m = int(m)
    if m < 1:
        raise ValueError("m must be >= 1")
    q = 2.0 * m - 1.0
    if f.T == 0:
        return 1.0 / q
    k = np.arange(1, f.T + 1, dtype=np.float64)
    sign = np.where(np.arange(1, f.T + 1) % 2 == 0, 1.0, -1.0)
    terms = q * f.values * sign / (q * q - 4.0 * k * k)
    return 1.0 / q + 2.0 * csum(terms)


def objective(f: FourierCoefficients, R: int,
              kernel: OddChannelKernel | None = None) -> ObjectiveBreakdown:
    """Truncated objective 1/2 + sum f_m^4 + (16/pi^4) sum_{m<=R} L_m^4."""
    R = int(R)
    if R < 1:
        raise ValueError("R must be >= 1")
    if kernel is None:
        kernel = OddChannelKernel(f.T, R, cache=False)
    even_sum = csum(f.values ** 4)
    parts = PartialSums()
    for _, q, C in kernel.blocks():
        L = kernel.channel_block(C, q, f.values)
        parts.add(L ** 4)
    odd_sum = (16.0 / PI4) * parts.total()
    total = 0.5 + even_sum + odd_sum
    if not math.isfinite(total):
        raise OverflowError("objective overflow: coefficients out of range")
    return ObjectiveBreakdown(R=R, even_sum=even_sum, odd_sum=odd_sum,
                              total=total)


def gradient(f: FourierCoefficients, R: int,
             kernel: OddChannelKernel | None = None) -> np.ndarray:
    """Analytic gradient of the truncated objective in f_1..f_T.

    d/df_j = 4 f_j^3 + (128/pi^4) sum_{m<=R} L_m^3 (2m-1)(-1)^j
             / ((2m-1)^2 - 4 j^2).
    """
    R = int(R)
    if R < 1:
        raise ValueError("R must be >= 1")
    if f.T == 0:
        return np.zeros(0)
    if kernel is None:
        kernel = OddChannelKernel(f.T, R, cache=False)
    acc = np.zeros(f.T)
    for _, q, C in kernel.blocks():
        L = kernel.channel_block(C, q, f.values)
        acc = acc + (C * (L ** 3)[:, None]).sum(axis=0)
    g = 4.0 * f.values ** 3 + (128.0 / PI4) * acc
    if not np.all(np.isfinite(g)):
        raise OverflowError("gradient overflow: coefficients out of range")
    return g


def _odd_fhat(f: FourierCoefficients, count: int,
              kernel: OddChannelKernel | None = None) -> np.ndarray:
    """F_hat(2j-1) for j = 1..count: (-1)^(j+1) L_j / pi."""
    if kernel is None:
        kernel = OddChannelKernel(f.T, count, cache=False)
    out = np.empty(count)
    for m0, q, C in kernel.blocks():
        L = kernel.channel_block(C, q, f.values)
        j = np.arange(m0 + 1, m0 + 1 + L.size)
        out[m0:m0 + L.size] = np.where(j % 2 == 1, L, -L) / math.pi
    return out


def period2_spectrum(f: FourierCoefficients, M: int) -> PeriodTwoSpectrum:
    """F_hat(m) for |m| <= M of the period-2 zero extension of f.

    Even frequencies halve the cosine coefficients, F_hat(2k) = f_hat(k)/2
    (zero beyond 2T); odd frequencies come from the odd channels.
    """
    M = int(M)
    if M < 1:
        raise ValueError("M must be >= 1")
    coeffs = np.zeros(2 * M + 1)
    coeffs[M] = 0.5
    for k in range(1, min(f.T, M // 2) + 1):
        coeffs[M + 2 * k] = 0.5 * f.values[k - 1]
    n_odd = (M + 1) // 2
    if n_odd:
        odd = _odd_fhat(f, n_odd)
        for j in range(1, n_odd + 1):
            coeffs[M + 2 * j - 1] = odd[j - 1]
    coeffs[:M] = coeffs[:M:-1]
    coeffs.setflags(write=False)
    return PeriodTwoSpectrum(M=M, coeffs=coeffs)


def _autocorr_weights(f: FourierCoefficients) -> np.ndarray:
    """v_l = sum_{d != 0} (-1)^d f_{|l+d|} / d, restricted to |l+d| <= T.

    These are the exact interaction weights of the closed-form
    autoconvolution; O(T^2) once, O(T) per evaluation point afterwards.
    """
    T = f.T
    full = np.empty(2 * T + 1)
    full[T] = 1.0
    if T:
        full[T + 1:] = f.values
        full[:T] = f.values[::-1]
    j = np.arange(-T, T + 1)
    sign_j = np.where(np.abs(j) % 2 == 0, 1.0, -1.0)
    v = np.empty(T)
    for l in range(1, T + 1):
        d = j - l
        mask = d != 0
        terms = sign_j[mask] * ((-1.0) ** (l % 2)) * full[mask] / d[mask]
        # (-1)^d = (-1)^(j-l) = (-1)^j (-1)^l
        v[l - 1] = csum(terms)
    return v


def autoconvolution_curve(f: FourierCoefficients, grid) -> np.ndarray:
    """(F*F)(x) on grid points in [-1, 1], exact (no truncation tail).

    For x in [0, 1] the closed form is

        (1-x) * [1 + 2 sum f_k^2 cos(2 pi k x)]
        + (2/pi) * sum f_l v_l sin(2 pi l x),

    extended evenly to x < 0. Evaluation uses |x| only, so the symmetry
    curve(x) == curve(-x) is exact by construction.
    """
    x = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    if np.any(np.abs(x) > 1.0 + 1e-15):
        raise ValueError("grid points must lie in [-1, 1]")
    a = np.minimum(np.abs(x), 1.0)
    T = f.T
    if T == 0:
        return 1.0 - a
    k = np.arange(1, T + 1, dtype=np.float64)
    v = _autocorr_weights(f)
    ang = 2.0 * math.pi * np.outer(a, k)
    even_part = (1.0 - a) * (1.0 + 2.0 * (np.cos(ang) * f.values ** 2).sum(axis=1))
    odd_part = (2.0 / math.pi) * (np.sin(ang) * (f.values * v)).sum(axis=1)
    return even_part + odd_part


def threefold_flatness(f: FourierCoefficients, candidate_mu2: float, grid,
                       tail_target: float = 1e-9) -> FlatnessReport:
    """Deviation of (F*F*F)(x) = sum_m 4 F_hat(m)^3 e^(i pi m x) from
    candidate_mu2 / 4 on a grid inside (-1/2, 1/2).

    The summation cutoff M is chosen from the coefficient-sum decay bound
    so the discarded tail is below ``tail_target``.
    """
    x = np.atleast_1d(np.asarray(grid, dtype=np.float64))
    if np.any(np.abs(x) >= 0.5):
        raise ValueError("grid points must lie strictly inside (-1/2, 1/2)")
    if not candidate_mu2 > 0:
        raise ValueError("candidate_mu2 must be positive")
    C = f.decay_constant()
    # |F_hat(m)| <= C/m for odd m >= 4T; tail of 4*sum F^3 e(...) over
    # odd |m| > M is below 8 * sum_{odd m > M} (C/m)^3 <= 2 C^3 / M^2.
    M = max(4 * f.T + 1, int(math.sqrt(2.0 * C ** 3 / tail_target)) + 1)
    tail = 2.0 * C ** 3 / M ** 2

    n_odd = (M + 1) // 2
    odd_fh = _odd_fhat(f, n_odd)
    vals = np.full(x.size, 4.0 * 0.5 ** 3)
    # even frequencies: F_hat(2k) = f_k / 2, k <= T
    if f.T:
        kk = np.arange(1, f.T + 1, dtype=np.float64)
        coef = (f.values / 2.0) ** 3
        vals = vals + 8.0 * (np.cos(2.0 * math.pi * np.outer(x, kk)) * coef).sum(axis=1)
    chunk = 65536
    for j0 in range(0, n_odd, chunk):
        j1 = min(j0 + chunk, n_odd)
        m = 2.0 * np.arange(j0 + 1, j1 + 1, dtype=np.float64) - 1.0
        coef = odd_fh[j0:j1] ** 3
        vals = vals + 8.0 * (np.cos(math.pi * np.outer(x, m)) * coef).sum(axis=1)

    target = candidate_mu2 / 4.0
    dev = float(np.max(np.abs(vals - target)))
    x_ro = x.copy()
    x_ro.setflags(write=False)
    vals.setflags(write=False)
    return FlatnessReport(grid=x_ro, values=vals, target=target,
                          max_deviation=dev, tail_budget=tail)


def objective_tail_bound(f: FourierCoefficients, R: int) -> float:
    """Upper bound on the discarded odd part (16/pi^4) sum_{m>R} L_m^4.

    Valid once 2R+1 >= 4T, where |L_m| <= pi C / (2m-1).
    """
    if 2 * R + 1 < 4 * f.T:
        raise ValueError("tail bound needs 2R+1 >= 4T")
    C = f.decay_constant()
    return (8.0 / 3.0) * C ** 4 * (2.0 * R - 1.0) ** -3
