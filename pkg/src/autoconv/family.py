"""The one-parameter family of simple near optimizers and its norm series.

Members are the unit-mass endpoint-singular densities

    f_c(x) = alpha_c / (1/4 - x^2)^c,   alpha_c = Gamma(2-2c) / Gamma(1-c)^2,

whose period-2 spectrum has the closed Bessel form
F_hat_c(k) = (pi^c Gamma(2-2c) / (2 Gamma(1-c))) J_nu(pi k / 2) / k^(1/2-c)
with order nu = 1/2 - c. The squared autoconvolution norm is then

    1/2 + (pi^(4c) Gamma(2-2c)^4 / Gamma(1-c)^4)
          * sum_{k>=1} J_nu(pi k/2)^4 / k^(2-4c),

a series whose tail is certified with the envelope |J_nu(z)| <= sqrt(2/(pi z))
(valid for |nu| <= 1/2). The scalar Bessel evaluator uses two independent
routes, an ascending power series for z <= 25 and adaptive quadrature of
the half-interval oscillatory integral representation above, which must
agree to 1e-10 on the overlap band z in [20, 30]. The bulk series
evaluation uses the large-argument asymptotic expansion with its
first-omitted-term remainder folded into the reported tail; the phase
(pi/2)(k - nu - 1/2) is reduced exactly via k mod 4 so no large-argument
trigonometric rounding enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.integrate import quad

from .util import EPS, csum, golden_section_minimize

SQRT_PI = math.sqrt(math.pi)

# Route switch for the scalar evaluator, with the mandated overlap
# cross-check band [20, 30] around it.
Z_SWITCH = 25.0
OVERLAP_BAND = (20.0, 30.0)

# Family validity: the norm-series tail integral needs 4 - 4c > 1; we cap
# well below that so the envelope bound keeps real margin.
C_MAX = 0.55

DEFAULT_K = 100_000

# First series index handled by the vectorized asymptotic path
# (z = pi k / 2 >= 25.1).
_K_ASYMPTOTIC = 16
_HANKEL_TERMS = 19


# Lanczos approximation, g = 7 with 9 coefficients; relative error below
# 1e-13 across the argument range used here.
_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(x: float) -> float:
    """Gamma for positive real arguments (Lanczos with reflection)."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise ValueError("gamma_fn needs a positive finite argument")
    if x < 0.5:
        return math.pi / (math.sin(math.pi * x) * gamma_fn(1.0 - x))
    x -= 1.0
    acc = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (x + 0.5) * math.exp(-t) * acc


@dataclass(frozen=True)
class FamilyParams:
    """Derived constants of one family member."""

    c: float
    alpha_c: float
    nu: float
    K: int


def family_params(c: float, K: int = DEFAULT_K) -> FamilyParams:
    c = float(c)
    if not 0.0 <= c <= C_MAX:
        raise ValueError(f"c = {c} outside validity range [0, {C_MAX}]")
    alpha_c = gamma_fn(2.0 - 2.0 * c) / gamma_fn(1.0 - c) ** 2
    return FamilyParams(c=c, alpha_c=alpha_c, nu=0.5 - c, K=int(K))


def family_density(c: float, x) -> np.ndarray:
    """f_c(x) pointwise on (-1/2, 1/2)."""
    p = family_params(c)
    x = np.asarray(x, dtype=np.float64)
    return p.alpha_c / (0.25 - x * x) ** c


def _bessel_series(nu: float, z: float) -> float:
    """Ascending power series, accumulated in extended precision.

    The binary64 series loses ~0.43 z decimal digits to cancellation, so
    the working precision scales with z; the term recurrence needs Gamma
    only once, at nu + 1.
    """
    if z == 0.0:
        if nu == 0.0:
            return 1.0
        if nu > 0.0:
            return 0.0
        raise ValueError("J_nu(0) diverges for nu < 0")
    with mpmath.workdps(30 + int(0.5 * z)):
        half = mpmath.mpf(z) / 2
        t = mpmath.power(half, nu) / mpmath.mpf(gamma_fn(nu + 1.0))
        s = t
        q = half * half
        j = 0
        while True:
            j += 1
            t = -t * q / (j * (j + nu))
            s += t
            if abs(t) < abs(s) * mpmath.mpf(10) ** -25 and j > z:
                break
        return float(s)


def _bessel_quadrature(nu: float, z: float) -> float:
    """Oscillatory integral representation with the algebraic endpoint
    weight (1-s^2)^(nu-1/2) handled by weighted adaptive quadrature."""
    val, _err = quad(lambda s: math.cos(z * s), -1.0, 1.0,
                     weight="alg", wvar=(nu - 0.5, nu - 0.5),
                     epsabs=1e-13, epsrel=1e-13,
                     limit=max(300, int(2.5 * z) + 50))
    pref = (z / 2.0) ** nu / (gamma_fn(nu + 0.5) * SQRT_PI)
    return pref * val


def bessel_j(nu: float, z: float) -> float:
    """Bessel function of the first kind, real order nu > -1/2, z >= 0."""
    nu = float(nu)
    z = float(z)
    if nu <= -0.5:
        raise ValueError("order must satisfy nu > -1/2")
    if z < 0.0:
        raise ValueError("argument must be nonnegative")
    if z <= Z_SWITCH:
        return _bessel_series(nu, z)
    return _bessel_quadrature(nu, z)


def _hankel_coefficients(nu: float, terms: int = _HANKEL_TERMS) -> np.ndarray:
    """a_l = prod_{i<=l} (4 nu^2 - (2i-1)^2) / (l! 8^l)."""
    mu = 4.0 * nu * nu
    a = np.empty(terms)
    a[0] = 1.0
    for l in range(1, terms):
        a[l] = a[l - 1] * (mu - (2.0 * l - 1.0) ** 2) / (l * 8.0)
    return a


def bessel_j_quarterpi(nu: float, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """J_nu(pi k / 2) for integer k >= 16, vectorized, with error bounds.

    Large-argument expansion J = sqrt(2/(pi z)) (cos(w) P - sin(w) Q),
    w = z - (nu/2 + 1/4) pi. For |nu| <= 1/2 the remainders of P and Q
    are bounded by their first omitted terms; the returned second array
    is that absolute error bound per value. The phase is exact:
    w = (pi/2)(k - nu - 1/2) depends on k only through k mod 4.
    """
    if abs(nu) > 0.5:
        raise ValueError("asymptotic path is certified for |nu| <= 1/2 only")
    k = np.asarray(k, dtype=np.int64)
    a = _hankel_coefficients(nu)
    z = (math.pi / 2.0) * k.astype(np.float64)
    x2 = 1.0 / (z * z)
    n_even = (len(a) + 1) // 2
    n_odd = len(a) // 2
    # Horner in 1/z^2 with alternating signs
    P = np.full_like(z, a[2 * (n_even - 1)] * (-1.0) ** (n_even - 1))
    for j in range(n_even - 2, -1, -1):
        P = P * x2 + a[2 * j] * (-1.0) ** j
    Q = np.full_like(z, a[2 * n_odd - 1] * (-1.0) ** (n_odd - 1))
    for j in range(n_odd - 2, -1, -1):
        Q = Q * x2 + a[2 * j + 1] * (-1.0) ** j
    Q = Q / z

    phases = (math.pi / 2.0) * (np.arange(4) - nu - 0.5)
    cosw = np.cos(phases)[k % 4]
    sinw = np.sin(phases)[k % 4]
    amp = np.sqrt(2.0 / (math.pi * z))
    J = amp * (cosw * P - sinw * Q)
    # remainders are bounded by the first omitted terms: a_L/z^L for the
    # odd tail and a_{L+1}/z^{L+1} for the even tail (L = len(a))
    mu = 4.0 * nu * nu
    L = len(a)
    a_odd = abs(a[-1]) * abs(mu - (2.0 * L - 1.0) ** 2) / (L * 8.0)
    a_even = a_odd * abs(mu - (2.0 * L + 1.0) ** 2) / ((L + 1) * 8.0)
    rem = amp * (a_odd / z ** L + a_even / z ** (L + 1))
    return J, rem


def family_norm(c: float, K: int = DEFAULT_K) -> tuple[float, float]:
    """Value and certified tail of the squared autoconvolution norm of f_c.

    The value is 1/2 plus the K-term series; the tail covers the
    discarded k > K terms by the envelope bound, the asymptotic-expansion
    remainders for the evaluated terms, and the rounding budget, so
    value + tail is a certified upper bound on the true norm.
    """
    p = family_params(c, K)
    K = int(K)
    if K < 10:
        raise ValueError("K must be >= 10")
    pref = (math.pi ** (4.0 * p.c) * gamma_fn(2.0 - 2.0 * p.c) ** 4
            / gamma_fn(1.0 - p.c) ** 4)

    head_top = min(K, _K_ASYMPTOTIC - 1)
    parts = []
    abs_parts = []
    err = 0.0
    kk = np.arange(1, head_top + 1, dtype=np.float64)
    head_J = np.array([_bessel_series(p.nu, math.pi * k / 2.0)
                       for k in range(1, head_top + 1)])
    head_terms = head_J ** 4 / kk ** (2.0 - 4.0 * p.c)
    parts.append(csum(head_terms))
    abs_parts.append(csum(np.abs(head_terms)))

    chunk = 1_000_000
    for k0 in range(_K_ASYMPTOTIC, K + 1, chunk):
        k1 = min(k0 + chunk - 1, K)
        karr = np.arange(k0, k1 + 1, dtype=np.int64)
        J, rem = bessel_j_quarterpi(p.nu, karr)
        kf = karr.astype(np.float64)
        w = kf ** (4.0 * p.c - 2.0)
        terms = J ** 4 * w
        parts.append(csum(terms))
        abs_parts.append(csum(np.abs(terms)))
        err += float(csum(4.0 * np.abs(J) ** 3 * rem * w))

    series = math.fsum(parts)
    n_terms = K
    fp = n_terms * EPS * math.fsum(abs_parts)

    # envelope tail: J^4 <= (2/(pi z))^2 = 16/(pi^4 k^2) at z = pi k/2
    expo = 3.0 - 4.0 * p.c
    env_tail = (16.0 / math.pi ** 4) * K ** (-expo) / expo

    value = 0.5 + pref * series
    tail = pref * (env_tail + err + fp) + 4.0 * EPS * max(1.0, abs(value))
    return value, tail


def optimize_c(interval: tuple[float, float], K: int = DEFAULT_K
               ) -> tuple[float, float]:
    """Golden-section minimization of the family norm over c.

    Tolerance 1e-4 in c; returns the best evaluated (c, value).
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not (0.0 <= lo < hi <= C_MAX):
        raise ValueError(f"interval must lie inside [0, {C_MAX}]")
    return golden_section_minimize(lambda c: family_norm(c, K)[0],
                                   lo, hi, tol=1e-4)
