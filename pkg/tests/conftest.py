"""Shared fixtures and independent numerical oracles.

The oracles here deliberately avoid the library's Fourier-side formulas:
convolutions are integrated directly with Gauss-Legendre nodes from the
pointwise cosine series, so agreement with the spectral identities is a
genuine cross-check.
"""

import math

import numpy as np
import pytest

from autoconv.spectral import FourierCoefficients, build_coefficients

# Reference nearly-optimal degree-20 cosine coefficients (alternating
# signs, slowly decaying magnitudes); used as a realistic test vector and
# as the comparison target for low-degree solves.
REF20 = [
    -0.297647135, 0.216257252, -0.178150116, 0.154960786, -0.138963721,
    0.12707629, -0.117795585, 0.11029022, -0.104058086, 0.09877573,
    -0.094224143, 0.090249054, -0.086738237, 0.083607805, -0.080793794,
    0.07824618, -0.075925462, 0.073799849, -0.071843457, 0.0700349,
]


@pytest.fixture(scope="session")
def ref20() -> FourierCoefficients:
    return build_coefficients(REF20)


def eval_f(f: FourierCoefficients, x):
    """Pointwise cosine series, independent of library helpers."""
    x = np.asarray(x, dtype=np.float64)
    out = np.ones_like(x)
    for k in range(1, f.T + 1):
        out = out + 2.0 * f.values[k - 1] * np.cos(2.0 * math.pi * k * x)
    return out


def conv_direct(f: FourierCoefficients, x: float, n: int = 256) -> float:
    """(f*f)(x) by Gauss-Legendre integration over the support overlap."""
    lo, hi = max(-0.5, x - 0.5), min(0.5, x + 0.5)
    if hi <= lo:
        return 0.0
    nodes, weights = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
    vals = eval_f(f, t) * eval_f(f, x - t)
    return 0.5 * (hi - lo) * float(np.dot(weights, vals))


def conv_sq_integral(f: FourierCoefficients, n_outer: int = 220,
                     n_inner: int = 256) -> float:
    """integral over [-1,1] of (f*f)^2 by two nested quadratures."""
    nodes, weights = np.polynomial.legendre.leggauss(n_outer)
    # (f*f) is even; integrate over [0,1] and double
    x = 0.5 * nodes + 0.5
    vals = np.array([conv_direct(f, xi, n_inner) ** 2 for xi in x])
    return 2.0 * 0.5 * float(np.dot(weights, vals))


def rng_coeffs(rng: np.random.Generator, T: int, scale: float = 0.5):
    return build_coefficients(rng.uniform(-scale, scale, size=T))


def pytest_addoption(parser):
    parser.addoption("--skip-slow", action="store_true", default=False,
                     help="skip the long-running solves and scans")


@pytest.fixture(scope="session")
def solved(request):
    """Solutions at T in {20, 100, 300}, R = 4000, solved once per session."""
    from autoconv.solver import SolverConfig, solve, warm_start_extend
    if request.config.getoption("--skip-slow"):
        pytest.skip("slow solves disabled")
    out = {}
    prev = None
    for T in (20, 100, 300):
        init = None if prev is None else warm_start_extend(prev, T)
        cfg = SolverConfig(T=T, R=4000, init=init)
        out[T] = solve(cfg)
        prev = out[T]
    return out
