"""Certified bounds on the minimum squared L2 norm of an autoconvolution.

Library layout:

- :mod:`autoconv.spectral`: coefficient vectors, the truncated objective,
  gradients, period-2 spectra, convolution curves, flatness diagnostics.
- :mod:`autoconv.solver`: limited-memory quasi-Newton minimization of the
  truncated objective over degree-T candidates.
- :mod:`autoconv.certify`: rigorous upper and lower bound certificates
  with explicit truncation and rounding budgets.
- :mod:`autoconv.family`: the one-parameter singular-endpoint family of
  near optimizers and its Bessel-series norm.
- :mod:`autoconv.discrete`: additive-energy checks and density-constant
  formulas for representation-bounded integer sets.
- :mod:`autoconv.cli`: command-line front end (`autoconv ...`).
"""

from .spectral import (
    FourierCoefficients,
    ObjectiveBreakdown,
    PeriodTwoSpectrum,
    FlatnessReport,
    build_coefficients,
    odd_channel,
    objective,
    gradient,
    period2_spectrum,
    autoconvolution_curve,
    threefold_flatness,
)
from .solver import SolverConfig, FourierSolution, solve, warm_start_extend
from .certify import (
    BoundCertificate,
    DualSpectrum,
    upper_bound,
    dual_spectrum,
    lower_bound,
    optimize_alpha,
)
from .family import FamilyParams, bessel_j, family_norm, optimize_c
from .discrete import (
    WeightSequence,
    EnergyReport,
    SigmaBounds,
    additive_energy,
    step_embedding,
    sigma_bounds,
)

__version__ = "0.1.0"
