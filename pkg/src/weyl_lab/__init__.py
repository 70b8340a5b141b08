"""Exact eigenvalue counting, spectral zeta values and Weyl remainders for model operators."""

from __future__ import annotations

__version__ = "0.1.0"

from .asymptotics import (
    AsymptoticLaw,
    Case,
    DominanceData,
    SharpnessReport,
    asymptotic_law,
    classify,
    fit_exponent,
    leading_coefficient,
    remainder_series,
    sharpness_suite,
)
from .counting import (
    CountingSample,
    PartialZetaSample,
    count,
    count_a1_closed,
    count_single,
    count_tensor_bruteforce,
    count_tensor_recursive,
    partial_zeta,
    product_partial_zeta,
)
from .divisor import (
    DivisorQuery,
    anisotropic_count,
    anisotropic_main_term,
    dirichlet_main_term,
    divisor_summatory,
)
from .errors import (
    BudgetExceeded,
    CountOverflowError,
    DivergenceError,
    DomainError,
    InsufficientData,
    MixedCalculusError,
    OperatorSyntaxError,
    PoleError,
    SymmetricCaseError,
    ToleranceUnreachable,
    WeylLabError,
)
from .grid import GridSpec, parse_grid
from .parser import parse_operator, render
from .spectra import (
    SpectrumTransform,
    TensorOperator,
    a1_spectrum,
    a2_spectrum,
    harmonic_oscillator,
    hermite_spectrum,
    sphere_laplacian_shifted,
)
from .zeta import ZetaValue, euler_mascheroni, riemann_zeta, spectral_zeta
