"""Laplacian-smoothed gradient descent: operators, theory checks, optimizers, benchmarks."""

from lsopt.smoothing import (
    DimensionError,
    SmootherPlan,
    StencilCoefficients,
    apply_forward,
    apply_inverse,
    apply_inverse_sqrt,
    backward_difference,
    build_plan,
    build_stencil,
    dense_operator,
    dense_solve_oracle,
    forward_difference,
    fourier_transform,
    inverse_fourier_transform,
    spectrum,
    wrap_stencil,
)

__version__ = "0.1.0"
