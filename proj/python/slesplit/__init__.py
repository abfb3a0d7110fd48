"""Splitting simulation of Loewner traces."""

from ._core import (
    IoError,
    NumericError,
    SleError,
    ValidationError,
    __version__,
    box_dimension,
    closed_form_moments,
    convergence_study,
    dimension_sweep,
    forward_point,
    power_interpolate,
    quadrature_moments,
    run_cli,
    sample_driving,
    simulate,
    sle_step,
    slit_forward,
    slit_reverse,
    sqrt_h,
    sup_distance,
    yardstick_dimension,
)

__all__ = [
    "IoError",
    "NumericError",
    "SleError",
    "ValidationError",
    "__version__",
    "box_dimension",
    "closed_form_moments",
    "convergence_study",
    "dimension_sweep",
    "forward_point",
    "power_interpolate",
    "quadrature_moments",
    "run_cli",
    "sample_driving",
    "simulate",
    "sle_step",
    "slit_forward",
    "slit_reverse",
    "sqrt_h",
    "sup_distance",
    "yardstick_dimension",
]
