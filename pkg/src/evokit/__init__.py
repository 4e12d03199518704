"""evokit: spectral space-time solvers for evolutionary equations."""

__version__ = "0.1.0"

from . import errors
from ._kernels import backend
from .time_calculus import (
    Signal,
    Spectrum,
    TimeGrid,
    convolve,
    derive,
    fourier_laplace,
    fractional_power,
    integrate,
    inv_fourier_laplace,
    translate,
    weighted_inner,
    weighted_norm,
)

__all__ = [
    "Signal",
    "Spectrum",
    "TimeGrid",
    "backend",
    "convolve",
    "derive",
    "errors",
    "fourier_laplace",
    "fractional_power",
    "integrate",
    "inv_fourier_laplace",
    "translate",
    "weighted_inner",
    "weighted_norm",
]
