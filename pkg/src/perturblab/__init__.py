"""Numerical laboratory for Hoelder-type perturbation bounds of functions of
self-adjoint, unitary and contractive matrices in Schatten-class ideals."""

from ._backend import BACKEND
from .linalg_core import (
    ConvergenceError, EigenSystem, Rng, SingularSpectrum, eig_hermitian, eig_unitary, rand_operator, svd,
)
from .trigpoly import TrigPoly
from .funcalc import CapabilityError, LineFn, LinePoly, LineTrig, apply_fn, doi, moi
from .schatten import IdealSpec, schatten_norm
from .besov import lambda_seminorm
from .experiments import Config, ConfigError

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CapabilityError", "Config", "ConfigError", "ConvergenceError", "EigenSystem", "IdealSpec",
    "LineFn", "LinePoly", "LineTrig", "Rng", "SingularSpectrum", "TrigPoly", "apply_fn", "doi",
    "eig_hermitian", "eig_unitary", "lambda_seminorm", "moi", "rand_operator", "schatten_norm", "svd",
]
