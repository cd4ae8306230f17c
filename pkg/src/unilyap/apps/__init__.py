"""Application pipelines built on the uniform-exponent decision."""

from .carpet import CarpetInput, CarpetReport, build_E, carpet_check, fiber_counts
from .self_affine import (
    FourierReport,
    SelfAffineInput,
    SelfAffineReport,
    fourier_diagnostic,
    self_affine_build,
    self_affine_check,
)
from .self_similar import SelfSimilarInput, SelfSimilarReport, self_similar_check

__all__ = [
    "CarpetInput",
    "CarpetReport",
    "FourierReport",
    "SelfAffineInput",
    "SelfAffineReport",
    "SelfSimilarInput",
    "SelfSimilarReport",
    "build_E",
    "carpet_check",
    "fiber_counts",
    "fourier_diagnostic",
    "self_affine_build",
    "self_affine_check",
    "self_similar_check",
]
