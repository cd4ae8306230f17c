"""Decision procedures for uniform Lyapunov exponents modulo 0."""

from .criterion_a import criterion_A, criterion_A_fast
from .irreducibility import IrreducibilityResult, irreducibility_test
from .jset import IrredDecomposition, JSet, decompose, decompose_tuple, enumerate_J, jset_average
from .normalize import exact_r, normalize, r_of
from .pressure import criterion_B, pressure_estimate, pressure_even, pressure_report
from .profile import NormProfile, c_emp, norm_profile
from .verdict import DEFAULT_TOL, Decision, PressureReport, UleVerdict

__all__ = [
    "DEFAULT_TOL",
    "Decision",
    "IrredDecomposition",
    "IrreducibilityResult",
    "JSet",
    "NormProfile",
    "PressureReport",
    "UleVerdict",
    "c_emp",
    "criterion_A",
    "criterion_A_fast",
    "criterion_B",
    "decompose",
    "decompose_tuple",
    "enumerate_J",
    "exact_r",
    "irreducibility_test",
    "jset_average",
    "norm_profile",
    "normalize",
    "pressure_estimate",
    "pressure_even",
    "pressure_report",
    "r_of",
]
