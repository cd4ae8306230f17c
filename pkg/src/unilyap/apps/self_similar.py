"""Self-similar measures of finite type, given their transfer matrices.

The input tuple ``M`` is assumed to come from a finite-type construction
with contraction ratio ``rho``; the language of nonzero products is then the
symbolic coding, and ``s = h / log(1/rho)`` is the dimension of the attractor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InputDataError
from ..matcore import MatTuple, is_positively_irreducible
from ..symdyn import build_support_automaton, sofic_entropy
from ..ule import UleVerdict, criterion_A
from ..ule.verdict import DEFAULT_TOL, Decision

CAVEAT = (
    "verdicts describe the supplied matrices; they concern a measure only if the "
    "matrices arise from a genuine finite-type construction"
)


@dataclass(frozen=True)
class SelfSimilarInput:
    M: MatTuple
    rho: float

    def __post_init__(self):
        if not 0 < self.rho < 1:
            raise InputDataError("rho must lie in (0, 1)")
        if not self.M.is_nonnegative() or not is_positively_irreducible(self.M):
            raise InputDataError("M must be nonnegative and positively irreducible")


@dataclass(frozen=True)
class SelfSimilarReport:
    verdict_Hs: Decision
    verdict_Leb: Decision
    s: float
    h: float
    criterion: UleVerdict
    caveat: str = CAVEAT

    def to_dict(self) -> dict:
        return {
            "verdict_Hs": self.verdict_Hs.value,
            "verdict_Leb": self.verdict_Leb.value,
            "s": self.s,
            "h_top": self.h,
            "r": self.criterion.r_value,
            "lambda": self.criterion.lam,
            "criterion_A": self.criterion.to_dict(),
            "caveat": self.caveat,
        }


def self_similar_check(inp: SelfSimilarInput, tol: float = DEFAULT_TOL, mode: str = "float") -> SelfSimilarReport:
    """Absolute continuity with respect to ``H^s`` on the attractor and to Lebesgue measure.

    ``verdict_Hs`` is criterion A on ``M``.  ``verdict_Leb`` additionally
    needs ``|h - log(1/rho)| < tol``; an entropy mismatch makes it No
    whatever the criterion says.
    """
    h = sofic_entropy(build_support_automaton(inp.M))
    log_inv = math.log(1.0 / inp.rho)
    s = h / log_inv
    verdict = criterion_A(inp.M, tol=tol, mode=mode)
    hs = verdict.decision
    if abs(h - log_inv) >= tol:
        leb = Decision.NO
    else:
        leb = hs
    return SelfSimilarReport(hs, leb, s, h, verdict)
