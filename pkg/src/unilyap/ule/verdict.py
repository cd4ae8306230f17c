"""Result types shared by the decision procedures."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

DEFAULT_TOL = 1e-8


class Decision(str, enum.Enum):
    YES = "Yes"
    NO = "No"
    INCONCLUSIVE = "Inconclusive"


def classify(residual: float, tol: float) -> Decision:
    """Three-way tolerance policy: ``<= tol`` Yes, ``> 10 tol`` No, otherwise Inconclusive."""
    if residual <= tol:
        return Decision.YES
    if residual > 10 * tol:
        return Decision.NO
    return Decision.INCONCLUSIVE


@dataclass(frozen=True)
class PressureReport:
    """Pressures at ``q = 2, 4, 6`` and the convexity defect ``p2 + p6 - 2 p4``."""

    p2: float
    p4: float
    p6: float

    @property
    def defect(self) -> float:
        return self.p2 + self.p6 - 2.0 * self.p4

    def to_dict(self) -> dict:
        return {"p2": self.p2, "p4": self.p4, "p6": self.p6, "defect": self.defect}


def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "-inf" if x < 0 else "inf"
    return x


@dataclass(frozen=True)
class UleVerdict:
    """Outcome of one criterion.

    Attributes
    ----------
    decision : Decision
    method : str
        ``"A"``, ``"A-fast"`` or ``"B"``.
    lam : float or None
        Growth rate ``λ`` of nonzero products, present iff Yes.
    r_value : float or None
        ``r(M)`` when it is defined (nonnegative positively irreducible input).
    residual : float
        Criterion A: worst residual of the best block.  Criterion B: ``|defect|``.
    block_residuals : dict
        Criterion A only: block index -> worst residual over the checked words.
    witness_block : int or None
        Block satisfying the identity (criterion A Yes).
    counterexample : tuple of int or None
        Criterion A No: the word with the largest residual in the best block.
    pressures : PressureReport or None
        Criterion B only.
    c_emp : float or None
        Empirical constant ``max/min`` of ``||M_J|| e^{-λ|J|}`` over the norm
        profile, reported with Yes verdicts.
    exact : bool
        True when the identity was decided in rational arithmetic.
    notes : tuple of str
    """

    decision: Decision
    method: str
    lam: float | None = None
    r_value: float | None = None
    residual: float = math.nan
    block_residuals: dict = field(default_factory=dict)
    witness_block: int | None = None
    counterexample: tuple | None = None
    pressures: PressureReport | None = None
    c_emp: float | None = None
    exact: bool = False
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "decision": self.decision.value,
            "method": self.method,
            "lambda": _num(self.lam),
            "r": _num(self.r_value),
            "residual": _num(self.residual),
            "block_residuals": {str(i): _num(v) for i, v in sorted(self.block_residuals.items())},
            "witness_block": self.witness_block,
            "counterexample": list(self.counterexample) if self.counterexample is not None else None,
            "pressures": self.pressures.to_dict() if self.pressures is not None else None,
            "c_emp": _num(self.c_emp),
            "exact": self.exact,
            "notes": list(self.notes),
        }
