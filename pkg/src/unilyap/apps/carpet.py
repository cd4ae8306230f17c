"""Projection of the Parry measure of an SFT under a one-block factor map.

For a 0-1 matrix ``A`` on states ``0..n-1`` and a labelling ``tau`` into
``0..m-1``, the matrices ``E_l[i, j] = A[i, j]`` if ``tau(j) == l`` (else 0)
sum to ``A``.  The Parry measure of ``Σ_A`` projects to the Parry measure of
the image sofic shift iff ``E`` has a uniform exponent modulo 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractViolation, InputDataError, InternalConsistencyError, ResourceError
from ..matcore import DEFAULT_KRON_CAP, MatTuple, is_strongly_connected
from ..symdyn import build_support_automaton, sft_entropy, sofic_entropy
from ..ule import UleVerdict, criterion_A, criterion_A_fast, criterion_B
from ..ule.verdict import DEFAULT_TOL, Decision

FIBER_BUDGET = 2**16


@dataclass(frozen=True)
class CarpetInput:
    """An irreducible SFT ``A`` (0-1, ``n x n``) and labels ``tau[j]`` in ``0..m-1``.

    Unused labels are dropped and the rest renumbered in increasing order,
    with a warning; ``label_map`` records old label -> new label.
    """

    A: np.ndarray
    tau: tuple[int, ...]
    m: int
    label_map: dict[int, int] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    @classmethod
    def create(cls, A, tau, m: int | None = None) -> "CarpetInput":
        A = np.asarray(A)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise InputDataError("A must be a nonempty square matrix")
        if ((A != 0) & (A != 1)).any():
            raise InputDataError("A must be a 0-1 matrix")
        n = A.shape[0]
        tau = [int(t) for t in tau]
        if len(tau) != n:
            raise InputDataError(f"tau has {len(tau)} labels for {n} states")
        if any(t < 0 for t in tau):
            raise InputDataError("labels must be nonnegative")
        if m is None:
            m = max(tau) + 1
        if any(t >= m for t in tau):
            raise InputDataError(f"labels must lie in 0..{m - 1}")
        if not is_strongly_connected(A):
            raise ContractViolation("A is not positively irreducible")
        used = sorted(set(tau))
        notes = []
        if len(used) < m:
            unused = sorted(set(range(m)) - set(used))
            msg = f"labels {unused} are not used by tau; label set compacted to {len(used)} labels"
            warnings.warn(msg)
            notes.append(msg)
        label_map = {old: new for new, old in enumerate(used)}
        A = A.astype(np.int64)
        A.setflags(write=False)
        return cls(A, tuple(label_map[t] for t in tau), len(used), label_map, tuple(notes))

    @property
    def n(self) -> int:
        return self.A.shape[0]


def build_E(inp: CarpetInput) -> MatTuple:
    """The tuple ``E_0..E_{m-1}`` with exact integer entries."""
    tau = np.array(inp.tau)
    mats = []
    for label in range(inp.m):
        e = np.where(tau[None, :] == label, inp.A, 0)
        mats.append([[int(x) for x in row] for row in e])
    E = MatTuple.from_entries(mats)
    total = sum(np.array(m, dtype=np.int64) for m in mats)
    if not np.array_equal(total, inp.A):
        raise InternalConsistencyError("the E matrices do not sum to A")
    return E


def fiber_counts(inp: CarpetInput, depth: int) -> dict[tuple[int, ...], int]:
    """``N(y) = #{admissible x of length |y| with tau(x) = y}`` for label words up to ``depth``.

    Counted by extending admissible state paths one step at a time, keyed by
    (label word, last state); words with no admissible path are absent.
    """
    A = inp.A
    tau = inp.tau
    level: dict[tuple[tuple[int, ...], int], int] = {((tau[x],), x): 1 for x in range(inp.n)}
    out: dict[tuple[int, ...], int] = {}
    for n in range(1, depth + 1):
        for (y, _), c in level.items():
            out[y] = out.get(y, 0) + c
        if n == depth:
            break
        nxt: dict[tuple[tuple[int, ...], int], int] = {}
        for (y, last), c in level.items():
            for x in np.nonzero(A[last])[0]:
                key = (y + (tau[x],), int(x))
                nxt[key] = nxt.get(key, 0) + c
        level = nxt
    return out


@dataclass(frozen=True)
class FiberCheck:
    depth: int
    words_checked: int
    sandwich_ok: bool
    zero_pattern_ok: bool
    violations: tuple[tuple[int, ...], ...] = ()

    @property
    def ok(self) -> bool:
        return self.sandwich_ok and self.zero_pattern_ok

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "words_checked": self.words_checked,
            "sandwich_ok": self.sandwich_ok,
            "zero_pattern_ok": self.zero_pattern_ok,
            "violations": [list(v) for v in self.violations[:10]],
        }


def check_fibers(inp: CarpetInput, E: MatTuple, depth: int = 8) -> FiberCheck:
    """Exact check of ``N(y) <= ||E_y|| <= n² N(y)`` and ``E_y = 0 iff N(y) = 0``.

    Covers every label word of length ``<= depth`` (reduced so that at most
    ``FIBER_BUDGET`` words of the longest length are formed).
    """
    while depth > 1 and inp.m**depth > FIBER_BUDGET:
        depth -= 1
    counts = fiber_counts(inp, depth)
    mats = [np.array(m, dtype=object).astype(np.int64) for m in E.exact]
    n2 = inp.n**2
    sandwich, zeros, bad = True, True, []
    checked = 0
    level = [((j,), mats[j]) for j in range(inp.m)]
    for n in range(1, depth + 1):
        for y, prod in level:
            checked += 1
            nrm = int(prod.sum())
            N = counts.get(y, 0)
            if (nrm == 0) != (N == 0):
                zeros = False
                bad.append(y)
            elif not N <= nrm <= n2 * N:
                sandwich = False
                bad.append(y)
        if n < depth:
            level = [(y + (j,), prod @ mats[j]) for y, prod in level for j in range(inp.m)]
    return FiberCheck(depth, checked, sandwich, zeros, tuple(bad))


@dataclass(frozen=True)
class CarpetReport:
    E: MatTuple
    verdict: UleVerdict
    verdict_B: UleVerdict | None
    conclusion: str
    h_sigma: float
    h_Y: float
    fibers: FiberCheck
    notes: tuple[str, ...] = ()

    @property
    def decision(self) -> Decision:
        return self.verdict.decision

    def to_dict(self) -> dict:
        return {
            "decision": self.decision.value,
            "conclusion": self.conclusion,
            "E": self.E.to_jsonable(),
            "criterion_A": self.verdict.to_dict(),
            "criterion_B": self.verdict_B.to_dict() if self.verdict_B is not None else None,
            "h_top_sigma": self.h_sigma,
            "h_top_Y": self.h_Y,
            "alpha": math.exp(self.h_sigma),
            "beta": math.exp(self.h_Y),
            "fibers": self.fibers.to_dict(),
            "notes": list(self.notes),
        }


def carpet_check(
    inp: CarpetInput,
    tol: float = DEFAULT_TOL,
    mode: str = "rational",
    kron_cap: int = DEFAULT_KRON_CAP,
    fiber_depth: int = 8,
    profile_depth: int | None = 12,
) -> CarpetReport:
    """Decide whether the Parry measure of ``Σ_A`` projects to the Parry measure of ``tau(Σ_A)``.

    Criterion A decides, on the fast path when enumerating 𝒥 is over the
    cap; criterion B runs as a cross-check when ``n^6`` is
    within ``kron_cap`` and is skipped with a note otherwise.
    """
    E = build_E(inp)
    notes = list(inp.warnings)
    try:
        verdict = criterion_A(E, tol=tol, mode=mode, profile_depth=profile_depth)
    except ResourceError as exc:
        notes.append(f"criterion A used the fast path: {exc}")
        verdict = criterion_A_fast(E, tol=tol, mode=mode, profile_depth=profile_depth)
    notes.extend(verdict.notes)
    verdict_B = None
    try:
        verdict_B = criterion_B(E, tol=tol, kron_cap=kron_cap, profile_depth=None)
    except ResourceError as exc:
        notes.append(f"criterion B skipped: {exc}")
    if verdict_B is not None and {verdict.decision, verdict_B.decision} == {Decision.YES, Decision.NO}:
        raise InternalConsistencyError("criteria A and B disagree on the carpet tuple")
    h_sigma = sft_entropy(inp.A)
    h_Y = sofic_entropy(build_support_automaton(E))
    fibers = check_fibers(inp, E, fiber_depth)
    if not fibers.ok:
        raise InternalConsistencyError(f"fiber count sandwich fails for {fibers.violations[:3]}")
    if verdict.decision is Decision.YES:
        conclusion = "Parry measure projects to Parry measure (dims coincide)"
    elif verdict.decision is Decision.NO:
        conclusion = "Parry measure does not project to Parry measure"
    else:
        conclusion = "undecided within tolerance"
    return CarpetReport(E, verdict, verdict_B, conclusion, h_sigma, h_Y, fibers, tuple(notes))
