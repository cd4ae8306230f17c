"""Pressure of matrix products and criterion B.

For even ``q`` the pressure is ``log ρ(Σ_i M_i^{⊗q})``.  The Kronecker sum is
evaluated on the symmetric tensors, an invariant subspace that carries the
spectral radius for even ``q`` (its matrix elements between ``x^{⊗q}`` and
``y^{⊗q}`` are sums of ``q``-th powers of ``xᵀ M_J y``), which turns a
``d^q`` square matrix into a ``C(d+q-1, q)`` square one.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ContractViolation, ResourceError
from ..matcore import DEFAULT_KRON_CAP, MatTuple, is_positively_irreducible, spectral_radius, symmetric_power_sum
from .irreducibility import irreducibility_test
from .normalize import r_of
from .parallel import map_ordered
from .profile import DEFAULT_WORD_CAP, c_emp as empirical_constant
from .verdict import DEFAULT_TOL, Decision, PressureReport, UleVerdict, classify

CHUNK = 2**16


def pressure_even(M: MatTuple, q: int, tol: float = 1e-13, cap: int = DEFAULT_KRON_CAP) -> float:
    """``P(M, q) = log ρ(Σ M_i^{⊗q})`` for even ``q``; ``-inf`` if that radius is 0.

    Raises
    ------
    ResourceError
        If ``d^q`` exceeds ``cap``.
    """
    if q < 2 or q % 2:
        raise ContractViolation("pressure_even needs an even q >= 2")
    rho = spectral_radius(symmetric_power_sum(M.mats, q, cap), tol=tol)
    return math.log(rho) if rho > 0 else -math.inf


def pressure_report(M: MatTuple, tol: float = 1e-13, cap: int = DEFAULT_KRON_CAP) -> PressureReport:
    return PressureReport(*(pressure_even(M, q, tol, cap) for q in (2, 4, 6)))


def _branch_sum(stack: np.ndarray, first: int, n: int, q: float) -> float:
    k = stack.shape[0]
    total = 0.0
    work = [(stack[first][None], n - 1)]
    while work:
        prods, rem = work.pop()
        if rem == 0:
            total += float((np.abs(prods).sum(axis=(1, 2)) ** q).sum())
            continue
        if len(prods) * k > CHUNK:
            half = len(prods) // 2
            # Pushed in reverse so chunks are consumed in word order.
            work.append((prods[half:], rem))
            work.append((prods[:half], rem))
            continue
        prods = np.einsum("nij,kjl->nkil", prods, stack).reshape(-1, *stack.shape[1:])
        work.append((prods, rem - 1))
    return total


def pressure_estimate(
    M: MatTuple, q: float, n: int, cap: int = DEFAULT_WORD_CAP, workers: int | None = None
) -> float:
    """The partial pressure ``(1/n) log Σ_{|J|=n} ||M_J||^q``.

    By submultiplicativity of the norm this is an upper bound of ``P(M, q)``
    for every ``n``.  Matrices are scaled by ``g = max_j ||M_j||`` during the
    sum to avoid overflow.

    Raises
    ------
    ResourceError
        If ``k^n`` exceeds ``cap``.
    """
    if q <= 0:
        raise ContractViolation("pressure_estimate needs q > 0")
    if n < 1:
        raise ContractViolation("pressure_estimate needs n >= 1")
    if M.k**n > cap:
        raise ResourceError(f"pressure estimate needs {M.k}^{n} words, above cap {cap}")
    g = max(float(np.abs(m).sum()) for m in M.mats)
    stack = np.stack(M.mats) / g
    parts = map_ordered(lambda j: _branch_sum(stack, j, n, q), range(M.k), workers)
    total = math.fsum(parts)
    if total == 0.0:
        return -math.inf
    return q * math.log(g) + math.log(total) / n


def criterion_B(
    M: MatTuple,
    tol: float = DEFAULT_TOL,
    kron_cap: int = DEFAULT_KRON_CAP,
    profile_depth: int | None = 12,
    irreducibility=None,
) -> UleVerdict:
    """Decide the property from the convexity defect ``P(2) + P(6) - 2 P(4)``.

    Yes iff ``|defect| <= tol``, No if ``|defect| > 10 tol``, otherwise
    Inconclusive; on Yes ``λ = (P(4) - P(2)) / 2``.  The criterion needs an
    irreducible or positively irreducible tuple: nonnegative tuples are
    checked for positive irreducibility, all others must be certified
    Irreducible by :func:`irreducibility_test` (or by the supplied
    ``irreducibility`` result), else a decided verdict becomes Inconclusive.

    Raises
    ------
    ResourceError
        If ``d^6`` exceeds ``kron_cap``.
    """
    notes = []
    r_value = None
    hypothesis = False
    if M.is_nonnegative() and is_positively_irreducible(M):
        hypothesis = True
        r_value = r_of(M)
    else:
        irr = irreducibility if irreducibility is not None else irreducibility_test(M)
        hypothesis = irr.irreducible
        if not hypothesis:
            notes.append(f"irreducibility not established ({irr.status}); verdict downgraded to Inconclusive")
    rep = pressure_report(M, cap=kron_cap)
    if any(math.isinf(p) for p in (rep.p2, rep.p4, rep.p6)):
        return UleVerdict(
            Decision.INCONCLUSIVE, "B", r_value=r_value, residual=math.nan, pressures=rep,
            notes=tuple(notes + ["a pressure is -inf (all long products vanish)"]),
        )
    defect = rep.defect
    decision = classify(abs(defect), tol)
    if not hypothesis:
        decision = Decision.INCONCLUSIVE
    lam = (rep.p4 - rep.p2) / 2.0 if decision is Decision.YES else None
    ce = None
    if decision is Decision.YES and profile_depth:
        ce = empirical_constant(M, lam, depth=profile_depth)
    return UleVerdict(
        decision=decision,
        method="B",
        lam=lam,
        r_value=r_value,
        residual=abs(defect),
        pressures=rep,
        c_emp=ce,
        notes=tuple(notes),
    )
