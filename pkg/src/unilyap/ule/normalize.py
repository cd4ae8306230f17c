"""The normalizing constant ``r(M)`` and the normalized tuple ``M / r(M)``."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..errors import ContractViolation
from ..matcore import MatTuple, condense, is_positively_irreducible, spectral_radius
from ..rational import common_denominator, nullspace
from ..symdyn import SupportAutomaton, build_support_automaton, sofic_entropy


def require_positively_irreducible(M: MatTuple) -> None:
    if not M.is_nonnegative():
        raise ContractViolation("this operation needs a nonnegative tuple")
    if not is_positively_irreducible(M):
        raise ContractViolation("the tuple is not positively irreducible")


def r_of(M: MatTuple, tol: float = 1e-13) -> float:
    """``r(M) = ρ(M_0 + ... + M_{k-1}) / exp(h_top(Y_M))``.

    Raises
    ------
    ContractViolation
        If ``M`` is not nonnegative and positively irreducible.
    DegenerateLanguageError
        If every long product vanishes.
    """
    require_positively_irreducible(M)
    rho = spectral_radius(M.total(), tol=tol)
    h = sofic_entropy(build_support_automaton(M), tol=tol)
    return math.exp(math.log(rho) - h)


def exact_perron_root(a, approx: float) -> Fraction | None:
    """The Perron root of an irreducible nonnegative rational matrix, if rational.

    A rational Perron root of ``a`` is ``c / L`` with ``L`` the common
    denominator and ``c`` an integer (an algebraic integer that is rational).
    The candidate nearest to ``approx`` is accepted iff ``a - (c/L) I`` has a
    one-dimensional kernel spanned by a strictly positive vector, which
    characterizes the Perron root exactly.
    """
    a = np.asarray(a, dtype=object)
    n = a.shape[0]
    den = common_denominator(a)
    cand = round(approx * den)
    if cand <= 0:
        return None
    root = Fraction(cand, den)
    shifted = a - np.diag([root] * n)
    kernel = nullspace(shifted)
    if len(kernel) != 1:
        return None
    vec = kernel[0]
    if all(x > 0 for x in vec) or all(x < 0 for x in vec):
        return root
    return None


def _dominant_block(aut: SupportAutomaton) -> tuple[np.ndarray, float] | None:
    adj = aut.adjacency
    cond = condense(adj)
    best, best_rho = None, 0.0
    for comp, trivial in zip(cond.order, cond.trivial_zero):
        if trivial:
            continue
        idx = np.array(comp)
        rho = spectral_radius(adj[np.ix_(idx, idx)].astype(float))
        if rho > best_rho:
            best, best_rho = idx, rho
    if best is None:
        return None
    return adj[np.ix_(best, best)].astype(object), best_rho


def same_perron_root(x, y) -> bool:
    """Exact test ``ρ(x) == ρ(y)`` for irreducible nonnegative rational matrices.

    ``Z`` with ``x Z = Z yᵀ`` and ``Z > 0`` exists iff the Perron roots agree:
    ``u_x u_yᵀ`` is such a ``Z``, and conversely ``v_xᵀ Z`` is a positive
    eigenvector of ``y`` for ``ρ(x)``.  Decided only when that kernel is
    one-dimensional; a larger kernel returns False.
    """
    x = np.asarray(x, dtype=object)
    y = np.asarray(y, dtype=object)
    a, b = x.shape[0], y.shape[0]
    # vec(x Z - Z yᵀ) = (x ⊗ I - I ⊗ y) vec(Z) in row-major order.
    op = np.kron(x, np.eye(b, dtype=int).astype(object)) - np.kron(np.eye(a, dtype=int).astype(object), y)
    kernel = nullspace(op)
    if len(kernel) != 1:
        return False
    vec = kernel[0]
    return all(v > 0 for v in vec) or all(v < 0 for v in vec)


MAX_EXACT_KRON = 64


def exact_r(M: MatTuple) -> Fraction | None:
    """``r(M)`` as a Fraction when it is rational and certifiable, else None.

    Only tuples carrying exact entries qualify.  The usual route finds both
    ``ρ(ΣM)`` and the entropy base ``e^h`` rational.  Otherwise a rational
    candidate near the float value is certified by :func:`same_perron_root`
    when the matrices involved are small.
    """
    require_positively_irreducible(M)
    if M.exact is None:
        return None
    total = M.exact_total()
    rho_f = spectral_radius(M.total())
    dom = _dominant_block(build_support_automaton(M))
    if dom is None:
        return None
    block, beta_f = dom
    rho = exact_perron_root(total, rho_f)
    beta = exact_perron_root(block, beta_f)
    if rho is not None and beta is not None:
        return rho / beta
    if M.d * block.shape[0] > MAX_EXACT_KRON:
        return None
    r_f = rho_f / beta_f
    cand = Fraction(r_f).limit_denominator(10**6)
    if abs(float(cand) - r_f) > 1e-9 * r_f or cand <= 0:
        return None
    if same_perron_root(total / cand, block):
        return cand
    return None


def normalize(M: MatTuple, tol: float = 1e-13, exact: bool = False) -> MatTuple:
    """The tuple ``M / r(M)``, which has ``r = 1``.

    With ``exact=True`` the result keeps rational entries when ``r(M)`` is
    rational; otherwise the float quotient is returned.
    """
    if exact:
        r = exact_r(M)
        if r is not None:
            return M.scaled(1 / r)
    return M.scaled(1.0 / r_of(M, tol=tol))
