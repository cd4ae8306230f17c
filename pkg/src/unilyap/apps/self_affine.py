"""Absolute continuity of integral self-affine measures.

The measure is the invariant measure of the maps ``x -> A^{-1}(x + d_j)``
with weights ``p_j``.  Given tile data (``n0``, tile digits ``c_k`` and the
translation set ``ℰ``), the transfer matrices are

    (M_k)[i, j] = sum of p_J over J in digits^{n0} with c_k + A^{n0} e_i - e_j = d_J,

where ``d_J = sum_k A^{n0-k} d_{j_k}`` and ``p_J`` is the product of weights.
The measure is absolutely continuous iff no product of the ``M_k`` vanishes
and the tuple has a uniform exponent modulo 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import InputDataError
from ..matcore import MatTuple, is_positively_irreducible
from ..rational import det as exact_det
from ..rational import parse_rational, rref
from ..symdyn import build_support_automaton
from ..ule import UleVerdict, criterion_A
from ..ule.verdict import DEFAULT_TOL, Decision


def _int_matrix(a, name: str) -> np.ndarray:
    arr = np.array(a, dtype=object)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InputDataError(f"{name} must be a square matrix")
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        if isinstance(x, bool) or int(x) != x:
            raise InputDataError(f"{name} must have integer entries")
        out[idx] = int(x)
    return out


def _int_vectors(vs, d: int, name: str) -> tuple[tuple[int, ...], ...]:
    out = []
    for v in vs:
        v = list(v) if not np.isscalar(v) else [v]
        if len(v) != d or any(isinstance(x, bool) or int(x) != x for x in v):
            raise InputDataError(f"{name} must be integer vectors of length {d}")
        out.append(tuple(int(x) for x in v))
    return tuple(out)


def _mat_vec(a, v) -> tuple:
    return tuple(sum(a[i, j] * v[j] for j in range(len(v))) for i in range(len(v)))


def _mat_pow(a, n: int) -> np.ndarray:
    d = a.shape[0]
    out = np.array([[int(i == j) for j in range(d)] for i in range(d)], dtype=object)
    for _ in range(n):
        out = out.dot(a)
    return out


@dataclass(frozen=True)
class SelfAffineInput:
    """Validated self-affine data; see the module docstring for the roles."""

    A: np.ndarray
    digits: tuple[tuple[int, ...], ...]
    weights: tuple[Fraction, ...]
    n0: int
    tile_digits: tuple[tuple[int, ...], ...]
    translations: tuple[tuple[int, ...], ...]

    @classmethod
    def create(cls, A, digits, weights, n0, tile_digits, translations) -> "SelfAffineInput":
        A = _int_matrix(A, "A")
        d = A.shape[0]
        digits = _int_vectors(digits, d, "digits")
        if not digits:
            raise InputDataError("at least one digit is needed")
        try:
            weights = tuple(parse_rational(p) for p in weights)
        except ValueError as exc:
            raise InputDataError(f"weights must be exact rationals: {exc}") from exc
        if len(weights) != len(digits):
            raise InputDataError("one weight per digit is needed")
        if any(p <= 0 for p in weights) or sum(weights) != 1:
            raise InputDataError("weights must be positive and sum to 1")
        n0 = int(n0)
        if n0 < 1:
            raise InputDataError("n0 must be a positive integer")
        eig = np.linalg.eigvals(A.astype(float))
        if not (np.abs(eig) > 1).all():
            raise InputDataError("A is not expanding")
        ell = abs(exact_det(A)) ** n0
        tile_digits = _int_vectors(tile_digits, d, "tile_digits")
        if len(tile_digits) != ell:
            raise InputDataError(f"expected |det A|^n0 = {ell} tile digits, got {len(tile_digits)}")
        translations = _int_vectors(translations, d, "translations")
        if not translations or len(set(translations)) != len(translations):
            raise InputDataError("translations must be distinct and nonempty")
        A.setflags(write=False)
        return cls(A, digits, weights, n0, tile_digits, translations)

    @property
    def d(self) -> int:
        return self.A.shape[0]


def _digit_weights(inp: SelfAffineInput) -> dict[tuple[int, ...], Fraction]:
    """``d_J -> sum of p_J`` over all words ``J`` of length ``n0``; repeated ``d_J`` add up."""
    powers = [_mat_pow(inp.A, inp.n0 - k) for k in range(1, inp.n0 + 1)]
    table: dict[tuple[int, ...], Fraction] = {}
    for word in itertools.product(range(len(inp.digits)), repeat=inp.n0):
        vec = [0] * inp.d
        p = Fraction(1)
        for pk, j in zip(powers, word):
            vec = [a + b for a, b in zip(vec, _mat_vec(pk, inp.digits[j]))]
            p *= inp.weights[j]
        key = tuple(vec)
        table[key] = table.get(key, Fraction(0)) + p
    return table


def self_affine_build(inp: SelfAffineInput) -> MatTuple:
    """The ``ℓ``-tuple of ``N x N`` transfer matrices, with exact entries.

    Raises
    ------
    InputDataError
        If ``sum_k M_k`` is not column-stochastic, i.e. the tile or
        translation data is inconsistent with the digits.
    """
    table = _digit_weights(inp)
    An0 = _mat_pow(inp.A, inp.n0)
    E = inp.translations
    N = len(E)
    mats = []
    for c in inp.tile_digits:
        m = np.empty((N, N), dtype=object)
        for i, ei in enumerate(E):
            shifted = _mat_vec(An0, ei)
            for j, ej in enumerate(E):
                key = tuple(c[t] + shifted[t] - ej[t] for t in range(inp.d))
                m[i, j] = table.get(key, Fraction(0))
        mats.append(m)
    total = sum(mats[1:], mats[0].copy())
    sums = [sum(total[:, j], Fraction(0)) for j in range(N)]
    if any(s != 1 for s in sums):
        raise InputDataError(f"column sums of the summed matrices are {[str(s) for s in sums]}, not all 1")
    return MatTuple.from_exact(mats)


@dataclass(frozen=True)
class SelfAffineReport:
    decision: Decision
    no_zero_products: bool
    verdict: UleVerdict
    failed: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "decision": self.decision.value,
            "absolutely_continuous": self.decision is Decision.YES,
            "no_zero_products": self.no_zero_products,
            "criterion_A": self.verdict.to_dict(),
            "failed_conjuncts": list(self.failed),
        }


def self_affine_check(M: MatTuple, tol: float = DEFAULT_TOL, mode: str = "rational") -> SelfAffineReport:
    """Absolute continuity: no product vanishes AND criterion A says Yes.

    Both conjuncts are always evaluated; ``failed`` names those that fail
    ("zero product" and/or "criterion A").
    """
    if not M.is_nonnegative() or not is_positively_irreducible(M):
        raise InputDataError("the transfer tuple must be nonnegative and positively irreducible")
    complete = build_support_automaton(M).is_complete()
    verdict = criterion_A(M, tol=tol, mode=mode)
    failed = []
    if not complete:
        failed.append("zero product")
    if verdict.decision is Decision.NO:
        failed.append("criterion A")
    if failed:
        decision = Decision.NO
    elif verdict.decision is Decision.YES:
        decision = Decision.YES
    else:
        decision = Decision.INCONCLUSIVE
    return SelfAffineReport(decision, complete, verdict, tuple(failed))


@dataclass(frozen=True)
class FourierReport:
    """Scan of the mask ``P(ξ) = Σ p_j exp(-2πi <ξ, d_j>)`` on ``ξ = Ã^{-n} m``.

    ``first_zero[m]`` is the least ``n`` with ``|P| < zero_tol`` (absent if
    none up to ``n_max``); ``no_zero`` lists the ``m`` without one.  This is
    a heuristic cross-check only.
    """

    box_radius: int
    n_max: int
    zero_tol: float
    first_zero: dict
    no_zero: tuple[tuple[int, ...], ...]

    def to_dict(self) -> dict:
        return {
            "heuristic": True,
            "box_radius": self.box_radius,
            "n_max": self.n_max,
            "zero_tol": self.zero_tol,
            "vectors_scanned": len(self.first_zero) + len(self.no_zero),
            "first_zero": {",".join(map(str, m)): n for m, n in sorted(self.first_zero.items())},
            "no_zero": [list(m) for m in self.no_zero],
        }


def mask_value(inp: SelfAffineInput, xi) -> complex:
    """``P(ξ)`` for a rational vector ``ξ``; phases are reduced mod 1 exactly."""
    total = 0j
    for p, dj in zip(inp.weights, inp.digits):
        phase = sum((Fraction(x) * y for x, y in zip(xi, dj)), Fraction(0)) % 1
        total += float(p) * complex(math.cos(2 * math.pi * phase), -math.sin(2 * math.pi * phase))
    return total


def _inverse(a) -> np.ndarray:
    d = a.shape[0]
    aug = np.empty((d, 2 * d), dtype=object)
    aug[:, :d] = a
    aug[:, d:] = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    red, _ = rref(aug)
    return red[:, d:]


def fourier_diagnostic(
    inp: SelfAffineInput, box_radius: int = 20, n_max: int = 50, zero_tol: float = 1e-10, vectors=None
) -> FourierReport:
    """Search each nonzero integer ``m`` (``||m||_∞ <= box_radius``) for a mask zero.

    ``vectors`` restricts the scan to the given integer vectors instead of the box.
    """
    inv_t = _inverse(inp.A.T)
    if vectors is None:
        rng = range(-box_radius, box_radius + 1)
        vectors = [v for v in itertools.product(rng, repeat=inp.d) if any(v)]
    first_zero, no_zero = {}, []
    for m in vectors:
        m = tuple(int(x) for x in (m if not np.isscalar(m) else [m]))
        xi = [Fraction(x) for x in m]
        found = None
        for n in range(1, n_max + 1):
            xi = list(inv_t.dot(np.array(xi, dtype=object)))
            if abs(mask_value(inp, xi)) < zero_tol:
                found = n
                break
        if found is None:
            no_zero.append(m)
        else:
            first_zero[m] = found
    return FourierReport(box_radius, n_max, zero_tol, first_zero, tuple(no_zero))
