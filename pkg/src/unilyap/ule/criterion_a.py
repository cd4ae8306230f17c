"""Criterion A for nonnegative positively irreducible tuples.

After normalizing to ``r(M) = 1``, the tuple has a uniform exponent modulo 0
iff some nonzero diagonal block ``i`` of ``B`` satisfies
``v_iᵀ M_J^{(i)} u_i = 1`` for every ``J`` in ``𝒥``.

:func:`criterion_A` checks the identity word by word over an enumerated
``𝒥``.  :func:`criterion_A_fast` instead checks it on the affine hulls
``W_s`` of the points ``M_J w`` (``w`` the embedded ``u_i``, ``J`` ranging
over words with ``(M_J)_{s,0} > 0``), which close under left multiplication
after at most ``d²`` extensions and never require ``𝒥`` itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..matcore import MatTuple
from ..rational import rank
from .jset import (
    DEFAULT_MAX_WORDS,
    IrredDecomposition,
    decompose,
    decompose_tuple,
    enumerate_J,
    jset_average,
)
from .normalize import exact_r, r_of, require_positively_irreducible
from .profile import c_emp as empirical_constant
from .verdict import DEFAULT_TOL, Decision, UleVerdict, classify

EXACT_UNAVAILABLE = "rational mode unavailable (r(M) not certified rational or input not exact); decided in floating point"


@dataclass(frozen=True)
class _Setup:
    N: MatTuple
    r: float
    exact: bool
    notes: tuple[str, ...]


def _prepare(M: MatTuple, mode: str) -> _Setup:
    require_positively_irreducible(M)
    if mode not in ("float", "rational"):
        raise ValueError(f"unknown mode {mode!r}")
    r = r_of(M)
    if mode == "rational":
        rq = exact_r(M)
        if rq is not None:
            return _Setup(M.scaled(1 / rq), float(rq), True, ())
        return _Setup(M.scaled(1.0 / r), r, False, (EXACT_UNAVAILABLE,))
    return _Setup(M.scaled(1.0 / r), r, False, ())


def _finish(
    M: MatTuple,
    setup: _Setup,
    method: str,
    block_res: dict[int, float],
    block_ok: dict[int, bool] | None,
    worst_word: dict[int, tuple],
    tol: float,
    profile_depth: int | None,
) -> UleVerdict:
    best = min(block_res, key=lambda i: (block_res[i], i))
    if setup.exact:
        passing = [i for i in sorted(block_ok) if block_ok[i]]
        decision = Decision.YES if passing else Decision.NO
        if passing:
            best = passing[0]
    else:
        decision = classify(block_res[best], tol)
    lam = math.log(setup.r) if decision is Decision.YES else None
    ce = None
    if decision is Decision.YES and profile_depth:
        ce = empirical_constant(M, lam, depth=profile_depth)
    return UleVerdict(
        decision=decision,
        method=method,
        lam=lam,
        r_value=setup.r,
        residual=block_res[best],
        block_residuals=dict(block_res),
        witness_block=best if decision is Decision.YES else None,
        counterexample=worst_word[best] if decision is Decision.NO else None,
        c_emp=ce,
        exact=setup.exact,
        notes=setup.notes,
    )


def criterion_A(
    M: MatTuple,
    tol: float = DEFAULT_TOL,
    mode: str = "float",
    max_words: int = DEFAULT_MAX_WORDS,
    profile_depth: int | None = 12,
    workers: int | None = None,
) -> UleVerdict:
    """Decide the property by checking the block identity on every word of ``𝒥``.

    Parameters
    ----------
    M : MatTuple
        Nonnegative, positively irreducible.
    tol : float
        Residuals ``|v_iᵀ M_J^{(i)} u_i - 1|`` of the normalized tuple up to
        ``tol`` count as zero; above ``10 tol`` as nonzero; in between the
        verdict is Inconclusive.
    mode : {"float", "rational"}
        ``"rational"`` decides the identity exactly when ``r(M)`` is a
        certified rational and the input is exact, else falls back with a note.
    max_words : int
        Cap on visited nodes of the pruned word tree.
    profile_depth : int or None
        Depth of the norm profile behind ``c_emp`` on Yes; ``None`` skips it.
    """
    setup = _prepare(M, mode)
    js = enumerate_J(setup.N, exact=setup.exact, max_words=max_words, workers=workers)
    dec = decompose_tuple(setup.N, js)
    prods_f = js.products.astype(float)
    block_res, block_ok, worst_word = {}, {}, {}
    for i in dec.lambda_set:
        idx = dec.block_index(i)
        pd = dec.perron[i]
        sub = prods_f[:, idx][:, :, idx]
        vals = np.einsum("a,nab,b->n", pd.v, sub, pd.u)
        res = np.abs(vals - 1.0)
        if setup.exact:
            pair = dec.exact_unit.get(i)
            if pair is not None:
                u, v = pair
                sub_e = js.products[:, idx][:, :, idx]
                exact_vals = [v.dot(p).dot(u) for p in sub_e]
                res = np.array([float(abs(x - 1)) for x in exact_vals])
                block_ok[i] = all(x == 1 for x in exact_vals)
            else:
                block_ok[i] = False
        w = int(np.argmax(res))
        block_res[i] = float(res[w])
        worst_word[i] = js.words[w]
    return _finish(M, setup, "A", block_res, block_ok, worst_word, tol, profile_depth)


class _FloatHull:
    """Affine hull as base point plus orthonormal directions."""

    def __init__(self, rtol: float):
        self.rtol = rtol
        self.base = None
        self.dirs: list[np.ndarray] = []
        self.points: list[tuple[tuple, np.ndarray]] = []

    def add(self, word: tuple, x: np.ndarray) -> bool:
        if self.base is None:
            self.base = x
            self.points.append((word, x))
            return True
        r = x - self.base
        for q in self.dirs:
            r = r - (q @ r) * q
        scale = max(np.abs(self.base).max(), np.abs(x).max(), 1e-300)
        nr = np.linalg.norm(r)
        if nr <= self.rtol * scale:
            return False
        self.dirs.append(r / nr)
        self.points.append((word, x))
        return True

    @property
    def dim(self) -> int:
        return -1 if self.base is None else len(self.dirs)


class _ExactHull:
    """Affine hull kept as affinely independent Fraction points."""

    def __init__(self):
        self.points: list[tuple[tuple, np.ndarray]] = []
        self._diffs: list[np.ndarray] = []

    def add(self, word: tuple, x: np.ndarray) -> bool:
        if not self.points:
            self.points.append((word, x))
            return True
        diff = x - self.points[0][1]
        if all(v == 0 for v in diff):
            return False
        if self._diffs and rank(np.array(self._diffs + [diff], dtype=object)) == len(self._diffs):
            return False
        self._diffs.append(diff)
        self.points.append((word, x))
        return True

    @property
    def dim(self) -> int:
        return len(self.points) - 1


def affine_closure(N: MatTuple, w: np.ndarray, exact: bool, rtol: float = 1e-10, max_rounds: int | None = None):
    """Hulls ``W_s = aff{M_J w : (M_J)_{s,0} > 0}`` for every row ``s``.

    Returns the list of hulls; ``hulls[s].points`` are (word, point) pairs
    with ``point = M_word w`` spanning ``W_s``.
    """
    d = N.d
    mats = N.binary_exact() if exact else N.mats
    supp = N.supports()
    hulls = [_ExactHull() if exact else _FloatHull(rtol) for _ in range(d)]
    for j, m in enumerate(mats):
        img = m.dot(w)
        for s in range(d):
            if supp[j][s, 0]:
                hulls[s].add((j,), img)
    edges = [(s, j, p) for s in range(d) for j in range(N.k) for p in range(d) if supp[j][s, p]]
    # Each successful add raises some dimension, so at most d (d + 1) rounds change anything.
    rounds = max_rounds if max_rounds is not None else d * (d + 1) + 1
    for _ in range(rounds):
        changed = False
        snapshot = [list(h.points) for h in hulls]
        for s, j, p in edges:
            for word, x in snapshot[p]:
                if hulls[s].add((j,) + word, mats[j].dot(x)):
                    changed = True
        if not changed:
            break
    return hulls


def criterion_A_fast(
    M: MatTuple,
    tol: float = DEFAULT_TOL,
    mode: str = "float",
    profile_depth: int | None = 12,
    rank_rtol: float = 1e-10,
) -> UleVerdict:
    """Criterion A via affine-hull stabilization; polynomial in ``d`` and ``k``.

    Same parameters and verdict semantics as :func:`criterion_A`.  ``B`` is
    accumulated over first-row support classes, so ``𝒥`` is never listed.
    ``rank_rtol`` is the relative distance below which a point counts as
    lying in the current hull.
    """
    setup = _prepare(M, mode)
    N = setup.N
    B, count = jset_average(N, exact=setup.exact)
    dec: IrredDecomposition = decompose(B, count)
    block_res, block_ok, worst_word = {}, {}, {}
    for i in dec.lambda_set:
        idx = dec.block_index(i)
        pair = dec.exact_unit.get(i) if setup.exact else None
        if setup.exact and pair is None:
            # Perron root of the block is not 1, so the identity already fails on average.
            block_ok[i] = False
        if pair is not None:
            u, v = pair
            w = np.array([Fraction(0)] * N.d, dtype=object)
            w[idx] = u
            hulls = affine_closure(N, w, exact=True)
            vals = [(word, v.dot(x[idx])) for word, x in hulls[0].points]
            block_ok[i] = all(val == 1 for _, val in vals)
            res = [float(abs(val - 1)) for _, val in vals]
            words = [word for word, _ in vals]
        else:
            pd = dec.perron[i]
            w = np.zeros(N.d)
            w[idx] = pd.u
            hulls = affine_closure(N, w, exact=False, rtol=rank_rtol)
            res = [abs(float(pd.v @ x[idx]) - 1.0) for _, x in hulls[0].points]
            words = [word for word, _ in hulls[0].points]
        k = int(np.argmax(res))
        block_res[i] = float(res[k])
        worst_word[i] = words[k]
    return _finish(M, setup, "A-fast", block_res, block_ok, worst_word, tol, profile_depth)
