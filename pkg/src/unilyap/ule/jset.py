"""The word set ``𝒥``, the averaged matrix ``B`` and its irreducible decomposition.

``𝒥`` is the set of words ``J`` of length ``1..d²`` with ``(M_J)_{0,0} != 0``.
Words are 0-based tuples of symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import ContractViolation, InternalConsistencyError, ResourceError
from ..matcore import Condensation, MatTuple, PerronData, condense, perron_pair
from ..rational import nullspace
from .normalize import require_positively_irreducible
from .parallel import map_ordered

DEFAULT_MAX_WORDS = 2**24


@dataclass(frozen=True)
class JSet:
    """Words of ``𝒥`` (in length-then-lexicographic order) and their products."""

    words: tuple[tuple[int, ...], ...]
    products: np.ndarray  # (n_words, d, d), float or Fraction objects
    visited: int

    @property
    def exact(self) -> bool:
        return self.products.dtype == object


def _branch(stack: np.ndarray, first: int, depth: int):
    """Level-wise search of words starting with ``first``; prunes empty first rows."""
    words_out, prods_out = [], []
    k = stack.shape[0]
    words = np.array([[first]])
    prods = stack[first][None]
    visited = 0
    for n in range(1, depth + 1):
        visited += len(prods)
        hit = prods[:, 0, 0] != 0
        if hit.any():
            words_out.extend(tuple(int(s) for s in w) for w in words[hit])
            prods_out.append(prods[hit])
        if n == depth:
            break
        alive = (prods[:, 0, :] != 0).any(axis=1)
        prods, words = prods[alive], words[alive]
        if len(prods) == 0:
            break
        prods = np.stack([prods @ stack[j] for j in range(k)], axis=1).reshape(-1, *stack.shape[1:])
        words = np.concatenate(
            [np.repeat(words, k, axis=0), np.tile(np.arange(k), len(words))[:, None]], axis=1
        )
    return words_out, prods_out, visited


def enumerate_J(
    M: MatTuple,
    exact: bool = False,
    max_words: int = DEFAULT_MAX_WORDS,
    workers: int | None = None,
) -> JSet:
    """All words of length ``<= d²`` whose product has nonzero ``(0, 0)`` entry.

    Subtrees whose running product has an all-zero first row are pruned,
    since no extension can reach a nonzero ``(0, 0)`` entry.  With
    ``exact=True`` products are Fraction matrices.

    Raises
    ------
    ContractViolation
        If ``M`` is not nonnegative and positively irreducible.
    ResourceError
        If more than ``max_words`` tree nodes would be visited.
    """
    require_positively_irreducible(M)
    depth = M.d**2
    # The unpruned tree size bounds the visit count; only search when it could exceed the cap.
    if sum(M.k**n for n in range(1, depth + 1)) > max_words:
        _check_pruned_size(M, depth, max_words)
    if exact:
        stack = np.empty((M.k, M.d, M.d), dtype=object)
        for j, e in enumerate(M.binary_exact()):
            stack[j] = e
    else:
        stack = np.stack(M.mats)
    parts = map_ordered(lambda j: _branch(stack, j, depth), range(M.k), workers)
    # Merge to global length-then-lexicographic order.
    entries = []
    for words, prods, _ in parts:
        flat = [p for block in prods for p in block]
        entries.extend(zip(words, flat))
    entries.sort(key=lambda e: (len(e[0]), e[0]))
    visited = sum(p[2] for p in parts)
    if not entries:
        raise InternalConsistencyError("𝒥 is empty for a positively irreducible tuple")
    words = tuple(e[0] for e in entries)
    products = np.stack([e[1] for e in entries])
    products.setflags(write=False)
    return JSet(words, products, visited)


def _check_pruned_size(M: MatTuple, depth: int, max_words: int) -> None:
    """Count pruned tree nodes by first-row support states, without forming products."""
    supports = [s.astype(np.int64) for s in M.supports()]
    counts: dict[bytes, int] = {}
    rows: dict[bytes, np.ndarray] = {}
    for s in supports:
        row = s[0] > 0
        key = row.tobytes()
        counts[key] = counts.get(key, 0) + 1
        rows[key] = row
    total = 0
    for n in range(1, depth + 1):
        total += sum(counts.values())
        if total > max_words:
            raise ResourceError(
                f"enumerating 𝒥 visits more than {max_words} words; use the fast path (A-fast)"
            )
        nxt: dict[bytes, int] = {}
        for key, c in counts.items():
            row = rows[key]
            if not row.any():
                continue
            for s in supports:
                new = (row.astype(np.int64) @ s) > 0
                nk = new.tobytes()
                nxt[nk] = nxt.get(nk, 0) + c
                rows[nk] = new
        counts = nxt


def jset_average(M: MatTuple, exact: bool = False) -> tuple[np.ndarray, int]:
    """``B`` and ``#𝒥`` without enumerating ``𝒥``.

    Words are grouped by the support of the first row of their product,
    which determines both membership in ``𝒥`` and the support of every
    extension; the sum of products within a group extends linearly.
    """
    require_positively_irreducible(M)
    mats = M.binary_exact() if exact else M.mats
    supports = [s.astype(np.int64) for s in M.supports()]
    zero = np.zeros((M.d, M.d), dtype=object) if exact else np.zeros((M.d, M.d))
    if exact:
        zero[:] = Fraction(0)
    groups: dict[bytes, list] = {}
    for j, m in enumerate(mats):
        row = supports[j][0] > 0
        g = groups.setdefault(row.tobytes(), [row, 0, zero.copy()])
        g[1] += 1
        g[2] = g[2] + m
    total = zero.copy()
    count = 0
    for n in range(1, M.d**2 + 1):
        nxt: dict[bytes, list] = {}
        for row, c, s in groups.values():
            if row[0]:
                count += c
                total = total + s
            if n == M.d**2 or not row.any():
                continue
            for j, m in enumerate(mats):
                new = (row.astype(np.int64) @ supports[j]) > 0
                g = nxt.setdefault(new.tobytes(), [new, 0, zero.copy()])
                g[1] += c
                g[2] = g[2] + s.dot(m)
        groups = nxt
    if count == 0:
        raise InternalConsistencyError("𝒥 is empty for a positively irreducible tuple")
    return total / count, count


@dataclass(frozen=True)
class IrredDecomposition:
    """Block upper triangular form of ``B`` under a coordinate permutation.

    Attributes
    ----------
    B : (d, d) array, float or Fraction objects
    condensation : Condensation of the support of ``B``
    blocks : diagonal blocks of the permuted ``B``
    lambda_set : indices of the nonzero blocks
    perron : block index -> float PerronData, for blocks in ``lambda_set``
    exact_unit : block index -> (u, v) Fraction vectors with ``B u = u``,
        ``vᵀ B = vᵀ`` and ``vᵀ u = 1``; present only for exact ``B`` whose
        block has Perron root exactly 1
    n_words : size of ``𝒥``
    """

    B: np.ndarray
    condensation: Condensation
    blocks: tuple[np.ndarray, ...]
    lambda_set: tuple[int, ...]
    perron: dict[int, PerronData]
    exact_unit: dict[int, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    n_words: int = 0

    @property
    def permutation(self) -> list[int]:
        return self.condensation.permutation

    @property
    def block_sizes(self) -> list[int]:
        return self.condensation.block_sizes

    def block_index(self, i: int) -> np.ndarray:
        return np.array(self.condensation.order[i])


def _positive_kernel_vector(a) -> np.ndarray | None:
    kernel = nullspace(a)
    if len(kernel) != 1:
        return None
    vec = kernel[0]
    if all(x < 0 for x in vec):
        vec = -vec
    if not all(x > 0 for x in vec):
        return None
    return vec


def _exact_unit_pair(block) -> tuple[np.ndarray, np.ndarray] | None:
    """Exact Perron vectors when the Perron root of ``block`` is exactly 1.

    For an irreducible nonnegative matrix, 1 is the Perron root iff
    ``block - I`` has a strictly positive kernel vector.
    """
    n = block.shape[0]
    shifted = block - np.diag([Fraction(1)] * n)
    u = _positive_kernel_vector(shifted)
    if u is None:
        return None
    v = _positive_kernel_vector(shifted.T)
    if v is None:
        return None
    return u, v / v.dot(u)


def decompose(B: np.ndarray, n_words: int = 0, tol: float = 1e-10) -> IrredDecomposition:
    """Condense the support of ``B`` and attach Perron data to its nonzero blocks."""
    B = np.asarray(B)
    exact = B.dtype == object
    cond = condense(B != 0)
    blocks, lam, perron, unit = [], [], {}, {}
    Bf = B.astype(float)
    for i, (comp, trivial) in enumerate(zip(cond.order, cond.trivial_zero)):
        idx = np.array(comp)
        blocks.append(B[np.ix_(idx, idx)])
        if trivial:
            continue
        lam.append(i)
        perron[i] = perron_pair(Bf[np.ix_(idx, idx)], tol=tol)
        if exact:
            pair = _exact_unit_pair(B[np.ix_(idx, idx)])
            if pair is not None:
                unit[i] = pair
    if not lam:
        raise InternalConsistencyError("B has no nonzero diagonal block")
    return IrredDecomposition(B, cond, tuple(blocks), tuple(lam), perron, unit, n_words)


def below_block_mask(cond: Condensation) -> np.ndarray:
    """Boolean ``(d, d)`` mask (original coordinates) of entries below the block diagonal."""
    comp = np.array(cond.component_of)
    return comp[:, None] > comp[None, :]


def verify_block_triangular(dec: IrredDecomposition, products: np.ndarray) -> None:
    """Every product of ``𝒥`` must vanish below the block diagonal of ``B``.

    Raises
    ------
    InternalConsistencyError
        If some product has a nonzero entry there.
    """
    mask = below_block_mask(dec.condensation)
    if not mask.any():
        return
    bad = (products[:, mask] != 0).any(axis=1)
    if bad.any():
        raise InternalConsistencyError(
            f"{int(bad.sum())} products of 𝒥 are not block upper triangular"
        )


def decompose_tuple(M: MatTuple, jset: JSet, tol: float = 1e-10) -> IrredDecomposition:
    """:func:`decompose` applied to the average of an enumerated ``𝒥``, with the triangularity check."""
    if len(jset.words) == 0:
        raise ContractViolation("𝒥 must be nonempty")
    B = jset.products.sum(axis=0) / len(jset.words)
    dec = decompose(B, len(jset.words), tol=tol)
    verify_block_triangular(dec, jset.products)
    return dec
