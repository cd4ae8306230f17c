"""Dense small-matrix kernel.

Norms, word products, Kronecker powers, spectral radii, Perron pairs and
digraph condensation.  Matrices are square ``numpy`` arrays; the float path
uses ``float64`` and the exact path uses object arrays of ``Fraction``.

Words are tuples of 0-based symbol indices into a :class:`MatTuple`.
"""

from __future__ import annotations

import functools
import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import ContractViolation, NumericError, ResourceError
from .rational import as_fraction_array, parse_rational

DEFAULT_KRON_CAP = 20_000

Word = tuple[int, ...]


def _is_exact_literal(x) -> bool:
    if isinstance(x, bool):
        return False
    if isinstance(x, (Rational, str)):
        return True
    return False


@dataclass(frozen=True, eq=False)
class MatTuple:
    """A tuple ``(M_0, ..., M_{k-1})`` of real ``d x d`` matrices.

    ``mats`` always holds the float64 matrices.  ``exact`` holds the same
    matrices as ``Fraction`` object arrays when every entry was supplied as
    an exact rational, and is ``None`` otherwise.
    """

    mats: tuple[np.ndarray, ...]
    exact: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        if len(self.mats) == 0:
            raise ContractViolation("a matrix tuple needs k >= 1 matrices")
        d = self.mats[0].shape[0]
        for i, m in enumerate(self.mats):
            if m.ndim != 2 or m.shape != (d, d) or d < 1:
                raise ContractViolation(f"matrix {i} is not {d}x{d}")
            if not np.all(np.isfinite(m)):
                raise ContractViolation(f"matrix {i} has non-finite entries")
            m.setflags(write=False)
        if self.exact is not None:
            for m in self.exact:
                m.setflags(write=False)
        if all(not m.any() for m in self.mats):
            raise ContractViolation("all matrices of the tuple are zero")

    @classmethod
    def from_entries(cls, matrices: Sequence) -> "MatTuple":
        """Build from nested sequences.

        Entries may be ints, Fractions, ``"p/q"`` strings or floats.  Exact
        matrices are kept iff no entry is a float.
        """
        matrices = [[list(row) for row in m] for m in matrices]
        for i, m in enumerate(matrices):
            if any(len(row) != len(m) for row in m):
                raise ContractViolation(f"matrix {i} is not square")
        flat = [x for m in matrices for row in m for x in row]
        if flat and all(_is_exact_literal(x) for x in flat):
            exact = []
            for m in matrices:
                e = np.empty((len(m), len(m)), dtype=object)
                for r, row in enumerate(m):
                    for c, x in enumerate(row):
                        e[r, c] = parse_rational(x)
                exact.append(e)
            return cls(tuple(e.astype(float) for e in exact), tuple(exact))
        return cls(tuple(np.array(m, dtype=float).reshape(len(m), len(m)) for m in matrices))

    @classmethod
    def from_exact(cls, matrices: Sequence[np.ndarray]) -> "MatTuple":
        exact = tuple(as_fraction_array(m) for m in matrices)
        return cls(tuple(e.astype(float) for e in exact), exact)

    @property
    def k(self) -> int:
        return len(self.mats)

    @property
    def d(self) -> int:
        return self.mats[0].shape[0]

    def __len__(self):
        return self.k

    def __repr__(self):
        kind = "exact" if self.exact is not None else "float"
        return f"MatTuple(k={self.k}, d={self.d}, {kind})"

    def is_nonnegative(self) -> bool:
        return all((m >= 0).all() for m in self.mats)

    def supports(self) -> tuple[np.ndarray, ...]:
        return tuple(m != 0 for m in self.mats)

    def total(self) -> np.ndarray:
        return sum(self.mats[1:], self.mats[0].copy())

    def exact_total(self) -> np.ndarray:
        if self.exact is None:
            raise ContractViolation("tuple has no exact representation")
        return sum(self.exact[1:], self.exact[0].copy())

    def binary_exact(self) -> tuple[np.ndarray, ...]:
        """Exact matrices, falling back to the exact binary value of floats."""
        if self.exact is not None:
            return self.exact
        return tuple(as_fraction_array(m.tolist()) for m in self.mats)

    def scaled(self, c) -> "MatTuple":
        """The tuple ``c * M``; stays exact when ``c`` is rational."""
        if self.exact is not None and _is_exact_literal(c):
            fc = parse_rational(c)
            return MatTuple.from_exact([e * fc for e in self.exact])
        return MatTuple(tuple(m * float(c) for m in self.mats))

    def conjugated(self, perm: Sequence[int]) -> "MatTuple":
        """Relabel coordinates: entry ``(a, b)`` of the result is ``M[perm[a], perm[b]]``."""
        p = np.asarray(perm)
        if sorted(p.tolist()) != list(range(self.d)):
            raise ContractViolation("not a permutation of the coordinates")
        mats = tuple(m[np.ix_(p, p)].copy() for m in self.mats)
        exact = None
        if self.exact is not None:
            exact = tuple(e[np.ix_(p, p)].copy() for e in self.exact)
        return MatTuple(mats, exact)

    def to_jsonable(self) -> list:
        if self.exact is not None:
            return [[[str(x) for x in row] for row in m] for m in self.exact]
        return [m.tolist() for m in self.mats]


def norm(a) -> float:
    """Entrywise absolute sum; exact (Fraction) for object arrays."""
    a = np.asarray(a)
    if a.dtype == object:
        return sum((abs(x) for x in a.flat), Fraction(0))
    return float(np.abs(a).sum())


def word_product(M: MatTuple, word: Sequence[int], exact: bool = False) -> np.ndarray:
    """Left-to-right product ``M_{j1} M_{j2} ... M_{jn}``."""
    if len(word) == 0:
        raise ContractViolation("word_product needs a nonempty word")
    mats = M.binary_exact() if exact else M.mats
    for j in word:
        if not 0 <= j < M.k:
            raise ContractViolation(f"symbol {j} out of range 0..{M.k - 1}")
    out = mats[word[0]].copy()
    for j in word[1:]:
        out = out.dot(mats[j])
    return out


def kron_power(a, q: int, cap: int = DEFAULT_KRON_CAP) -> np.ndarray:
    """The ``q``-fold Kronecker product ``a ⊗ ... ⊗ a``."""
    a = np.asarray(a)
    if q < 1:
        raise ContractViolation("kron_power needs q >= 1")
    dim = a.shape[0] ** q
    if dim > cap:
        raise ResourceError(f"Kronecker power dimension {dim} exceeds cap {cap}")
    return functools.reduce(np.kron, [a] * q)


@functools.lru_cache(maxsize=32)
def _sym_basis(d: int, q: int) -> np.ndarray:
    """Orthonormal basis (as columns) of the symmetric tensors in (R^d)^{⊗q}."""
    combos = list(itertools.combinations_with_replacement(range(d), q))
    basis = np.zeros((d**q, len(combos)))
    shape = (d,) * q
    for c, combo in enumerate(combos):
        perms = set(itertools.permutations(combo))
        idx = [np.ravel_multi_index(p, shape) for p in perms]
        basis[idx, c] = 1.0 / math.sqrt(len(perms))
    basis.setflags(write=False)
    return basis


def symmetric_power_sum(mats: Sequence[np.ndarray], q: int, cap: int = DEFAULT_KRON_CAP) -> np.ndarray:
    """``sum_i M_i^{⊗q}`` restricted to the symmetric tensors (orthonormal basis).

    The symmetric subspace is invariant and, for even ``q``, carries the full
    spectral radius, so this is a much smaller matrix with the same ``ρ``.
    """
    d = mats[0].shape[0]
    dim = d**q
    if dim > cap:
        raise ResourceError(f"Kronecker power dimension {dim} exceeds cap {cap}")
    basis = _sym_basis(d, q)
    s = basis.shape[1]
    out = np.zeros((s, s))
    for m in mats:
        t = basis.reshape((d,) * q + (s,))
        for axis in range(q):
            t = np.moveaxis(np.tensordot(m, t, axes=([1], [axis])), 0, axis)
        out += basis.T @ t.reshape(dim, s)
    return out


def spectral_radius(a, tol: float = 1e-13, max_squarings: int = 60) -> float:
    """Spectral radius by scaled repeated squaring (Gelfand's formula).

    Tracks ``2^-m log ||A^(2^m)||`` in log space; stops once two successive
    estimates agree to ``tol`` (relative accuracy of the result).
    """
    b = np.asarray(a, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ContractViolation("spectral_radius needs a square matrix")
    if b.shape[0] == 1:
        return abs(float(b[0, 0]))
    log_scale = 0.0
    prev = None
    small_steps = 0
    est = 0.0
    for m in range(max_squarings + 1):
        n = float(np.abs(b).sum())
        if n == 0.0:
            return 0.0
        if not math.isfinite(n):
            raise NumericError("non-finite value during repeated squaring")
        est = (log_scale + math.log(n)) / 2.0**m
        if prev is not None and abs(est - prev) < tol:
            small_steps += 1
            if small_steps >= 2:
                break
        else:
            small_steps = 0
        prev = est
        log_scale = 2.0 * (log_scale + math.log(n))
        c = b / n
        b = c @ c
    return math.exp(est)


@dataclass(frozen=True)
class PerronData:
    """Perron root with positive right/left eigenvectors, ``v @ u == 1``."""

    rho: float
    u: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class Condensation:
    """Strongly connected components in block upper triangular order.

    ``order[c]`` lists the vertices of the ``c``-th component; every edge
    ``i -> j`` (nonzero entry ``(i, j)``) satisfies
    ``component_of[i] <= component_of[j]``.
    """

    component_of: tuple[int, ...]
    order: tuple[tuple[int, ...], ...]
    trivial_zero: tuple[bool, ...]

    @property
    def permutation(self) -> list[int]:
        return [v for comp in self.order for v in comp]

    @property
    def block_sizes(self) -> list[int]:
        return [len(c) for c in self.order]

    def block_slices(self) -> list[slice]:
        out, start = [], 0
        for size in self.block_sizes:
            out.append(slice(start, start + size))
            start += size
        return out


def condense(adjacency) -> Condensation:
    """Condense the digraph of a square boolean matrix.

    Components are ordered topologically (sources first) with ties broken by
    the smallest contained vertex, so conjugating by :attr:`Condensation.permutation`
    gives a block upper triangular matrix.
    """
    adj = np.asarray(adjacency) != 0
    n = adj.shape[0]
    if adj.shape != (n, n):
        raise ContractViolation("condense needs a square matrix")
    _, labels = connected_components(adj.astype(np.int8), directed=True, connection="strong")
    members: dict[int, list[int]] = {}
    for v, lab in enumerate(labels):
        members.setdefault(int(lab), []).append(v)
    succ: dict[int, set[int]] = {lab: set() for lab in members}
    indeg = {lab: 0 for lab in members}
    for i, j in zip(*np.nonzero(adj)):
        a, b = int(labels[i]), int(labels[j])
        if a != b and b not in succ[a]:
            succ[a].add(b)
            indeg[b] += 1
    heap = [(min(members[lab]), lab) for lab in members if indeg[lab] == 0]
    heapq.heapify(heap)
    ordered = []
    while heap:
        _, lab = heapq.heappop(heap)
        ordered.append(lab)
        for nxt in succ[lab]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(heap, (min(members[nxt]), nxt))
    component_of = [0] * n
    order = []
    trivial = []
    for c, lab in enumerate(ordered):
        verts = tuple(members[lab])
        order.append(verts)
        for v in verts:
            component_of[v] = c
        trivial.append(len(verts) == 1 and not adj[verts[0], verts[0]])
    return Condensation(tuple(component_of), tuple(order), tuple(trivial))


def is_strongly_connected(adjacency) -> bool:
    """True iff the digraph is strongly connected and not a single loopless vertex."""
    cond = condense(adjacency)
    return len(cond.order) == 1 and not cond.trivial_zero[0]


def is_positively_irreducible(M: MatTuple) -> bool:
    if not M.is_nonnegative():
        raise ContractViolation("positive irreducibility needs nonnegative matrices")
    return is_strongly_connected(M.total() != 0)


def perron_pair(b, tol: float = 1e-10) -> PerronData:
    """Perron root and eigenvectors of a nonnegative irreducible matrix.

    ``u`` is scaled to max entry 1 and ``v`` so that ``v @ u == 1``.
    """
    b = np.asarray(b, dtype=float)
    if (b < 0).any():
        raise ContractViolation("perron_pair needs a nonnegative matrix")
    if not is_strongly_connected(b != 0):
        raise ContractViolation("perron_pair needs a positively irreducible matrix")
    d = b.shape[0]
    rho = spectral_radius(b)
    if d == 1:
        return PerronData(rho, np.ones(1), np.ones(1))
    # The Perron root is simple, so B - rho I has a one-dimensional kernel on each side.
    left, _, right_h = np.linalg.svd(b - rho * np.eye(d))
    u = right_h[-1]
    v = left[:, -1]
    u = u * np.sign(u.sum())
    v = v * np.sign(v.sum())
    if (u <= 0).any() or (v <= 0).any():
        raise ContractViolation("Perron vector has a non-positive coordinate")
    u = u / u.max()
    v = v / (v @ u)
    return PerronData(rho, u, v)
