"""Symbolic dynamics of the language of nonzero products.

The sofic shift of a nonnegative tuple ``M`` consists of the sequences all
of whose prefixes index nonzero products.  It is presented here by the
deterministic *support automaton*: states are the distinct nonzero boolean
support patterns of products, and reading symbol ``j`` multiplies the
pattern by the support of ``M_j``.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, DegenerateLanguageError, ResourceError
from .matcore import MatTuple, condense, is_strongly_connected, perron_pair, spectral_radius

DEFAULT_ENUM_CAP = 2**22


def _bool_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


@dataclass(frozen=True)
class SupportAutomaton:
    """Deterministic presentation of the language of nonzero products.

    Attributes
    ----------
    states : tuple of (d, d) bool arrays, in breadth-first discovery order
    initial : dict symbol -> state index, for symbols with nonzero matrix
    transitions : dict (state, symbol) -> state, present iff the product is nonzero
    k : alphabet size
    """

    states: tuple[np.ndarray, ...]
    initial: dict[int, int]
    transitions: dict[tuple[int, int], int]
    k: int
    adjacency: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.states)
        adj = np.zeros((n, n), dtype=np.int64)
        for (s, _), t in self.transitions.items():
            adj[s, t] += 1
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @property
    def n_states(self) -> int:
        return len(self.states)

    def accepts(self, word) -> bool:
        """True iff the product indexed by ``word`` is nonzero."""
        if len(word) == 0:
            return True
        state = self.initial.get(word[0])
        for j in word[1:]:
            if state is None:
                return False
            state = self.transitions.get((state, j))
        return state is not None

    def is_complete(self) -> bool:
        """True iff no product of any length vanishes."""
        return len(self.initial) == self.k and len(self.transitions) == self.n_states * self.k

    def initial_vector(self) -> np.ndarray:
        vec = np.zeros(self.n_states, dtype=object)
        vec[:] = 0
        for s in self.initial.values():
            vec[s] += 1
        return vec


def build_support_automaton(M: MatTuple, max_states: int | None = None) -> SupportAutomaton:
    """Breadth-first closure of generator supports under right multiplication."""
    if not M.is_nonnegative():
        raise ContractViolation(
            "the support automaton is exact only for nonnegative tuples; "
            "use language_count(method='enumerate') for mixed-sign tuples"
        )
    gens = M.supports()
    if not any(g.any() for g in gens):
        raise ContractViolation("all matrices of the tuple are zero")
    index: dict[bytes, int] = {}
    states: list[np.ndarray] = []
    queue: deque[int] = deque()

    def intern(pattern: np.ndarray) -> int:
        key = np.packbits(pattern).tobytes()
        if key not in index:
            if max_states is not None and len(states) >= max_states:
                raise ResourceError(f"support automaton exceeds {max_states} states")
            index[key] = len(states)
            states.append(pattern)
            queue.append(index[key])
        return index[key]

    initial = {j: intern(g) for j, g in enumerate(gens) if g.any()}
    transitions: dict[tuple[int, int], int] = {}
    while queue:
        s = queue.popleft()
        for j, g in enumerate(gens):
            nxt = _bool_mul(states[s], g)
            if nxt.any():
                transitions[(s, j)] = intern(nxt)
    for st in states:
        st.setflags(write=False)
    return SupportAutomaton(tuple(states), initial, transitions, M.k)


def sofic_entropy(aut: SupportAutomaton, tol: float = 1e-13) -> float:
    """Topological entropy ``log ρ(adjacency)`` of the presented shift.

    The spectral radius is taken as the maximum over strongly connected
    components, which is the same number computed on smaller blocks.

    Raises
    ------
    DegenerateLanguageError
        If the automaton has no cycle, i.e. all long products vanish.
    """
    if aut.n_states == 0:
        raise DegenerateLanguageError("empty automaton")
    adj = aut.adjacency.astype(float)
    cond = condense(adj)
    rho = 0.0
    for comp, trivial in zip(cond.order, cond.trivial_zero):
        if trivial:
            continue
        idx = np.array(comp)
        rho = max(rho, spectral_radius(adj[np.ix_(idx, idx)], tol=tol))
    if rho == 0.0:
        raise DegenerateLanguageError("every sufficiently long product vanishes")
    return math.log(rho)


def _count_by_automaton(aut: SupportAutomaton, n: int) -> int:
    vec = aut.initial_vector()
    adj = aut.adjacency.astype(object)
    for _ in range(n - 1):
        vec = vec.dot(adj)
    return int(sum(vec))


def _count_by_enumeration(M: MatTuple, n: int, cap: int) -> int:
    if M.k**n > cap:
        raise ResourceError(f"enumerating {M.k}^{n} words exceeds cap {cap}")
    if M.is_nonnegative():
        # Boolean products are exact for nonnegative tuples.
        gens = [g.astype(np.int64) for g in M.supports()]
        level = [g for g in gens if g.any()]
        for _ in range(n - 1):
            products = ((prev @ g > 0).astype(np.int64) for prev in level for g in gens)
            level = [p for p in products if p.any()]
        return len(level)
    # Mixed signs: cancellation matters, so test exact zero on rational products.
    gens = M.binary_exact()
    level = [g for g in gens if any(x != 0 for x in g.flat)]
    for _ in range(n - 1):
        products = (prev.dot(g) for prev in level for g in gens)
        level = [p for p in products if any(x != 0 for x in p.flat)]
    return len(level)


def language_count(M: MatTuple, n: int, method: str = "auto", cap: int = DEFAULT_ENUM_CAP) -> int:
    """Number of words ``J`` of length ``n`` with ``M_J != 0``.

    ``method`` is ``"automaton"`` (path count, no cap), ``"enumerate"``
    (brute force, capped) or ``"auto"`` (automaton for nonnegative tuples,
    enumeration otherwise).
    """
    if n < 1:
        raise ContractViolation("language_count needs n >= 1")
    if method == "auto":
        method = "automaton" if M.is_nonnegative() else "enumerate"
    if method == "automaton":
        return _count_by_automaton(build_support_automaton(M), n)
    if method == "enumerate":
        return _count_by_enumeration(M, n, cap)
    raise ValueError(f"unknown method {method!r}")


def sft_entropy(a) -> float:
    """``log ρ(A)`` for a 0-1 matrix; ``-inf`` marks an empty shift."""
    a = np.asarray(a)
    if ((a != 0) & (a != 1)).any():
        raise ContractViolation("sft_entropy needs a 0-1 matrix")
    rho = spectral_radius(a.astype(float))
    return math.log(rho) if rho > 0 else -math.inf


@dataclass(frozen=True)
class MarkovChain:
    P: np.ndarray
    pi: np.ndarray

    def entropy(self) -> float:
        """Entropy rate ``-sum_i pi_i sum_j P_ij log P_ij``."""
        mask = self.P > 0
        logs = np.zeros_like(self.P)
        logs[mask] = np.log(self.P[mask])
        return float(-(self.pi[:, None] * self.P * logs).sum())


def parry_chain(a) -> MarkovChain:
    """The Parry (maximal entropy) Markov chain of an irreducible 0-1 matrix."""
    a = np.asarray(a, dtype=float)
    if not is_strongly_connected(a != 0):
        raise ContractViolation("parry_chain needs a positively irreducible matrix")
    pd = perron_pair(a)
    P = a * pd.u[None, :] / (pd.rho * pd.u[:, None])
    P = P / P.sum(axis=1, keepdims=True)
    pi = pd.u * pd.v
    return MarkovChain(P, pi / pi.sum())


def enumerate_language(M: MatTuple, n: int) -> list[tuple[int, ...]]:
    """All words of length ``n`` with nonzero product (brute force, for tests and reports)."""
    gens = M.mats if M.is_nonnegative() else M.binary_exact()
    out = []
    for w in itertools.product(range(M.k), repeat=n):
        p = gens[w[0]]
        for j in w[1:]:
            p = p.dot(gens[j])
        if any(x != 0 for x in p.flat):
            out.append(w)
    return out
