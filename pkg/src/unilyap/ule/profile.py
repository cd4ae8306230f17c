"""Brute-force norm statistics of products: the verdict oracle."""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from ..errors import ContractViolation, ResourceError
from ..matcore import MatTuple
from .parallel import map_ordered

DEFAULT_WORD_CAP = 2**24
PROFILE_BUDGET = 2**20
# Mixed-sign products below this fraction of the product of factor norms
# are treated as cancelled to zero.
CANCEL_RTOL = 1e-12


@dataclass(frozen=True)
class NormProfile:
    """Per-length extremes of ``||M_J||`` over nonzero products.

    ``mins[n-1]`` and ``maxs[n-1]`` refer to length ``n``; both are NaN when
    every product of that length vanishes.
    """

    mins: np.ndarray
    maxs: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.mins)

    def ratio(self, lam: float, upto: int | None = None) -> float:
        """``max_n max e^{-λn}||M_J|| / min_n min e^{-λn}||M_J||`` over ``n <= upto``."""
        upto = self.n_max if upto is None else upto
        n = np.arange(1, upto + 1)
        scale = np.exp(-lam * n)
        hi = self.maxs[:upto] * scale
        lo = self.mins[:upto] * scale
        ok = ~np.isnan(hi)
        if not ok.any():
            return math.nan
        return float(hi[ok].max() / lo[ok].min())


def _branch_profile(mats: tuple[np.ndarray, ...], first: int, n_max: int, signed: bool):
    mins = np.full(n_max, np.nan)
    maxs = np.full(n_max, np.nan)
    stack = np.stack(mats)
    gnorms = np.abs(stack).sum(axis=(1, 2))
    prods = stack[first][None]
    bounds = gnorms[first : first + 1]
    for n in range(1, n_max + 1):
        norms = np.abs(prods).sum(axis=(1, 2))
        keep = norms > CANCEL_RTOL * bounds if signed else norms > 0
        prods, norms, bounds = prods[keep], norms[keep], bounds[keep]
        if len(prods) == 0:
            break
        mins[n - 1] = norms.min()
        maxs[n - 1] = norms.max()
        if n < n_max:
            prods = np.einsum("nij,kjl->nkil", prods, stack).reshape(-1, *stack.shape[1:])
            bounds = np.outer(bounds, gnorms).reshape(-1)
    return mins, maxs


def norm_profile(M: MatTuple, n_max: int, cap: int = DEFAULT_WORD_CAP, workers: int | None = None) -> NormProfile:
    """Exact per-length min and max of ``||M_J||`` over nonzero products, ``|J| <= n_max``.

    Raises
    ------
    ResourceError
        If ``k^n_max`` exceeds ``cap``.
    """
    if n_max < 1:
        raise ContractViolation("norm_profile needs n_max >= 1")
    if M.k**n_max > cap:
        raise ResourceError(f"norm profile needs {M.k}^{n_max} words, above cap {cap}")
    signed = not M.is_nonnegative()
    parts = map_ordered(lambda j: _branch_profile(M.mats, j, n_max, signed), range(M.k), workers)
    mins = np.fmin.reduce([p[0] for p in parts])
    maxs = np.fmax.reduce([p[1] for p in parts])
    for a in (mins, maxs):
        a.setflags(write=False)
    return NormProfile(mins, maxs)


def profile_depth_for(k: int, depth: int, budget: int = PROFILE_BUDGET) -> int:
    """Largest ``n <= depth`` with ``k^n <= budget`` (at least 1)."""
    n = depth
    while n > 1 and k**n > budget:
        n -= 1
    return n


_CACHE: OrderedDict = OrderedDict()
_CACHE_SIZE = 512


def cached_profile(M: MatTuple, n_max: int) -> NormProfile:
    """:func:`norm_profile` memoized on the matrix bytes."""
    key = (n_max, M.d) + tuple(m.tobytes() for m in M.mats)
    hit = _CACHE.get(key)
    if hit is None:
        hit = norm_profile(M, n_max)
        _CACHE[key] = hit
        if len(_CACHE) > _CACHE_SIZE:
            _CACHE.popitem(last=False)
    return hit


def c_emp(M: MatTuple, lam: float, depth: int = 12, budget: int = PROFILE_BUDGET) -> float:
    """Empirical constant ``C`` with ``C^{-1} e^{λn} <= ||M_J|| <= C e^{λn}`` on the profile.

    Computed as the normalized max/min ratio over lengths up to ``depth``,
    reduced so that at most ``budget`` words of the longest length are formed.
    """
    return cached_profile(M, profile_depth_for(M.k, depth, budget)).ratio(lam)
