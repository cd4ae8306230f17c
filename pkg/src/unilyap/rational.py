"""Exact rational arithmetic helpers.

Matrices are plain ``numpy`` object arrays holding :class:`fractions.Fraction`
(or ``int``) entries.  Only what the decision procedures need is provided:
literal parsing, reduced row echelon form, rank, null spaces and
determinants, all by fraction-exact Gaussian elimination.
"""

from __future__ import annotations

import math
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from numbers import Rational

import numpy as np


def parse_rational(value) -> Fraction:
    """Parse an integer, ``Fraction``, ``Decimal`` or string literal exactly.

    Accepted strings are ``"p/q"``, integers and finite decimal literals
    (``"0.25"``, ``"1e-3"``).  Floats are rejected since their value is not
    what the user typed; convert them with ``Fraction(x)`` explicitly if the
    binary value is wanted.
    """
    if isinstance(value, bool):
        raise ValueError(f"boolean is not a rational literal: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"non-finite literal: {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                return Fraction(int(num), int(den))
            dec = Decimal(text)
        except (ValueError, ZeroDivisionError, InvalidOperation) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
        if not dec.is_finite():
            raise ValueError(f"non-finite literal: {value!r}")
        return Fraction(dec)
    raise ValueError(f"not a rational literal: {value!r}")


def as_fraction_array(a) -> np.ndarray:
    """Copy ``a`` into an object array of ``Fraction``."""
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = x if isinstance(x, Fraction) else Fraction(x)
    return out


def to_float(a) -> np.ndarray:
    return np.asarray(a, dtype=object).astype(float)


def common_denominator(a) -> int:
    den = 1
    for x in np.asarray(a, dtype=object).flat:
        den = math.lcm(den, Fraction(x).denominator)
    return den


def rref(a) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the pivot columns."""
    m = as_fraction_array(a)
    if m.ndim != 2:
        raise ValueError("rref needs a 2-d array")
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        piv = next((i for i in range(r, rows) if m[i, c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = m[r] / m[r, c]
        for i in range(rows):
            if i != r and m[i, c] != 0:
                m[i] = m[i] - m[i, c] * m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a) -> int:
    a = np.asarray(a, dtype=object)
    if a.size == 0:
        return 0
    return len(rref(a)[1])


def nullspace(a) -> list[np.ndarray]:
    """Basis of the right null space ``{x : a x = 0}`` as Fraction vectors."""
    m, pivots = rref(a)
    cols = m.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        x = np.array([Fraction(0)] * cols, dtype=object)
        x[f] = Fraction(1)
        for row, p in enumerate(pivots):
            x[p] = -m[row, f]
        basis.append(x)
    return basis


def det(a) -> Fraction:
    m = as_fraction_array(a)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("det needs a square matrix")
    result = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i, c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[[c, piv]] = m[[piv, c]]
            result = -result
        result *= m[c, c]
        for i in range(c + 1, n):
            if m[i, c] != 0:
                m[i] = m[i] - (m[i, c] / m[c, c]) * m[c]
    return result


def in_affine_hull(points: list[np.ndarray], x: np.ndarray) -> bool:
    """Exact test whether ``x`` lies in the affine hull of ``points``."""
    if not points:
        return False
    base = points[0]
    diffs = [p - base for p in points[1:]]
    if not diffs:
        return all(v == 0 for v in (x - base))
    span = np.array(diffs, dtype=object)
    return rank(np.vstack([span, (x - base)[None, :]])) == rank(span)
