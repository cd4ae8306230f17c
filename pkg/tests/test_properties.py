import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

import oracles
from unilyap.matcore import (
    MatTuple,
    condense,
    is_positively_irreducible,
    kron_power,
    norm,
    spectral_radius,
)
from unilyap.symdyn import build_support_automaton, language_count, sofic_entropy
from unilyap.ule import Decision, criterion_A, normalize, pressure_report, r_of
from unilyap.ule.verdict import classify

SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])


@st.composite
def square(draw, d=None, lo=-3, hi=3):
    d = d or draw(st.integers(1, 3))
    return np.array(draw(st.lists(st.lists(st.integers(lo, hi), min_size=d, max_size=d), min_size=d, max_size=d)))


@st.composite
def tuples(draw, lo=-3, hi=3, max_d=3, max_k=3):
    d = draw(st.integers(1, max_d))
    k = draw(st.integers(1, max_k))
    mats = [draw(square(d, lo, hi)).tolist() for _ in range(k)]
    assume(any(any(row) for m in mats for row in m))
    return MatTuple.from_entries(mats)


@st.composite
def pi_tuples(draw, max_d=3):
    M = draw(tuples(lo=0, hi=2, max_d=max_d))
    assume(is_positively_irreducible(M))
    return M


@SETTINGS
@given(st.integers(1, 3).flatmap(lambda d: st.tuples(square(d), square(d))))
def test_norm_submultiplicative(ab):
    a, b = ab
    assert norm(a @ b) <= norm(a) * norm(b)


@SETTINGS
@given(square(), square())
def test_kron_norm_multiplicative(a, b):
    assert norm(np.kron(a, b)) == norm(a) * norm(b)


@SETTINGS
@given(square())
def test_spectral_radius_matches_eigenvalues(a):
    rho = spectral_radius(a)
    assert rho == pytest.approx(oracles.eig_radius(a.tolist()), rel=1e-6, abs=1e-9)
    assert spectral_radius(kron_power(a, 2)) == pytest.approx(rho**2, rel=1e-6, abs=1e-9)


@SETTINGS
@given(square(), st.floats(-4, 4).filter(lambda c: abs(c) > 1e-3))
def test_spectral_radius_homogeneous(a, c):
    assert spectral_radius(c * a) == pytest.approx(abs(c) * spectral_radius(a), rel=1e-8, abs=1e-9)


@SETTINGS
@given(square(lo=0, hi=1).filter(lambda a: a.shape[0] >= 2) | square(d=4, lo=0, hi=1))
def test_condense_triangular(a):
    cond = condense(a)
    reach = oracles.reachability(a.tolist())
    n = a.shape[0]
    for i in range(n):
        for j in range(n):
            if a[i, j]:
                assert cond.component_of[i] <= cond.component_of[j]
            same = (i == j) or (reach[i][j] and reach[j][i])
            assert (cond.component_of[i] == cond.component_of[j]) == same
    perm = cond.permutation
    assert sorted(perm) == list(range(n))
    b = a[np.ix_(perm, perm)]
    for s1 in cond.block_slices():
        for s2 in cond.block_slices():
            if s2.start < s1.start:
                assert not b[s1, s2].any()


@SETTINGS
@given(tuples(max_d=2), st.integers(1, 4))
def test_language_count_consistent(M, n):
    expected = oracles.language_count(oracles.as_lists(M.exact), n)
    assert language_count(M, n, method="enumerate") == expected
    if M.is_nonnegative():
        assert language_count(M, n, method="automaton") == expected


@SETTINGS
@given(pi_tuples(), st.sampled_from([2, 3, 0.5]))
def test_scaling_invariance(M, c):
    base = criterion_A(M)
    scaled = criterion_A(M.scaled(c))
    assert scaled.decision is base.decision
    if base.decision is Decision.YES:
        assert scaled.lam == pytest.approx(base.lam + math.log(c), abs=1e-9)
    assert sofic_entropy(build_support_automaton(M.scaled(c))) == pytest.approx(
        sofic_entropy(build_support_automaton(M)), abs=1e-12
    )


@SETTINGS
@given(pi_tuples(), st.randoms(use_true_random=False))
def test_permutation_invariance(M, rnd):
    perm = list(range(M.d))
    rnd.shuffle(perm)
    P = M.conjugated(perm)
    a, b = criterion_A(M), criterion_A(P)
    assert a.decision is b.decision
    assert r_of(P) == pytest.approx(r_of(M), rel=1e-10)
    if a.decision is Decision.YES:
        assert b.lam == pytest.approx(a.lam, abs=1e-9)


@SETTINGS
@given(tuples(max_d=2))
def test_convexity_defect_nonnegative(M):
    rep = pressure_report(M)
    assume(all(math.isfinite(p) for p in (rep.p2, rep.p4, rep.p6)))
    assert rep.defect >= -1e-8


@SETTINGS
@given(pi_tuples())
def test_normalization(M):
    assert r_of(normalize(M)) == pytest.approx(1.0, rel=1e-10)
    exact = normalize(M, exact=True)
    assert r_of(exact) == pytest.approx(1.0, rel=1e-10)


@SETTINGS
@given(st.floats(0, 1e-3, allow_nan=False), st.floats(1e-9, 1e-4))
def test_trichotomy(residual, tol):
    decision = classify(residual, tol)
    assert (decision is Decision.YES) == (residual <= tol)
    assert (decision is Decision.NO) == (residual > 10 * tol)
    assert (decision is Decision.INCONCLUSIVE) == (tol < residual <= 10 * tol)
