import math

import numpy as np
import pytest

import oracles
from unilyap.errors import ContractViolation, DegenerateLanguageError, ResourceError
from unilyap.matcore import MatTuple
from unilyap.symdyn import (
    build_support_automaton,
    enumerate_language,
    language_count,
    parry_chain,
    sft_entropy,
    sofic_entropy,
)

PHI = (1 + math.sqrt(5)) / 2


class TestAutomaton:
    def test_elementary(self, E):
        aut = build_support_automaton(E)
        assert aut.n_states == 4
        assert (aut.adjacency.sum(axis=1) == 2).all()
        assert not aut.is_complete()

    def test_single_one(self):
        aut = build_support_automaton(MatTuple.from_entries([[[1]]]))
        assert aut.n_states == 1 and aut.adjacency.tolist() == [[1]]
        assert aut.is_complete()

    def test_full_shift(self):
        aut = build_support_automaton(MatTuple.from_entries([[[1, 1], [1, 1]]] * 2))
        assert aut.n_states == 1 and aut.adjacency.tolist() == [[2]]

    def test_accepts_matches_oracle(self, golden):
        aut = build_support_automaton(golden)
        ref = oracles.as_lists(golden.exact)
        for n in range(1, 7):
            for w in oracles.words(2, n):
                assert aut.accepts(w) == (not oracles.is_zero(oracles.product(ref, w)))

    def test_deterministic_and_bounded(self, cases):
        for case in cases:
            aut = build_support_automaton(case.M)
            assert aut.n_states <= 2 ** (case.M.d**2) - 1
            # Transitions are a dict keyed by (state, symbol): determinism is structural;
            # check each target is the boolean product.
            for (s, j), t in aut.transitions.items():
                prod = (aut.states[s].astype(int) @ case.M.supports()[j].astype(int)) > 0
                assert np.array_equal(prod, aut.states[t])

    def test_mixed_sign_rejected(self):
        with pytest.raises(ContractViolation):
            build_support_automaton(MatTuple.from_entries([[[1, -1], [1, 1]]]))

    def test_state_cap(self, E):
        with pytest.raises(ResourceError):
            build_support_automaton(E, max_states=2)


class TestEntropy:
    def test_full_shift(self):
        for k in (1, 2, 5):
            aut = build_support_automaton(MatTuple.from_entries([[[1]]] * k))
            assert sofic_entropy(aut) == pytest.approx(math.log(k), abs=1e-12)

    def test_elementary(self, E):
        assert sofic_entropy(build_support_automaton(E)) == pytest.approx(math.log(2), abs=1e-12)

    def test_golden_tuple_against_count(self, golden):
        h = sofic_entropy(build_support_automaton(golden))
        assert h == pytest.approx(math.log(PHI), abs=1e-12)
        ref = oracles.as_lists(golden.exact)
        n = 14
        count = oracles.language_count(ref, n)
        assert count == language_count(golden, n)
        # Counts are submultiplicative, so the finite-n rate bounds h from above.
        assert math.log(count) / n >= h - 1e-12

    def test_degenerate(self):
        nil = MatTuple.from_entries([[[0, 1], [0, 0]]])
        with pytest.raises(DegenerateLanguageError):
            sofic_entropy(build_support_automaton(nil))

    def test_finite_rate_is_upper_bound(self, cases):
        for case in cases[::5]:
            h = sofic_entropy(build_support_automaton(case.M))
            for n in range(1, 13):
                assert math.log(language_count(case.M, n)) / n >= h - 1e-12


class TestLanguageCount:
    def test_examples(self, E):
        full = MatTuple.from_entries([[[1]], [[1]]])
        assert language_count(full, 5) == 32
        assert language_count(E, 3) == 16
        assert language_count(MatTuple.from_entries([[[1]], [[0]]]), 2) == 1

    def test_methods_agree_with_oracle(self, cases):
        for case in cases[::9]:
            ref = oracles.as_lists(case.M.exact)
            for n in range(1, 6):
                expected = oracles.language_count(ref, n)
                assert language_count(case.M, n, method="automaton") == expected
                assert language_count(case.M, n, method="enumerate") == expected

    def test_mixed_sign_cancellation(self):
        # [[1,1],[-1,-1]] squares to zero although its support does not.
        M = MatTuple.from_entries([[[1, 1], [-1, -1]]])
        assert language_count(M, 1) == 1
        assert language_count(M, 2) == 0
        assert enumerate_language(M, 2) == []

    def test_cap(self, E):
        with pytest.raises(ResourceError):
            language_count(E, 12, method="enumerate", cap=1000)

    def test_bad_n(self, E):
        with pytest.raises(ContractViolation):
            language_count(E, 0)


class TestSft:
    def test_examples(self):
        assert sft_entropy(np.ones((3, 3))) == pytest.approx(math.log(3))
        assert sft_entropy([[1, 1], [1, 0]]) == pytest.approx(math.log(PHI), abs=1e-9)
        assert sft_entropy([[0, 1], [0, 0]]) == -math.inf

    def test_not_binary(self):
        with pytest.raises(ContractViolation):
            sft_entropy([[2]])


class TestParry:
    def test_uniform(self):
        ch = parry_chain(np.ones((2, 2)))
        assert ch.P == pytest.approx(np.full((2, 2), 0.5))
        assert ch.pi == pytest.approx([0.5, 0.5])

    def test_golden(self):
        ch = parry_chain([[1, 1], [1, 0]])
        assert ch.P == pytest.approx(np.array([[1 / PHI, 1 / PHI**2], [1, 0]]), abs=1e-12)
        # Stationarity of P forces pi_2 / pi_1 = P_12 = 1 / phi^2.
        pi = np.array([PHI**2, 1.0])
        assert ch.pi == pytest.approx(pi / pi.sum(), abs=1e-12)
        assert ch.pi @ ch.P == pytest.approx(ch.pi, abs=1e-12)

    def test_identity(self):
        ch = parry_chain([[1]])
        assert ch.P.tolist() == [[1.0]] and ch.pi.tolist() == [1.0]

    def test_invariants_random(self):
        rng = np.random.default_rng(2)
        tested = 0
        for _ in range(60):
            a = (rng.random((5, 5)) < 0.4).astype(int)
            if not oracles.strongly_connected(a):
                continue
            ch = parry_chain(a)
            assert np.abs(ch.P.sum(axis=1) - 1).max() < 1e-10
            assert np.abs(ch.pi @ ch.P - ch.pi).max() < 1e-10
            assert ch.entropy() == pytest.approx(math.log(oracles.eig_radius(a)), abs=1e-8)
            tested += 1
        assert tested > 5

    def test_reducible(self):
        with pytest.raises(ContractViolation):
            parry_chain([[1, 1], [0, 1]])
