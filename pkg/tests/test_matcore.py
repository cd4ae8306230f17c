import math
from fractions import Fraction

import numpy as np
import pytest

import oracles
from conftest import ELEMENTARY
from unilyap.errors import ContractViolation, ResourceError
from unilyap.matcore import (
    MatTuple,
    condense,
    is_positively_irreducible,
    kron_power,
    norm,
    perron_pair,
    spectral_radius,
    symmetric_power_sum,
    word_product,
)

PHI = (1 + math.sqrt(5)) / 2


class TestMatTuple:
    def test_exact_entries_are_kept(self):
        M = MatTuple.from_entries([[["1/3", 1], [0, "0.25"]]])
        assert M.exact[0][0, 0] == Fraction(1, 3)
        assert M.exact[0][1, 1] == Fraction(1, 4)
        assert M.mats[0][0, 0] == pytest.approx(1 / 3)

    def test_float_entries_drop_exact(self):
        assert MatTuple.from_entries([[[0.5]]]).exact is None

    @pytest.mark.parametrize(
        "mats",
        [[], [[[1, 0], [0, 1]], [[1]]], [[[0]]], [[[float("nan")]]], [[[1, 2]]]],
    )
    def test_invalid(self, mats):
        with pytest.raises(ContractViolation):
            MatTuple.from_entries(mats)

    def test_matrices_are_read_only(self, E):
        with pytest.raises(ValueError):
            E.mats[0][0, 0] = 5.0

    def test_scaled_stays_exact(self, E):
        S = E.scaled(Fraction(1, 3))
        assert S.exact[0][0, 0] == Fraction(1, 3)

    def test_conjugated(self):
        M = MatTuple.from_entries([[[1, 2], [3, 4]]])
        C = M.conjugated([1, 0])
        assert C.exact[0].tolist() == [[4, 3], [2, 1]]
        with pytest.raises(ContractViolation):
            M.conjugated([0, 0])


class TestNorm:
    def test_examples(self):
        assert norm(np.eye(2)) == 2
        assert norm(np.zeros((3, 3))) == 0
        assert norm(np.array([[1, -2], [3, 0]])) == 6

    def test_exact(self):
        a = np.array([[Fraction(1, 3), Fraction(-2, 3)]], dtype=object)
        assert norm(a) == Fraction(1)


class TestWordProduct:
    def test_single_symbol(self, E):
        assert np.array_equal(word_product(E, (2,)), E.mats[2])

    def test_elementary_examples(self, E):
        # 0-based: symbols 1 and 2 are E12 and E21.
        assert np.array_equal(word_product(E, (1, 2)), E.mats[0])
        assert not word_product(E, (1, 1)).any()

    def test_matches_oracle(self):
        mats = [[["1/2", 2], [0, 1]], [[1, 0], ["-1/3", 3]]]
        M = MatTuple.from_entries(mats)
        ref = oracles.as_lists(mats)
        for w in [(0,), (1, 0), (0, 1, 1, 0), (1, 1, 1)]:
            got = word_product(M, w, exact=True)
            assert got.tolist() == oracles.product(ref, w)

    def test_errors(self, E):
        with pytest.raises(ContractViolation):
            word_product(E, ())
        with pytest.raises(ContractViolation):
            word_product(E, (4,))


class TestKron:
    def test_scalar(self):
        assert kron_power(np.array([[2.0]]), 2).tolist() == [[4.0]]

    def test_identity(self):
        assert np.array_equal(kron_power(np.eye(2), 4), np.eye(16))

    def test_swap(self):
        p = np.array([[0, 1], [1, 0]])
        k = kron_power(p, 2)
        assert k.tolist() == oracles.kron(p.tolist(), p.tolist())
        assert spectral_radius(k) == pytest.approx(1.0)

    def test_cap(self):
        with pytest.raises(ResourceError):
            kron_power(np.eye(3), 6, cap=100)

    def test_symmetric_restriction_keeps_radius(self):
        rng = np.random.default_rng(1)
        mats = [rng.standard_normal((3, 3)) for _ in range(2)]
        for q in (2, 4):
            full = sum(kron_power(m, q) for m in mats)
            sym = symmetric_power_sum(mats, q)
            assert sym.shape[0] == math.comb(3 + q - 1, q)
            assert spectral_radius(sym) == pytest.approx(oracles.eig_radius(full), rel=1e-9)


class TestSpectralRadius:
    def test_examples(self):
        assert spectral_radius([[3]]) == 3
        assert spectral_radius([[0, 1], [0, 0]]) == 0
        assert spectral_radius([[1, 1], [1, 0]]) == pytest.approx(PHI, abs=1e-9)

    def test_complex_dominant(self):
        rot = [[0, -2], [2, 0]]
        assert spectral_radius(rot) == pytest.approx(2.0, rel=1e-12)

    def test_against_eigvals(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.standard_normal((4, 4))
            assert spectral_radius(a) == pytest.approx(oracles.eig_radius(a), rel=1e-9)


class TestPerron:
    def test_scalar(self):
        p = perron_pair([[1]])
        assert p.rho == 1 and p.u.tolist() == [1] and p.v.tolist() == [1]

    def test_periodic(self):
        p = perron_pair([[0, 1], [1, 0]])
        assert p.rho == pytest.approx(1)
        assert p.u == pytest.approx([1, 1])
        assert p.v == pytest.approx([0.5, 0.5])

    def test_rank_one(self):
        p = perron_pair([[1, 1], [1, 1]])
        assert p.rho == pytest.approx(2)
        assert p.u[0] == pytest.approx(p.u[1])
        assert p.v @ p.u == pytest.approx(1)

    def test_invariants_random(self):
        rng = np.random.default_rng(3)
        tol = 1e-10
        for _ in range(20):
            b = rng.random((4, 4)) * (rng.random((4, 4)) < 0.6)
            if not oracles.strongly_connected(b != 0):
                continue
            p = perron_pair(b)
            scale = np.abs(b).sum()
            assert np.abs(b @ p.u - p.rho * p.u).sum() < tol * scale
            assert np.abs(p.v @ b - p.rho * p.v).sum() < tol * scale
            assert abs(p.v @ p.u - 1) < tol
            assert (p.u > 0).all() and (p.v > 0).all()

    def test_reducible(self):
        with pytest.raises(ContractViolation):
            perron_pair([[1, 1], [0, 1]])


class TestCondense:
    def test_self_loop(self):
        c = condense([[1]])
        assert c.order == ((0,),) and c.trivial_zero == (False,)

    def test_edge(self):
        c = condense([[0, 1], [0, 0]])
        assert c.order == ((0,), (1,))
        assert c.trivial_zero == (True, True)

    def test_cycle(self):
        assert len(condense([[0, 1], [1, 0]]).order) == 1

    def test_block_upper_triangular_random(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(1, 8))
            adj = rng.random((n, n)) < 0.25
            c = condense(adj)
            reach = oracles.reachability(adj)
            for i in range(n):
                for j in range(n):
                    same = reach[i][j] and reach[j][i]
                    assert same == (c.component_of[i] == c.component_of[j])
                    if adj[i, j]:
                        assert c.component_of[i] <= c.component_of[j]
            p = c.permutation
            assert sorted(p) == list(range(n))

    def test_tie_break_is_smallest_vertex(self):
        # Two independent sources {2} and {0}; 0 comes first.
        c = condense([[0, 0, 0], [0, 0, 0], [0, 1, 0]])
        assert c.order[0] == (0,)


class TestPositiveIrreducibility:
    def test_examples(self, E):
        assert is_positively_irreducible(E)
        assert not is_positively_irreducible(MatTuple.from_entries([[[1, 1], [0, 1]]]))
        assert is_positively_irreducible(MatTuple.from_entries([[[0, 1], [1, 0]]]))

    def test_negative_entry(self):
        with pytest.raises(ContractViolation):
            is_positively_irreducible(MatTuple.from_entries([[[1, -1], [1, 1]]]))

    def test_against_reachability(self):
        rng = np.random.default_rng(5)
        seen = set()
        for _ in range(200):
            d, k = (int(x) for x in rng.integers(1, 4, size=2))
            mats = (rng.random((k, d, d)) < 0.3).astype(int)
            if not mats.any():
                continue
            M = MatTuple.from_entries(mats.tolist())
            expected = oracles.strongly_connected(mats.sum(axis=0))
            assert is_positively_irreducible(M) == expected
            seen.add(expected)
        assert seen == {True, False}
