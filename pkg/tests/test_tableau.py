from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from edskit.hstruct import LieSubalgebra, curvature_kernels
from edskit.structeq import tangent_tableau
from edskit.tableau import (CharacterSeq, Flag, FormTableau, binomial_dim_check, cartan_test,
                            generic_characters, prolong, prolonged_characters, restriction_dims,
                            shift_characters, tableau_of_graded_subspace)
from oracles import dense_prolongation_dim, symmetric_power_dim


def linear_tableau(mats, m, n):
    gens = [{(w, (j,)): Fraction(M[w][j]) for w in range(m) for j in range(n) if M[w][j]} for M in mats]
    return FormTableau(m, n, 1, gens)


def symmetric_tableau(n):
    """S²(V*) ⊂ V ⊗ V*: symmetric n×n matrices."""
    mats = []
    for i, j in combinations_with_replacement(range(n), 2):
        M = [[0] * n for _ in range(n)]
        M[i][j] = M[j][i] = 1
        mats.append(M)
    return linear_tableau(mats, n, n)


def full_tableau(m, n):
    mats = []
    for w in range(m):
        for j in range(n):
            M = [[0] * n for _ in range(m)]
            M[w][j] = 1
            mats.append(M)
    return linear_tableau(mats, m, n)


SO3 = [[[0, -1, 0], [1, 0, 0], [0, 0, 0]], [[0, 0, -1], [0, 0, 0], [1, 0, 0]], [[0, 0, 0], [0, 0, -1], [0, 1, 0]]]


@pytest.fixture(scope="module")
def k0_so3():
    return curvature_kernels(LieSubalgebra(SO3, name="so3")).K0


class TestRestriction:
    def test_symmetric_coordinate_flag(self):
        c = restriction_dims(symmetric_tableau(2), Flag.coordinate(2))
        assert tuple(c) == (2, 3)

    def test_so3_curvature(self, k0_so3):
        _, chars = generic_characters(k0_so3)
        assert chars.cumulative == (0, 3, 6)
        assert chars.s == (0, 3, 3)

    def test_last_entry_is_dimension(self, k0_so3):
        for tab in (symmetric_tableau(3), k0_so3):
            n = tab.v_dim
            rev = Flag.permutation(list(range(n))[::-1])
            assert restriction_dims(tab, rev)[-1] == restriction_dims(tab, Flag.coordinate(n))[-1] == tab.dim


class TestProlong:
    def test_symmetric_to_cubic(self):
        tab = symmetric_tableau(2)
        assert prolong(tab).dim == 4 == dense_prolongation_dim(
            [[[int(i == a and j == b or i == b and j == a) for j in range(2)] for i in range(2)]
             for a, b in combinations_with_replacement(range(2), 2)], 2, 2)

    def test_so3_second_bianchi(self, k0_so3):
        assert prolong(k0_so3).dim == 15

    def test_zero(self):
        z = FormTableau(2, 3, 1)
        assert z.dim == 0 and prolong(z).dim == 0

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.data())
    def test_against_dense_oracle(self, m, n, data):
        k = data.draw(st.integers(0, m * n))
        mats = [[[data.draw(st.integers(-2, 2)) for _ in range(n)] for _ in range(m)] for _ in range(k)]
        tab = linear_tableau(mats, m, n)
        assert prolong(tab).dim == dense_prolongation_dim(mats, m, n)


class TestCharacters:
    def test_einstein_weyl(self, corpus):
        tab, _, _ = tangent_tableau(corpus("einstein_weyl").system, None)
        _, chars = generic_characters(tab)
        assert chars.trimmed() == (0, 4)
        assert tab.effective()[0].v_dim == 3

    def test_su2(self, corpus):
        from edskit.hstruct import LieSubalgebra
        h = LieSubalgebra.from_spec(corpus("su2").algebras[0])
        _, chars = generic_characters(curvature_kernels(h).K0)
        assert chars.s == (0, 3, 2, 0)

    def test_full_tableau(self):
        _, chars = generic_characters(full_tableau(2, 3))
        assert chars.s == (2, 2, 2)


class TestCartan:
    def test_so3_involutive(self, k0_so3):
        rep = cartan_test(k0_so3)
        assert rep.involutive and rep.bound == 2 * 3 + 3 * 3 == rep.dim_prolongation == 15

    def test_two_equal_not_involutive(self, corpus):
        tab, _, _ = tangent_tableau(corpus("const_ricci_two_equal").system, None)
        rep = cartan_test(tab)
        assert not rep.involutive
        assert rep.dim_prolongation < rep.bound

    def test_zero_tableau(self):
        rep = cartan_test(FormTableau(2, 3, 1))
        assert rep.involutive and rep.characters.s == (0, 0, 0)

    def test_bound_never_exceeded(self):
        for tab in (symmetric_tableau(3), full_tableau(2, 2), linear_tableau([[[1, 0], [0, 0]]], 2, 2)):
            rep = cartan_test(tab)
            assert rep.dim_prolongation <= rep.bound


class TestBinomial:
    def test_symmetric_three(self):
        tab = symmetric_tableau(3)
        assert cartan_test(tab).characters.s == (3, 2, 1)
        rows = binomial_dim_check(tab, 2)
        assert rows[1] == (2, 10, 10) and symmetric_power_dim(3, 3) == 10

    def test_full(self):
        assert binomial_dim_check(full_tableau(2, 2), 2)[1] == (2, 6, 6)

    def test_lagrangian_k3(self):
        rows = binomial_dim_check(symmetric_tableau(2), 3)
        assert rows[2] == (3, 5, comb(2, 2) * 2 + comb(3, 2) * 1) == (3, 5, 5)


class TestShift:
    def test_shift_matches_prolongation(self):
        tab = symmetric_tableau(3)
        s = cartan_test(tab).characters.s
        assert cartan_test(prolong(tab)).characters.s == shift_characters(s) == (6, 3, 1)

    def test_two_form_tableau(self, k0_so3):
        p = prolong(k0_so3)
        assert p.degree == 1 and p.dim == 15
        assert cartan_test(p).characters.s == shift_characters((0, 3, 3)) == (6, 6, 3)
        # third-order invariants of 3D metrics
        assert prolong(p).dim == 27

    def test_iterated(self):
        s = (2, 1)
        cur = s
        for k in range(1, 4):
            cur = shift_characters(cur)
            assert prolonged_characters(s, k) == cur


class TestGradedSubspace:
    def test_single_form(self):
        m, n = 3, 2
        tab = tableau_of_graded_subspace([(0, {(0, ()): 1})], m, n)
        assert tab.dim == m * n - n

    def test_zero_ideal(self):
        assert tableau_of_graded_subspace([], 2, 3).dim == 6

    def test_whole_degree_one(self):
        gens = [(1, {(w, (j,)): 1}) for w in range(2) for j in range(3)]
        assert tableau_of_graded_subspace(gens, 2, 3).dim == 0


def test_character_seq_helpers():
    cs = CharacterSeq((0, 3, 3, 0))
    assert cs.bound() == 15 and cs.trimmed() == (0, 3, 3) and cs.last_nonzero() == (3, 3)
