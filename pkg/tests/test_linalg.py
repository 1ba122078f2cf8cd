import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from edskit.linalg import (Echelon, Mat, Subspace, format_rat, intersect, kernel, rank, rref,
                           solve_affine, solve_sparse, to_rat)
from oracles import brute_minor_rank, dense_kernel, dense_rank

rats = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(rats, min_size=c, max_size=c), min_size=r, max_size=r)))


def matvec(M, v):
    return [sum(a * b for a, b in zip(row, v)) for row in M]


class TestRationals:
    def test_canonical_form(self):
        q = to_rat("-6/4")
        assert (q.numerator, q.denominator) == (-3, 2)
        assert Fraction(1, 6) + Fraction(1, 3) == Fraction(1, 2)

    def test_format(self):
        assert format_rat(Fraction(4, 2)) == 2
        assert format_rat(Fraction(-3, 6)) == "-1/2"

    def test_rejects_floats_and_bools(self):
        with pytest.raises(TypeError):
            to_rat(0.5)
        with pytest.raises(TypeError):
            to_rat(True)

    def test_mat_shape(self):
        m = Mat.from_rows([[1, 2, 3], [4, 5, 6]])
        assert (m.rows, m.cols) == (2, 3)
        with pytest.raises(ValueError):
            Mat.from_rows([[1, 2], [3]])


class TestRref:
    def test_identity(self):
        res = rref([[1, 0], [0, 1]])
        assert res.rank == 2
        assert res.kernel.dim == 0

    def test_proportional_rows(self):
        res = rref([[1, 2], [2, 4]])
        assert res.rank == 1
        assert res.kernel == Subspace.span(2, [(-2, 1)])

    def test_product_of_rank_three(self):
        rng = random.Random(7)
        A = [[Fraction(rng.randint(-4, 4)) for _ in range(3)] for _ in range(7)]
        B = [[Fraction(rng.randint(-4, 4)) for _ in range(5)] for _ in range(3)]
        assert brute_minor_rank(A) == 3 and brute_minor_rank(B) == 3
        M = [[sum(A[i][k] * B[k][j] for k in range(3)) for j in range(5)] for i in range(7)]
        res = rref(M)
        assert res.rank == 3 == brute_minor_rank(M)
        assert res.kernel.dim == 2
        for v in res.kernel.canonical():
            assert all(x == 0 for x in matvec(M, v))

    @settings(max_examples=60, deadline=None)
    @given(matrices())
    def test_matches_dense_oracle(self, M):
        assert rank(M) == dense_rank(M)
        K = kernel(M, len(M[0]))
        assert K.dim == len(dense_kernel(M, len(M[0])))
        for v in K.canonical():
            assert all(x == 0 for x in matvec(M, v))


class TestSubspaces:
    def test_intersection_basic(self):
        e = lambda i: [int(i == j) for j in range(3)]
        s = intersect(Subspace.span(3, [e(0), e(1)]), Subspace.span(3, [e(1), e(2)]))
        assert s == Subspace.span(3, [e(1)])

    def test_idempotent(self):
        S = Subspace.span(4, [(1, 2, 0, 1), (0, 1, 1, 1)])
        assert intersect(S, S) == S

    def test_generic_four_planes_in_six(self):
        rng = random.Random(3)
        vecs = lambda: [[rng.randint(-6, 6) for _ in range(6)] for _ in range(4)]
        a, b = vecs(), vecs()
        assert dense_rank(a) == dense_rank(b) == 4
        expected = 4 + 4 - dense_rank(a + b)
        assert expected == 2
        assert intersect(Subspace.span(6, a), Subspace.span(6, b)).dim == expected

    def test_dependent_basis_rejected(self):
        with pytest.raises(ValueError):
            Subspace(2, [(1, 1), (2, 2)])


class TestSolve:
    def test_identity(self):
        sol = solve_affine([[1, 0], [0, 1]], [1, 2])
        assert sol.solvable and list(sol.particular) == [1, 2] and sol.kernel.dim == 0

    def test_underdetermined(self):
        sol = solve_affine([[1, 1]], [0])
        assert sol.solvable and list(sol.particular) == [0, 0] and sol.kernel.dim == 1

    def test_inconsistent(self):
        sol = solve_affine([[1, 1], [2, 2]], [1, 3])
        assert not sol.solvable
        assert sol.augmented_rank > sol.rank

    @settings(max_examples=40, deadline=None)
    @given(matrices(4, 4), st.data())
    def test_particular_solves(self, M, data):
        x = data.draw(st.lists(rats, min_size=len(M[0]), max_size=len(M[0])))
        b = matvec(M, x)
        sol = solve_affine(M, b)
        assert sol.solvable
        assert matvec(M, sol.particular) == b

    def test_sparse_matches_dense(self):
        rows = [{0: Fraction(1), 2: Fraction(-1)}, {1: Fraction(2)}]
        sol = solve_sparse(rows, [Fraction(3), Fraction(4)], 3)
        assert sol.solvable and sol.kernel.dim == 1
        assert sol.particular[1] == 2

    def test_echelon_incremental(self):
        ech = Echelon(3)
        assert ech.add({0: 1, 1: 1})
        assert not ech.add({0: 2, 1: 2})
        assert ech.rank == 1
        assert ech.contains({0: -1, 1: -1})
