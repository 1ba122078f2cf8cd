from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from edskit.dsl import parse_document
from edskit.exterior import Form, contract, merge_sign, sort_sign, structure_d, wedge
from oracles import tensor_wedge

N = 5
LABELS = tuple(f"e{i}" for i in range(N))


def forms(degree):
    keys = list(combinations(range(N), degree))
    return st.dictionaries(st.sampled_from(keys), st.fractions(-3, 3, max_denominator=3), max_size=4).map(
        lambda d: Form(degree, LABELS, d))


def basis(i, labels=LABELS):
    return Form.basis(labels, i)


class TestWedge:
    def test_dx_dy(self):
        f = wedge(basis(0), basis(1))
        assert f.coeffs == {(0, 1): 1}

    def test_reverse_sign(self):
        assert wedge(basis(1), basis(0)).coeffs == {(0, 1): -1}

    @settings(max_examples=40, deadline=None)
    @given(forms(1))
    def test_one_form_squares_to_zero(self, w):
        assert wedge(w, w).is_zero()

    def test_symplectic_square(self):
        labels = ("dp1", "dx1", "dp2", "dx2")
        e = lambda i: Form.basis(labels, i)
        omega = e(0) * e(1) + e(2) * e(3)
        sq = wedge(omega, omega)
        assert sq.coeffs == {(0, 1, 2, 3): 2}

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 3).flatmap(lambda p: st.integers(1, 2).flatmap(
        lambda q: st.tuples(forms(p), forms(q)))))
    def test_graded_commutativity_and_oracle(self, pair):
        a, b = pair
        ab, ba = wedge(a, b), wedge(b, a)
        sign = (-1) ** (a.degree * b.degree)
        assert ab == ba.scale(sign)
        ref = tensor_wedge(a.coeffs, a.degree, b.coeffs, b.degree)
        assert ab.coeffs == ref

    @settings(max_examples=40, deadline=None)
    @given(forms(1), forms(1), forms(2))
    def test_associative(self, a, b, c):
        assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


class TestSigns:
    def test_sort_sign(self):
        assert sort_sign((2, 0, 1)) == (1, (0, 1, 2))
        assert sort_sign((1, 0)) == (-1, (0, 1))

    def test_merge_repeated_is_zero(self):
        assert merge_sign((0, 1), (1,))[0] == 0


class TestContract:
    labels = ("dx", "dy", "dz")

    def test_basic(self):
        dxdz = Form(2, self.labels, {(0, 2): 1})
        assert contract(dxdz, (1, 0, 0)) == Form(1, self.labels, {(2,): 1})
        assert contract(Form(2, self.labels, {(1, 2): 1}), (1, 0, 0)).is_zero()

    def test_bilinear(self):
        dxdz = Form(2, self.labels, {(0, 2): 1})
        assert contract(dxdz, (1, 0, 1)) == Form(1, self.labels, {(2,): 1, (0,): -1})

    @settings(max_examples=30, deadline=None)
    @given(forms(2), st.lists(st.integers(-2, 2), min_size=N, max_size=N),
           st.lists(st.integers(-2, 2), min_size=N, max_size=N))
    def test_contract_matches_evaluation(self, f, v, w):
        assert contract(f, v)(w) == f(v, w)


SO3 = """
coframe w1 w2 w3;
d w1 = -w2 ^ w3;
d w2 = -w3 ^ w1;
d w3 = -w1 ^ w2;
"""

HEIS = """
coframe w1 w2 w3;
d w1 = -w2 ^ w3;
d w2 = 0;
d w3 = 0;
"""


class TestStructureD:
    def test_maurer_cartan(self):
        sys = parse_document(SO3).system
        w1 = Form.basis(sys.coframe, 0)
        assert structure_d(sys, w1) == Form(2, sys.frame, {(1, 2): -1})

    @pytest.mark.parametrize("text", [SO3, HEIS])
    def test_d_squared_vanishes(self, text):
        sys = parse_document(text).system
        for i in range(sys.n):
            dd = structure_d(sys, structure_d(sys, Form.basis(sys.coframe, i)))
            assert dd.is_zero()

    def test_non_lie_constants_fail(self):
        text = "coframe w1 w2 w3;\nd w1 = -w1 ^ w2;\nd w2 = -w1 ^ w3;\nd w3 = 0;\n"
        sys = parse_document(text).system
        dd = [structure_d(sys, structure_d(sys, Form.basis(sys.coframe, i))) for i in range(3)]
        assert any(not f.is_zero() for f in dd)

    def test_grad_k_second_derivative(self, corpus):
        sys = corpus("grad_k_unit").system
        ddK = structure_d(sys, sys.F["K"], use_G=False)
        t = sys.vars
        s, c = t.symbol("sin"), t.symbol("cos")
        fr = sys.frame
        e = lambda name: Form.basis(fr, fr.index(name))
        beta = e("beta_b")
        expected = wedge(beta - e("w12"), e("w1").scale(-s) + e("w2").scale(c))
        diff = ddK - expected
        assert all(x.is_zero() for x in diff.coeffs.values())
