from fractions import Fraction

import pytest

from edskit.dsl import parse_document
from edskit.errors import AnalysisError
from edskit.exterior import Form, wedge
from edskit.point import (PointIdeal, extension_correspondence, flag_characters, integral_variety_codim,
                          is_integral, ordinary_test, polar_space)
from edskit.structeq import linearized_type_a_ideal, tangent_tableau
from edskit.tableau import generic_characters


def ideal_of(text):
    spec = parse_document(text).ideals[0]
    return PointIdeal(spec.labels, spec.generators), spec.element


def lagrangian(n):
    labels = [f"dx{i}" for i in range(n)] + [f"dy{i}" for i in range(n)]
    e = lambda k: Form.basis(labels, k)
    omega = Form.zero(2, labels)
    for i in range(n):
        omega = omega + wedge(e(i), e(n + i))
    flag = [tuple(Fraction(int(j == i)) for j in range(2 * n)) for i in range(n)]
    return PointIdeal(labels, [omega]), flag


class TestExamples:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_lagrangian(self, n):
        ideal, flag = lagrangian(n)
        rep = ordinary_test(ideal, flag)
        assert rep.s == (0,) + (1,) * n
        # symmetric n×n matrices: n(n+1)/2 free of n² entries
        assert rep.codim == rep.bound == n * (n - 1) // 2
        assert rep.ordinary == "ordinary"

    def test_frobenius(self):
        ideal, flag = ideal_of("coframe dx dy dz;\nideal { dz } element { @x, @y }\n")
        rep = ordinary_test(ideal, flag)
        assert rep.s == (1, 0, 0) and rep.c == (1, 1)
        assert rep.codim == rep.bound == 2 and rep.ordinary == "ordinary"

    def test_not_ordinary(self):
        ideal, flag = ideal_of("coframe dx dy dz;\nideal { dx^dz, dy^dz } element { @x, @y }\n")
        rep = ordinary_test(ideal, flag)
        assert rep.s == (0, 1, 0)
        assert rep.bound == 1 and rep.codim == 2
        assert rep.ordinary == "not_ordinary"

    def test_corpus_agrees(self, corpus):
        spec = corpus("lagrangian3").ideals[0]
        rep = ordinary_test(PointIdeal(spec.labels, spec.generators), spec.element)
        assert rep.s == (0, 1, 1, 1)


class TestPolar:
    def test_zero_element(self):
        ideal, _ = lagrangian(2)
        H, c = polar_space(ideal, [])
        assert H.dim == 4 and c == 0

    def test_line_in_symplectic_space(self):
        ideal, flag = lagrangian(2)
        H, c = polar_space(ideal, flag[:1])
        # H(e) = e^⊥ under ω
        assert c == 1 and H.dim == 3

    def test_non_integral_rejected(self):
        ideal, _ = lagrangian(1)
        with pytest.raises(AnalysisError):
            polar_space(ideal, [(1, 0), (0, 1)])

    def test_dependent_flag_rejected(self):
        ideal, _ = lagrangian(2)
        with pytest.raises(AnalysisError):
            flag_characters(ideal, [(1, 0, 0, 0), (2, 0, 0, 0)])

    def test_is_integral(self):
        ideal, flag = lagrangian(2)
        assert is_integral(ideal, flag)
        assert not is_integral(ideal, [(1, 0, 0, 0), (0, 0, 1, 0)])


class TestExtension:
    @pytest.mark.parametrize("n", [2, 3])
    def test_lagrangian(self, n):
        ideal, flag = lagrangian(n)
        for i in range(n):
            assert extension_correspondence(ideal, flag[:i])

    def test_not_ordinary_example(self):
        ideal, flag = ideal_of("coframe dx dy dz;\nideal { dx^dz, dy^dz } element { @x, @y }\n")
        assert extension_correspondence(ideal, flag[:1])


class TestVariety:
    def test_nonlinear_detected(self):
        labels = ("a", "b", "c", "d")
        e = lambda k: Form.basis(labels, k)
        ideal = PointIdeal(labels, [wedge(e(2), e(3))])
        codim, lin = integral_variety_codim(ideal, [(1, 0, 0, 0), (0, 1, 0, 0)])
        # q02 q13 - q03 q12 = 0 has no linear part
        assert codim == "nonlinear" and lin == 0

    def test_transverse_must_complement(self):
        ideal, flag = lagrangian(1)
        with pytest.raises(AnalysisError):
            integral_variety_codim(ideal, flag, transverse=[0])


def test_linearized_type_a_shifts_characters(corpus):
    sys = corpus("so3_metrics").system
    tab, _, _ = tangent_tableau(sys, None)
    _, chars = generic_characters(tab)
    ideal, flag = linearized_type_a_ideal(sys)
    rep = flag_characters(ideal, flag)
    assert rep.s[0] == 0
    assert rep.s[1:] == tuple(sys.n + x for x in chars.s)
