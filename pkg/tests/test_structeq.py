from itertools import combinations

import pytest

from edskit.dsl import parse_document
from edskit.errors import AnalysisError
from edskit.exterior import Form
from edskit.structeq import (analyze, check_torsion, dim_Mk, free_tableau, generality_sentence,
                             invariant_count, jacobi_manifold_check, jacobi_map, prolong_structure,
                             solve_for_G, tangent_tableau)
from edskit.symexpr import is_zero
from edskit.tableau import prolonged_characters
from oracles import jacobi_defect

LABELS = ("v1", "v2", "v3")


def constants_to_forms(c, labels=LABELS):
    """c[i][j][k] -> 2-forms ½ c^i_jk v^j∧v^k."""
    n = len(c)
    return [Form(2, labels, {(j, k): c[i][j][k] for j, k in combinations(range(n), 2) if c[i][j][k]})
            for i in range(n)]


def antisym(n, entries):
    c = [[[0] * n for _ in range(n)] for _ in range(n)]
    for (i, j, k), v in entries.items():
        c[i][j][k] = v
        c[i][k][j] = -v
    return c


SO3_C = antisym(3, {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1})
HEIS_C = antisym(3, {(0, 1, 2): 1})
NON_LIE_C = antisym(3, {(0, 0, 1): 1, (1, 0, 2): 1})


class TestJacobiMap:
    @pytest.mark.parametrize("c", [SO3_C, HEIS_C])
    def test_lie_algebras_vanish(self, c):
        assert jacobi_defect(c) == 0
        assert all(f.is_zero() for f in jacobi_map(constants_to_forms(c)))

    def test_non_lie(self):
        assert jacobi_defect(NON_LIE_C) != 0
        assert any(not f.is_zero() for f in jacobi_map(constants_to_forms(NON_LIE_C)))

    def test_empty(self):
        assert jacobi_map([]) == []


class TestTorsion:
    def test_grad_k_pending_and_tableau(self, corpus):
        rep = check_torsion(corpus("grad_k_unit").system)
        assert [i.status for i in rep.identities] == ["holds", "holds", "holds", "pending"]
        assert "K" in rep.tableau_terms

    def test_hessian_generic_fails(self, corpus):
        rep = check_torsion(corpus("hessian_generic").system)
        assert not rep.holds
        assert {i.name for i in rep.failures} == {"d(d K1)", "d(d K2)"}

    def test_hessian_type_holds(self, corpus):
        assert check_torsion(corpus("hessian_type").system).holds


BAD_G = """system bad;
coframe w1 w2;
param a1 a2;
free b;
d w1 = 0;
d w2 = 0;
d a1 = b*w1;
d a2 = b*w1 + a1*w2;
sample { a1: 1, a2: 0, b: 1 }
sample { a1: 2, a2: 1, b: 3 }
sample { a1: -1, a2: 5, b: 2 }
"""


class TestG:
    def test_grad_k(self, corpus):
        g = solve_for_G(corpus("grad_k_unit").system)
        assert g.exists and g.method == "symbolic"
        G = g.G["b"]
        assert G.labels == ("w1", "w2", "w12") and G.coeffs == {(2,): 1}
        assert g.kernel_dim == 1

    def test_inconsistent(self):
        # G_2 is forced to 0 by d(d a1) and to b by d(d a2)
        g = solve_for_G(parse_document(BAD_G).system)
        assert g.exists is False and g.method == "inconsistent"
        assert analyze(parse_document(BAD_G).system).verdict == "does not apply"

    def test_free_tableau(self, corpus):
        assert free_tableau(corpus("grad_k_unit").system).dim == 1

    def test_free_tableau_needs_variant(self, corpus):
        with pytest.raises(AnalysisError):
            free_tableau(corpus("so3_metrics").system)


class TestJacobiManifold:
    def test_einstein_weyl(self, corpus):
        rep = jacobi_manifold_check(corpus("einstein_weyl").system)
        assert rep.solvable and rep.dim_A == 4 and rep.kernel_dim == 8

    def test_const_ricci_distinct(self, corpus):
        rep = jacobi_manifold_check(corpus("const_ricci_distinct").system)
        assert rep.solvable and rep.kernel_dim == 6

    def test_metrics(self, corpus):
        rep = jacobi_manifold_check(corpus("so3_metrics").system)
        assert rep.solvable and rep.codim == 21 and rep.kernel_dim == 15


class TestTypeA:
    def test_so3_metrics(self, corpus):
        r = analyze(corpus("so3_metrics").system)
        assert r.verdict == "applies"
        assert r.characters.trimmed() == (0, 3, 3)
        assert r.generality == "solutions depend on 3 functions of 3 variables"

    def test_two_equal_not_involutive(self, corpus):
        r = analyze(corpus("const_ricci_two_equal").system)
        assert r.verdict == "does not apply"
        assert r.dims["prolongation"] == 3 and r.dims["tableau"] == 2

    def test_tangent_tableau_effective_vars(self, corpus):
        tab, gens, _ = tangent_tableau(corpus("einstein_weyl").system)
        assert len(gens) == 4 == tab.dim


class TestProlongStructure:
    def test_grad_k(self, corpus):
        p = prolong_structure(corpus("grad_k_unit").system)
        assert p.name == "grad_k_unit_p1" and p.vars.frees == ("c",)
        t = p.vars
        s, cos, c = t.symbol("sin"), t.symbol("cos"), t.symbol("c")
        Fb = p.F["b"]
        fr = p.frame
        idx = fr.index
        assert is_zero(Fb[(idx("w1"),)] + c * s) and is_zero(Fb[(idx("w2"),)] - c * cos)
        assert Fb[(idx("w12"),)] == 1
        r = analyze(p)
        assert r.verdict == "applies" and r.characters.s == (1, 0, 0)

    def test_finsler_base_gains_seven(self, corpus):
        base = corpus("finsler_base").system
        p = prolong_structure(base)
        assert len(p.vars.frees) == 7
        r = analyze(p)
        assert r.verdict == "applies" and r.characters.s == (3, 3, 1)
        assert r.dims["prolongation"] == r.dims["bound"] == 12

    def test_ctft_rejected(self, corpus):
        with pytest.raises(AnalysisError):
            prolong_structure(corpus("hessian_generic").system)


class TestCounting:
    def test_metrics_counts(self):
        s = (0, 3, 3)
        assert [invariant_count(0, s, k) for k in (1, 2, 3)] == [6, 21, 48]
        # k(k+1)(k+5)/2
        assert all(invariant_count(0, s, k) == k * (k + 1) * (k + 5) // 2 for k in range(8))

    def test_constants_only(self):
        assert invariant_count(5, (0, 0, 0), 4) == 5

    def test_dim_Mk(self):
        assert dim_Mk(3, 0, (0, 3, 3), 0) == 3 + 6

    def test_prolonged_characters_lagrangian(self):
        # one shift: s_q becomes Σ_{j≥q} s_j
        assert prolonged_characters((1, 1), 1) == (2, 1)
        assert prolonged_characters((1, 1), 2) == (3, 1)

    def test_generality(self):
        assert generality_sentence((0, 3, 3)) == "solutions depend on 3 functions of 3 variables"
        assert generality_sentence((1,)) == "solutions depend on 1 function of 1 variable"
        assert generality_sentence((0, 0)) == "solutions depend on finitely many constants"
