"""
Surfaces with prescribed curvature behaviour
============================================

Two systems on the orthonormal frame bundle of a surface.  The first asks
for a Gauss curvature with unit gradient; its derivative is not determined
by the equations, so a free derivative b appears.  The second prescribes
the Hessian of K, which is only compatible under a condition on a(K).
"""

from edskit import analyze, check_torsion, load, prolong_structure, to_dsl
from edskit.corpus import corpus_dir

grad = load(corpus_dir() / "grad_k_unit.eds").system
print(to_dsl(grad))

for ident in check_torsion(grad).identities:
    print(f"  {ident.name:10} {ident.status}")

rep = analyze(grad)
print(rep.verdict, "characters", rep.characters.s, "|", rep.generality)

# one more derivative: b picks up its own free derivative c
p1 = prolong_structure(grad)
print(to_dsl(p1))
print(analyze(p1).verdict)

# the Hessian system with a(K), b(K) left arbitrary
hess = load(corpus_dir() / "hessian_generic.eds").system
for ident in check_torsion(hess).failures:
    print(f"  {ident.name} fails: {ident.witness}")

# with a' = a b - K imposed, everything closes up
hess = load(corpus_dir() / "hessian_type.eds").system
print(check_torsion(hess).holds)
