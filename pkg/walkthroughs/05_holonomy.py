"""
Torsion-free H-structures
=========================

Curvature kernels K0, K1 of a matrix Lie algebra, the involutivity of K0
and the structure equations they determine.
"""

from itertools import combinations

from edskit import LieSubalgebra, curvature_kernels, torsion_free_analysis
from edskit.corpus import corpus_dir
from edskit.dsl import load
from edskit.hstruct import cross_check, emit_structure_text


def so(m):
    out = []
    for i, j in combinations(range(m), 2):
        X = [[0] * m for _ in range(m)]
        X[i][j], X[j][i] = -1, 1
        out.append(X)
    return out


# Riemannian metrics: K0 is the space of algebraic curvature tensors
for m in range(2, 6):
    k = curvature_kernels(LieSubalgebra(so(m)))
    tf = torsion_free_analysis(LieSubalgebra(so(m)))
    print(f"so({m})  K0={k.dims['K0']:3}  K1={k.dims['K1']:4}  s={tf.characters.s}  {tf.verdict}")

# su(2) in gl(4)
su2 = LieSubalgebra.from_spec(load(corpus_dir() / "su2.eds").algebras[0])
tf = torsion_free_analysis(su2)
print("su(2):", tf.kernels.dims, tf.characters.s, "|", tf.generality)

# the structure equations, ready for the general analysis
print(emit_structure_text(su2))
_, rep, agree = cross_check(su2)
print("emitted system:", rep.verdict, rep.characters.trimmed(), "agrees:", agree)
