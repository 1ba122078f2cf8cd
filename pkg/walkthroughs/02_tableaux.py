"""
Tableaux, characters and Cartan's test
======================================

A tableau is a linear space of W-valued forms on V.  Its characters come
from restricting to a generic flag, and it is involutive when its first
prolongation is as large as the characters allow.
"""

from itertools import combinations_with_replacement

from edskit.tableau import FormTableau, binomial_dim_check, cartan_test, prolong, shift_characters

# symmetric 3x3 matrices, the tableau of a gradient: u_i = p_i with p_ij = p_ji
n = 3
gens = []
for i, j in combinations_with_replacement(range(n), 2):
    g = {(i, (j,)): 1}
    g[(j, (i,))] = 1
    gens.append(g)
sym = FormTableau(n, n, 1, gens)
print("dim", sym.dim)

rep = cartan_test(sym)
print("characters", rep.characters.s)              # (3, 2, 1)
print("dim A(1)", rep.dim_prolongation, "bound", rep.bound)
print(rep.verdict)

# the prolongation has the shifted characters
print(cartan_test(prolong(sym)).characters.s, shift_characters(rep.characters.s))

# and every further prolongation has the binomial dimension
for k, dim, formula in binomial_dim_check(sym, 4):
    print(f"dim A({k - 1}) = {dim}  formula {formula}")

# a tableau that fails the test: u1_z = u2_y = t, all other first derivatives zero;
# the prolongation is zero, while the bound is 1
bad = FormTableau(2, 3, 1, [{(0, (2,)): 1, (1, (1,)): 1}])
rep = cartan_test(bad)
print(bad.dim, rep.characters.s, rep.dim_prolongation, rep.bound, rep.verdict)
