"""
Integral elements at a point
============================

For an ideal with constant coefficients we can compute polar spaces along
a flag, compare Cartan's bound with the codimension of the nearby integral
elements and decide whether the flag is ordinary.
"""

from edskit import parse_document
from edskit.point import PointIdeal, extension_correspondence, ordinary_test, polar_space


def ideal(text):
    spec = parse_document(text).ideals[0]
    return PointIdeal(spec.labels, spec.generators), spec.element


# Lagrangian planes for dx1^dy1 + dx2^dy2
lag, flag = ideal("""
coframe dx1 dx2 dy1 dy2;
ideal { dx1^dy1 + dx2^dy2 } element { @x1, @x2 }
""")
rep = ordinary_test(lag, flag)
print("Lagrangian: s =", rep.s, "bound", rep.bound, "codim", rep.codim, rep.ordinary)

# the polar space of a line is its symplectic complement
H, c = polar_space(lag, flag[:1])
print("H(E1) has dimension", H.dim, "codim", c)
print("E + v integral exactly for v in H(E):", extension_correspondence(lag, flag[:1]))

# here the integral planes form a set of codimension 2, but the bound is 1
bad, flag = ideal("""
coframe dx dy dz;
ideal { dx^dz, dy^dz } element { @x, @y }
""")
rep = ordinary_test(bad, flag)
print("dx^dz, dy^dz: s =", rep.s, "bound", rep.bound, "codim", rep.codim, rep.ordinary)
