"""
Forms, wedge products and structure equations
=============================================

Exact-coefficient differential forms on a coframe, and the exterior
derivative induced by a set of structure equations.
"""

from edskit import parse_document
from edskit.exterior import Form, contract, structure_d, wedge

# a coframe is just a tuple of labels; Form.basis picks one element
labels = ("dx", "dy", "dz")
dx, dy, dz = (Form.basis(labels, i) for i in range(3))

print(wedge(dx, dy))            # dx^dy
print(wedge(dy, dx))            # -dx^dy
print(wedge(dx, dx).is_zero())  # True

# * and ^ both wedge, + and - add; ^ binds looser than + in Python
omega = dx * dy + (dy ^ dz)
print(omega)

# interior product with a vector, and evaluation on two vectors
print(contract(omega, (0, 1, 0)))
print(omega((1, 0, 0), (0, 1, 0)))

# structure equations of SO(3): d w1 = -w2^w3 and cyclic
so3 = parse_document("""
system so3;
coframe w1 w2 w3;
d w1 = -w2 ^ w3;
d w2 = -w3 ^ w1;
d w3 = -w1 ^ w2;
""").system

w1 = Form.basis(so3.coframe, 0)
dw1 = structure_d(so3, w1)
print("d w1 =", dw1)
print("d(d w1) =", structure_d(so3, dw1))  # 0: the Jacobi identity
