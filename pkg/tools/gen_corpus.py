"""Regenerate the machine-written corpus files.

Run from the repository root:  python3 tools/gen_corpus.py

Hand-written entries (Finsler family, Hessian, |grad K| = 1, Ricci gradient,
point ideals) are not touched.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "edskit" / "corpus"


def fmt(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def linear_form(terms) -> str:
    """``[(coef_text, 'a ^ b')]`` as a DSL sum; coef_text None means 1."""
    parts = []
    for coef, mono in terms:
        if coef is None:
            parts.append(f"+ {mono}")
        elif coef == "-1":
            parts.append(f"- {mono}")
        else:
            parts.append(f"+ ({coef}) * {mono}")
    if not parts:
        return "0"
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


# ----------------------------------------------------------------------------
# three-dimensional metrics in vector form

ETA = ["eta1", "eta2", "eta3"]
THETA = {(2, 3): "th23", (3, 1): "th31", (1, 2): "th12"}
RNAMES = {(1, 1): "R11", (1, 2): "R12", (1, 3): "R13", (2, 2): "R22", (2, 3): "R23", (3, 3): "R33"}


def theta(i, j):
    if i == j:
        return None
    if (i, j) in THETA:
        return 1, THETA[(i, j)]
    return -1, THETA[(j, i)]


def R(i, j):
    return RNAMES[(min(i, j), max(i, j))]


def S(i, j):
    if i == j:
        return f"{R(i, i)} - (R11 + R22 + R33)/4"
    return R(i, j)


def metric_equations() -> list[str]:
    lines = []
    for i in range(1, 4):
        terms = []
        for j in range(1, 4):
            t = theta(i, j)
            if t:
                sign, name = t
                terms.append(("-1" if sign > 0 else None, f"{name} ^ eta{j}"))
        lines.append(f"d eta{i} = {linear_form(terms)};")
    for (i, j), name in THETA.items():
        terms = []
        for k in range(1, 4):
            a, b = theta(i, k), theta(k, j)
            if a and b:
                sign = -a[0] * b[0]
                terms.append((None if sign > 0 else "-1", f"{a[1]} ^ {b[1]}"))
        for k in range(1, 4):
            if k != j:
                terms.append((S(i, k), f"eta{k} ^ eta{j}"))
            if k != i:
                terms.append((S(k, j), f"eta{i} ^ eta{k}"))
        lines.append(f"d {name} = {linear_form(terms)};")
    return lines


def rotation(a, b, c, d):
    N = Fraction(a * a + b * b + c * c + d * d)
    return [
        [(a * a + b * b - c * c - d * d) / N, 2 * (b * c - a * d) / N, 2 * (b * d + a * c) / N],
        [2 * (b * c + a * d) / N, (a * a - b * b + c * c - d * d) / N, 2 * (c * d - a * b) / N],
        [2 * (b * d - a * c) / N, 2 * (c * d + a * b) / N, (a * a - b * b - c * c + d * d) / N],
    ]


def conj(P, diag):
    # R = P^t C P
    return [[sum(P[k][i] * diag[k] * P[k][j] for k in range(3)) for j in range(3)] for i in range(3)]


def r_sample(Rm, extra) -> str:
    vals = dict(extra)
    for (i, j), nm in RNAMES.items():
        vals[nm] = Rm[i - 1][j - 1]
    return "sample { " + ", ".join(f"{k}: {fmt(v)}" for k, v in vals.items()) + " }"


HEADER = "# Generated by tools/gen_corpus.py; edit the generator, not this file.\n"


def write(name, body):
    (OUT / f"{name}.eds").write_text(HEADER + body.rstrip() + "\n", encoding="utf-8")


def so3_metrics():
    lines = ["# Riemannian 3-manifolds in vector form; the Ricci matrix R is unrestricted.",
             "system so3_metrics;", "coframe eta1 eta2 eta3 th23 th31 th12;",
             "param R11 R12 R13 R22 R23 R33;", "mode TYPE_A;", ""]
    lines += metric_equations()
    lines += ["", "sample { R11: 1, R12: 2, R13: -1, R22: 3, R23: 1/2, R33: -2 }"]
    write("so3_metrics", "\n".join(lines))


ROTATIONS = [(1, 2, 3, 4), (2, -1, 1, 3), (3, 1, -2, 1)]


def const_ricci_distinct():
    c = (Fraction(5), Fraction(2), Fraction(-1))
    lines = ["# Riemannian 3-manifolds whose Ricci eigenvalues are three distinct constants.",
             "system const_ricci_distinct;", "coframe eta1 eta2 eta3 th23 th31 th12;",
             "param R11 R12 R13 R22 R23 R33;", "const c1 c2 c3;", "mode TYPE_A;", ""]
    lines += metric_equations()
    lines += ["",
              "relation R11 + R22 + R33 = c1 + c2 + c3;",
              "relation R11*R22 - R12^2 + R11*R33 - R13^2 + R22*R33 - R23^2 = c1*c2 + c1*c3 + c2*c3;",
              "relation R11*(R22*R33 - R23^2) - R12*(R12*R33 - R23*R13) + R13*(R12*R23 - R22*R13) = c1*c2*c3;",
              ""]
    for q in ROTATIONS:
        lines.append(r_sample(conj(rotation(*q), c), {"c1": c[0], "c2": c[1], "c3": c[2]}))
    write("const_ricci_distinct", "\n".join(lines))


def const_ricci_two_equal():
    c1, c2 = Fraction(3), Fraction(-1)
    lines = ["# Riemannian 3-manifolds whose Ricci eigenvalues are constants c1 (simple) and c2 (double).",
             "system const_ricci_two_equal;", "coframe eta1 eta2 eta3 th23 th31 th12;",
             "param R11 R12 R13 R22 R23 R33;", "const c1 c2;", "mode TYPE_A;", ""]
    lines += metric_equations()
    lines += ["", "# R - c2 I has rank one and trace c1 - c2",
              "relation R11 + R22 + R33 = c1 + 2*c2;"]
    M = {(i, j): (f"(R{i}{j} - c2)" if i == j else R(i, j)) for i in range(1, 4) for j in range(1, 4)}
    for (i, j) in [(1, 2), (1, 3), (2, 3)]:
        for (k, l) in [(1, 2), (1, 3), (2, 3)]:
            if (i, j) <= (k, l):
                lines.append(f"relation {M[(i, k)]}*{M[(j, l)]} - {M[(i, l)]}*{M[(j, k)]} = 0;")
    lines.append("")
    for q in ROTATIONS:
        lines.append(r_sample(conj(rotation(*q), (c1, c2, c2)), {"c1": c1, "c2": c2}))
    write("const_ricci_two_equal", "\n".join(lines))


def two_equal_samples():
    out = []
    for a1, a2, a3, b3, b4 in [(2, 1, 1, 1, 2), (3, -1, 2, 2, -1), (1, 2, -1, -1, 3)]:
        a1, a2, a3, b3, b4 = map(Fraction, (a1, a2, a3, b3, b4))
        # a2 b1 + a3 b2 = (a3 + 2 a1) b3 - a2 b4 ; -a3 b1 + a2 b2 = -a2 b3 - (a3 - 2 a1) b4
        r1 = (a3 + 2 * a1) * b3 - a2 * b4
        r2 = -a2 * b3 - (a3 - 2 * a1) * b4
        det = a2 * a2 + a3 * a3
        b1 = (a2 * r1 - a3 * r2) / det
        b2 = (a3 * r1 + a2 * r2) / det
        vals = {"c1": 2 * (a1 * a1 - a2 * a2 - a3 * a3), "c2": Fraction(1),
                "a1": a1, "a2": a2, "a3": a3, "b1": b1, "b2": b2, "b3": b3, "b4": b4}
        out.append("sample { " + ", ".join(f"{k}: {fmt(v)}" for k, v in vals.items()) + " }")
    return out


def const_ricci_two_equal_prolonged():
    lines = ["# Prolonged structure equations on the circle bundle for Ricci eigenvalues",
             "# c1 (simple) and c2 (double).",
             "system const_ricci_two_equal_prolonged;",
             "coframe eta1 eta2 eta3 eta23;",
             "param a1 a2 a3;",
             "const c1 c2;",
             "free b1 b2 b3 b4;",
             "relation a1^2 - a2^2 - a3^2 = c1/2;",
             "relation a2*b1 + a3*b2 - (a3 + 2*a1)*b3 + a2*b4 = 0;",
             "relation -a3*b1 + a2*b2 + a2*b3 + (a3 - 2*a1)*b4 = 0;",
             "",
             "d eta1 = -2*a1 * eta2 ^ eta3;",
             "d eta2 = -eta23 ^ eta3 - (a2*eta2 + (a1 + a3)*eta3) ^ eta1;",
             "d eta3 = eta23 ^ eta2 + ((a1 - a3)*eta2 + a2*eta3) ^ eta1;",
             "d eta23 = c2 * eta2 ^ eta3;",
             "d a1 = 2*b3*eta2 + 2*b4*eta3;",
             "d a2 = -2*a3*eta23 + (b4 + b1)*eta2 + (b3 + b2)*eta3;",
             "d a3 = 2*a2*eta23 - (b3 - b2)*eta2 + (b4 - b1)*eta3;",
             ""]
    lines += two_equal_samples()
    write("const_ricci_two_equal_prolonged", "\n".join(lines))


def einstein_weyl():
    body = """# Einstein-Weyl structures on 3-manifolds (Cartan's structure equations).
system einstein_weyl;
coframe eta1 eta2 eta3 th0 th1 th2 th3;
param H0 H1 H2 H3;
mode TYPE_A;

d eta1 = -(th0 ^ eta1 + th3 ^ eta2 - th2 ^ eta3);
d eta2 = -(-th3 ^ eta1 + th0 ^ eta2 + th1 ^ eta3);
d eta3 = -(th2 ^ eta1 - th1 ^ eta2 + th0 ^ eta3);
d th0 = 2*H1 * eta2 ^ eta3 + 2*H2 * eta3 ^ eta1 + 2*H3 * eta1 ^ eta2;
d th1 = th2 ^ th3 + H0 * eta2 ^ eta3 + H3 * eta3 ^ eta1 - H2 * eta1 ^ eta2;
d th2 = th3 ^ th1 - H3 * eta2 ^ eta3 + H0 * eta3 ^ eta1 + H1 * eta1 ^ eta2;
d th3 = th1 ^ th2 + H2 * eta2 ^ eta3 - H1 * eta3 ^ eta1 + H0 * eta1 ^ eta2;

sample { H0: 1, H1: 2, H2: -1, H3: 1/2 }
"""
    write("einstein_weyl", body)


# ----------------------------------------------------------------------------
# Segre structures, m = 3


def segre(m=3):
    I2 = range(1, 3)
    IM = range(1, m + 1)
    om = lambda a, j: f"o{a}{j}"
    ps = lambda i, j: f"p{i}{j}"
    et = lambda i, b: f"e{i}{b}"

    def ph(a, b):
        if (a, b) == (m, m):
            inner = " + ".join([ps(1, 1), ps(2, 2)] + [f"f{c}{c}" for c in range(1, m)])
            return f"(-({inner}))"
        return f"f{a}{b}"

    coframe = ([om(a, j) for a in IM for j in I2] + [ps(i, j) for i in I2 for j in I2]
               + [et(i, b) for i in I2 for b in IM] + [f"f{a}{b}" for a in IM for b in IM if (a, b) != (m, m)])
    triples = list(combinations_with_replacement(IM, 3))
    Fp = lambda a, t: f"F{a}_{''.join(map(str, sorted(t)))}"
    Gp = lambda i, t: f"G{i}_{''.join(map(str, sorted(t)))}"
    params = [Fp(a, t) for a in IM for t in triples] + [Gp(i, t) for i in I2 for t in triples]
    lines = [f"# Torsion-free GL(2).GL({m})-structures on R^{2 * m} after one prolongation:",
             f"# Cartan connection with values in sl({m + 2}); F and G symmetric, F trace-free.",
             f"system segre{m};",
             "coframe " + " ".join(coframe) + ";",
             "param " + " ".join(params) + ";",
             "mode TYPE_A;", ""]
    for g in IM:
        for d in IM:
            if g <= d:
                terms = " + ".join(Fp(a, (a, g, d)) for a in IM)
                lines.append(f"relation {terms} = 0;")
    lines.append("")
    for a in IM:
        for j in I2:
            t = [f"{ph(a, b)} ^ {om(b, j)}" for b in IM] + [f"{om(a, i)} ^ {ps(i, j)}" for i in I2]
            lines.append(f"d {om(a, j)} = -(" + " + ".join(t) + ");")
    for i in I2:
        for j in I2:
            t = [f"{ps(i, k)} ^ {ps(k, j)}" for k in I2] + [f"{et(i, b)} ^ {om(b, j)}" for b in IM]
            lines.append(f"d {ps(i, j)} = -(" + " + ".join(t) + ");")
    for a in IM:
        for b in IM:
            if (a, b) == (m, m):
                continue
            t = [f"{ph(a, c)} ^ {ph(c, b)}" for c in IM] + [f"{om(a, i)} ^ {et(i, b)}" for i in I2]
            curv = " + ".join(f"{Fp(a, (b, g, d))} * {om(g, 1)} ^ {om(d, 2)}" for g in IM for d in IM)
            lines.append(f"d f{a}{b} = -(" + " + ".join(t) + ") + " + curv + ";")
    for i in I2:
        for b in IM:
            t = [f"{ps(i, j)} ^ {et(j, b)}" for j in I2] + [f"{et(i, a)} ^ {ph(a, b)}" for a in IM]
            curv = " + ".join(f"{Gp(i, (b, g, d))} * {om(g, 1)} ^ {om(d, 2)}" for g in IM for d in IM)
            lines.append(f"d {et(i, b)} = -(" + " + ".join(t) + ") + " + curv + ";")
    lines += ["", "# the flat model", "sample { " + ", ".join(f"{p}: 0" for p in params) + " }"]
    write(f"segre{m}", "\n".join(lines))


# ----------------------------------------------------------------------------
# subalgebras of gl(m)


def matrix_text(M) -> str:
    return "[" + "; ".join(", ".join(fmt(x) for x in row) for row in M) + "]"


def write_algebra(name, m, basis, comment):
    body = f"# {comment}\nalgebra {name} dim {m} basis {{\n"
    body += ",\n".join("  " + matrix_text(M) for M in basis) + "\n}\n"
    write(name, body)


def so(m):
    basis = []
    for i in range(m):
        for j in range(i + 1, m):
            M = [[0] * m for _ in range(m)]
            M[i][j] = -1
            M[j][i] = 1
            basis.append(M)
    return basis


def su2():
    X1 = [[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
    X2 = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
    X3 = [[0, 0, 0, 1], [0, 0, -1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]]
    return [X1, X2, X3]


def gl(m):
    basis = []
    for i in range(m):
        for j in range(m):
            M = [[0] * m for _ in range(m)]
            M[i][j] = 1
            basis.append(M)
    return basis


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    so3_metrics()
    const_ricci_distinct()
    const_ricci_two_equal()
    const_ricci_two_equal_prolonged()
    einstein_weyl()
    segre(3)
    for m in range(2, 6):
        write_algebra(f"so{m}", m, so(m), f"Riemannian holonomy so({m}) acting on R^{m}.")
    write_algebra("su2", 4, su2(), "su(2) acting on R^4 (holonomy of Ricci-flat Kahler surfaces).")
    write_algebra("gl2", 2, gl(2), "The full algebra gl(2).")
    write_algebra("gl3", 3, gl(3), "The full algebra gl(3).")


if __name__ == "__main__":
    main()
