"""Constant-coefficient exterior ideals at a point.

Integral elements, polar spaces, character sequences along a flag, the
codimension of the integral-element variety in a graph chart, and the
ordinary / not ordinary verdict.  Vectors are given in frame coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import AnalysisError
from .exterior import Form, merge_sign, wedge
from .linalg import Echelon, Subspace, rank, to_rat
from .tableau import CharacterSeq

__all__ = [
    "PointIdeal",
    "FlagReport",
    "algebraic_degree_part",
    "is_integral",
    "polar_space",
    "flag_characters",
    "integral_variety_codim",
    "ordinary_test",
    "extension_correspondence",
]


class PointIdeal:
    """Ideal generated by Rat-coefficient forms of positive degree on ``labels``."""

    def __init__(self, labels: Sequence[str], generators: Sequence[Form], name: str = ""):
        self.labels = tuple(labels)
        self.name = name
        gens = []
        for g in generators:
            if g.degree < 1:
                raise AnalysisError("ideal generators must have positive degree")
            if g.labels != self.labels:
                g = g.relabel(self.labels)
            g = g.map_coeffs(to_rat)
            if not g.is_zero():
                gens.append(g)
        self.generators = gens

    @property
    def ambient_dim(self) -> int:
        return len(self.labels)

    def vector(self, coords: dict) -> tuple:
        """Vector from ``{label: value}``."""
        return tuple(to_rat(coords.get(x, 0)) for x in self.labels)

    def __repr__(self):
        return f"PointIdeal({self.name or '?'}, N={self.ambient_dim}, {len(self.generators)} generators)"


@dataclass
class FlagReport:
    c: tuple
    characters: CharacterSeq
    bound: int
    codim: int | str = "unavailable"
    linear_rank: int | None = None
    ordinary: str = "inconclusive"

    @property
    def s(self) -> tuple:
        return (self.characters.s0,) + tuple(self.characters.s)


def _monomial_forms(labels, degree):
    for key in combinations(range(len(labels)), degree):
        yield Form(degree, labels, {key: Fraction(1)})


def algebraic_degree_part(ideal: PointIdeal, q: int) -> list[Form]:
    """Basis of the degree-q part of the algebraic ideal."""
    N = ideal.ambient_dim
    if q < 1 or q > N:
        return []
    keys = list(combinations(range(N), q))
    index = {k: i for i, k in enumerate(keys)}
    rows = []
    for g in ideal.generators:
        if g.degree > q:
            continue
        for mono in _monomial_forms(ideal.labels, q - g.degree):
            prod = wedge(g, mono)
            if not prod.is_zero():
                rows.append({index[k]: v for k, v in prod.coeffs.items()})
    ech = Echelon(len(keys)).extend(rows)
    return [Form(q, ideal.labels, {keys[i]: v for i, v in enumerate(b) if v}) for b in ech.basis()]


def _independent(vectors, N) -> bool:
    return not vectors or rank([list(v) for v in vectors]) == len(vectors)


def _coerce_vectors(vectors, N):
    out = []
    for v in vectors:
        v = tuple(to_rat(x) for x in v)
        if len(v) != N:
            raise ValueError("vector length does not match the ambient dimension")
        out.append(v)
    return out


def is_integral(ideal: PointIdeal, basis: Sequence[Sequence]) -> bool:
    """Whether every generator of degree at most p vanishes on the span."""
    N = ideal.ambient_dim
    basis = _coerce_vectors(basis, N)
    if not _independent(basis, N):
        raise AnalysisError("integral element basis is dependent")
    p = len(basis)
    # restriction to E is an algebra map, so checking generators suffices
    for g in ideal.generators:
        if g.degree > p:
            continue
        for sub in combinations(basis, g.degree):
            if g(*sub):
                return False
    return True


def _polar_equations(ideal: PointIdeal, basis):
    """Linear functionals v ↦ φ(v, e_I) cutting out H(E)."""
    N = ideal.ambient_dim
    rows = []
    unit = [tuple(Fraction(int(i == j)) for j in range(N)) for i in range(N)]
    for g in ideal.generators:
        d = g.degree
        if d - 1 > len(basis):
            continue
        for sub in combinations(basis, d - 1):
            row = {}
            for i in range(N):
                x = g(unit[i], *sub)
                if x:
                    row[i] = x
            if row:
                rows.append(row)
    return rows


def polar_space(ideal: PointIdeal, basis: Sequence[Sequence]) -> tuple[Subspace, int]:
    """Polar space H(E) and its codimension c(E)."""
    N = ideal.ambient_dim
    basis = _coerce_vectors(basis, N)
    if not is_integral(ideal, basis):
        raise AnalysisError("polar space requested for a non-integral element")
    ech = Echelon(N).extend(_polar_equations(ideal, basis))
    H = Subspace(N, ech.kernel_basis(N), _checked=True)
    return H, N - H.dim


def flag_characters(ideal: PointIdeal, flag: Sequence[Sequence]) -> FlagReport:
    """Polar codimensions along ``E_i = span(flag[:i])`` for i = 0..n-1."""
    N = ideal.ambient_dim
    flag = _coerce_vectors(flag, N)
    n = len(flag)
    if not _independent(flag, N):
        raise AnalysisError("flag vectors are dependent")
    c = []
    H = None
    for i in range(n + 1):
        if not is_integral(ideal, flag[:i]):
            raise AnalysisError(f"flag member E_{i} is not integral")
        if i < n:
            H, ci = polar_space(ideal, flag[:i])
            c.append(ci)
    if n == 0:
        return FlagReport((), CharacterSeq((), 0), 0)
    s0 = c[0]
    s = [c[i] - c[i - 1] for i in range(1, n)]
    s.append(H.dim - n)
    return FlagReport(tuple(c), CharacterSeq(tuple(s), s0), sum(c))


# ---------------------------------------------------------------------------------
# integral element variety in a graph chart

Poly = dict  # {sorted tuple of variable ids: Fraction}


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple(sorted(ma + mb))
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c}


def _default_transverse(basis, N):
    ech = Echelon(N).extend({j: x for j, x in enumerate(v) if x} for v in basis)
    out = []
    for i in range(N):
        if ech.add({i: Fraction(1)}):
            out.append(i)
    return out


def integral_variety_codim(ideal: PointIdeal, basis: Sequence[Sequence],
                           transverse: Sequence[int] | None = None, n: int | None = None):
    """Codimension of the n-dimensional integral elements near ``E`` in a graph chart.

    Nearby n-planes are spanned by ``e_a + Σ_ρ q[ρ,a] t_ρ`` with t_ρ the
    transverse coordinate vectors.  Returns ``(codim, linear_rank)``; codim
    is ``"nonlinear"`` when some pulled-back equation is not affine in q.
    """
    N = ideal.ambient_dim
    basis = _coerce_vectors(basis, N)
    n = len(basis) if n is None else n
    if len(basis) != n:
        raise AnalysisError(f"expected an integral element of dimension {n}, got {len(basis)}")
    if not is_integral(ideal, basis):
        raise AnalysisError("integral_variety_codim requires an integral element")
    if transverse is None:
        transverse = _default_transverse(basis, N)
    transverse = list(transverse)
    unit = lambda i: tuple(Fraction(int(i == j)) for j in range(N))
    if rank([list(v) for v in basis] + [list(unit(t)) for t in transverse]) != N:
        raise AnalysisError("transverse coordinates do not complement the element")
    r = len(transverse)
    # each ẽ_a as a list of (monomial, vector) terms
    vecs = []
    for a, e in enumerate(basis):
        terms = [((), e)]
        for rho, t in enumerate(transverse):
            terms.append(((rho * n + a,), unit(t)))
        vecs.append(terms)
    nvars = r * n
    equations: list[Poly] = []
    for g in ideal.generators:
        if g.degree > n:
            continue
        for sub in combinations(range(n), g.degree):
            poly: dict = {}
            _expand(g, [vecs[a] for a in sub], 0, (), [], poly)
            poly = {m: c for m, c in poly.items() if c}
            if poly:
                equations.append(poly)
    affine = all(len(m) <= 1 for eq in equations for m in eq)
    linear_rows = [{m[0]: c for m, c in eq.items() if len(m) == 1} for eq in equations]
    lin_rank = Echelon(nvars).extend(r for r in linear_rows if r).rank
    if affine:
        return lin_rank, lin_rank
    return "nonlinear", lin_rank


def _expand(g: Form, slots, k, mono, chosen, out):
    if k == len(slots):
        val = g(*chosen)
        if val:
            m = tuple(sorted(mono))
            out[m] = out.get(m, 0) + val
        return
    for m, v in slots[k]:
        _expand(g, slots, k + 1, mono + m, chosen + [v], out)


def ordinary_test(ideal: PointIdeal, flag: Sequence[Sequence],
                  transverse: Sequence[int] | None = None) -> FlagReport:
    """Flag characters plus the codimension comparison.

    Verdicts: ``ordinary`` when the codimension is exact and equals the
    bound, ``not_ordinary`` when the exact codimension differs or when the
    linear part alone already exceeds the bound, otherwise ``inconclusive``.
    """
    report = flag_characters(ideal, flag)
    codim, lin = integral_variety_codim(ideal, flag, transverse)
    report.codim = codim
    report.linear_rank = lin
    if codim == "nonlinear":
        report.ordinary = "not_ordinary" if lin > report.bound else "inconclusive"
    else:
        report.ordinary = "ordinary" if codim == report.bound else "not_ordinary"
    return report


def extension_correspondence(ideal: PointIdeal, basis: Sequence[Sequence]) -> bool:
    """Check that E + v is integral exactly for v in H(E).

    Uses a basis of H(E) for the positive direction and the coordinate
    vectors outside H(E) for the negative one.
    """
    N = ideal.ambient_dim
    basis = _coerce_vectors(basis, N)
    H, _ = polar_space(ideal, basis)
    E = Subspace.span(N, basis)
    for h in H.canonical():
        if E.contains(h):
            continue
        if not is_integral(ideal, basis + [tuple(h)]):
            return False
    for i in range(N):
        v = tuple(Fraction(int(i == j)) for j in range(N))
        if E.contains(v) or H.contains(v):
            continue
        if is_integral(ideal, basis + [v]):
            return False
    return True
