"""Torsion-free H-structures.

Given a Lie subalgebra h of gl(m), compute the first Bianchi kernel
K0(h) ⊂ h ⊗ Λ²m*, its prolongation K1(h), the first prolongation h^(1) of h,
and run Cartan's test on K0 viewed as a tableau of h-valued 2-forms.  The
structure equations

    dη = -θ ∧ η,    dθ = -θ ∧ θ + R(η ∧ η),    R ∈ K0(h)

are emitted as a TYPE_A structure system whose parameters are coordinates on
K0(h); analyzing it through :mod:`edskit.structeq` must give the same answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import AnalysisError
from .exterior import StructureSystem, merge_sign
from .linalg import Echelon, format_rat, rank, solve_sparse, to_rat
from .tableau import FormTableau, InvolutivityReport, cartan_test, prolong
from .structeq import generality_sentence

__all__ = [
    "LieSubalgebra",
    "CurvatureKernels",
    "TorsionFreeReport",
    "check_subalgebra",
    "curvature_kernels",
    "first_prolongation_dim",
    "torsion_free_analysis",
    "emit_structure_text",
    "emit_structure_system",
    "cross_check",
]

Matrix = tuple  # tuple of row tuples of Fraction


def _mat(M, m: int | None = None) -> Matrix:
    rows = tuple(tuple(to_rat(x) for x in row) for row in M)
    size = len(rows)
    if any(len(r) != size for r in rows):
        raise AnalysisError("basis matrices must be square")
    if m is not None and size != m:
        raise AnalysisError(f"expected {m}x{m} matrices, got {size}x{size}")
    return rows


def _bracket(A: Matrix, B: Matrix) -> Matrix:
    m = len(A)
    return tuple(
        tuple(sum(A[i][k] * B[k][j] - B[i][k] * A[k][j] for k in range(m)) for j in range(m))
        for i in range(m)
    )


def _flat(M: Matrix) -> list:
    return [x for row in M for x in row]


def check_subalgebra(basis: Sequence, m: int | None = None):
    """Closure test for the span of ``basis``.

    Returns ``(closed, constants)`` where ``constants[(a, b)]`` lists the
    coefficients of [X_a, X_b] for a < b, or ``None`` when some bracket
    leaves the span.  A dependent basis raises :class:`AnalysisError`.
    """
    mats = [_mat(X, m) for X in basis]
    if mats:
        m = len(mats[0])
        if any(len(X) != m for X in mats):
            raise AnalysisError("basis matrices have different sizes")
    r = len(mats)
    if r and rank([_flat(X) for X in mats]) != r:
        raise AnalysisError("basis matrices are linearly dependent")
    if r == 0:
        return True, {}
    rows = [{a: mats[a][i][j] for a in range(r) if mats[a][i][j]}
            for i in range(m) for j in range(m)]
    constants = {}
    for a, b in combinations(range(r), 2):
        sol = solve_sparse(rows, _flat(_bracket(mats[a], mats[b])), r)
        if not sol.solvable:
            return False, None
        constants[(a, b)] = tuple(sol.particular)
    return True, constants


class LieSubalgebra:
    """A subalgebra h ⊆ gl(m) given by a basis of m×m rational matrices."""

    def __init__(self, basis: Sequence, m: int | None = None, name: str = ""):
        mats = [_mat(X, m) for X in basis]
        if m is None:
            if not mats:
                raise AnalysisError("the zero subalgebra needs an explicit dimension m")
            m = len(mats[0])
        closed, constants = check_subalgebra(mats, m)
        if not closed:
            raise AnalysisError(f"{name or 'basis'} is not closed under the commutator")
        self.m_dim = m
        self.basis = mats
        self.name = name
        self._constants = constants

    @property
    def dim(self) -> int:
        return len(self.basis)

    def structure_constants(self) -> list:
        """``c[a][b][c]`` with [X_a, X_b] = Σ_c c[a][b][c] X_c."""
        r = self.dim
        c = [[[Fraction(0)] * r for _ in range(r)] for _ in range(r)]
        for (a, b), vec in self._constants.items():
            for k, x in enumerate(vec):
                c[a][b][k] = x
                c[b][a][k] = -x
        return c

    @classmethod
    def from_spec(cls, spec) -> "LieSubalgebra":
        """From a parsed ``algebra`` block."""
        return cls(spec.basis, spec.m, spec.name)

    def __repr__(self):
        return f"LieSubalgebra({self.name or '?'}, dim {self.dim} in gl({self.m_dim}))"


@dataclass
class CurvatureKernels:
    K0: FormTableau
    K1: FormTableau
    h1_dim: int

    @property
    def dims(self) -> dict:
        return {"K0": self.K0.dim, "K1": self.K1.dim, "h1": self.h1_dim}


def _k0_generators(h: LieSubalgebra) -> list[dict]:
    """Basis of ker(h ⊗ Λ²m* → m ⊗ Λ³m*), R ↦ Σ_a X_a η ∧ R^a."""
    m, r = h.m_dim, h.dim
    pairs = list(combinations(range(m), 2))
    ncols = r * len(pairs)
    rows: dict = {}
    for a, X in enumerate(h.basis):
        for p, (j, k) in enumerate(pairs):
            col = a * len(pairs) + p
            for i in range(m):
                for l in range(m):
                    x = X[i][l]
                    if not x:
                        continue
                    sign, K = merge_sign((l,), (j, k))
                    if sign:
                        row = rows.setdefault((i, K), {})
                        row[col] = row.get(col, 0) + sign * x
    ech = Echelon(ncols).extend(rows.values())
    gens = []
    for v in ech.kernel_basis(ncols):
        gens.append({(a, pairs[p]): v[a * len(pairs) + p]
                     for a in range(r) for p in range(len(pairs)) if v[a * len(pairs) + p]})
    return gens


def first_prolongation_dim(h: LieSubalgebra) -> int:
    """dim (h ⊗ m*) ∩ (m ⊗ S²m*)."""
    m, r = h.m_dim, h.dim
    # unknowns t[a, k]; T^i_jk = Σ_a X_a^i_j t[a, k] must be symmetric in j, k
    rows = []
    for i in range(m):
        for j, k in combinations(range(m), 2):
            row: dict = {}
            for a, X in enumerate(h.basis):
                if X[i][j]:
                    row[a * m + k] = row.get(a * m + k, 0) + X[i][j]
                if X[i][k]:
                    row[a * m + j] = row.get(a * m + j, 0) - X[i][k]
            row = {c: v for c, v in row.items() if v}
            if row:
                rows.append(row)
    ech = Echelon(r * m).extend(rows)
    # t ↦ T is injective because the X_a are independent
    return r * m - ech.rank


def curvature_kernels(h: LieSubalgebra) -> CurvatureKernels:
    K0 = FormTableau(h.dim, h.m_dim, 2, _k0_generators(h))
    return CurvatureKernels(K0, prolong(K0), first_prolongation_dim(h))


@dataclass
class TorsionFreeReport:
    algebra: str
    kernels: CurvatureKernels
    involutivity: InvolutivityReport
    generality: str

    @property
    def characters(self):
        return self.involutivity.characters

    @property
    def involutive(self) -> bool:
        return self.involutivity.involutive

    @property
    def verdict(self) -> str:
        return "involutive" if self.involutive else "not involutive"


def torsion_free_analysis(h: LieSubalgebra, seed: int = 0, retries: int = 8) -> TorsionFreeReport:
    """Cartan's test on K0(h) as a tableau of h-valued 2-forms on m."""
    kernels = curvature_kernels(h)
    inv = cartan_test(kernels.K0, seed, retries)
    if inv.dim_prolongation != kernels.K1.dim:
        raise AssertionError("prolongation dimension disagrees with K1")
    return TorsionFreeReport(h.name, kernels, inv, generality_sentence(inv.characters.s))


# ---------------------------------------------------------------------------------
# structure equations


def _term(coef: Fraction, mono: str) -> str:
    if coef == 1:
        return f"+ {mono}"
    if coef == -1:
        return f"- {mono}"
    sign = "-" if coef < 0 else "+"
    mag = abs(coef)
    text = str(mag.numerator) if mag.denominator == 1 else f"({format_rat(mag)})"
    return f"{sign} {text} * {mono}"


def _join(terms: list[str]) -> str:
    if not terms:
        return "0"
    s = " ".join(terms)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def _sample_values(k: int) -> list[Fraction]:
    # fixed, deliberately irregular rationals
    return [Fraction((7 * t + 3) % 11 - 5, 1 + t % 3) for t in range(k)]


def emit_structure_text(h: LieSubalgebra, name: str | None = None) -> str:
    """DSL text of the torsion-free structure equations with R ∈ K0(h)."""
    m, r = h.m_dim, h.dim
    name = name or f"{h.name or 'h'}_structure"
    eta = [f"eta{i + 1}" for i in range(m)]
    th = [f"th{a + 1}" for a in range(r)]
    k0 = _k0_generators(h)
    params = [f"R{t + 1}" for t in range(len(k0))]
    lines = [f"# Torsion-free structure equations for {h.name or 'h'} in gl({m}).",
             f"system {name};",
             "coframe " + " ".join(eta + th) + ";"]
    if params:
        lines.append("param " + " ".join(params) + ";")
    lines += ["mode TYPE_A;", ""]
    for i in range(m):
        terms = []
        for a, X in enumerate(h.basis):
            for j in range(m):
                if X[i][j]:
                    terms.append(_term(-X[i][j], f"{th[a]} ^ {eta[j]}"))
        lines.append(f"d {eta[i]} = {_join(terms)};")
    c = h.structure_constants()
    for a in range(r):
        terms = []
        for b, cc in combinations(range(r), 2):
            if c[b][cc][a]:
                terms.append(_term(-c[b][cc][a], f"{th[b]} ^ {th[cc]}"))
        curv: dict = {}
        for t, g in enumerate(k0):
            for (w, (j, k)), v in g.items():
                if w == a:
                    curv.setdefault((j, k), []).append((v, params[t]))
        for (j, k), coeffs in sorted(curv.items()):
            expr = _join([_term(v, p) for v, p in coeffs])
            terms.append(f"+ ({expr}) * {eta[j]} ^ {eta[k]}")
        lines.append(f"d {th[a]} = {_join(terms)};")
    if params:
        vals = _sample_values(len(params))
        lines += ["", "sample { " + ", ".join(f"{p}: {format_rat(v)}" for p, v in zip(params, vals)) + " }"]
    return "\n".join(lines) + "\n"


def emit_structure_system(h: LieSubalgebra, name: str | None = None) -> StructureSystem:
    from .dsl import parse_document

    doc = parse_document(emit_structure_text(h, name), source="<hstruct>")
    return doc.system


def cross_check(h: LieSubalgebra, seed: int = 0, retries: int = 8) -> tuple[TorsionFreeReport, object, bool]:
    """Compare torsion_free_analysis with the TYPE_A analysis of the emitted system.

    Returns ``(tf_report, analysis_report, agree)``; agreement means equal
    involutivity, equal trimmed characters and equal tableau and
    prolongation dimensions.
    """
    from .structeq import analyze

    tf = torsion_free_analysis(h, seed, retries)
    rep = analyze(emit_structure_system(h), seed=seed, retries=retries)
    inv = rep.involutivity
    agree = (
        inv is not None
        and inv.involutive == tf.involutive
        and rep.characters.trimmed() == tf.characters.trimmed()
        and rep.dims["tableau"] == tf.kernels.K0.dim
        and rep.dims["prolongation"] == tf.kernels.K1.dim
    )
    return tf, rep, agree
