"""Structure equations: compatibility identities, the free-derivative tableau,
Jacobi manifolds, prolongation and the counting formulas.

Three kinds of system are handled (see :class:`~edskit.exterior.StructureSystem`):

* ``CTFT``: every dω and every da is given.  The system is compatible when
  d(dω^i) and d(da^α) vanish identically.
* ``VARIANT``: da^α involves free derivatives b^ρ.  The ω∧ω part of d(da^α)
  must be absorbed by some db^ρ = G^ρ_j ω^j + β^ρ, and the free-derivative
  tableau must be involutive.
* ``TYPE_A``: only dω is given, with structure functions C(a) ranging over a
  submanifold A.  A must be a Jacobi manifold (J(C(p)) lies in the image of
  the tangent tableau) and the tangent tableau must be involutive.
"""

from __future__ import annotations

import re

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Mapping, Sequence

from .errors import AnalysisError, DegeneratePoint, EvaluationError
from .exterior import Form, StructureSystem, _as_expr, _root_variables, sort_sign, structure_d, wedge
from .linalg import Echelon, solve_sparse, to_rat
from .point import FlagReport, PointIdeal, flag_characters
from .symexpr import Expr, VarTable, solve_linear_symbolic
from .tableau import CharacterSeq, FormTableau, InvolutivityReport, cartan_test

__all__ = [
    "Identity",
    "ResidualReport",
    "GSolution",
    "JacobiReport",
    "AnalysisReport",
    "MIN_SAMPLES",
    "check_torsion",
    "reduce_linear_relations",
    "solve_for_G",
    "free_tableau",
    "structure_function",
    "jacobi_map",
    "jacobi_manifold_check",
    "tangent_tableau",
    "analyze",
    "prolong_structure",
    "linearized_type_a_ideal",
    "invariant_count",
    "dim_Mk",
    "generality_sentence",
]

MIN_SAMPLES = 3


# ---------------------------------------------------------------------------------
# identities


@dataclass
class Identity:
    name: str
    residual: Form
    status: str  # holds | holds_at_samples | fails | pending
    witness: str | None = None

    @property
    def ok(self) -> bool:
        return self.status in ("holds", "holds_at_samples", "pending")


@dataclass
class ResidualReport:
    mode: str
    identities: list
    tableau_terms: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(i.ok for i in self.identities)

    @property
    def failures(self) -> list:
        return [i for i in self.identities if not i.ok]

    def get(self, name: str) -> Identity:
        for i in self.identities:
            if i.name == name:
                return i
        raise KeyError(name)


def _nonzero_terms(form: Form, table: VarTable):
    return [(k, _as_expr(c, table)) for k, c in form.coeffs.items() if not _as_expr(c, table).is_zero()]


def _monomial_name(key, labels) -> str:
    return "^".join(labels[i] for i in key)


def _classify(form: Form, sys: StructureSystem) -> tuple[str, str | None]:
    terms = _nonzero_terms(form, sys.vars)
    if not terms:
        return "holds", None
    key, c = terms[0]
    witness = f"({c}) {_monomial_name(key, form.labels)}"
    if sys.relations and sys.samples:
        try:
            bad = None
            for p in sys.samples:
                for k, e in terms:
                    if e.eval(p) != 0:
                        bad = (k, e, e.eval(p))
                        break
                if bad:
                    break
        except EvaluationError as exc:
            return "fails", f"{witness}; sample evaluation failed: {exc}"
        if bad is None:
            return "holds_at_samples", None
        k, e, v = bad
        return "fails", f"({e}) {_monomial_name(k, form.labels)} = {v} at a sample point"
    return "fails", witness


def _split_omega(form: Form, n: int) -> tuple[Form, Form]:
    """Split a frame form into its pure-coframe part and the part involving β."""
    pure = {k: c for k, c in form.coeffs.items() if all(i < n for i in k)}
    rest = {k: c for k, c in form.coeffs.items() if not all(i < n for i in k)}
    return Form(form.degree, form.labels, pure), Form(form.degree, form.labels, rest)


def check_torsion(sys: StructureSystem) -> ResidualReport:
    """Evaluate the d² identities of a CTFT or VARIANT system.

    For VARIANT systems the β-part of d(da) is the free-derivative tableau and
    is returned in ``tableau_terms``.  Without a declared G its ω∧ω part is
    marked ``pending``; :func:`solve_for_G` decides it.
    """
    if sys.mode == "TYPE_A":
        raise AnalysisError("TYPE_A systems have no parameter rules; use jacobi_manifold_check")
    ids = []
    for i, x in enumerate(sys.coframe):
        r = structure_d(sys, structure_d(sys, sys.coframe_form(i)))
        status, witness = _classify(r, sys)
        ids.append(Identity(f"d(d {x})", r, status, witness))
    terms = {}
    for a in sys.params:
        use_G = sys.mode == "VARIANT" and sys.G is not None
        r = structure_d(sys, sys.F[a], use_G=use_G)
        if sys.mode == "VARIANT":
            pure, beta = _split_omega(r, sys.n)
            terms[a] = beta
            if use_G:
                status, witness = _classify(pure, sys)
            else:
                status, witness = ("holds", None) if not _nonzero_terms(pure, sys.vars) else ("pending", None)
            ids.append(Identity(f"d(d {a})", pure, status, witness))
        else:
            status, witness = _classify(r, sys)
            ids.append(Identity(f"d(d {a})", r, status, witness))
    return ResidualReport(sys.mode, ids, terms)


def check_samples(sys: StructureSystem) -> None:
    """Every declared sample point must satisfy every relation exactly."""
    for k, p in enumerate(sys.samples):
        for L in sys.relations:
            v = _as_expr(L, sys.vars).eval(p)
            if v != 0:
                raise AnalysisError(f"sample point #{k + 1} violates relation {L} = 0 (value {v})")


# ---------------------------------------------------------------------------------
# linear relations among free derivatives


def reduce_linear_relations(sys: StructureSystem) -> tuple[StructureSystem, dict]:
    """Eliminate free derivatives that occur linearly with constant coefficient in a relation.

    Returns the reduced system and ``{free: expression}`` for the eliminated
    ones.  Systems without such relations come back unchanged.
    """
    table = sys.vars
    func_args = {f.arg for f in table.funcs.values()}
    elim: dict[str, Expr] = {}
    remaining = []
    for L in sys.relations:
        L = _as_expr(L, table)
        if elim:
            L = L.subs(elim)
        if L.is_zero():
            continue
        chosen = None
        for b in reversed(table.frees):
            if b in elim or b in func_args:
                continue
            c = L.partial(b)
            if c.is_zero() or not c.is_constant():
                continue
            rest = L - c * table.symbol(b)
            if b not in _root_variables(rest, table):
                chosen = (b, -rest / c)
                break
        if chosen is None:
            remaining.append(L)
            continue
        b, val = chosen
        elim = {k: v.subs({b: val}) for k, v in elim.items()}
        elim[b] = val
    if not elim:
        return sys, {}
    remaining = [L.subs(elim) for L in remaining]
    remaining = [L for L in remaining if not L.is_zero()]
    new = VarTable(sys.params, [b for b in table.frees if b not in elim], table.consts,
                   table.funcs.values(), table.formal_order)
    conv = lambda c: _as_expr(c, table).subs(elim).transfer(new)
    red = StructureSystem(
        name=sys.name,
        coframe=sys.coframe,
        vars=new,
        d_coframe=[f.map_coeffs(conv) for f in sys.d_coframe],
        F={a: f.map_coeffs(conv) for a, f in sys.F.items()},
        G=None if sys.G is None else {b: g.map_coeffs(conv) for b, g in sys.G.items() if b not in elim},
        relations=[conv(L) for L in remaining],
        samples=list(sys.samples),
        mode=sys.mode,
    )
    return red, elim


# ---------------------------------------------------------------------------------
# the G-system


@dataclass
class GSolution:
    exists: bool | None
    method: str  # symbolic | samples | inconsistent | undetermined
    system: StructureSystem
    eliminated: dict
    G: dict | None = None  # free -> 1-form
    kernel: list = field(default_factory=list)  # list of {free: 1-form}
    kernel_dim: int | None = None
    samples_used: int = 0
    certificate: str | None = None
    G_at_sample: dict | None = None

    @property
    def sample_certified(self) -> bool:
        return self.method == "samples"


def _coeff(form: Form, key, table):
    return _as_expr(form[key], table)


def _g_equations(sys: StructureSystem):
    """Rows ``{col: Expr}`` and right-hand sides; column ρ·n + j is G^ρ_j."""
    n = sys.n
    table = sys.vars
    frees = table.frees
    rows = []
    for a in sys.params:
        Fa = sys.F[a]
        dF = [[_coeff(Fa, (i,), table).diff(b) for i in range(n)] for b in frees]
        R0, _ = _split_omega(structure_d(sys, Fa, use_G=False), n)
        for j, k in combinations(range(n), 2):
            row: dict = {}
            for rho in range(len(frees)):
                x, y = dF[rho][k], dF[rho][j]
                if x:
                    row[rho * n + j] = row.get(rho * n + j, table.zero) + x
                if y:
                    row[rho * n + k] = row.get(rho * n + k, table.zero) - y
            row = {c: v for c, v in row.items() if v}
            rhs = -_coeff(R0, (j, k), table)
            if row or rhs:
                rows.append((row, rhs, f"d(d {a}) on {sys.coframe[j]}^{sys.coframe[k]}"))
    for L in sys.relations:
        L = _as_expr(L, table)
        dLb = [L.diff(b) for b in frees]
        dLu = [(a, L.diff(a)) for a in sys.params]
        dLu = [(a, e) for a, e in dLu if e]
        for j in range(n):
            row = {rho * n + j: e for rho, e in enumerate(dLb) if e}
            rhs = table.zero
            for a, e in dLu:
                rhs = rhs - e * _coeff(sys.F[a], (j,), table)
            if row or rhs:
                rows.append((row, rhs, f"d({L}) on {sys.coframe[j]}"))
    return rows, len(frees) * n


def _numeric_rows(rows, p):
    num = [{c: v.eval(p) for c, v in row.items()} for row, _, _ in rows]
    rhs = [b.eval(p) for _, b, _ in rows]
    return num, rhs


def _vector_to_forms(vec, sys: StructureSystem, table) -> dict:
    n = sys.n
    out = {}
    for rho, b in enumerate(sys.frees):
        coeffs = {(j,): vec[rho * n + j] for j in range(n) if vec[rho * n + j]}
        out[b] = Form(1, sys.coframe, coeffs)
    return out


def _random_point(sys: StructureSystem, seed: int = 0) -> dict:
    import random
    rng = random.Random(seed)
    return {g: Fraction(rng.randint(2, 97), rng.randint(1, 13)) for g in sys.vars.gen_names}


def solve_for_G(sys: StructureSystem, reduced: bool = False) -> GSolution:
    """Solve the linear system for G making the ω∧ω part of d(da) vanish.

    Linear relations among free derivatives are eliminated first.  The
    system is then solved over the field of rational functions; when that
    fails because of the remaining relations (or a pivot vanishes at a
    sample), solvability is certified at every declared sample point instead
    (at least :data:`MIN_SAMPLES` are required).
    """
    if sys.mode != "VARIANT":
        raise AnalysisError("solve_for_G applies to systems with free derivatives")
    red, elim = (sys, {}) if reduced else reduce_linear_relations(sys)
    table = red.vars
    check_samples(red)
    rows, ncols = _g_equations(red)
    if not rows:
        zero = [table.zero] * ncols
        kernel = [_vector_to_forms([table.one if c == k else table.zero for c in range(ncols)], red, table)
                  for k in range(ncols)]
        return GSolution(True, "symbolic", red, elim, _vector_to_forms(zero, red, table), kernel, ncols)
    dense = [[row.get(c, table.zero) for c in range(ncols)] for row, _, _ in rows]
    rhs = [b for _, b, _ in rows]
    consistent, particular, kernel, pivots = solve_linear_symbolic(dense, rhs, table)
    degenerate = False
    if consistent and red.samples:
        try:
            degenerate = any(pv.eval(p) == 0 for pv in pivots for p in red.samples)
        except EvaluationError:
            degenerate = True
    if consistent and not degenerate:
        return GSolution(True, "symbolic", red, elim,
                         _vector_to_forms(particular, red, table),
                         [_vector_to_forms(v, red, table) for v in kernel], len(kernel))
    if not red.relations and not consistent:
        p = red.samples[0] if red.samples else _random_point(red)
        try:
            num, nrhs = _numeric_rows(rows, p)
            sol = solve_sparse(num, nrhs, ncols)
            cert = f"rank {sol.rank} < augmented rank {sol.augmented_rank} at a test point"
        except EvaluationError:
            cert = "the reduced system contains a row 0 = nonzero"
        return GSolution(False, "inconsistent", red, elim, certificate=cert)
    # certify at the sample points
    if len(red.samples) < MIN_SAMPLES:
        return GSolution(None, "undetermined", red, elim,
                         certificate=f"symbolic elimination needs the relations; "
                                     f"at least {MIN_SAMPLES} sample points are required")
    dims = set()
    first = None
    for k, p in enumerate(red.samples):
        num, nrhs = _numeric_rows(rows, p)
        sol = solve_sparse(num, nrhs, ncols)
        if not sol.solvable:
            return GSolution(False, "samples", red, elim, samples_used=k + 1,
                             certificate=f"rank {sol.rank} < augmented rank {sol.augmented_rank} "
                                         f"at sample point #{k + 1}")
        dims.add(sol.kernel.dim)
        if first is None:
            first = _vector_to_forms(list(sol.particular), red, table)
    kdim = min(dims)
    note = None if len(dims) == 1 else f"kernel dimension varies across samples: {sorted(dims)}"
    return GSolution(True, "samples", red, elim, kernel_dim=kdim, samples_used=len(red.samples),
                     certificate=note, G_at_sample=first)


# ---------------------------------------------------------------------------------
# the free-derivative tableau


def _default_point(sys: StructureSystem, point=None) -> dict:
    if point is not None:
        return dict(point)
    if sys.samples:
        return dict(sys.samples[0])
    return {}


def free_tableau(sys: StructureSystem, point=None) -> FormTableau:
    """Tableau spanned by ∂F^α/∂b along the free directions allowed by the relations."""
    if sys.mode != "VARIANT":
        raise AnalysisError("the free-derivative tableau needs free derivatives")
    p = _default_point(sys, point)
    table = sys.vars
    n, frees, params = sys.n, table.frees, table.params
    r = len(frees)
    jac = []
    for L in sys.relations:
        L = _as_expr(L, table)
        row = {rho: L.diff(b).eval(p) for rho, b in enumerate(frees)}
        jac.append({k: v for k, v in row.items() if v})
    T = Echelon(r).extend(jac).kernel_basis(r)
    M = [[[_coeff(sys.F[a], (i,), table).diff(b).eval(p) for b in frees] for i in range(n)] for a in params]
    gens = []
    for t in T:
        g = {}
        for alpha in range(len(params)):
            for i in range(n):
                v = sum((t[rho] * M[alpha][i][rho] for rho in range(r) if t[rho]), Fraction(0))
                if v:
                    g[(alpha, (i,))] = v
        gens.append(g)
    tab = FormTableau(len(params), n, 1, gens)
    if tab.dim != len(T):
        raise DegeneratePoint(f"free-derivative tableau has dimension {tab.dim} but the free "
                              f"directions span {len(T)}: the point is degenerate")
    return tab


# ---------------------------------------------------------------------------------
# Jacobi map and Jacobi manifolds


def structure_function(sys: StructureSystem, point=None) -> list[Form]:
    """``ζ^i = ½ C^i_jk ω^j∧ω^k`` (so ζ^i = -dω^i), evaluated at ``point`` when given."""
    out = []
    for f in sys.d_coframe:
        z = -f
        if point is not None:
            z = z.map_coeffs(lambda c: _as_expr(c, sys.vars).eval(point))
        out.append(z)
    return out


def _one_forms(c: Sequence[Form], i: int, m: int, n: int, labels) -> Form:
    """γ^i_m = Σ_j c^i_mj v^j."""
    coeffs = {}
    z = c[i]
    for j in range(n):
        if j == m:
            continue
        v = z[(m, j)] if m < j else -z[(j, m)]
        if v:
            coeffs[(j,)] = v
    return Form(1, labels, coeffs)


def jacobi_map(c: Sequence[Form]) -> list[Form]:
    """J: V⊗Λ²V* → V⊗Λ³V*.

    ``c[i]`` is the 2-form with coefficient c^i_jk at j<k; the result has
    coefficient ``c^i_mj c^m_kl + c^i_mk c^m_lj + c^i_ml c^m_jk`` at j<k<l.
    It vanishes exactly when c is the bracket of a Lie algebra.
    """
    n = len(c)
    if n == 0:
        return []
    labels = c[0].labels
    out = []
    for i in range(n):
        total = Form.zero(3, labels)
        for m in range(n):
            if c[m].is_zero():
                continue
            g = _one_forms(c, i, m, n, labels)
            if not g.is_zero():
                total = total + wedge(g, c[m])
        out.append(total)
    return out


def _tangent_basis(sys: StructureSystem, p) -> list[tuple]:
    table = sys.vars
    s = len(sys.params)
    jac = []
    for L in sys.relations:
        L = _as_expr(L, table)
        row = {k: L.diff(a).eval(p) for k, a in enumerate(sys.params)}
        jac.append({k: v for k, v in row.items() if v})
    return Echelon(s).extend(jac).kernel_basis(s)


def _dC(sys: StructureSystem, p) -> list[dict]:
    """∂C/∂a_α at p per parameter, as sparse ``{(i, (j, k)): value}`` with C-sign."""
    table = sys.vars
    out = []
    for a in sys.params:
        d = {}
        for i, f in enumerate(sys.d_coframe):
            for key, c in f.coeffs.items():
                e = _as_expr(c, table)
                if a in _root_variables(e, table):
                    v = -e.diff(a).eval(p)
                    if v:
                        d[(i, key)] = v
        out.append(d)
    return out


def tangent_tableau(sys: StructureSystem, point=None) -> tuple[FormTableau, list[dict], dict]:
    """The tableau T_pA ⊂ V⊗Λ²V*, its generators along a tangent basis, and p."""
    if sys.mode != "TYPE_A":
        raise AnalysisError("tangent_tableau applies to TYPE_A systems")
    p = _default_point(sys, point)
    for L in sys.relations:
        v = _as_expr(L, sys.vars).eval(p)
        if v != 0:
            raise AnalysisError(f"the point does not satisfy relation {L} = 0 (value {v})")
    basis = _tangent_basis(sys, p)
    dC = _dC(sys, p)
    gens = []
    for t in basis:
        g: dict = {}
        for alpha, x in enumerate(t):
            if not x:
                continue
            for key, v in dC[alpha].items():
                g[key] = g.get(key, 0) + x * v
        gens.append({k: v for k, v in g.items() if v})
    tab = FormTableau(sys.n, sys.n, 2, gens)
    if tab.dim != len(basis):
        raise DegeneratePoint(f"the structure map drops rank at the point: tableau dimension "
                              f"{tab.dim} < dim A = {len(basis)}")
    return tab, gens, p


@dataclass
class JacobiReport:
    solvable: bool
    rank: int
    augmented_rank: int
    unknowns: int
    kernel_dim: int
    dim_A: int

    @property
    def codim(self) -> int:
        return self.rank


def _r_rows(gens: list[dict], n: int):
    """Rows of ``Σ_cyc ∂C^i_kl R_j = (rhs)^i_jkl`` keyed by (i, (j, k, l))."""
    rows: dict = {}
    for t, g in enumerate(gens):
        for (i, (a, b)), v in g.items():
            for x in range(n):
                if x == a or x == b:
                    continue
                sign, key = sort_sign((x, a, b))
                row = rows.setdefault((i, key), {})
                col = t * n + x
                row[col] = row.get(col, 0) + sign * v
    return rows


def jacobi_manifold_check(sys: StructureSystem, point=None) -> JacobiReport:
    """Whether J(C(p)) lies in the image of T_pA ⊗ V* (the R-system is solvable)."""
    tab, gens, p = tangent_tableau(sys, point)
    n = sys.n
    J = jacobi_map(structure_function(sys, p))
    rows = _r_rows(gens, n)
    for i, f in enumerate(J):
        for key, v in f.coeffs.items():
            if v:
                rows.setdefault((i, key), {})
    keys = list(rows)
    rhs = [J[i][key] for i, key in keys]
    ncols = len(gens) * n
    sol = solve_sparse([rows[k] for k in keys], rhs, ncols)
    return JacobiReport(sol.solvable, sol.rank, sol.augmented_rank, ncols, sol.kernel.dim, len(gens))


# ---------------------------------------------------------------------------------
# analysis


@dataclass
class AnalysisReport:
    name: str
    mode: str
    verdict: str
    identities: ResidualReport | None = None
    g_solution: GSolution | None = None
    jacobi: JacobiReport | None = None
    involutivity: InvolutivityReport | None = None
    tableau: FormTableau | None = None
    characters: CharacterSeq | None = None
    dims: dict = field(default_factory=dict)
    polar_codims: tuple = ()
    generality: str = ""
    invariant_counts: list = field(default_factory=list)
    effective_vars: tuple = ()
    notes: list = field(default_factory=list)


def _param_s0(sys: StructureSystem, p) -> int:
    """Number of parameters minus the rank of the relations that involve parameters only."""
    table = sys.vars
    rows = []
    for L in sys.relations:
        L = _as_expr(L, table)
        if any(b in _root_variables(L, table) for b in table.frees):
            continue
        try:
            row = {k: L.diff(a).eval(p) for k, a in enumerate(sys.params)}
        except EvaluationError:
            continue
        rows.append({k: v for k, v in row.items() if v})
    return len(sys.params) - Echelon(len(sys.params)).extend(rows).rank


def analyze(sys: StructureSystem, seed: int = 0, retries: int = 8, point=None, k_max: int = 3) -> AnalysisReport:
    """Run the test appropriate to the system's mode."""
    if sys.mode == "CTFT":
        return _analyze_ctft(sys, k_max)
    if sys.mode == "VARIANT":
        return _analyze_variant(sys, seed, retries, point, k_max)
    return _analyze_type_a(sys, seed, retries, point, k_max)


def _counts(s0, s, k_max):
    return [(k, invariant_count(s0, s, k)) for k in range(0, k_max + 1)]


def _analyze_ctft(sys, k_max) -> AnalysisReport:
    check_samples(sys)
    ids = check_torsion(sys)
    s0 = _param_s0(sys, _default_point(sys)) if sys.relations else len(sys.params)
    chars = CharacterSeq((0,) * sys.n, s0)
    verdict = "applies" if ids.holds else "does not apply"
    notes = [f"{i.name} fails: {i.witness}" for i in ids.failures]
    return AnalysisReport(sys.name, "CTFT", verdict, identities=ids, characters=chars,
                          dims={"tableau": 0, "prolongation": 0},
                          generality=generality_sentence(chars.s, s0),
                          invariant_counts=_counts(s0, chars.s, k_max),
                          effective_vars=(), notes=notes)


def _analyze_variant(sys, seed, retries, point, k_max) -> AnalysisReport:
    red, elim = reduce_linear_relations(sys)
    check_samples(red)
    ids = check_torsion(red)
    g = solve_for_G(red, reduced=True)
    g.eliminated = elim
    notes = []
    if elim:
        notes.append("eliminated " + ", ".join(f"{b} = {v}" for b, v in elim.items()))
    if g.exists:
        status = "holds" if g.method == "symbolic" else "holds_at_samples"
    elif g.exists is None:
        status = "pending"
    else:
        status = "fails"
    for ident in ids.identities:
        if ident.status == "pending":
            ident.status = status
            ident.witness = g.certificate if status == "fails" else None
    ids.identities.append(Identity("G-system", Form.zero(0, red.coframe), status,
                                   g.certificate if status == "fails" else None))
    p = _default_point(red, point)
    tab = free_tableau(red, p)
    inv = cartan_test(tab, seed, retries)
    if g.exists and g.kernel_dim is not None and g.kernel_dim != inv.dim_prolongation:
        notes.append(f"G kernel dimension {g.kernel_dim} differs from dim A^(1) = {inv.dim_prolongation}")
    s0 = _param_s0(red, p)
    chars = CharacterSeq(inv.characters.s, s0)
    reasons = [f"{i.name} fails: {i.witness}" for i in ids.failures]
    if g.exists is None:
        reasons.append(f"G undetermined: {g.certificate}")
    if not inv.involutive:
        reasons.append(f"tableau not involutive: dim A^(1) = {inv.dim_prolongation} < {inv.bound}")
    if g.exists and ids.holds and inv.involutive:
        verdict = "applies"
    elif g.exists is None and ids.holds and inv.involutive:
        verdict = "inconclusive"
    else:
        verdict = "does not apply"
    notes.extend(reasons)
    return AnalysisReport(
        sys.name, "VARIANT", verdict, identities=ids, g_solution=g, involutivity=inv, tableau=tab,
        characters=chars,
        dims={"tableau": tab.dim, "prolongation": inv.dim_prolongation, "bound": inv.bound},
        generality=generality_sentence(chars.s, s0),
        invariant_counts=_counts(s0, chars.s, k_max),
        effective_vars=tuple(red.coframe[j] for j in range(red.n) if j not in inv.characteristic_directions),
        notes=notes,
    )


def _analyze_type_a(sys, seed, retries, point, k_max) -> AnalysisReport:
    jac = jacobi_manifold_check(sys, point)
    tab, _, p = tangent_tableau(sys, point)
    inv = cartan_test(tab, seed, retries)
    notes = []
    if jac.kernel_dim != inv.dim_prolongation:
        notes.append(f"R-system kernel {jac.kernel_dim} differs from dim A^(1) = {inv.dim_prolongation}")
    chars = CharacterSeq(inv.characters.s, 0)
    cum = [0]
    for x in chars.s[:-1]:
        cum.append(cum[-1] + x)
    polar = tuple(cum)
    codim = sys.n * jac.dim_A - jac.kernel_dim
    bound = sum(polar)
    if not jac.solvable:
        notes.append(f"not a Jacobi manifold: rank {jac.rank} < augmented rank {jac.augmented_rank}")
    if not inv.involutive:
        notes.append(f"tableau not involutive: dim A^(1) = {inv.dim_prolongation} < {inv.bound}; "
                     f"polar codimensions sum to {bound} < integral-element codimension {codim}")
    verdict = "applies" if jac.solvable and inv.involutive else "does not apply"
    return AnalysisReport(
        sys.name, "TYPE_A", verdict, jacobi=jac, involutivity=inv, tableau=tab, characters=chars,
        dims={"tableau": tab.dim, "prolongation": inv.dim_prolongation, "codim": codim, "bound": bound},
        polar_codims=polar,
        generality=generality_sentence(chars.s, 0),
        invariant_counts=_counts(0, chars.s, k_max),
        effective_vars=tuple(sys.coframe[j] for j in range(sys.n) if j not in inv.characteristic_directions),
        notes=notes,
    )


# ---------------------------------------------------------------------------------
# prolongation


def _prolonged_name(name: str) -> str:
    m = re.fullmatch(r"(.*)_p(\d+)", name)
    return f"{m.group(1)}_p{int(m.group(2)) + 1}" if m else f"{name}_p1"


def _fresh_names(count: int, taken) -> list[str]:
    taken = set(taken)
    if count == 1 and "c" not in taken:
        return ["c"]
    out = []
    k = 1
    while len(out) < count:
        name = f"c{k}"
        if name not in taken:
            out.append(name)
        k += 1
    return out


def _taken_names(table: VarTable) -> set:
    return set(table.kinds)


def _clear_denominators(vec: list[Expr], table: VarTable) -> list[Expr]:
    nz = [e for e in vec if not e.is_zero()]
    if not nz:
        return vec
    L = nz[0].den
    for e in nz[1:]:
        L = L.lcm(e.den)
    nums = [(e * Expr(table, L, _canonical=True)).num for e in vec]
    g = None
    for x in nums:
        if not x.is_zero:
            g = x if g is None else g.gcd(x)
    return [Expr(table, x.exquo(g)) if not x.is_zero else table.zero for x in nums]


def prolong_structure(sys: StructureSystem, point=None) -> StructureSystem:
    """The prolonged structure equations.

    VARIANT: the free derivatives become parameters with
    ``db = G + Σ_τ c_τ H_τ`` where H_τ spans the homogeneous solutions and the
    c_τ are new free derivatives.  TYPE_A: the parameters get rules
    ``da = R(a) + Σ_τ c_τ H_τ`` from the symbolic R-system.
    """
    if sys.mode == "CTFT":
        raise AnalysisError("a CTFT system has no free derivatives to prolong")
    if sys.mode == "VARIANT":
        g = solve_for_G(sys)
        if g.exists is False:
            raise AnalysisError(f"no G exists ({g.certificate}); the system does not prolong")
        if g.method != "symbolic":
            raise AnalysisError("prolongation needs G over the rational functions; this system is only "
                                "certified at sample points")
        red = g.system
        n = red.n
        vectors = []
        for h in g.kernel:
            vec = []
            for b in red.frees:
                vec.extend(_coeff(h[b], (j,), red.vars) for j in range(n))
            vectors.append(_clear_denominators(vec, red.vars))
        particular = {b: g.G[b] for b in red.frees}
        new_params = tuple(red.params) + tuple(red.frees)
        rules_for = list(red.frees)

        def base_rule(b, j):
            return _coeff(particular[b], (j,), red.vars)

        def kernel_entry(t, b, j):
            return vectors[t][red.frees.index(b) * n + j]
        keep_F = dict(red.F)
        source = red
    else:
        if sys.relations:
            raise AnalysisError("symbolic prolongation of a TYPE_A system with relations is not supported")
        source = sys
        n = sys.n
        table = sys.vars
        s = len(sys.params)
        zeta = structure_function(sys)
        J = jacobi_map(zeta)
        rows: dict = {}
        for alpha, a in enumerate(sys.params):
            for i, f in enumerate(sys.d_coframe):
                for (j, k), c in f.coeffs.items():
                    e = -_as_expr(c, table).diff(a)
                    if e.is_zero():
                        continue
                    for x in range(n):
                        if x in (j, k):
                            continue
                        sign, key = sort_sign((x, j, k))
                        row = rows.setdefault((i, key), {})
                        col = alpha * n + x
                        row[col] = row.get(col, table.zero) + e * sign
        for i, f in enumerate(J):
            for key, v in f.coeffs.items():
                if not _as_expr(v, table).is_zero():
                    rows.setdefault((i, key), {})
        keys = list(rows)
        ncols = s * n
        dense = [[rows[k].get(c, table.zero) for c in range(ncols)] for k in keys]
        rhs = [_as_expr(J[i][key], table) for i, key in keys]
        ok, part, kernel, _ = solve_linear_symbolic(dense, rhs, table) if keys else (
            True, [table.zero] * ncols, [[table.one if c == t else table.zero for c in range(ncols)]
                                          for t in range(ncols)], [])
        if not ok:
            raise AnalysisError("the R-system has no solution: A is not a Jacobi manifold")
        vectors = [_clear_denominators(v, table) for v in kernel]
        new_params = tuple(sys.params)
        rules_for = list(sys.params)

        def base_rule(a, j):
            return part[sys.params.index(a) * n + j]

        def kernel_entry(t, a, j):
            return vectors[t][sys.params.index(a) * n + j]
        keep_F = {}
    old = source.vars
    names = _fresh_names(len(vectors), _taken_names(old))
    new = VarTable(new_params, names, old.consts, old.funcs.values(), old.formal_order)
    conv = lambda c: _as_expr(c, old).transfer(new)
    F = {a: f.map_coeffs(conv) for a, f in keep_F.items()}
    for x in rules_for:
        coeffs = {}
        for j in range(n):
            e = conv(base_rule(x, j))
            for t, c in enumerate(names):
                k = kernel_entry(t, x, j)
                if not k.is_zero():
                    e = e + new.symbol(c) * conv(k)
            if not e.is_zero():
                coeffs[(j,)] = e
        F[x] = Form(1, source.coframe, coeffs)
    samples = [dict(p, **{c: Fraction(0) for c in names}) for p in source.samples]
    return StructureSystem(
        name=_prolonged_name(sys.name),
        coframe=source.coframe,
        vars=new,
        d_coframe=[f.map_coeffs(conv) for f in source.d_coframe],
        F=F,
        relations=[conv(L) for L in source.relations],
        samples=samples,
        mode="VARIANT" if names else "CTFT",
    )


# ---------------------------------------------------------------------------------
# linearized ideal of a TYPE_A system


def linearized_type_a_ideal(sys: StructureSystem, point=None, flag=None) -> tuple[PointIdeal, list]:
    """Constant-coefficient ideal {Υ, Ψ} on gl(n) ⊕ V ⊕ T_pA at an integral element.

    ``Υ^i = π^i_j∧η^j`` and ``Ψ^i = ∂C^i_jk/∂a π^a∧η^j∧η^k``; the integral
    element is π = 0, and the returned flag follows ``flag`` (a tableau flag
    in V coordinates, default the coordinate flag).  Its characters are
    ``s_0 = 0`` and ``s_k = n + s_k`` of the tangent tableau.
    """
    tab, gens, _ = tangent_tableau(sys, point)
    n = sys.n
    dA = len(gens)
    labels = ([f"pi_{i}_{j}" for i in range(n) for j in range(n)]
              + [f"eta_{j}" for j in range(n)] + [f"pa_{t}" for t in range(dA)])
    N = len(labels)

    def basis(k):
        return Form.basis(labels, k)
    pi = lambda i, j: basis(i * n + j)
    eta = lambda j: basis(n * n + j)
    pa = lambda t: basis(n * n + n + t)
    generators = []
    for i in range(n):
        u = Form.zero(2, labels)
        for j in range(n):
            u = u + wedge(pi(i, j), eta(j))
        generators.append(u)
    for i in range(n):
        psi = Form.zero(3, labels)
        for t, g in enumerate(gens):
            for (w, (j, k)), v in g.items():
                if w == i:
                    psi = psi + wedge(pa(t), wedge(eta(j), eta(k))).scale(2 * v)
        if not psi.is_zero():
            generators.append(psi)
    ideal = PointIdeal(labels, generators, name=f"{sys.name} (linearized)")
    vecs = flag.basis if flag is not None else tuple(
        tuple(Fraction(int(a == b)) for b in range(n)) for a in range(n))
    out = []
    for v in vecs:
        full = [Fraction(0)] * N
        for j in range(n):
            full[n * n + j] = to_rat(v[j])
        out.append(tuple(full))
    return ideal, out


# ---------------------------------------------------------------------------------
# counting


def invariant_count(s0: int, s: Sequence[int], k: int) -> int:
    """Number of independent invariants of order at most k: s0 + Σ_j C(k+j-1, j) s_j."""
    return s0 + sum(comb(k + j - 1, j) * sj for j, sj in enumerate(s, start=1))


def dim_Mk(n: int, s0: int, s: Sequence[int], k: int) -> int:
    """Dimension of the k-th prolonged manifold: n + Σ_{j≥0} C(k+j, j) s_j."""
    return n + s0 + sum(comb(k + j, j) * sj for j, sj in enumerate(s, start=1))


def generality_sentence(s: Sequence[int], s0: int | None = None) -> str:
    """Plain-language generality of the local solutions from the characters."""
    last = None
    for j, x in enumerate(s, start=1):
        if x:
            last = (j, x)
    if last is None:
        return "solutions depend on finitely many constants"
    q, N = last
    return (f"solutions depend on {N} function{'s' if N != 1 else ''} "
            f"of {q} variable{'s' if q != 1 else ''}")
