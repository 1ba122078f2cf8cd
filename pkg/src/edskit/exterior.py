"""Exterior algebra on a labelled frame and the structure-equation derivative.

A :class:`Form` stores its coefficients on strictly increasing index tuples,
so there is exactly one representation of every form and equality is a dict
comparison.  Coefficients are either Fractions or :class:`~edskit.symexpr.Expr`
values; both support the arithmetic used here and are falsy when zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Iterable, Mapping, Sequence

from .errors import AnalysisError, ParseError
from .linalg import to_rat
from .symexpr import Expr, VarTable

__all__ = ["Form", "wedge", "contract", "StructureSystem", "structure_d", "merge_sign"]


def merge_sign(a: tuple, b: tuple) -> tuple[int, tuple]:
    """Sign and sorted tuple of ``e^a ^ e^b``; sign 0 when they overlap."""
    if set(a) & set(b):
        return 0, ()
    seq = list(a) + list(b)
    # count inversions (sequences are short)
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(seq))


def sort_sign(seq: Sequence[int]) -> tuple[int, tuple]:
    if len(set(seq)) != len(seq):
        return 0, ()
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return (-1 if inv % 2 else 1), tuple(sorted(seq))


class Form:
    """A q-form on a frame ``labels`` with sparse sorted-tuple coefficients."""

    __slots__ = ("degree", "labels", "coeffs")

    def __init__(self, degree: int, labels: Sequence[str], coeffs: Mapping[tuple, object] | None = None):
        self.degree = degree
        self.labels = tuple(labels)
        n = len(self.labels)
        clean = {}
        for key, c in (coeffs or {}).items():
            key = tuple(key)
            if len(key) != degree:
                raise ValueError("index tuple length does not match the degree")
            if any(i < 0 or i >= n for i in key) or any(key[i] >= key[i + 1] for i in range(len(key) - 1)):
                raise ValueError(f"index tuple {key} is not strictly increasing within the frame")
            if c:
                clean[key] = c
        self.coeffs = clean

    # -- constructors -----------------------------------------------------------
    @classmethod
    def basis(cls, labels: Sequence[str], i: int, coeff=Fraction(1)) -> "Form":
        return cls(1, labels, {(i,): coeff})

    @classmethod
    def scalar(cls, labels: Sequence[str], c) -> "Form":
        return cls(0, labels, {(): c})

    @classmethod
    def zero(cls, degree: int, labels: Sequence[str]) -> "Form":
        return cls(degree, labels, {})

    @property
    def frame_dim(self) -> int:
        return len(self.labels)

    def is_zero(self) -> bool:
        return not self.coeffs

    def _check(self, other: "Form"):
        if self.labels != other.labels:
            raise ValueError("forms live on different frames")

    # -- linear structure ----------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, (int, Fraction, Expr)) and self.degree == 0:
            other = Form.scalar(self.labels, other)
        if not isinstance(other, Form):
            return NotImplemented
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            if k in out:
                s = out[k] + c
                if s:
                    out[k] = s
                else:
                    del out[k]
            else:
                out[k] = c
        return Form(self.degree, self.labels, out)

    __radd__ = __add__

    def __neg__(self):
        return Form(self.degree, self.labels, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Form":
        if not c:
            return Form(self.degree, self.labels)
        return Form(self.degree, self.labels, {k: c * v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, Form):
            return wedge(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, Form):
            return wedge(other, self)
        return self.scale(other)

    def __xor__(self, other):
        if isinstance(other, Form):
            return wedge(self, other)
        return self.scale(other)

    def __rxor__(self, other):
        return self.scale(other)

    def __truediv__(self, c):
        return Form(self.degree, self.labels, {k: v / c for k, v in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.degree == other.degree and self.labels == other.labels and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.degree, self.labels, tuple(sorted((k, str(v)) for k, v in self.coeffs.items()))))

    def __getitem__(self, key):
        return self.coeffs.get(tuple(key), 0)

    def map_coeffs(self, fn) -> "Form":
        return Form(self.degree, self.labels, {k: fn(v) for k, v in self.coeffs.items()})

    def relabel(self, labels: Sequence[str]) -> "Form":
        """Re-express on a frame that extends (or reorders) the current one."""
        pos = {name: i for i, name in enumerate(labels)}
        out = {}
        for k, c in self.coeffs.items():
            idx = []
            for i in k:
                name = self.labels[i]
                if name not in pos:
                    raise ValueError(f"frame label '{name}' missing from target frame")
                idx.append(pos[name])
            sign, key = sort_sign(idx)
            out[key] = out.get(key, 0) + sign * c if key in out else sign * c
        return Form(self.degree, labels, out)

    # -- evaluation -------------------------------------------------------------------
    def contract(self, v: Sequence) -> "Form":
        return contract(self, v)

    def __call__(self, *vectors):
        """Value on ``degree`` vectors given in frame coordinates."""
        if len(vectors) != self.degree:
            raise ValueError("wrong number of vectors")
        total = 0
        for key, c in self.coeffs.items():
            total = total + c * _det([[to_rat(vec[i]) for vec in vectors] for i in key])
        return total

    def eval(self, point) -> "Form":
        """Substitute a sample point into Expr coefficients."""
        return Form(self.degree, self.labels,
                    {k: (v.eval(point) if isinstance(v, Expr) else v) for k, v in self.coeffs.items()})

    def pullback(self, P: Sequence[Sequence], labels: Sequence[str] | None = None) -> "Form":
        """Coefficients in the basis whose a-th vector is column a of ``P``."""
        cols = len(P[0]) if len(P) else 0
        labels = labels or [f"f{a + 1}" for a in range(cols)]
        out = {}
        for key, c in self.coeffs.items():
            for I in combinations(range(cols), self.degree):
                d = _det([[P[j][a] for a in I] for j in key])
                if d:
                    out[I] = out.get(I, 0) + c * d
        return Form(self.degree, labels, out)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in sorted(self.coeffs):
            mon = "^".join(self.labels[i] for i in k) or "1"
            parts.append(f"({self.coeffs[k]})*{mon}")
        return " + ".join(parts)


def _det(m: list[list]) -> object:
    n = len(m)
    if n == 0:
        return 1
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0
    for perm in permutations(range(n)):
        prod = 1
        for i, p in enumerate(perm):
            prod = prod * m[i][p]
            if not prod:
                break
        if prod:
            sign, _ = sort_sign(perm)
            total = total + sign * prod
    return total


def wedge(f1: Form, f2: Form) -> Form:
    f1._check(f2)
    out: dict = {}
    for k1, c1 in f1.coeffs.items():
        for k2, c2 in f2.coeffs.items():
            sign, key = merge_sign(k1, k2)
            if sign:
                term = c1 * c2
                if sign < 0:
                    term = -term
                if key in out:
                    s = out[key] + term
                    if s:
                        out[key] = s
                    else:
                        del out[key]
                else:
                    out[key] = term
    return Form(f1.degree + f2.degree, f1.labels, out)


def contract(f: Form, v: Sequence) -> Form:
    """Interior product with a vector given in frame coordinates."""
    if f.degree < 1:
        raise ValueError("cannot contract a 0-form")
    v = [to_rat(x) for x in v]
    out: dict = {}
    for key, c in f.coeffs.items():
        for r, i in enumerate(key):
            if v[i]:
                rest = key[:r] + key[r + 1:]
                term = c * v[i] if r % 2 == 0 else -(c * v[i])
                out[rest] = out[rest] + term if rest in out else term
    return Form(f.degree - 1, f.labels, out)


# ---------------------------------------------------------------------------------
# structure systems


MODES = ("CTFT", "VARIANT", "TYPE_A")


@dataclass
class StructureSystem:
    """Cartan structure equations.

    ``d_coframe[i]`` is the 2-form dω^i (so ``C^i_jk`` is minus its ``(j,k)``
    coefficient for j<k); ``F[a]`` is the 1-form da for parameter ``a``;
    ``G[b]``, when present, is the ω-part of db for free derivative ``b``.
    """

    name: str
    coframe: tuple
    vars: VarTable
    d_coframe: list
    F: dict = field(default_factory=dict)
    G: dict | None = None
    relations: list = field(default_factory=list)
    samples: list = field(default_factory=list)
    mode: str = ""

    def __post_init__(self):
        self.coframe = tuple(self.coframe)
        if not self.mode:
            if self.vars.frees:
                self.mode = "VARIANT"
            elif self.F or not self.vars.params:
                self.mode = "CTFT"
            else:
                self.mode = "TYPE_A"
        if self.mode not in MODES:
            raise ParseError(f"unknown mode '{self.mode}'")
        if len(self.d_coframe) != self.n:
            raise ParseError("every coframe element needs a 'd' rule")
        for i, f in enumerate(self.d_coframe):
            if f.degree != 2 or f.labels != self.coframe:
                raise ParseError(f"d {self.coframe[i]} must be a 2-form in the coframe")
            for c in f.coeffs.values():
                bad = [s for s in _root_variables(c, self.vars) if s in self.vars.frees]
                if bad:
                    raise ParseError(f"d {self.coframe[i]} depends on free derivative '{bad[0]}'")
        if self.mode == "TYPE_A" and self.F:
            raise ParseError("TYPE_A systems have no parameter rules")
        if self.mode in ("CTFT", "VARIANT"):
            missing = [a for a in self.vars.params if a not in self.F]
            if missing:
                raise ParseError(f"parameter '{missing[0]}' has no 'd' rule")
        if self.mode == "CTFT":
            for a, f in self.F.items():
                for c in f.coeffs.values():
                    bad = [s for s in _root_variables(c, self.vars) if s in self.vars.frees]
                    if bad:
                        raise ParseError(f"CTFT system: d {a} depends on free '{bad[0]}'")

    @property
    def n(self) -> int:
        return len(self.coframe)

    @property
    def params(self) -> tuple:
        return self.vars.params

    @property
    def frees(self) -> tuple:
        return self.vars.frees

    @property
    def beta_labels(self) -> tuple:
        return tuple(f"beta_{b}" for b in self.vars.frees)

    @property
    def frame(self) -> tuple:
        """Coframe followed by the formal extras β (one per free derivative)."""
        return self.coframe + self.beta_labels

    def C(self, i: int, j: int, k: int):
        """Structure function C^i_jk (antisymmetric in j, k)."""
        if j == k:
            return self.vars.zero
        if j < k:
            return -_as_expr(self.d_coframe[i][(j, k)], self.vars)
        return _as_expr(self.d_coframe[i][(k, j)], self.vars)

    def coframe_form(self, i: int, frame: Sequence[str] | None = None) -> Form:
        labels = tuple(frame or self.frame)
        return Form.basis(labels, labels.index(self.coframe[i]), self.vars.one)

    def lift(self, f: Form) -> Form:
        """Move a coframe form onto the extended frame."""
        if f.labels == self.frame:
            return f
        return f.relabel(self.frame)

    def copy(self, **changes) -> "StructureSystem":
        data = dict(name=self.name, coframe=self.coframe, vars=self.vars, d_coframe=list(self.d_coframe),
                    F=dict(self.F), G=None if self.G is None else dict(self.G),
                    relations=list(self.relations), samples=list(self.samples), mode=self.mode)
        data.update(changes)
        return StructureSystem(**data)


def _as_expr(c, table: VarTable) -> Expr:
    if isinstance(c, Expr):
        return c
    return table.const(c)


def _root_variables(e, table: VarTable) -> set[str]:
    """Declared variables an expression depends on, through function symbols."""
    if not isinstance(e, Expr):
        return set()
    out = set()
    for g in e.symbols():
        for x, _ in table._deps[g]:
            out.add(x)
    return out


def structure_d(sys: StructureSystem, f: Form, use_G: bool = True) -> Form:
    """Exterior derivative using the structure equations as rewrite rules.

    The result lives on ``sys.frame``.  Free derivatives contribute
    ``db = G ω + β`` with β formal (``use_G=False`` drops G, keeping only β).
    """
    labels = sys.frame
    f = f if f.labels == labels else f.relabel(labels)
    table = sys.vars
    n = sys.n
    d_basis = _differentials(sys, use_G)
    out = Form.zero(f.degree + 1, labels)
    dmono_cache: dict[tuple, Form] = {}
    for key, c in f.coeffs.items():
        c = _as_expr(c, table)
        mono = Form(f.degree, labels, {key: table.one})
        # d(c) ^ mono
        dc = _d_scalar(c, sys, d_basis)
        if not dc.is_zero():
            out = out + wedge(dc, mono)
        # c * d(mono)
        if key not in dmono_cache:
            dmono_cache[key] = _d_monomial(key, sys, labels)
        dm = dmono_cache[key]
        if not dm.is_zero():
            out = out + dm.scale(c)
    return out


def _differentials(sys: StructureSystem, use_G: bool) -> dict[str, Form]:
    labels = sys.frame
    table = sys.vars
    out = {}
    for a in table.params:
        if a in sys.F:
            out[a] = sys.lift(sys.F[a])
    for k, b in enumerate(table.frees):
        beta = Form.basis(labels, sys.n + k, table.one)
        if use_G and sys.G is not None and b in sys.G:
            out[b] = sys.lift(sys.G[b]) + beta
        else:
            out[b] = beta
    return out


def _d_scalar(c: Expr, sys: StructureSystem, d_basis: Mapping[str, Form]) -> Form:
    labels = sys.frame
    out = Form.zero(1, labels)
    for x in sorted(_root_variables(c, sys.vars)):
        if x in sys.vars.consts:
            continue
        if x not in d_basis:
            raise AnalysisError(f"no rule for d{x}: parameter rules are needed here")
        dx = c.diff(x)
        if dx:
            out = out + d_basis[x].scale(dx)
    return out


def _d_monomial(key: tuple, sys: StructureSystem, labels) -> Form:
    table = sys.vars
    if not key:
        return Form.zero(1, labels)
    i = key[0]
    if i >= sys.n:
        raise AnalysisError(f"d of the formal extra '{labels[i]}' is undefined")
    first = sys.lift(sys.d_coframe[i])
    rest = Form(len(key) - 1, labels, {key[1:]: table.one})
    out = wedge(first, rest)
    if len(key) > 1:
        head = Form(1, labels, {(i,): table.one})
        out = out - wedge(head, _d_monomial(key[1:], sys, labels))
    return out
