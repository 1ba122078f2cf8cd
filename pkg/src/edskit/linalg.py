"""Exact linear algebra over the rationals.

Everything here works on :class:`fractions.Fraction` scalars.  Matrices are
accepted as :class:`Mat` instances or as plain sequences of rows.  Internally
rows are reduced as sparse integer vectors (one common denominator per row,
content divided out after every step), which keeps coefficient growth in check
and is much faster than eliminating with ``Fraction`` objects directly.  The
reduced echelon form is unique, so the way pivots are reached never shows up
in any output.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, NamedTuple, Sequence

Rat = Fraction

__all__ = [
    "Rat",
    "Mat",
    "Subspace",
    "Echelon",
    "RrefResult",
    "AffineSolution",
    "rref",
    "rank",
    "kernel",
    "intersect",
    "solve_affine",
    "to_rat",
    "format_rat",
]


def to_rat(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    num = getattr(x, "numerator", None)
    den = getattr(x, "denominator", None)
    if num is not None and den is not None:
        return Fraction(int(num), int(den))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def format_rat(q: Fraction) -> int | str:
    """JSON-friendly exact number: an int, or a ``"p/q"`` string."""
    q = to_rat(q)
    if q.denominator == 1:
        return q.numerator
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Mat:
    """Dense row-major matrix of Fractions."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match the shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "Mat":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        flat = []
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix")
            flat.extend(to_rat(x) for x in r)
        return cls(len(rows), cols, tuple(flat))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Mat":
        return cls(rows, cols, (Fraction(0),) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], n)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [list(self.row(i)) for i in range(self.rows)]

    @property
    def T(self) -> "Mat":
        return Mat.from_rows(
            [[self[i, j] for i in range(self.rows)] for j in range(self.cols)], self.rows
        )

    def __matmul__(self, other):
        if isinstance(other, Mat):
            if self.cols != other.rows:
                raise ValueError("shape mismatch")
            out = []
            for i in range(self.rows):
                r = self.row(i)
                out.append([
                    sum((r[k] * other[k, j] for k in range(self.cols) if r[k]), Fraction(0))
                    for j in range(other.cols)
                ])
            return Mat.from_rows(out, other.cols)
        vec = [to_rat(x) for x in other]
        if len(vec) != self.cols:
            raise ValueError("shape mismatch")
        return [sum((a * b for a, b in zip(self.row(i), vec) if a), Fraction(0))
                for i in range(self.rows)]


# ---------------------------------------------------------------------------
# sparse integer echelon engine


def _int_row(row: Mapping[int, Fraction]) -> dict[int, int]:
    """Scale a sparse rational row to a primitive integer row."""
    items = [(c, to_rat(v)) for c, v in row.items() if v]
    if not items:
        return {}
    den = lcm(*(v.denominator for _, v in items))
    out = {c: v.numerator * (den // v.denominator) for c, v in items}
    return _primitive(out)


def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = gcd(*row.values())
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def _combine(row: dict[int, int], piv: dict[int, int], col: int) -> dict[int, int]:
    """Return a primitive multiple of ``b*row - a*piv`` that vanishes at ``col``."""
    a = row[col]
    b = piv[col]
    g = gcd(a, b)
    a //= g
    b //= g
    if b < 0:
        a, b = -a, -b
    out = {c: b * v for c, v in row.items()} if b != 1 else dict(row)
    for c, v in piv.items():
        nv = out.get(c, 0) - a * v
        if nv:
            out[c] = nv
        else:
            out.pop(c, None)
    return _primitive(out) if out else out


class Echelon:
    """Incrementally maintained reduced row echelon form.

    Rows are inserted one at a time and the basis is kept fully reduced: every
    pivot row vanishes on every other pivot column.  Because the pivot set of a
    row space is unique, ``pivots`` after any sequence of insertions is the
    pivot set of the canonical RREF.  The number of pivots among the first k
    columns is the rank of the column prefix, which is what flag restriction
    dimensions need.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._rows: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self._rows)

    def reduce(self, row: Mapping) -> dict[int, int]:
        r = _int_row(row)
        for c in [c for c in r if c in self._rows]:
            if c in r:
                r = _combine(r, self._rows[c], c)
        return r

    def add(self, row: Mapping) -> bool:
        """Insert a sparse row; return True when the rank went up."""
        r = self.reduce(row)
        if not r:
            return False
        lead = min(r)
        if r[lead] < 0:
            r = {c: -v for c, v in r.items()}
        for c, p in list(self._rows.items()):
            if lead in p:
                self._rows[c] = _combine(p, r, lead)
        self._rows[lead] = r
        return True

    def extend(self, rows: Iterable[Mapping]) -> "Echelon":
        rows = [dict(r) for r in rows]
        # sparse, short rows first keeps intermediate numbers small
        rows.sort(key=lambda r: (len(r), max((abs(to_rat(v).numerator).bit_length()
                                              for v in r.values()), default=0)))
        for r in rows:
            self.add(r)
        return self

    def contains(self, row: Mapping) -> bool:
        return not self.reduce(row)

    def basis(self) -> list[tuple[Fraction, ...]]:
        """Canonical RREF rows (pivot entries equal to 1)."""
        out = []
        for c in sorted(self._rows):
            p = self._rows[c]
            piv = p[c]
            vec = [Fraction(0)] * self.ncols
            for k, v in p.items():
                vec[k] = Fraction(v, piv)
            out.append(tuple(vec))
        return out

    def kernel_basis(self, ncols: int | None = None) -> list[tuple[Fraction, ...]]:
        """Null-space basis of the row space, one vector per free column."""
        n = self.ncols if ncols is None else ncols
        pivots = self._rows
        free = [j for j in range(n) if j not in pivots]
        # column index: free column -> [(pivot col, coefficient)]
        touching: dict[int, list[tuple[int, Fraction]]] = {f: [] for f in free}
        for c, p in pivots.items():
            piv = p[c]
            for k, v in p.items():
                if k != c and k in touching:
                    touching[k].append((c, Fraction(-v, piv)))
        out = []
        for f in free:
            vec = [Fraction(0)] * n
            vec[f] = Fraction(1)
            for c, v in touching[f]:
                vec[c] = v
            out.append(tuple(vec))
        return out

    def pivot_row(self, col: int) -> dict[int, Fraction]:
        p = self._rows[col]
        piv = p[col]
        return {k: Fraction(v, piv) for k, v in p.items()}


# ---------------------------------------------------------------------------
# public API


def _rows_of(m) -> tuple[list[dict[int, Fraction]], int]:
    if isinstance(m, Mat):
        rows = [m.row(i) for i in range(m.rows)]
        ncols = m.cols
    else:
        rows = [list(r) for r in m]
        ncols = len(rows[0]) if rows else 0
    sparse = []
    for r in rows:
        if len(r) != ncols:
            raise ValueError("ragged matrix")
        sparse.append({j: to_rat(v) for j, v in enumerate(r) if v})
    return sparse, ncols


class Subspace:
    """A linear subspace of Q^N given by an independent spanning list.

    Equality compares canonical reduced echelon bases, so two Subspaces are
    equal exactly when they are the same subspace.
    """

    __slots__ = ("ambient_dim", "basis", "_canon")

    def __init__(self, ambient_dim: int, basis: Iterable[Sequence] = (), *, _checked=False):
        self.ambient_dim = ambient_dim
        vecs = [tuple(to_rat(x) for x in v) for v in basis]
        for v in vecs:
            if len(v) != ambient_dim:
                raise ValueError("basis vector has the wrong length")
        self._canon = None
        if not _checked:
            ech = Echelon(ambient_dim)
            for v in vecs:
                if not ech.add({j: x for j, x in enumerate(v) if x}):
                    raise ValueError("basis vectors are linearly dependent")
        self.basis = tuple(vecs)

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Sequence]) -> "Subspace":
        """Subspace spanned by arbitrary (possibly dependent) vectors."""
        ech = Echelon(ambient_dim).extend(
            {j: to_rat(x) for j, x in enumerate(v) if x} for v in vectors
        )
        sub = cls(ambient_dim, ech.basis(), _checked=True)
        sub._canon = sub.basis
        return sub

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, (), _checked=True)

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, Mat.identity(ambient_dim).to_rows(), _checked=True)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def canonical(self) -> tuple:
        if self._canon is None:
            self._canon = tuple(Echelon(self.ambient_dim).extend(
                {j: x for j, x in enumerate(v) if x} for v in self.basis).basis())
        return self._canon

    def echelon(self) -> Echelon:
        return Echelon(self.ambient_dim).extend(
            {j: x for j, x in enumerate(v) if x} for v in self.basis)

    def contains(self, v: Sequence) -> bool:
        return self.echelon().contains({j: to_rat(x) for j, x in enumerate(v) if x})

    def contains_subspace(self, other: "Subspace") -> bool:
        ech = self.echelon()
        return all(ech.contains({j: x for j, x in enumerate(v) if x}) for v in other.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        if other.ambient_dim != self.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return Subspace.span(self.ambient_dim, list(self.basis) + list(other.basis))

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.canonical() == other.canonical()

    def __hash__(self):
        return hash((self.ambient_dim, self.canonical()))

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, dim={self.dim})"


class RrefResult(NamedTuple):
    rank: int
    row_space: Subspace
    kernel: Subspace


class AffineSolution(NamedTuple):
    solvable: bool
    particular: tuple | None
    kernel: Subspace
    rank: int
    augmented_rank: int


def rref(m) -> RrefResult:
    """Rank, canonical row space and null space of a matrix."""
    rows, ncols = _rows_of(m)
    ech = Echelon(ncols).extend(rows)
    row_space = Subspace(ncols, ech.basis(), _checked=True)
    row_space._canon = row_space.basis
    ker = Subspace(ncols, ech.kernel_basis(), _checked=True)
    return RrefResult(ech.rank, row_space, ker)


def rank(m) -> int:
    rows, ncols = _rows_of(m)
    return Echelon(ncols).extend(rows).rank


def kernel(m, ncols: int | None = None) -> Subspace:
    rows, n = _rows_of(m)
    if ncols is not None:
        n = ncols
    ech = Echelon(n).extend(rows)
    return Subspace(n, ech.kernel_basis(), _checked=True)


def intersect(s1: Subspace, s2: Subspace) -> Subspace:
    """The intersection of two subspaces of the same ambient space."""
    if s1.ambient_dim != s2.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    n = s1.ambient_dim
    d1 = s1.dim
    # solve x.B1 - y.B2 = 0, then map x back through B1
    rows = []
    for k in range(n):
        r = {}
        for i, v in enumerate(s1.basis):
            if v[k]:
                r[i] = v[k]
        for j, v in enumerate(s2.basis):
            if v[k]:
                r[d1 + j] = -v[k]
        rows.append(r)
    ech = Echelon(d1 + s2.dim).extend(rows)
    vecs = []
    for kv in ech.kernel_basis():
        vec = [Fraction(0)] * n
        for i, b in enumerate(s1.basis):
            if kv[i]:
                for k in range(n):
                    if b[k]:
                        vec[k] += kv[i] * b[k]
        vecs.append(vec)
    return Subspace.span(n, vecs)


def solve_affine(coeff, rhs: Sequence) -> AffineSolution:
    """Solve ``coeff @ x = rhs`` exactly.

    When the system is inconsistent the returned ranks certify it:
    ``augmented_rank > rank``.
    """
    rows, ncols = _rows_of(coeff)
    rhs = [to_rat(x) for x in rhs]
    if len(rhs) != len(rows):
        raise ValueError("rhs length does not match the row count")
    aug = []
    for r, b in zip(rows, rhs):
        r = dict(r)
        if b:
            r[ncols] = b
        aug.append(r)
    return _solve_sparse(aug, ncols)


def _solve_sparse(aug: list[dict], ncols: int) -> AffineSolution:
    ech = Echelon(ncols + 1).extend(aug)
    pivots = ech.pivots
    ker = Subspace(ncols, _kernel_without_last(ech, ncols), _checked=True)
    coeff_rank = sum(1 for c in pivots if c < ncols)
    if ncols in pivots:
        return AffineSolution(False, None, ker, coeff_rank, coeff_rank + 1)
    x = [Fraction(0)] * ncols
    for c in pivots:
        row = ech.pivot_row(c)
        x[c] = row.get(ncols, Fraction(0))
    return AffineSolution(True, tuple(x), ker, coeff_rank, coeff_rank)


def _kernel_without_last(ech: Echelon, ncols: int) -> list[tuple]:
    # the augmented column sits last, so it never disturbs coefficient pivots
    out = []
    for v in ech.kernel_basis(ncols + 1):
        if v[ncols] == 0:
            out.append(v[:ncols])
    return out


def solve_sparse(rows: Iterable[Mapping[int, Fraction]], rhs: Sequence, ncols: int) -> AffineSolution:
    """Like :func:`solve_affine` but takes sparse ``{col: value}`` rows."""
    aug = []
    for r, b in zip(rows, rhs):
        r = {c: to_rat(v) for c, v in r.items() if v}
        b = to_rat(b)
        if b:
            r[ncols] = b
        aug.append(r)
    return _solve_sparse(aug, ncols)
