"""Tableaux of W-valued q-forms, their characters, prolongations and
Cartan's test.

A tableau B is a linear subspace of ``W ⊗ Λ^q(V*)``.  Elements are stored as
sparse dicts ``{(w, I): value}`` with ``I`` a strictly increasing q-tuple of
V-indices (0-based).  For q = 1 this is the classical tableau of linear maps
V → W; for q = 2 it covers curvature-type spaces.

Characters come from restriction dimensions: for a flag ``f_1, ..., f_n`` of
V, ``c_p`` is the dimension of B restricted to ``Λ^q`` of the span of the first
p flag vectors, and ``s_p = c_p - c_{p-1}``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import comb
from typing import Iterable, Mapping, Sequence

from .errors import AnalysisError
from .exterior import Form, merge_sign, sort_sign
from .linalg import Echelon, Subspace, rank, to_rat

__all__ = [
    "FormTableau",
    "Flag",
    "CharacterSeq",
    "InvolutivityReport",
    "restriction_dims",
    "prolong",
    "generic_characters",
    "cartan_test",
    "binomial_dim_check",
    "tableau_of_graded_subspace",
    "shift_characters",
    "prolonged_characters",
]

Vector = dict  # {(w, I): Fraction}


class FormTableau:
    """Span of W-valued q-forms on V.

    ``generators`` may be sparse dicts ``{(w, I): value}`` or sequences of
    ``w_dim`` Rat-valued :class:`Form` objects.  The stored ``basis`` is an
    independent subset-free canonical basis (reduced echelon form).
    """

    def __init__(self, w_dim: int, v_dim: int, degree: int, generators: Iterable = ()):
        if degree < 1:
            raise ValueError("tableau degree must be at least 1")
        self.w_dim = w_dim
        self.v_dim = v_dim
        self.degree = degree
        gens = [self._coerce(g) for g in generators]
        self._columns = [(w, I) for w in range(w_dim) for I in combinations(range(v_dim), degree)]
        index = {key: k for k, key in enumerate(self._columns)}
        ech = Echelon(len(self._columns)).extend({index[k]: v for k, v in g.items()} for g in gens)
        self.basis: list[Vector] = []
        for row in ech.basis():
            self.basis.append({self._columns[k]: v for k, v in enumerate(row) if v})

    def _coerce(self, g) -> Vector:
        if isinstance(g, Mapping):
            out = {}
            for (w, I), v in g.items():
                I = tuple(I)
                if not (0 <= w < self.w_dim) or len(I) != self.degree or list(I) != sorted(set(I)) \
                        or any(i < 0 or i >= self.v_dim for i in I):
                    raise ValueError(f"bad tableau entry index {(w, I)}")
                v = to_rat(v)
                if v:
                    out[(w, I)] = v
            return out
        forms = list(g)
        if len(forms) != self.w_dim:
            raise ValueError("a generator needs one form per W-component")
        out = {}
        for w, f in enumerate(forms):
            if f.degree != self.degree or f.frame_dim != self.v_dim:
                raise ValueError("generator form has the wrong degree or frame")
            for I, v in f.coeffs.items():
                v = to_rat(v)
                if v:
                    out[(w, I)] = v
        return out

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def generators(self) -> list[Vector]:
        return self.basis

    def as_forms(self, labels: Sequence[str] | None = None) -> list[list[Form]]:
        labels = labels or [f"v{j + 1}" for j in range(self.v_dim)]
        out = []
        for g in self.basis:
            comps = [dict() for _ in range(self.w_dim)]
            for (w, I), v in g.items():
                comps[w][I] = v
            out.append([Form(self.degree, labels, c) for c in comps])
        return out

    def subspace(self) -> Subspace:
        index = {key: k for k, key in enumerate(self._columns)}
        vecs = []
        for g in self.basis:
            v = [Fraction(0)] * len(self._columns)
            for key, x in g.items():
                v[index[key]] = x
            vecs.append(v)
        return Subspace(len(self._columns), vecs, _checked=True)

    def __eq__(self, other):
        if not isinstance(other, FormTableau):
            return NotImplemented
        return (self.w_dim, self.v_dim, self.degree) == (other.w_dim, other.v_dim, other.degree) \
            and self.basis == other.basis

    def characteristic_directions(self) -> list[int]:
        """Frame directions e_j with ι_{e_j} g = 0 for every generator."""
        used = set()
        for g in self.basis:
            for (_, I) in g:
                used.update(I)
        return [j for j in range(self.v_dim) if j not in used]

    def effective(self) -> tuple["FormTableau", list[int]]:
        """Drop Cauchy characteristic directions; returns (tableau, kept indices)."""
        dropped = set(self.characteristic_directions())
        kept = [j for j in range(self.v_dim) if j not in dropped]
        if not dropped:
            return self, kept
        pos = {j: a for a, j in enumerate(kept)}
        gens = [{(w, tuple(pos[i] for i in I)): v for (w, I), v in g.items()} for g in self.basis]
        return FormTableau(self.w_dim, len(kept), self.degree, gens), kept

    def __repr__(self):
        return f"FormTableau(w_dim={self.w_dim}, v_dim={self.v_dim}, degree={self.degree}, dim={self.dim})"


@dataclass(frozen=True)
class Flag:
    """Ordered basis f_1..f_n of V; ``f_p`` is ``basis[p-1]``."""

    basis: tuple
    label: str = "coordinate"

    @classmethod
    def coordinate(cls, n: int) -> "Flag":
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)), "coordinate")

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "Flag":
        n = len(perm)
        return cls(tuple(tuple(Fraction(int(perm[a] == j)) for j in range(n)) for a in range(n)),
                   "permutation " + "".join(str(p + 1) for p in perm) if n < 10 else "permutation")

    @property
    def n(self) -> int:
        return len(self.basis)

    def matrix(self) -> list[list[Fraction]]:
        """Matrix whose columns are the flag vectors."""
        n = self.n
        return [[self.basis[a][j] for a in range(n)] for j in range(n)]

    def permutation_of(self) -> list[int] | None:
        perm = []
        for v in self.basis:
            nz = [j for j, x in enumerate(v) if x]
            if len(nz) != 1 or v[nz[0]] != 1:
                return None
            perm.append(nz[0])
        return perm

    def to_json(self) -> list:
        from .linalg import format_rat
        return [[format_rat(x) for x in v] for v in self.basis]


@dataclass(frozen=True)
class CharacterSeq:
    """Characters s_1..s_n (and s_0 for point-ideal analyses)."""

    s: tuple
    s0: int | None = None

    @property
    def cumulative(self) -> tuple:
        out, total = [], 0
        for x in self.s:
            total += x
            out.append(total)
        return tuple(out)

    @property
    def n(self) -> int:
        return len(self.s)

    def bound(self) -> int:
        return sum((i + 1) * x for i, x in enumerate(self.s))

    def last_nonzero(self) -> tuple[int, int] | None:
        """``(q, s_q)`` for the last nonzero character, or None."""
        for i in range(len(self.s) - 1, -1, -1):
            if self.s[i]:
                return i + 1, self.s[i]
        return None

    def trimmed(self) -> tuple:
        s = list(self.s)
        while s and s[-1] == 0:
            s.pop()
        return tuple(s)

    def padded(self, n: int) -> "CharacterSeq":
        if n < len(self.s):
            if any(self.s[n:]):
                raise ValueError("cannot truncate nonzero characters")
            return CharacterSeq(self.s[:n], self.s0)
        return CharacterSeq(tuple(self.s) + (0,) * (n - len(self.s)), self.s0)


@dataclass
class InvolutivityReport:
    characters: CharacterSeq
    dim_tableau: int
    dim_prolongation: int
    bound: int
    involutive: bool
    flag_used: Flag
    retries_used: int
    flags_tried: int
    effective_dim: int
    characteristic_directions: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if self.involutive:
            return "involutive"
        return "not involutive (certified up to flag search)"


# ---------------------------------------------------------------------------------
# restriction dimensions


def _minor_table(P: Sequence[Sequence[Fraction]], q: int, n: int):
    """For each q-subset J of rows, the nonzero minors det P[J, I] over column subsets I."""
    cols = list(combinations(range(n), q))
    table = {}
    for J in combinations(range(n), q):
        row = {}
        for I in cols:
            if q == 1:
                d = P[J[0]][I[0]]
            elif q == 2:
                d = P[J[0]][I[0]] * P[J[1]][I[1]] - P[J[0]][I[1]] * P[J[1]][I[0]]
            else:
                d = _det([[P[j][i] for i in I] for j in J])
            if d:
                row[I] = d
        table[J] = row
    return table


def _det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    total = Fraction(0)
    for perm in permutations(range(n)):
        prod = Fraction(1)
        for i, p in enumerate(perm):
            prod *= m[i][p]
            if not prod:
                break
        if prod:
            sign, _ = sort_sign(perm)
            total += sign * prod
    return total


def _transform(gens: list[Vector], flag: Flag, q: int, n: int) -> list[Vector]:
    perm = flag.permutation_of()
    if perm is not None:
        # f_a = e_{perm[a]}: coefficient on I is the coefficient on perm(I), with sign
        inv = {j: a for a, j in enumerate(perm)}
        out = []
        for g in gens:
            h = {}
            for (w, J), v in g.items():
                sign, I = sort_sign([inv[j] for j in J])
                h[(w, I)] = sign * v
            out.append(h)
        return out
    minors = _minor_table(flag.matrix(), q, n)
    out = []
    for g in gens:
        h: dict = {}
        for (w, J), v in g.items():
            for I, d in minors[J].items():
                key = (w, I)
                h[key] = h.get(key, 0) + v * d
        out.append({k: x for k, x in h.items() if x})
    return out


def _cumulative_for(gens: list[Vector], q: int, n: int, m: int, flag: Flag) -> tuple:
    rows = _transform(gens, flag, q, n)
    # columns ordered by the largest index of I so that column prefixes are Λ^q(V_p)
    cols = sorted({key for r in rows for key in r}, key=lambda k: (k[1][-1], k[1], k[0]))
    index = {key: i for i, key in enumerate(cols)}
    ech = Echelon(len(cols)).extend({index[k]: v for k, v in r.items()} for r in rows)
    counts = [0] * n
    for c in ech.pivots:
        counts[cols[c][1][-1]] += 1
    out, total = [], 0
    for x in counts:
        total += x
        out.append(total)
    return tuple(out)


def restriction_dims(b: FormTableau, flag: Flag) -> tuple:
    """Cumulative dimensions c_1..c_n of B restricted along the flag."""
    if flag.n != b.v_dim:
        raise ValueError("flag dimension does not match V")
    if rank(flag.matrix()) != flag.n:
        raise AnalysisError("singular flag")
    if b.v_dim == 0:
        return ()
    return _cumulative_for(b.basis, b.degree, b.v_dim, b.w_dim, flag)


def characters_from_cumulative(c: Sequence[int]) -> CharacterSeq:
    s, prev = [], 0
    for x in c:
        s.append(x - prev)
        prev = x
    return CharacterSeq(tuple(s))


# ---------------------------------------------------------------------------------
# prolongation


def _prolongation_kernel(b: FormTableau) -> list[tuple]:
    n = b.v_dim
    rows: dict = {}
    for g_idx, g in enumerate(b.basis):
        for (w, I), v in g.items():
            for j in range(n):
                sign, K = merge_sign(I, (j,))
                if sign:
                    col = g_idx * n + j
                    r = rows.setdefault((w, K), {})
                    r[col] = r.get(col, 0) + sign * v
    ech = Echelon(b.dim * n).extend(r for r in rows.values())
    return ech.kernel_basis(b.dim * n)


def prolong(b: FormTableau) -> FormTableau:
    """First prolongation: kernel of B ⊗ V* → W ⊗ Λ^{q+1} V*.

    The result is a linear (q = 1) tableau with values in W ⊗ Λ^q V*, the
    value index ``(w, I)`` flattened in column order.  This is the form in
    which further prolongations are taken; for q = 1 it spans the same
    subspace as the symmetric tensors in W ⊗ S²V*.
    """
    n = b.v_dim
    forms = list(combinations(range(n), b.degree))
    col = {I: k for k, I in enumerate(forms)}
    gens = []
    for x in _prolongation_kernel(b):
        h: dict = {}
        for g_idx, g in enumerate(b.basis):
            for j in range(n):
                c = x[g_idx * n + j]
                if not c:
                    continue
                for (w, I), v in g.items():
                    key = (w * len(forms) + col[I], (j,))
                    h[key] = h.get(key, 0) + c * v
        gens.append({k: v for k, v in h.items() if v})
    return FormTableau(b.w_dim * len(forms), n, 1, gens)


def prolongation_dim(b: FormTableau) -> int:
    """dim B^(1) computed on the effective frame (same value, cheaper)."""
    eff, _ = b.effective()
    return len(_prolongation_kernel(eff))


# ---------------------------------------------------------------------------------
# generic flags and Cartan's test


def _random_flag(rng: random.Random, n: int, k: int) -> Flag:
    while True:
        P = [[Fraction(rng.randint(-5, 5)) for _ in range(n)] for _ in range(n)]
        if rank(P) == n:
            return Flag(tuple(tuple(P[j][a] for j in range(n)) for a in range(n)), f"random #{k}")


def _upper_cumulative(b: FormTableau) -> tuple:
    return tuple(min(b.dim, b.w_dim * comb(p, b.degree)) for p in range(1, b.v_dim + 1))


def _search_flags(b: FormTableau, seed: int, retries: int, target_bound: int | None = None):
    """Lex-max cumulative sequence over the candidate flags of the effective tableau."""
    n, q, m = b.v_dim, b.degree, b.w_dim
    if n == 0:
        return (), Flag((), "coordinate"), 0, 0
    best = None
    tried = 0
    ceiling = _upper_cumulative(b)

    def done(c):
        if c == ceiling:
            return True
        if target_bound is not None:
            return characters_from_cumulative(c).bound() == target_bound
        return False

    def consider(flag):
        nonlocal best, tried
        tried += 1
        c = _cumulative_for(b.basis, q, n, m, flag)
        if best is None or c > best[0]:
            best = (c, flag)
        return done(best[0])

    if consider(Flag.coordinate(n)):
        return best[0], best[1], 0, tried
    if n <= 6:
        for perm in permutations(range(n)):
            if list(perm) == list(range(n)):
                continue
            if consider(Flag.permutation(perm)):
                return best[0], best[1], 0, tried
    rng = random.Random(seed)
    used = 0
    for k in range(retries):
        used += 1
        if consider(_random_flag(rng, n, k + 1)):
            break
    return best[0], best[1], used, tried


def _embed_flag(flag: Flag, kept: list[int], n: int) -> Flag:
    """Extend a flag of the effective frame by the dropped coordinate directions."""
    if len(kept) == n:
        return flag
    vecs = []
    for v in flag.basis:
        full = [Fraction(0)] * n
        for a, j in enumerate(kept):
            full[j] = v[a]
        vecs.append(tuple(full))
    for j in range(n):
        if j not in kept:
            vecs.append(tuple(Fraction(int(i == j)) for i in range(n)))
    return Flag(tuple(vecs), flag.label)


def generic_characters(b: FormTableau, seed: int = 0, retries: int = 8,
                       target_bound: int | None = None) -> tuple[Flag, CharacterSeq]:
    """Characters for the lexicographically largest cumulative sequence found.

    The search runs on the effective tableau (characteristic directions
    dropped); characters of the dropped directions are zero and are padded at
    the end.  With ``target_bound`` set to dim B^(1) the search stops as soon
    as a flag attains Cartan's bound, which certifies that it is generic.
    """
    eff, kept = b.effective()
    c, flag, _, _ = _search_flags(eff, seed, retries, target_bound)
    chars = characters_from_cumulative(c).padded(b.v_dim)
    return _embed_flag(flag, kept, b.v_dim), chars


def cartan_test(b: FormTableau, seed: int = 0, retries: int = 8) -> InvolutivityReport:
    eff, kept = b.effective()
    dim1 = len(_prolongation_kernel(eff))
    c, flag, used, tried = _search_flags(eff, seed, retries, target_bound=dim1)
    chars = characters_from_cumulative(c).padded(b.v_dim)
    bound = chars.bound()
    if dim1 > bound:
        raise AssertionError(f"Cartan's bound violated: dim B^(1) = {dim1} > {bound}")
    return InvolutivityReport(
        characters=chars,
        dim_tableau=b.dim,
        dim_prolongation=dim1,
        bound=bound,
        involutive=dim1 == bound,
        flag_used=_embed_flag(flag, kept, b.v_dim),
        retries_used=used,
        flags_tried=tried,
        effective_dim=eff.v_dim,
        characteristic_directions=[j for j in range(b.v_dim) if j not in kept],
    )


def binomial_dim_check(b: FormTableau, k_max: int, seed: int = 0, retries: int = 8):
    """Compare dim B^(k-1) with Σ_j C(j+k-2, k-1) s_j for k = 1..k_max.

    Holds for involutive tableaux of any degree, since B^(1) is then an
    involutive linear tableau with the shifted characters.
    """
    rep = cartan_test(b, seed, retries)
    if not rep.involutive:
        raise AnalysisError("formula valid only for involutive tableaux")
    s = rep.characters.s
    out = []
    current = b
    for k in range(1, k_max + 1):
        if k > 1:
            current = prolong(current)
        formula = sum(comb(j + k - 2, k - 1) * sj for j, sj in enumerate(s, start=1))
        out.append((k, current.dim, formula))
    return out


def shift_characters(s: Sequence[int]) -> tuple:
    """Characters of the prolongation of an involutive tableau: s_i + ... + s_n."""
    s = list(s)
    return tuple(sum(s[i:]) for i in range(len(s)))


def prolonged_characters(s: Sequence[int], k: int) -> tuple:
    """s^(k)_j = s_j + C(k,1) s_{j+1} + C(k+1,2) s_{j+2} + ... (k-th prolongation)."""
    s = list(s)
    n = len(s)
    if k == 0:
        return tuple(s)
    return tuple(sum(comb(k - 1 + t, t) * s[j + t] for t in range(n - j)) for j in range(n))


def tableau_of_graded_subspace(generators: Iterable[tuple[int, Mapping]], w_dim: int, v_dim: int) -> FormTableau:
    """Tableau of linear maps f: V → W whose graphs annihilate the given elements.

    Each generator is ``(d, {(w, I): value})`` describing ``Σ w* ⊗ φ_w`` with
    ``φ_w`` in ``Λ^d V*``.  On the graph of f the element pulls back to
    ``Σ_w f^*(w*) ∧ φ_w``, which is linear in the entries of f.
    """
    n = v_dim
    rows = []
    for d, elem in generators:
        eq: dict = {}
        for (w, I), v in elem.items():
            v = to_rat(v)
            I = tuple(I)
            if len(I) != d:
                raise ValueError("generator component has the wrong degree")
            for j in range(n):
                sign, K = merge_sign((j,), I)
                if sign:
                    r = eq.setdefault(K, {})
                    col = w * n + j
                    r[col] = r.get(col, 0) + sign * v
        rows.extend(eq.values())
    ech = Echelon(w_dim * n).extend(rows)
    gens = []
    for x in ech.kernel_basis(w_dim * n):
        gens.append({(col // n, (col % n,)): v for col, v in enumerate(x) if v})
    return FormTableau(w_dim, v_dim, 1, gens)
