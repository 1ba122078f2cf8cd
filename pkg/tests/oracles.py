"""Independent reference implementations used to cross-check the package.

Nothing here imports edskit.  Everything is dense, naive and exact.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations, product
from math import comb


# -- dense Gaussian elimination -------------------------------------------------------

def dense_rref(rows):
    """Reduced row echelon form of a list of Fraction rows; returns (R, pivots)."""
    A = [[Fraction(x) for x in r] for r in rows]
    if not A:
        return [], []
    ncols = len(A[0])
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        A[r] = [x / piv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def dense_rank(rows) -> int:
    return len(dense_rref(rows)[1])


def dense_kernel(rows, ncols):
    """Basis of {x : A x = 0}."""
    R, piv = dense_rref(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def brute_minor_rank(M) -> int:
    """Rank as the largest nonvanishing minor (small matrices only)."""
    m, n = len(M), len(M[0])
    for r in range(min(m, n), 0, -1):
        for I in combinations(range(m), r):
            for J in combinations(range(n), r):
                if perm_det([[M[i][j] for j in J] for i in I]) != 0:
                    return r
    return 0


def perm_det(M):
    n = len(M)
    total = Fraction(0)
    for p in permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if p[i] > p[j]:
                    sign = -sign
        term = Fraction(sign)
        for i in range(n):
            term *= M[i][p[i]]
        total += term
    return total


# -- alternating tensors ---------------------------------------------------------------

def form_to_tensor(coeffs, degree, n):
    """Sparse sorted-tuple coefficients -> full alternating tensor dict."""
    T = {}
    for key, c in coeffs.items():
        for p in permutations(range(degree)):
            sign = 1
            for i in range(degree):
                for j in range(i + 1, degree):
                    if p[i] > p[j]:
                        sign = -sign
            T[tuple(key[i] for i in p)] = sign * Fraction(c)
    return T


def tensor_wedge(a, da, b, db):
    """(a∧b)(v_1..v_{p+q}) via the shuffle formula on full tensors, as sorted coefficients."""
    out = {}
    deg = da + db
    n_idx = set()
    for k in a:
        n_idx.update(k)
    for k in b:
        n_idx.update(k)
    for key in combinations(sorted(n_idx), deg):
        total = Fraction(0)
        for S in combinations(range(deg), da):
            rest = tuple(i for i in range(deg) if i not in S)
            perm = S + rest
            sign = 1
            for i in range(deg):
                for j in range(i + 1, deg):
                    if perm[i] > perm[j]:
                        sign = -sign
            total += sign * a.get(tuple(key[i] for i in S), 0) * b.get(tuple(key[i] for i in rest), 0)
        if total:
            out[key] = total
    return out


# -- tableaux ---------------------------------------------------------------------------

def dense_prolongation_dim(basis, m, n):
    """dim B^(1) for a q = 1 tableau B ⊂ W ⊗ V* given by m×n matrices.

    Directly from the definition: T ∈ W ⊗ S²V* with T(·, e_j) ∈ B for each j.
    Unknowns are T^w_{jk}, j ≤ k, and the membership is imposed with the
    annihilator of B.
    """
    flat = [[Fraction(M[w][j]) for w in range(m) for j in range(n)] for M in basis]
    ann = dense_kernel(flat, m * n) if flat else [
        [Fraction(int(i == c)) for i in range(m * n)] for c in range(m * n)]
    sym = list(combinations_with_replacement(range(n), 2))
    col = {}
    for t, (j, k) in enumerate(sym):
        col[(j, k)] = t
        col[(k, j)] = t
    ncols = m * len(sym)
    rows = []
    for j in range(n):
        # the matrix M[w][k] = T^w_{kj} must lie in B
        for a in ann:
            row = [Fraction(0)] * ncols
            for w in range(m):
                for k in range(n):
                    c = a[w * n + k]
                    if c:
                        row[w * len(sym) + col[(k, j)]] += c
            if any(row):
                rows.append(row)
    return ncols - dense_rank(rows) if rows else ncols


def symmetric_power_dim(n, k):
    return comb(n + k - 1, k)


# -- Lie algebras -----------------------------------------------------------------------

def bracket_from_constants(c, x, y):
    """[x, y]^i = Σ c[i][j][k] x^j y^k for structure constants with c[i][j][k] = -c[i][k][j]."""
    n = len(x)
    return [sum(c[i][j][k] * x[j] * y[k] for j in range(n) for k in range(n)) for i in range(n)]


def jacobi_defect(c):
    """max over basis triples of |[[e_a,e_b],e_c] + cyclic| (zero iff Lie)."""
    n = len(c)
    e = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    worst = Fraction(0)
    for a, b, d in product(range(n), repeat=3):
        t1 = bracket_from_constants(c, bracket_from_constants(c, e[a], e[b]), e[d])
        t2 = bracket_from_constants(c, bracket_from_constants(c, e[b], e[d]), e[a])
        t3 = bracket_from_constants(c, bracket_from_constants(c, e[d], e[a]), e[b])
        for i in range(n):
            worst = max(worst, abs(t1[i] + t2[i] + t3[i]))
    return worst


def matrix_bracket(A, B):
    m = len(A)
    return [[sum(A[i][k] * B[k][j] - B[i][k] * A[k][j] for k in range(m)) for j in range(m)] for i in range(m)]


def curvature_kernel_dims_bruteforce(basis, m):
    """(dim K0, dim K1) by full-tensor linear algebra (no sorted-index shortcuts).

    K0: R^a_{jk} = -R^a_{kj} with Σ_a X_a^i_l R^a_{jk} cyclic in (l, j, k) = 0.
    K1: S^a_{jk,l} with S(·,·,l) ∈ K0 for each l and cyclic sum in (j, k, l) = 0.
    """
    r = len(basis)
    # K0 over all (a, j, k) entries with antisymmetry imposed as equations
    idx = {(a, j, k): t for t, (a, j, k) in enumerate(product(range(r), range(m), range(m)))}
    N = len(idx)
    rows = []
    for a, j, k in product(range(r), range(m), range(m)):
        row = [Fraction(0)] * N
        row[idx[(a, j, k)]] += 1
        row[idx[(a, k, j)]] += 1
        if any(row):
            rows.append(row)
    for i, l, j, k in product(range(m), repeat=4):
        row = [Fraction(0)] * N
        for (p, q, s) in ((l, j, k), (j, k, l), (k, l, j)):
            for a in range(r):
                x = Fraction(basis[a][i][p])
                if x:
                    row[idx[(a, q, s)]] += x
        if any(row):
            rows.append(row)
    K0 = dense_kernel(rows, N)
    dim0 = len(K0)
    # K1: coefficients x[t, l] on K0 basis vectors t and direction l
    rows1 = []
    for a, j, k, l in product(range(r), range(m), range(m), range(m)):
        row = [Fraction(0)] * (dim0 * m)
        for (p, q, s) in ((j, k, l), (k, l, j), (l, j, k)):
            for t, v in enumerate(K0):
                c = v[idx[(a, p, q)]]
                if c:
                    row[t * m + s] += c
        if any(row):
            rows1.append(row)
    dim1 = dim0 * m - (dense_rank(rows1) if rows1 else 0)
    return dim0, dim1
