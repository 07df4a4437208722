"""Exact integer linear algebra on small matrices.

Everything here works on plain Python ints (arbitrary precision); vectors are
tuples and matrices are sequences of row tuples.  Sizes in this package are
tiny (a handful of rows and columns), so clarity beats asymptotics.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Sequence

from .errors import ZeroVector

Vector = tuple[int, ...]
Matrix = Sequence[Sequence[int]]


def vgcd(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive(v: Sequence[int]) -> Vector:
    """Divide ``v`` by the gcd of its entries, keeping the direction."""
    g = vgcd(v)
    if g == 0:
        raise ZeroVector(f"zero vector {tuple(v)} has no primitive generator")
    return tuple(x // g for x in v)


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def transpose(rows: Matrix) -> list[tuple[int, ...]]:
    return [tuple(col) for col in zip(*rows)]


def hnf_with_transform(rows: Matrix, ncols: int | None = None):
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``H == U @ rows``, ``U`` unimodular, ``H`` in row
    echelon form with positive pivots and the entries above each pivot
    reduced into ``[0, pivot)``.  Zero rows are kept at the bottom of ``H`` so
    that the matching rows of ``U`` span the left kernel of ``rows``.
    """
    H = [list(r) for r in rows]
    k = len(H)
    if ncols is None:
        ncols = len(H[0]) if H else 0
    U = [[int(i == j) for j in range(k)] for i in range(k)]

    def sub(dst, src, q):
        if q:
            hd, hs = H[dst], H[src]
            for c in range(ncols):
                hd[c] -= q * hs[c]
            ud, us = U[dst], U[src]
            for c in range(k):
                ud[c] -= q * us[c]

    r = 0
    for c in range(ncols):
        if r == k:
            break
        while True:
            live = [i for i in range(r, k) if H[i][c] != 0]
            if not live:
                break
            p = min(live, key=lambda i: abs(H[i][c]))
            if p != r:
                H[p], H[r] = H[r], H[p]
                U[p], U[r] = U[r], U[p]
            done = True
            for i in range(r + 1, k):
                if H[i][c]:
                    sub(i, r, H[i][c] // H[r][c])
                    if H[i][c]:
                        done = False
            if done:
                break
        if r < k and H[r][c] != 0:
            if H[r][c] < 0:
                H[r] = [-x for x in H[r]]
                U[r] = [-x for x in U[r]]
            piv = H[r][c]
            for i in range(r):
                sub(i, r, H[i][c] // piv)
            r += 1
    return [tuple(h) for h in H], [tuple(u) for u in U]


def hnf(rows: Matrix, ncols: int | None = None) -> tuple[Vector, ...]:
    """Canonical basis (nonzero HNF rows) of the lattice spanned by ``rows``."""
    if not rows:
        return ()
    H, _ = hnf_with_transform(rows, ncols)
    return tuple(h for h in H if any(h))


def rank(rows: Matrix) -> int:
    return len(hnf(rows)) if rows else 0


def rank_mod(rows: Matrix, p: int) -> int:
    """Rank over the prime field F_p (``p == 0`` means over Q)."""
    if p == 0:
        return rank(rows)
    M = [[x % p for x in r] for r in rows]
    if not M:
        return 0
    ncols = len(M[0])
    rk = 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[rk], M[piv] = M[piv], M[rk]
        inv = pow(M[rk][c], -1, p)
        M[rk] = [(x * inv) % p for x in M[rk]]
        for i in range(len(M)):
            if i != rk and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[rk])]
        rk += 1
    return rk


def det(square: Matrix) -> int:
    """Bareiss fraction-free determinant."""
    n = len(square)
    if n == 0:
        return 1
    A = [list(r) for r in square]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def minors_gcd(matrix: Matrix, k: int) -> int:
    """gcd of all ``k x k`` minors of ``matrix`` (0 if there are none)."""
    nr = len(matrix)
    nc = len(matrix[0]) if nr else 0
    g = 0
    for rs in combinations(range(nr), k):
        for cs in combinations(range(nc), k):
            g = gcd(g, det([[matrix[i][j] for j in cs] for i in rs]))
            if g == 1:
                return 1
    return g


def integer_kernel(matrix: Matrix, ncols: int | None = None) -> tuple[Vector, ...]:
    """Saturated lattice basis of ``{x in Z^n : matrix @ x == 0}`` in HNF."""
    if ncols is None:
        ncols = len(matrix[0])
    if not matrix:
        return tuple(tuple(int(i == j) for j in range(ncols)) for i in range(ncols))
    cols = transpose(matrix)
    H, U = hnf_with_transform(cols, len(matrix))
    basis = [U[i] for i in range(len(H)) if not any(H[i])]
    return hnf(basis, ncols) if basis else ()


def relations(vectors: Sequence[Sequence[int]]) -> tuple[Vector, ...]:
    """Basis of integer relations ``c`` with ``sum c_j * vectors[j] == 0``."""
    if not vectors:
        return ()
    return integer_kernel(transpose(vectors), len(vectors))


def lattice_coefficients(generators: Sequence[Sequence[int]], target: Sequence[int]):
    """Integer ``c`` with ``sum c_j generators[j] == target``, or ``None``."""
    target = tuple(target)
    if not any(target):
        return tuple(0 for _ in generators)
    if not generators:
        return None
    n = len(target)
    H, U = hnf_with_transform(generators, n)
    residual = list(target)
    coeff = [0] * len(H)
    r = 0
    for c in range(n):
        if r < len(H) and H[r][c] != 0:
            if residual[c] % H[r][c]:
                return None
            q = residual[c] // H[r][c]
            coeff[r] = q
            for j in range(n):
                residual[j] -= q * H[r][j]
            r += 1
        elif residual[c]:
            return None
    if any(residual):
        return None
    k = len(generators)
    return tuple(sum(coeff[i] * U[i][j] for i in range(len(H))) for j in range(k))


def in_rational_span(generators: Sequence[Sequence[int]], target: Sequence[int]) -> bool:
    return rank(list(generators) + [tuple(target)]) == rank(list(generators))


def solve_rational(square: Matrix, rhs: Sequence[int]) -> tuple[Fraction, ...]:
    """Solve a nonsingular square system exactly over Q."""
    n = len(square)
    A = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(square, rhs)]
    for c in range(n):
        piv = next(i for i in range(c, n) if A[i][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        for i in range(n):
            if i != c and A[i][c] != 0:
                f = A[i][c] / A[c][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return tuple(A[i][n] / A[i][i] for i in range(n))
