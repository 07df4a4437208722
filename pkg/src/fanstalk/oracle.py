"""Brute-force verifiers, independent of the fan machinery they check.

Vertex enumeration uses exact rational linear programming; smoothness and
point-set checks enumerate F_q-points with the kernels module.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator, Sequence

import numpy as np

from .errors import BadReduction, FieldTooLarge, TooManyCoordinates, TooManyMembers
from .intlinalg import Vector, hnf_with_transform, integer_kernel, primitive, rank
from . import kernels
from .parser import BinomialSystem
from .polyhedra import Fan, NewtonPolyhedron, minimizer, unit_vector

MAX_MEMBERS = 8
MAX_Q = 13
MAX_POINTS = 10 ** 7
SMALL_POINTS = 10 ** 5


# --- exact LP ----------------------------------------------------------------

def feasible(A: Sequence[Sequence], b: Sequence) -> bool:
    """Whether ``A x = b, x >= 0`` has a rational solution (phase-one simplex
    with Bland's rule, exact arithmetic)."""
    rows = len(A)
    ncols = len(A[0]) if rows else 0
    T = []
    for i in range(rows):
        row = [Fraction(v) for v in A[i]]
        rhs = Fraction(b[i])
        if rhs < 0:
            row, rhs = [-v for v in row], -rhs
        art = [Fraction(int(i == j)) for j in range(rows)]
        T.append(row + art + [rhs])
    width = ncols + rows
    basis = [ncols + i for i in range(rows)]
    # objective: minimize the sum of artificials, as reduced costs
    obj = [-sum(T[i][j] for i in range(rows)) for j in range(width + 1)]
    for j in range(ncols, width):
        obj[j] = Fraction(0)
    while True:
        enter = next((j for j in range(width) if obj[j] < 0), None)
        if enter is None:
            break
        best = None
        for i in range(rows):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # unbounded cannot happen in phase one
            break
        r = best[1]
        piv = T[r][enter]
        T[r] = [v / piv for v in T[r]]
        for i in range(rows):
            if i != r and T[i][enter]:
                f = T[i][enter]
                T[i] = [a - f * c for a, c in zip(T[i], T[r])]
        if obj[enter]:
            f = obj[enter]
            obj = [a - f * c for a, c in zip(obj, T[r])]
        basis[r] = enter
    return obj[-1] == 0


def dominated(point: Sequence[int], others: Sequence[Sequence[int]]) -> bool:
    """Whether ``point`` lies in ``conv(others) + R^m_{>=0}``."""
    if not others:
        return False
    m = len(point)
    k = len(others)
    # sum_i t_i others_i + s = point, sum_i t_i = 1, t, s >= 0
    A = [[others[i][r] for i in range(k)] + [int(j == r) for j in range(m)] for r in range(m)]
    A.append([1] * k + [0] * m)
    return feasible(A, list(point) + [1])


def minkowski_vertices_bruteforce(system: BinomialSystem) -> set[Vector]:
    members = system.members
    if len(members) > MAX_MEMBERS:
        raise TooManyMembers(f"{len(members)} members exceed the limit of {MAX_MEMBERS}")
    sums = {
        tuple(map(sum, zip(*choice)))
        for choice in product(*(b.exponent_points() for b in members))
    }
    sums = sorted(sums)
    return {p for p in sums if not dominated(p, [q for q in sums if q != p])}


# --- facets ------------------------------------------------------------------

def certify_facet(np_: NewtonPolyhedron, v: Sequence[int]) -> bool:
    """Whether the face of ``np_`` minimized by ``v`` is a facet."""
    v = tuple(v)
    if not any(v) or min(v) < 0:
        return False
    m = np_.dim
    hits = minimizer(np_.vertices, v)
    base = hits[0]
    gens = [tuple(a - b for a, b in zip(h, base)) for h in hits[1:]]
    gens += [unit_vector(m, k) for k in range(m) if v[k] == 0]
    gens = [g for g in gens if any(g)]
    return rank(gens) == m - 1 if gens else m == 1


def facet_normals_bruteforce(np_: NewtonPolyhedron) -> set[Vector]:
    """All primitive inner facet normals, by trying every hyperplane spanned by
    vertex differences and coordinate directions."""
    m = np_.dim
    gens = {unit_vector(m, k) for k in range(m)}
    for a, b in combinations(np_.vertices, 2):
        gens.add(primitive([x - y for x, y in zip(a, b)]))
    gens = sorted(gens)
    found = set()
    for sub in combinations(gens, m - 1):
        if rank(list(sub)) != m - 1:
            continue
        ker = integer_kernel(list(sub), m)
        if len(ker) != 1:
            continue
        for sign in (1, -1):
            cand = primitive([sign * x for x in ker[0]])
            if min(cand) >= 0 and certify_facet(np_, cand):
                found.add(cand)
    return found


def sample_fan(fan: Fan, np_: NewtonPolyhedron, samples: int = 200, seed: int = 0,
               bound: int = 50) -> list[Vector]:
    """Random positive weights whose minimizing vertex disagrees with the
    vertex of the fan cone containing them; returns the offending weights."""
    rng = random.Random(seed)
    bad = []
    cones = fan.cones()
    for _ in range(samples):
        w = tuple(rng.randint(1, bound) for _ in range(fan.dim))
        hits = minimizer(np_.vertices, w)
        containing = [c for c in cones if c.contains(w)]
        if not containing:
            bad.append(w)
            continue
        if len(hits) == 1:
            for c in containing:
                if minimizer(np_.vertices, c.interior_point()) != hits:
                    bad.append(w)
                    break
    return bad


# --- finite fields -----------------------------------------------------------

def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % d for d in range(2, int(q ** 0.5) + 1))


def reduce_mod(c: Fraction, q: int) -> int:
    c = Fraction(c)
    if c.denominator % q == 0:
        raise BadReduction(f"denominator of {c} vanishes mod {q}")
    return c.numerator * pow(c.denominator, -1, q) % q


@dataclass(frozen=True)
class Equation:
    """``x^U - lam * x^V`` on chart coordinates."""

    U: Vector
    V: Vector
    lam: Fraction


def _check_field(q: int, n: int):
    if not _is_prime(q) or q > MAX_Q:
        raise FieldTooLarge(f"q = {q} must be a prime at most {MAX_Q}")
    if q ** n > MAX_POINTS:
        raise TooManyCoordinates(f"{q}^{n} points exceed the scan budget of {MAX_POINTS}")


def _active(vectors, n):
    return [i for i in range(n) if any(v[i] for v in vectors)]


def primitive_root(q: int) -> int:
    if q == 2:
        return 1
    factors = [d for d in range(2, q) if (q - 1) % d == 0 and _is_prime(d)]
    return next(g for g in range(2, q) if all(pow(g, (q - 1) // d, q) != 1 for d in factors))


def orbit_points(E1, E2, q: int, invertible_mask, prune: bool = True) -> Iterator[np.ndarray]:
    """One point per orbit of the torus that rescales every equation.

    A torus element ``t`` with ``t^E1_j == t^E2_j`` for all ``j`` multiplies
    each equation by a unit and the Jacobian by invertible diagonal matrices,
    so vanishing and Jacobian rank are constant along its orbits.  For each
    pattern of zero coordinates, the remaining coordinates are written as
    powers ``g^t`` of a generator and ``t`` runs over a set of classes modulo
    the kernel of the exponent matrix, which meets every orbit.
    """
    E1 = [tuple(r) for r in E1]
    E2 = [tuple(r) for r in E2]
    n = len(invertible_mask)
    D = [tuple(a - b for a, b in zip(r1, r2)) for r1, r2 in zip(E1, E2)]
    free = [i for i in range(n) if not invertible_mask[i]]
    s1 = [sum(1 << i for i in range(n) if r[i]) for r in E1]
    s2 = [sum(1 << i for i in range(n) if r[i]) for r in E2]
    g = primitive_root(q)
    gpow = np.array([pow(g, e, q) for e in range(q - 1)], np.int64)
    cache: dict[tuple, np.ndarray] = {}
    for bits in range(1 << len(free)):
        Z = sum(1 << free[b] for b in range(len(free)) if bits >> b & 1)
        # an equation with exactly one term killed is a nonzero monomial
        if prune and all(bool(a & Z) != bool(b & Z) for a, b in zip(s1, s2)):
            continue
        keep = [i for i in range(n) if not Z >> i & 1]
        sub = tuple(tuple(r[i] for r in D) for i in keep)
        if sub not in cache:
            cache[sub] = _class_basis(sub, len(D))
        basis = cache[sub]
        r = basis.shape[0]
        grid = np.indices((q - 1,) * r).reshape(r, -1).T if r else np.zeros((1, 0), np.int64)
        T = (grid @ basis) % (q - 1)
        X = np.zeros((T.shape[0], n), np.int64)
        X[:, keep] = gpow[T]
        yield X


def _class_basis(columns, a: int) -> np.ndarray:
    """Rows ``u_1..u_r`` with ``sum s_i u_i`` meeting every class of
    ``Z^N`` modulo ``ker(D)``, where ``columns`` are the columns of ``D``."""
    N = len(columns)
    if N == 0 or a == 0:
        return np.zeros((0, N), np.int64)
    H, U = hnf_with_transform(columns, a)
    rows = [U[i] for i in range(len(H)) if any(H[i])]
    return np.array(rows, np.int64).reshape(len(rows), N)


def smoothness_scan(equations: Sequence[Equation], q: int, invertible=(), backend=None,
                    method: str = "orbits"):
    """Points of the chart over F_q where the vanishing equations have a
    Jacobian of rank below the rational rank of their exponent rows.

    Coordinates that no equation involves do not affect the verdict and are
    left out.  ``method="exhaustive"`` visits every point; ``"orbits"`` visits
    one point per orbit of the rescaling torus (see ``orbit_points``).
    Returns ``(coordinates, point)`` pairs on the involved coordinates.
    """
    equations = list(equations)
    if not equations:
        return []
    n = len(equations[0].U)
    active = _active([e.U for e in equations] + [e.V for e in equations], n)
    if not _is_prime(q) or q > MAX_Q:
        raise FieldTooLarge(f"q = {q} must be a prime at most {MAX_Q}")
    if len(equations) > 12:
        raise TooManyMembers("at most 12 equations can be scanned")
    lam = [reduce_mod(e.lam, q) for e in equations]
    if any(x == 0 for x in lam):
        raise BadReduction(f"a coefficient vanishes mod {q}")
    E1 = [[e.U[i] for i in active] for e in equations]
    E2 = [[e.V[i] for i in active] for e in equations]
    c1 = [1] * len(equations)
    c2 = [(-x) % q for x in lam]
    inv = [i in set(invertible) for i in active]
    D = [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(E1, E2)]
    table = [0] * (1 << len(equations))
    for bits in range(1, len(table)):
        table[bits] = rank([D[j] for j in range(len(D)) if bits >> j & 1])
    if method == "exhaustive":
        _check_field(q, len(active))
        bad = kernels.jacobian_violations(E1, E2, c1, c2, q, inv, table, backend)
        return [(tuple(active), kernels.decode_point(int(i), q, len(active))) for i in bad]
    if method != "orbits":
        raise ValueError(f"unknown scan method {method!r}")
    out = []
    visited = 0
    for X in orbit_points(E1, E2, q, inv):
        visited += X.shape[0]
        if visited > MAX_POINTS:
            raise TooManyCoordinates(f"orbit scan exceeds {MAX_POINTS} points")
        for i in kernels.violations_at(X, E1, E2, c1, c2, q, table, backend):
            out.append((tuple(active), tuple(int(v) for v in X[i])))
    return out


def point_sets_equal(first, second, q: int, n: int, invertible=(), backend=None,
                     method: str = "auto") -> bool:
    """Compare two subsets of the chart over F_q.

    Each side is a list of clauses, a clause being a list of two-term
    polynomials ``(E1, c1, E2, c2)`` that must all vanish; a point belongs to
    the side when some clause holds.  Membership only depends on which
    polynomials vanish, which the rescaling torus of ``orbit_points``
    preserves, so ``"orbits"`` checks one point per orbit.  ``"auto"``
    enumerates every point when there are few.
    """
    polys = []
    index = {}

    def ids(side):
        out = []
        for clause in side:
            cl = []
            for poly in clause:
                key = (tuple(poly[0]), poly[1] % q, tuple(poly[2]), poly[3] % q)
                if key not in index:
                    index[key] = len(polys)
                    polys.append(key)
                cl.append(index[key])
            out.append(cl)
        return out

    left, right = ids(first), ids(second)
    if not polys:
        return (len(left) > 0) == (len(right) > 0)
    if not _is_prime(q) or q > MAX_Q:
        raise FieldTooLarge(f"q = {q} must be a prime at most {MAX_Q}")
    active = _active([p[0] for p in polys] + [p[2] for p in polys], n)
    E1 = [[p[0][i] for i in active] for p in polys]
    E2 = [[p[2][i] for i in active] for p in polys]
    c1 = [p[1] for p in polys]
    c2 = [p[3] for p in polys]
    inv = [i in set(invertible) for i in active]

    def member(side, mask):
        hit = np.zeros(mask.shape[0], bool)
        for cl in side:
            hit |= mask[:, cl].all(axis=1) if cl else True
        return hit

    if method == "auto":
        method = "exhaustive" if q ** len(active) <= SMALL_POINTS else "orbits"
    if method == "exhaustive":
        _check_field(q, len(active))
        _, mask = kernels.zero_masks(E1, E2, c1, c2, q, inv, backend)
        return bool((member(left, mask) == member(right, mask)).all())
    if method != "orbits":
        raise ValueError(f"unknown comparison method {method!r}")
    # a monomial term never constrains the torus
    T1 = [r if a and b else [0] * len(active) for r, a, b in zip(E1, c1, c2)]
    T2 = [r if a and b else [0] * len(active) for r, a, b in zip(E2, c1, c2)]
    prune = all(left) and all(right)
    visited = 0
    for X in orbit_points(T1, T2, q, inv, prune):
        visited += X.shape[0]
        if visited > MAX_POINTS:
            raise TooManyCoordinates(f"orbit comparison exceeds {MAX_POINTS} points")
        mask = kernels.masks_at(X, E1, E2, c1, c2, q, backend)
        if not (member(left, mask) == member(right, mask)).all():
            return False
    return True
