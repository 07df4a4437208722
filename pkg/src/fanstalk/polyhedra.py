"""Exact rational polyhedral cones and fans inside the nonnegative orthant.

Cones carry both descriptions: primitive generating rays and primitive inner
facet normals.  Conversion between the two is the double description method
(Motzkin's incremental algorithm) on integer vectors.  Fans keep maximal
cones only, as tuples of indices into a lexicographically sorted ray list.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .errors import (
    AmbiguousVertex,
    NotFullDimensional,
    NotMaximal,
    NotPointed,
    OutsideOrthant,
    RayOutsideSupport,
    ZeroVector,
)
from .intlinalg import Vector, dot, primitive, rank, solve_rational
from .parser import Binomial, BinomialSystem


def unit_vector(m: int, i: int) -> Vector:
    return tuple(int(j == i) for j in range(m))


def colex_key(v):
    """Sort key comparing the last coordinate first."""
    return tuple(reversed(v))


# --- double description ------------------------------------------------------

def _initial_basis(ineqs, dim):
    chosen = []
    for k, h in enumerate(ineqs):
        if rank([ineqs[j] for j in chosen] + [h]) > len(chosen):
            chosen.append(k)
            if len(chosen) == dim:
                break
    return chosen


def extreme_rays(ineqs, dim: int) -> list[Vector]:
    """Extreme rays of the pointed cone ``{x : <h, x> >= 0 for h in ineqs}``.

    Raises ``NotPointed`` when the inequalities do not span ``R^dim``.
    """
    ineqs = [tuple(h) for h in ineqs if any(h)]
    basis = _initial_basis(ineqs, dim)
    if len(basis) < dim:
        raise NotPointed(f"inequalities span only rank {len(basis)} < {dim}")

    # simplicial start: ray j is tight on every basis row except row j
    B = [ineqs[k] for k in basis]
    rays: list[Vector] = []
    tight: list[frozenset[int]] = []
    for j in range(dim):
        sol = solve_rational(B, unit_vector(dim, j))
        den = 1
        for x in sol:
            den = den * x.denominator // _gcd(den, x.denominator)
        rays.append(primitive([int(x * den) for x in sol]))
        tight.append(frozenset(basis[i] for i in range(dim) if i != j))

    in_basis = set(basis)
    seen = list(basis)
    for k, h in enumerate(ineqs):
        if k in in_basis:
            continue
        vals = [dot(h, r) for r in rays]
        neg = [i for i, v in enumerate(vals) if v < 0]
        if not neg:
            tight = [t | {k} if v == 0 else t for t, v in zip(tight, vals)]
            seen.append(k)
            continue
        pos = [i for i, v in enumerate(vals) if v > 0]
        new_rays, new_tight = [], []
        for i, v in enumerate(vals):
            if v > 0:
                new_rays.append(rays[i])
                new_tight.append(tight[i])
            elif v == 0:
                new_rays.append(rays[i])
                new_tight.append(tight[i] | {k})
        for p in pos:
            for q in neg:
                common = tight[p] & tight[q]
                if len(common) < dim - 2:
                    continue
                if rank([ineqs[c] for c in common]) != dim - 2 if dim > 2 else False:
                    continue
                if dim > 2 and any(
                    common <= tight[t] for t in range(len(rays)) if t not in (p, q)
                ):
                    continue
                comb = [vals[p] * b - vals[q] * a for a, b in zip(rays[p], rays[q])]
                new_rays.append(primitive(comb))
                new_tight.append(common | {k})
        rays, tight = new_rays, new_tight
        seen.append(k)
        if not rays:
            break

    out = []
    for r in rays:
        if r not in out:
            out.append(r)
    return out


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return abs(a)


@dataclass(frozen=True)
class Cone:
    """Full-dimensional pointed cone with rays and inner facet normals."""

    dim: int
    rays: tuple[Vector, ...]
    facets: tuple[Vector, ...]

    def contains(self, point) -> bool:
        return all(dot(f, point) >= 0 for f in self.facets)

    def contains_interior(self, point) -> bool:
        return all(dot(f, point) > 0 for f in self.facets)

    def interior_point(self) -> Vector:
        return tuple(sum(col) for col in zip(*self.rays))

    def rays_on(self, facet) -> tuple[Vector, ...]:
        return tuple(r for r in self.rays if dot(facet, r) == 0)

    @property
    def is_simplicial(self) -> bool:
        return len(self.rays) == self.dim


def _check_orthant(rays):
    for r in rays:
        if not any(r):
            raise ZeroVector("zero ray")
        if min(r) < 0:
            raise OutsideOrthant(f"ray {r} leaves the nonnegative orthant")


def cone_from_rays(rays, dim: int | None = None) -> Cone:
    rays = [primitive(r) for r in rays]
    if not rays:
        raise NotFullDimensional("no rays given")
    dim = dim or len(rays[0])
    _check_orthant(rays)
    if rank(rays) < dim:
        raise NotFullDimensional(f"rays span rank {rank(rays)} < {dim}")
    facets = extreme_rays(rays, dim)
    keep = set()
    for r in rays:
        on = [f for f in facets if dot(f, r) == 0]
        if rank(on) == dim - 1:
            keep.add(r)
    return Cone(dim, tuple(sorted(keep)), tuple(sorted(facets)))


def cone_from_facets(facets, dim: int | None = None) -> Cone:
    facets = [primitive(f) for f in facets]
    if not facets:
        raise NotPointed("no facets given")
    dim = dim or len(facets[0])
    rays = extreme_rays(facets, dim)
    if not rays or rank(rays) < dim:
        raise NotFullDimensional("facet inequalities cut out a lower-dimensional cone")
    _check_orthant(rays)
    keep = set()
    for f in facets:
        on = [r for r in rays if dot(f, r) == 0]
        if rank(on) == dim - 1:
            keep.add(f)
    return Cone(dim, tuple(sorted(rays)), tuple(sorted(keep)))


# --- fans ----------------------------------------------------------------------

@dataclass(frozen=True)
class Fan:
    """Maximal cones as sorted index tuples into the sorted ray list."""

    dim: int
    rays: tuple[Vector, ...]
    maximal_cones: tuple[tuple[int, ...], ...]
    _cones: tuple[Cone, ...] | None = field(default=None, compare=False, repr=False)

    @classmethod
    def from_cones(cls, dim: int, cones) -> "Fan":
        cones = list(cones)
        rays = sorted({r for c in cones for r in c.rays})
        index = {r: i for i, r in enumerate(rays)}
        keyed = sorted(
            ((tuple(sorted(index[r] for r in c.rays)), c) for c in cones),
            key=lambda kc: kc[0],
        )
        return cls(
            dim,
            tuple(rays),
            tuple(k for k, _ in keyed),
            tuple(c for _, c in keyed),
        )

    def cones(self) -> tuple[Cone, ...]:
        if self._cones is None:
            built = tuple(
                cone_from_rays([self.rays[i] for i in idx], self.dim)
                for idx in self.maximal_cones
            )
            object.__setattr__(self, "_cones", built)
        return self._cones

    def cone_rays(self, k: int) -> tuple[Vector, ...]:
        return tuple(self.rays[i] for i in self.maximal_cones[k])

    def __len__(self):
        return len(self.maximal_cones)

    @property
    def is_simplicial(self) -> bool:
        return all(len(c) == self.dim for c in self.maximal_cones)

    def locate(self, point) -> list[int]:
        """Indices of maximal cones containing ``point``."""
        return [k for k, c in enumerate(self.cones()) if c.contains(point)]


def orthant_fan(m: int) -> Fan:
    eye = [unit_vector(m, i) for i in range(m)]
    return Fan.from_cones(m, [Cone(m, tuple(sorted(eye)), tuple(sorted(eye)))])


# --- Newton polyhedra and tropical subdivision --------------------------------

@dataclass(frozen=True)
class TropicalForm:
    dim: int
    coeffs: Vector

    @classmethod
    def of(cls, b: Binomial) -> "TropicalForm":
        return cls(b.dim, b.tropical())


@dataclass(frozen=True)
class NewtonPolyhedron:
    """Vertices of ``conv(points) + R^m_{>=0}``."""

    dim: int
    vertices: tuple[Vector, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(set(map(tuple, self.vertices)))))


def split_cone(cone: Cone, D) -> list[Cone]:
    """Full-dimensional pieces of ``cone`` on either side of ``<D, .> = 0``."""
    vals = [dot(D, r) for r in cone.rays]
    if min(vals) >= 0 or max(vals) <= 0:
        return [cone]
    neg = tuple(-x for x in D)
    pieces = []
    for h in (tuple(D), neg):
        try:
            pieces.append(cone_from_facets(list(cone.facets) + [h], cone.dim))
        except NotFullDimensional:
            pass
    return pieces


def subdivide_by_tropical(fan: Fan, t: TropicalForm | tuple) -> Fan:
    D = t.coeffs if isinstance(t, TropicalForm) else tuple(t)
    if not any(D):
        return fan
    pieces = [p for c in fan.cones() for p in split_cone(c, D)]
    return Fan.from_cones(fan.dim, pieces)


def tropical_fan(system: BinomialSystem) -> Fan:
    """Dual fan of NP(f_1 ... f_a), by splitting the orthant along every
    member's tropical hyperplane in turn."""
    fan = orthant_fan(system.dim)
    for b in system.members:
        fan = subdivide_by_tropical(fan, TropicalForm.of(b))
    return fan


def minimizer(points, w):
    vals = [dot(w, p) for p in points]
    best = min(vals)
    hits = [p for p, v in zip(points, vals) if v == best]
    return hits


def newton_polyhedron(system: BinomialSystem) -> NewtonPolyhedron:
    """Vertices of the Minkowski sum of the members' Newton polyhedra.

    Each maximal cone of the tropical fan selects one exponent point per
    member; their sum is the vertex minimized by the cone's interior.
    """
    fan = tropical_fan(system)
    verts = []
    for cone in fan.cones():
        w = cone.interior_point()
        v = [0] * system.dim
        for b in system.members:
            hits = minimizer(b.exponent_points(), w)
            if len(set(hits)) != 1:
                raise AmbiguousVertex(f"member {b} is not constant on a maximal cone")
            v = [a + c for a, c in zip(v, hits[0])]
        verts.append(tuple(v))
    return NewtonPolyhedron(system.dim, tuple(verts))


def normal_cone(np_: NewtonPolyhedron, vertex) -> Cone:
    m = np_.dim
    facets = [unit_vector(m, i) for i in range(m)]
    facets += [tuple(u - v for u, v in zip(other, vertex)) for other in np_.vertices
               if tuple(other) != tuple(vertex)]
    facets = [f for f in facets if any(f)]
    return cone_from_facets(facets, m)


def vertex_cones(np_: NewtonPolyhedron) -> list[tuple[Vector, Cone]]:
    """``(vertex, normal cone)`` pairs; non-extremal input points are skipped."""
    out = []
    for v in np_.vertices:
        try:
            out.append((v, normal_cone(np_, v)))
        except NotFullDimensional:
            continue
    return out


def dual_fan(np_: NewtonPolyhedron) -> Fan:
    """Normal fan of ``np_``; maximal cones correspond to vertices."""
    return Fan.from_cones(np_.dim, [c for _, c in vertex_cones(np_)])


def vertex_for_cone(np_: NewtonPolyhedron, cone: Cone) -> Vector:
    if len(cone.rays) < cone.dim or rank(cone.rays) < cone.dim:
        raise NotMaximal("cone is not full-dimensional")
    hits = minimizer(np_.vertices, cone.interior_point())
    if len(hits) != 1:
        raise AmbiguousVertex(f"interior point minimizes {len(hits)} vertices")
    v = hits[0]
    if normal_cone(np_, v) != cone:
        raise NotMaximal("cone is not a maximal cone of the dual fan")
    return v


# --- further refinements -------------------------------------------------------

def common_refinement(first: Fan, second: Fan) -> Fan:
    if first.dim != second.dim:
        raise ValueError("fans live in different dimensions")
    pieces = []
    for a, b in product(first.cones(), second.cones()):
        # quick reject: disjoint interiors
        try:
            pieces.append(cone_from_facets(list(a.facets) + list(b.facets), first.dim))
        except NotFullDimensional:
            continue
    return Fan.from_cones(first.dim, pieces)


def star_subdivide(fan: Fan, ray) -> Fan:
    """Star subdivision at ``ray``: every cone containing it is coned off
    over its facets that miss the ray."""
    if not any(ray) or min(ray) < 0 or len(ray) != fan.dim:
        raise RayOutsideSupport(f"{tuple(ray)} is not in the nonnegative orthant")
    rho = primitive(ray)
    pieces = []
    for cone in fan.cones():
        if not cone.contains(rho):
            pieces.append(cone)
            continue
        for f in cone.facets:
            if dot(f, rho) == 0:
                continue
            pieces.append(cone_from_rays(list(cone.rays_on(f)) + [rho], fan.dim))
    return Fan.from_cones(fan.dim, pieces)


def star_subdivide_all(fan: Fan) -> Fan:
    """Star-subdivide at every ray in turn; the result is simplicial."""
    for r in fan.rays:
        fan = star_subdivide(fan, r)
    return fan


def fan_to_json(fan: Fan, vertices=None) -> dict:
    out = {
        "dim": fan.dim,
        "rays": [list(r) for r in fan.rays],
        "maximal_cones": [list(c) for c in fan.maximal_cones],
    }
    out["vertices"] = [list(v) for v in vertices] if vertices is not None else []
    return out
