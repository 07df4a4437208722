"""Stacky fans: the ray matrix M, its chart cover and its kernel lattice."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MissingUnitRay, NotPure, OneSidedBinomial, RankDeficient
from .intlinalg import Vector, hnf, integer_kernel, primitive, rank, transpose
from .parser import Binomial, VariableOrder
from .polyhedra import Cone, Fan, cone_from_rays, colex_key, unit_vector


@dataclass(frozen=True)
class StackyFan:
    """A fan on Z^m together with the matrix M of its primitive rays.

    ``columns[:m]`` is the identity block; the remaining columns are the
    other rays in colexicographic order.  ``cone_columns[k]`` lists the
    column indices spanning maximal cone ``k`` of ``fan``.
    """

    fan: Fan
    columns: tuple[Vector, ...]
    cone_columns: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return self.fan.dim

    @property
    def n(self) -> int:
        return len(self.columns)

    @property
    def M(self) -> tuple[Vector, ...]:
        """Row-major matrix (m rows, n columns)."""
        return tuple(transpose(self.columns))


@dataclass(frozen=True)
class Chart:
    """Open chart of a maximal cone; indices are 0-based columns of M."""

    cone_index: int
    cone: tuple[int, ...]
    invertible: frozenset[int]
    names: tuple[str, ...]

    @property
    def non_invertible(self) -> tuple[int, ...]:
        return self.cone

    def invertible_names(self) -> list[str]:
        return [self.names[i] for i in sorted(self.invertible)]


@dataclass(frozen=True)
class KernelLattice:
    basis: tuple[Vector, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def same_lattice(self, vectors) -> bool:
        n = len(self.basis[0]) if self.basis else len(vectors[0]) if vectors else 0
        return self.basis == hnf(list(vectors), n)


def _order_columns(m: int, rays) -> tuple[Vector, ...]:
    eye = [unit_vector(m, i) for i in range(m)]
    rest = sorted((r for r in rays if r not in eye), key=colex_key)
    return tuple(eye) + tuple(rest)


def build_stacky_fan(fan: Fan) -> StackyFan:
    m = fan.dim
    rays = set(fan.rays)
    for i in range(m):
        if unit_vector(m, i) not in rays:
            raise MissingUnitRay(f"e_{i + 1} is not a ray of the fan")
    columns = _order_columns(m, fan.rays)
    if rank(list(columns)) < m:
        raise RankDeficient("ray matrix has rank below the ambient dimension")
    pos = {c: j for j, c in enumerate(columns)}
    cone_columns = tuple(
        tuple(sorted(pos[fan.rays[i]] for i in idx)) for idx in fan.maximal_cones
    )
    return StackyFan(fan, columns, cone_columns)


def coordinate_names(sf: StackyFan, order: VariableOrder | None = None) -> tuple[str, ...]:
    base = order.names if order is not None else tuple(f"x{i + 1}" for i in range(sf.m))
    extra = tuple(f"z{k + 1}" for k in range(sf.n - sf.m))
    return tuple(f"{b}'" for b in base) + extra


def charts(sf: StackyFan, order: VariableOrder | None = None) -> list[Chart]:
    names = coordinate_names(sf, order)
    everything = frozenset(range(sf.n))
    return [
        Chart(k, cols, everything - frozenset(cols), names)
        for k, cols in enumerate(sf.cone_columns)
    ]


def kernel_lattice(sf: StackyFan) -> KernelLattice:
    return KernelLattice(integer_kernel(sf.M, sf.n))


def lift_fan(sf: StackyFan) -> Fan:
    """Fan on Z^n whose maximal cones are the coordinate cones of the charts."""
    cones = []
    for cols in sf.cone_columns:
        rays = tuple(unit_vector(sf.n, j) for j in cols)
        cones.append(Cone(sf.n, tuple(sorted(rays)), ()))
    rays = sorted({r for c in cones for r in c.rays})
    index = {r: i for i, r in enumerate(rays)}
    max_cones = sorted(tuple(sorted(index[r] for r in c.rays)) for c in cones)
    return Fan(sf.n, tuple(rays), tuple(max_cones))


def closed_form_columns(b: Binomial) -> list[Vector]:
    """Extra columns ``B_j e_i + A_i e_j`` (primitivized) of a pure binomial."""
    if not b.is_pure:
        raise NotPure("closed form needs a pure binomial")
    A, B = b.A, b.B
    if not any(A) or not any(B):
        raise OneSidedBinomial("one side is constant; the binomial is already smooth")
    m = b.dim
    cols = []
    for i in range(m):
        if not A[i]:
            continue
        for j in range(m):
            if not B[j]:
                continue
            v = [0] * m
            v[i] = B[j]
            v[j] = A[i]
            cols.append(primitive(v))
    return cols


def closed_form_matrix(b: Binomial) -> StackyFan:
    """Stacky fan of a single pure binomial straight from its exponents.

    The two maximal cones are the normal cones of the vertices A and B of
    the Newton polyhedron; the monomial factor is ignored.
    """
    cols = closed_form_columns(b)
    m = b.dim
    A, B = b.A, b.B
    at_a = [unit_vector(m, k) for k in range(m) if not A[k]] + cols
    at_b = [unit_vector(m, k) for k in range(m) if not B[k]] + cols
    cones = [cone_from_rays(at_a, m), cone_from_rays(at_b, m)]
    return build_stacky_fan(Fan.from_cones(m, cones))


def stacky_fan_to_json(sf: StackyFan, kernel: KernelLattice | None = None,
                       order: VariableOrder | None = None) -> dict:
    kernel = kernel or kernel_lattice(sf)
    return {
        "m": sf.m,
        "n": sf.n,
        "M": [list(r) for r in sf.M],
        "rays_order": list(coordinate_names(sf, order)),
        "charts": [
            {"cone": list(c.cone), "invertible": sorted(c.invertible)}
            for c in charts(sf, order)
        ],
        "kernel": [list(v) for v in kernel.basis],
    }
