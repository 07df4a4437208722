"""Arrangements of torus cosets ``x^D = lam`` and their intersection posets.

Loci are never materialized.  A subset of forms is described by the lattice
spanned by its exponent vectors together with the values of ``lam`` along
integer relations; membership and containment reduce to lattice arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import Inconsistent, NotSimple, TooManyMembers
from .intlinalg import (
    Vector,
    hnf,
    in_rational_span,
    lattice_coefficients,
    minors_gcd,
    rank,
    rank_mod,
    relations,
)

MAX_FORMS = 12


@dataclass(frozen=True)
class TorusForm:
    D: Vector
    lam: Fraction

    def __post_init__(self):
        object.__setattr__(self, "D", tuple(int(x) for x in self.D))
        object.__setattr__(self, "lam", Fraction(self.lam))
        if not any(self.D):
            raise ValueError("a torus form needs a nonzero exponent vector")
        if self.lam == 0:
            raise ValueError("lam must be nonzero")


def _power_product(lams: Sequence[Fraction], c: Sequence[int]) -> Fraction:
    out = Fraction(1)
    for lam, e in zip(lams, c):
        if e:
            out *= lam ** e
    return out


def _trivial(value: Fraction, p: int) -> bool:
    # the only p-power roots of unity in Q are 1, and -1 when p == 2
    return value == 1 or (p == 2 and value == -1)


def consistent(forms: Sequence[TorusForm], p: int = 0) -> bool:
    """Whether the cosets have a common point, judged by relations among D."""
    forms = list(forms)
    if not forms:
        return True
    lams = [f.lam for f in forms]
    return all(
        _trivial(_power_product(lams, c), p) for c in relations([f.D for f in forms])
    )


def _valuation(g: int, p: int) -> int:
    k = 0
    while g and g % p == 0:
        g //= p
        k += 1
    return k


def vanishes_on(f: TorusForm, forms: Sequence[TorusForm], p: int = 0) -> bool:
    forms = list(forms)
    if not consistent(forms, p):
        raise Inconsistent("the subset has no common point")
    gens = [t.D for t in forms]
    lams = [t.lam for t in forms]
    if not gens or not in_rational_span(gens, f.D):
        return False
    # p^k D_f can only land in the lattice once p^k kills its class in the
    # finite group saturation / lattice, whose order divides the minor gcd
    kmax = _valuation(minors_gcd(gens, rank(gens)), p) if p else 0
    for k in range(kmax + 1):
        scale = p ** k
        c = lattice_coefficients(gens, [scale * x for x in f.D])
        if c is None:
            continue
        return _trivial(f.lam ** scale / _power_product(lams, c), p)
    return False


@dataclass
class PosetNode:
    closure: tuple[int, ...]
    codim: int
    rank: int = 0
    lattice: tuple[Vector, ...] = ()


@dataclass
class IntersectionPoset:
    """Nodes are distinct loci; ``edges`` are covering pairs ``(lower, upper)``
    with the lower node's locus contained in the upper one."""

    nodes: list[PosetNode]
    edges: list[tuple[int, int]]
    char: int = 0
    simple: bool = True
    failures: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def height(self) -> int:
        return max((n.rank for n in self.nodes), default=0)


def _subsets(k: int, max_subset_size: int | None):
    if k > MAX_FORMS:
        raise TooManyMembers(f"{k} forms exceed the limit of {MAX_FORMS}")
    top = k if max_subset_size is None else min(k, max_subset_size)
    for size in range(1, top + 1):
        yield from combinations(range(k), size)


def consistent_subsets(forms, p=0, max_subset_size=None):
    forms = list(forms)
    return [I for I in _subsets(len(forms), max_subset_size)
            if consistent([forms[i] for i in I], p)]


@dataclass
class SimpleReport:
    simple: bool
    failures: list[tuple[int, ...]]
    consistent_subsets: int


def is_simple_arrangement(forms, p: int = 0, max_subset_size=None) -> SimpleReport:
    """Every consistent subset must keep its rational rank modulo ``p``.

    Intersections of cosets are cosets, so closure under intersection holds
    automatically.
    """
    forms = list(forms)
    subs = consistent_subsets(forms, p, max_subset_size)
    failures = []
    if p:
        for I in subs:
            rows = [forms[i].D for i in I]
            if rank_mod(rows, p) != rank(rows):
                failures.append(I)
    return SimpleReport(not failures, failures, len(subs))


def intersection_poset(forms, p: int = 0, max_subset_size=None) -> IntersectionPoset:
    forms = list(forms)
    closures = {}
    for I in consistent_subsets(forms, p, max_subset_size):
        sub = [forms[i] for i in I]
        cl = tuple(j for j, f in enumerate(forms) if vanishes_on(f, sub, p))
        closures.setdefault(cl, I)

    keys = list(closures)
    below = {a: [b for b in keys if b != a and set(a) < set(b)] for a in keys}
    # rank 0 = deepest loci (largest closures); rank grows towards the hypersurfaces
    rank_of: dict[tuple, int] = {}

    def depth(a):
        if a not in rank_of:
            rank_of[a] = 1 + max((depth(b) for b in below[a]), default=-1)
        return rank_of[a]

    for a in keys:
        depth(a)
    keys.sort(key=lambda a: (rank_of[a], a))
    nodes = [
        PosetNode(a, rank([forms[j].D for j in a]), rank_of[a],
                  hnf([forms[j].D for j in a]))
        for a in keys
    ]
    idx = {a: i for i, a in enumerate(keys)}
    edges = []
    for a in keys:
        for b in below[a]:
            if not any(set(c) > set(a) and set(c) < set(b) for c in keys):
                edges.append((idx[b], idx[a]))
    edges.sort()
    report = is_simple_arrangement(forms, p, max_subset_size)
    return IntersectionPoset(nodes, edges, p, report.simple, report.failures)


def hu_schedule(poset: IntersectionPoset) -> list[list[int]]:
    """Blowup centers by stage: stage ``r`` holds every rank-``r`` node."""
    if not poset.simple:
        raise NotSimple(f"arrangement is not simple in characteristic {poset.char}")
    if not poset.nodes:
        return []
    stages = [[] for _ in range(poset.height + 1)]
    for i, node in enumerate(poset.nodes):
        stages[node.rank].append(i)
    return stages


def poset_to_json(poset: IntersectionPoset, schedule=None) -> dict:
    return {
        "nodes": [
            {"subset": list(n.closure), "codim": n.codim, "rank": n.rank}
            for n in poset.nodes
        ],
        "edges": [list(e) for e in poset.edges],
        "schedule": [list(s) for s in schedule] if schedule is not None else [],
    }
