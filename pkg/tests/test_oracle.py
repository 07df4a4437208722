import random
from fractions import Fraction

import pytest

from fanstalk.errors import BadReduction, FieldTooLarge, TooManyCoordinates
from fanstalk.fantastack import build_stacky_fan, charts
from fanstalk.oracle import (
    Equation,
    certify_facet,
    dominated,
    facet_normals_bruteforce,
    feasible,
    minkowski_vertices_bruteforce,
    orbit_points,
    point_sets_equal,
    primitive_root,
    reduce_mod,
    sample_fan,
    smoothness_scan,
)
from fanstalk.parser import parse_system
from fanstalk.pipeline import chart_equations
from fanstalk.polyhedra import newton_polyhedron, tropical_fan
from fanstalk.transform import pullback, reduce_pure

from corpus import corpus

EX1 = "vars: x y\nx^2 - y^3\nx^2 - y^5\n"
EX2 = "vars: x y z\nx^2 - y^3\nx^4 - z^5\n"


def test_feasible():
    assert feasible([[1, 1]], [1])
    assert not feasible([[1, 1]], [-1])
    assert feasible([[1, -1], [0, 1]], [0, 2])


def test_dominated():
    assert dominated((2, 5), [(4, 0), (2, 3), (0, 8)])
    assert not dominated((2, 3), [(4, 0), (0, 8)])


def test_minkowski_examples():
    assert minkowski_vertices_bruteforce(parse_system(EX1)) == {(4, 0), (2, 3), (0, 8)}
    assert minkowski_vertices_bruteforce(parse_system(EX2)) == {
        (6, 0, 0), (0, 3, 5), (2, 0, 5), (4, 3, 0)}
    assert minkowski_vertices_bruteforce(parse_system("vars: x y\nx^2 - y^3\n")) == {(2, 0), (0, 3)}


def test_certify_facet_examples():
    np2 = newton_polyhedron(parse_system(EX2))
    assert certify_facet(np2, (15, 10, 12))
    single = newton_polyhedron(parse_system("vars: x y\nx^2 - y^3\n"))
    assert certify_facet(single, (1, 0))
    assert not certify_facet(single, (1, 1))
    assert not certify_facet(single, (0, 0))


def test_facet_table():
    np2 = newton_polyhedron(parse_system(EX2))
    w1, w2, w3, w4 = (6, 0, 0), (0, 3, 5), (2, 0, 5), (4, 3, 0)
    table = {
        (1, 0, 0): {w2}, (0, 1, 0): {w1, w3}, (0, 0, 1): {w1, w4},
        (3, 2, 0): {w2, w3}, (5, 0, 4): {w2, w4}, (15, 10, 12): {w1, w2, w3, w4},
    }
    assert facet_normals_bruteforce(np2) == set(table)
    for v, verts in table.items():
        best = min(sum(a * b for a, b in zip(v, w)) for w in np2.vertices)
        assert {w for w in np2.vertices if sum(a * b for a, b in zip(v, w)) == best} == verts


@pytest.mark.parametrize("i", range(50))
def test_minkowski_and_facets_on_corpus(i):
    s = corpus()[i]
    np_ = newton_polyhedron(s)
    assert minkowski_vertices_bruteforce(s) == set(np_.vertices)
    fan = tropical_fan(s)
    assert facet_normals_bruteforce(np_) == set(fan.rays)
    assert sample_fan(fan, np_, samples=50, seed=i) == []


def test_reduce_mod():
    assert reduce_mod(Fraction(1, 3), 5) == 2
    assert reduce_mod(Fraction(-1), 7) == 6
    with pytest.raises(BadReduction):
        reduce_mod(Fraction(1, 5), 5)


def test_primitive_root():
    for q in (2, 3, 5, 7, 11, 13):
        g = primitive_root(q)
        assert len({pow(g, e, q) for e in range(q - 1)}) == q - 1


def eq(U, V, lam=1):
    return Equation(tuple(U), tuple(V), Fraction(lam))


def test_scan_examples():
    s = parse_system("vars: x1 x2 y\nx1^2*x2^2 - y^3\n")
    sf = build_stacky_fan(tropical_fan(s))
    pulled = pullback(s, sf)
    for c in charts(sf, s.order):
        for method in ("orbits", "exhaustive"):
            assert smoothness_scan(chart_equations(pulled), 5, c.invertible, method=method) == []
    assert smoothness_scan([eq((1, 0), (0, 1))], 7) == []


@pytest.mark.parametrize("method", ["orbits", "exhaustive"])
def test_scan_finds_singularities(method):
    # the orbit method reports one point per orbit, the exhaustive one all
    raw = eq((2, 0), (0, 2))
    bad = smoothness_scan([raw], 2, method=method)
    assert sorted(pt for _, pt in bad) == [(0, 0), (1, 1)]
    s = parse_system("vars: x y\nx^2 - y^2\n")
    b, _ = reduce_pure(s.members[0], 2)
    assert smoothness_scan([eq(b.A, b.B, b.lam)], 2, method=method) == []
    assert [pt for _, pt in smoothness_scan([eq((2, 0), (0, 3))], 5, method=method)] == [(0, 0)]
    found = len(smoothness_scan([eq((5, 0), (0, 5))], 5, method=method))
    assert found == (5 if method == "exhaustive" else 2)


def test_scan_errors():
    with pytest.raises(BadReduction):
        smoothness_scan([eq((1, 0), (0, 1), 5)], 5)
    with pytest.raises(FieldTooLarge):
        smoothness_scan([eq((1, 0), (0, 1))], 4)
    with pytest.raises(TooManyCoordinates):
        smoothness_scan([eq((1,) * 11, (0,) * 11)], 5, method="exhaustive")


def random_equations(rng, n, k):
    out = []
    for _ in range(k):
        U = [rng.randint(0, 3) if rng.random() < 0.5 else 0 for _ in range(n)]
        V = [rng.randint(0, 3) if u == 0 and rng.random() < 0.5 else 0 for u in U]
        if not any(U) and not any(V):
            U[0] = 1
        out.append(eq(U, V, rng.choice([1, -1, 2, 3])))
    return out


@pytest.mark.parametrize("seed", range(40))
def test_orbit_scan_matches_exhaustive(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    eqs = random_equations(rng, n, rng.randint(1, 3))
    inv = {i for i in range(n) if rng.random() < 0.3}
    q = rng.choice([q for q in (2, 3, 5, 7) if all(e.lam % q for e in eqs)])
    exhaustive = smoothness_scan(eqs, q, inv, method="exhaustive")
    orbits = smoothness_scan(eqs, q, inv, method="orbits")
    assert (exhaustive == []) == (orbits == [])
    assert {pt for _, pt in orbits} <= {pt for _, pt in exhaustive}


def test_orbit_points_cover_patterns():
    X = list(orbit_points([[1, 0]], [[0, 1]], 5, [False, False], prune=False))
    pts = {tuple(r) for block in X for r in block}
    assert (0, 0) in pts and any(a and b for a, b in pts)


def two_term(U, V, lam, q):
    return (tuple(U), 1, tuple(V), (-lam) % q)


@pytest.mark.parametrize("method", ["orbits", "exhaustive"])
def test_point_sets_equal(method):
    q = 5
    xy = two_term((1, 1), (0, 0), 0, q)
    x = ((1, 0), 1, (0, 0), 0)
    y = ((0, 1), 1, (0, 0), 0)
    assert point_sets_equal([[xy]], [[x], [y]], q, 2, method=method)
    assert not point_sets_equal([[xy]], [[x]], q, 2, method=method)
    assert point_sets_equal([[x, y]], [[two_term((1, 0), (0, 1), 1, q), x]], q, 2, method=method)
    assert not point_sets_equal([[two_term((2, 0), (0, 0), 1, q)]], [[x]], q, 2, method=method)
    assert point_sets_equal([[]], [[]], q, 2, method=method)


@pytest.mark.parametrize("seed", range(30))
def test_point_sets_orbits_match_exhaustive(seed):
    rng = random.Random(100 + seed)
    n = rng.randint(2, 4)
    eqs = random_equations(rng, n, 3)
    q = rng.choice([q for q in (5, 7) if all(e.lam % q for e in eqs)])
    polys = []
    for e in eqs:
        lam = reduce_mod(e.lam, q)
        polys.append(two_term(e.U, e.V, lam, q) if rng.random() < 0.7 else (e.U, 1, (0,) * n, 0))
    left = [[polys[0]], [polys[1], polys[2]]]
    right = [[polys[rng.randrange(3)]], [polys[rng.randrange(3)]]]
    a = point_sets_equal(left, right, q, n, method="exhaustive")
    b = point_sets_equal(left, right, q, n, method="orbits")
    assert a == b
