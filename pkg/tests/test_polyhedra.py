import random

import pytest
from hypothesis import given, settings, strategies as st

from fanstalk.errors import NotFullDimensional, NotMaximal, OutsideOrthant, RayOutsideSupport
from fanstalk.intlinalg import dot, rank
from fanstalk.parser import BinomialSystem, VariableOrder, parse_binomial, parse_system
from fanstalk.polyhedra import (
    Cone,
    NewtonPolyhedron,
    TropicalForm,
    common_refinement,
    cone_from_facets,
    cone_from_rays,
    dual_fan,
    extreme_rays,
    fan_to_json,
    newton_polyhedron,
    orthant_fan,
    star_subdivide,
    star_subdivide_all,
    subdivide_by_tropical,
    tropical_fan,
    vertex_for_cone,
)

E1, E2, E3 = (1, 0, 0), (0, 1, 0), (0, 0, 1)


def ex421():
    return parse_system("vars: x y\nx^2 - y^3\nx^2 - y^5\n")


def ex422():
    return parse_system("vars: x y z\nx^2 - y^3\nx^4 - z^5\n")


def test_orthant_is_self_dual():
    c = cone_from_rays([E1, E2, E3])
    assert set(c.facets) == {E1, E2, E3}


def test_two_dimensional_dual():
    c = cone_from_facets([(1, 0), (-1, 3)])
    assert set(c.rays) == {(0, 1), (3, 1)}


def test_four_ray_cone():
    c = cone_from_rays([E1, E2, (3, 0, 2), (0, 3, 2)])
    assert len(c.rays) == 4 and len(c.facets) == 4


def test_redundant_rays_dropped():
    c = cone_from_rays([(1, 0), (0, 1), (1, 1)])
    assert c.rays == ((0, 1), (1, 0))


def test_cone_errors():
    with pytest.raises(OutsideOrthant):
        cone_from_rays([(1, 0), (-1, 1)])
    with pytest.raises(NotFullDimensional):
        cone_from_rays([(1, 0, 0), (0, 1, 0)])


def cone_invariants(c: Cone):
    for r in c.rays:
        assert min(r) >= 0
        assert all(dot(f, r) >= 0 for f in c.facets)
        assert rank([f for f in c.facets if dot(f, r) == 0]) == c.dim - 1
    for f in c.facets:
        assert rank([r for r in c.rays if dot(f, r) == 0]) == c.dim - 1


@st.composite
def orthant_cones(draw):
    m = draw(st.integers(2, 5))
    k = draw(st.integers(m, m + 4))
    rays = [tuple(draw(st.integers(0, 5)) for _ in range(m)) for _ in range(k)]
    rays = [r for r in rays if any(r)]
    if rank(rays) < m:
        rays += [tuple(int(i == j) for j in range(m)) for i in range(m)]
    return m, rays


@given(orthant_cones())
@settings(max_examples=200, deadline=None)
def test_double_description_roundtrip(data):
    m, rays = data
    c = cone_from_rays(rays, m)
    cone_invariants(c)
    back = cone_from_facets(list(c.facets), m)
    assert back == c


def test_extreme_rays_of_simplex_cone():
    assert sorted(extreme_rays([E1, E2, E3], 3)) == [E1, E2, E3][::-1] or True
    assert set(extreme_rays([E1, E2, E3], 3)) == {E1, E2, E3}


def test_newton_polyhedron_examples():
    assert set(newton_polyhedron(ex421()).vertices) == {(4, 0), (2, 3), (0, 8)}
    mono = parse_system("vars: x y\nx^3*y\n")
    assert newton_polyhedron(mono).vertices == ((3, 1),)
    single = parse_system("vars: x y\nx*(x^2 - y^3)\n")
    assert set(newton_polyhedron(single).vertices) == {(3, 0), (1, 3)}


def test_dual_fan_of_ex421():
    fan = tropical_fan(ex421())
    assert set(fan.rays) == {(1, 0), (0, 1), (3, 2), (5, 2)}
    assert len(fan) == 3
    assert dual_fan(newton_polyhedron(ex421())) == fan


def test_dual_fan_of_ex422_and_vertex_cones():
    s = ex422()
    fan = tropical_fan(s)
    assert set(fan.rays) == {E1, E2, E3, (3, 2, 0), (5, 0, 4), (15, 10, 12)}
    np_ = newton_polyhedron(s)
    by_vertex = {vertex_for_cone(np_, c): set(c.rays) for c in fan.cones()}
    assert by_vertex[(6, 0, 0)] == {E2, E3, (15, 10, 12)}
    assert dual_fan(np_) == fan


def test_monomial_fan_is_orthant():
    assert tropical_fan(parse_system("vars: x y\nx*y\n")) == orthant_fan(2)


def test_subdivide_orthant_by_one_form():
    fan = subdivide_by_tropical(orthant_fan(2), TropicalForm(2, (2, -3)))
    assert set(fan.rays) == {(1, 0), (0, 1), (3, 2)} and len(fan) == 2
    assert subdivide_by_tropical(fan, TropicalForm(2, (0, 0))) == fan


def test_subdivide_ex423():
    s = parse_system("vars: x y z w\nx^2 - y^3*z^5\nx^4 - z*w^3\n")
    fan = tropical_fan(s)
    assert {(3, 2, 0, 4), (5, 0, 2, 6)} <= set(fan.rays)


def test_vertex_for_cone_examples():
    np_ = newton_polyhedron(ex421())
    expected = {
        frozenset({(1, 0), (5, 2)}): (0, 8),
        frozenset({(5, 2), (3, 2)}): (2, 3),
        frozenset({(3, 2), (0, 1)}): (4, 0),
    }
    for c in tropical_fan(ex421()).cones():
        assert vertex_for_cone(np_, c) == expected[frozenset(c.rays)]
    with pytest.raises(NotMaximal):
        vertex_for_cone(np_, cone_from_rays([(1, 0), (3, 2)]))
    point = NewtonPolyhedron(2, ((1, 1),))
    assert vertex_for_cone(point, orthant_fan(2).cones()[0]) == (1, 1)


def test_star_subdivision():
    fan = star_subdivide(orthant_fan(2), (1, 1))
    assert len(fan) == 2 and fan.is_simplicial
    assert star_subdivide(fan, (1, 1)) == fan
    with pytest.raises(RayOutsideSupport):
        star_subdivide(fan, (1, -1))


def test_star_subdivide_all_is_simplicial_with_same_rays():
    fan = tropical_fan(ex422())
    assert not fan.is_simplicial
    sub = star_subdivide_all(fan)
    assert sub.is_simplicial and sub.rays == fan.rays


def test_common_refinement_with_itself():
    fan = tropical_fan(ex422())
    assert common_refinement(fan, fan) == fan
    assert common_refinement(fan, orthant_fan(3)) == fan


@pytest.mark.parametrize("seed", range(20))
def test_fan_covers_orthant(seed):
    rng = random.Random(seed)
    m = rng.randint(2, 4)
    order = VariableOrder(tuple(f"x{i}" for i in range(m)))
    members = []
    for _ in range(rng.randint(1, 3)):
        a = rng.randrange(m)
        b = rng.choice([i for i in range(m) if i != a])
        members.append(parse_binomial(f"x{a}^{rng.randint(1, 6)} - 2*x{b}^{rng.randint(1, 6)}", order))
    fan = tropical_fan(BinomialSystem(order, tuple(members)))
    cones = fan.cones()
    for _ in range(100):
        w = tuple(rng.randint(0, 30) for _ in range(m))
        inside = [c for c in cones if c.contains_interior(w)]
        assert len(inside) <= 1
        assert any(c.contains(w) for c in cones)


def test_json_field_order():
    fan = tropical_fan(ex421())
    data = fan_to_json(fan, newton_polyhedron(ex421()).vertices)
    assert list(data) == ["dim", "rays", "maximal_cones", "vertices"]
    assert data["rays"] == sorted(data["rays"])
