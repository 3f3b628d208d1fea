import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pegfinder import (
    DomainError,
    PolygonParam,
    boundary_distance,
    canonical,
    cyclic_shift,
    from_star,
    from_vertices,
    orbit_dist,
    to_star,
    vertices,
)
from pegfinder.circle import wrap
from pegfinder.polygons import param_dist, star_base


def gaps_strategy(n):
    return st.lists(st.floats(0.01, 1.0), min_size=n, max_size=n).map(
        lambda v: np.array(v) / np.sum(v)
    )


def params(n):
    return st.tuples(st.floats(0.0, 1.0, exclude_max=True), gaps_strategy(n)).map(
        lambda t: PolygonParam(t[0], t[1])
    )


def test_vertices_regular_square():
    p = PolygonParam(0.0, [0.25, 0.25, 0.25, 0.25])
    assert np.allclose(vertices(p), [0.0, 0.25, 0.5, 0.75])


def test_vertices_degenerate_vertex_of_simplex():
    p = PolygonParam(0.3, [0.0, 0.0, 1.0, 0.0])
    assert np.allclose(vertices(p), [0.3, 0.3, 0.3, 0.3])


def test_vertices_triangle():
    p = PolygonParam(0.1, [0.2, 0.3, 0.5])
    assert np.allclose(vertices(p), [0.1, 0.3, 0.6])


def test_from_vertices_square():
    p = from_vertices([0.0, 0.25, 0.5, 0.75])
    assert p.base == 0.0
    assert np.allclose(p.gaps, 0.25)


def test_from_vertices_all_equal_uses_last_gap():
    p = from_vertices([0.5, 0.5, 0.5])
    assert p.base == 0.5
    assert np.allclose(p.gaps, [0.0, 0.0, 1.0])


def test_from_vertices_wrapping_tuple():
    # arcs from the bracket formula: 0.9 -> 0.1 -> 0.5 -> 0.8, last gap closes to 1
    xs = [0.9, 0.1, 0.5, 0.8]
    arcs = [wrap(xs[i + 1] - xs[i]) for i in range(3)]
    assert np.allclose(arcs, [0.2, 0.4, 0.3])
    p = from_vertices(xs)
    assert np.allclose(p.gaps, [0.2, 0.4, 0.3, 0.1])
    assert np.allclose(vertices(p), xs)


def test_from_vertices_rejects_disordered():
    with pytest.raises(DomainError):
        from_vertices([0.0, 0.5, 0.25, 0.9])


def test_cyclic_shift_examples():
    p = PolygonParam(0.0, [0.25, 0.25, 0.25, 0.25])
    q = cyclic_shift(p)
    assert q.base == 0.25
    p2 = PolygonParam(0.0, [0.5, 0.3, 0.2])
    q2 = cyclic_shift(p2)
    assert q2.base == 0.5
    assert np.allclose(q2.gaps, [0.3, 0.2, 0.5])


@settings(max_examples=100, deadline=None)
@given(params(4))
def test_shift_orbit_closes(p):
    q = p
    for _ in range(4):
        q = cyclic_shift(q)
    assert param_dist(p, q) < 1e-12


@settings(max_examples=100, deadline=None)
@given(params(5))
def test_shift_equivariance_on_vertices(p):
    from pegfinder.circle import circle_dist

    rolled = np.roll(vertices(p), -1)
    assert np.max(circle_dist(vertices(cyclic_shift(p)), rolled)) < 1e-12


def test_star_base_regular_square():
    p = PolygonParam(0.0, [0.25, 0.25, 0.25, 0.25])
    assert star_base(p) == pytest.approx(3.0 / 8.0, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(params(4))
def test_star_roundtrip(p):
    q = from_star(to_star(p))
    assert param_dist(p, q) < 1e-11


@settings(max_examples=100, deadline=None)
@given(params(4))
def test_star_action_is_rigid_rotation(p):
    ds = wrap(star_base(cyclic_shift(p)) - star_base(p))
    assert min(abs(ds - 0.25), abs(ds - 0.25 - 1), abs(ds - 0.25 + 1)) < 1e-12


def test_boundary_distance():
    assert boundary_distance(PolygonParam(0.0, [0.25] * 4)) == 0.25
    assert boundary_distance(PolygonParam(0.1, [0.0, 0.0, 1.0, 0.0])) == 0.0
    assert boundary_distance(PolygonParam(0.0, [0.2, 0.3, 0.5])) == pytest.approx(0.2)


@settings(max_examples=200, deadline=None)
@given(params(4))
def test_roundtrip_from_vertices(p):
    if boundary_distance(p) <= 0:
        return
    q = from_vertices(vertices(p))
    assert orbit_dist(p, q) < 1e-9


def test_gap_renormalization_and_rejection():
    p = PolygonParam(0.0, np.array([0.25, 0.25, 0.25, 0.25]) * (1 + 5e-10))
    assert abs(p.gaps.sum() - 1.0) < 1e-15
    with pytest.raises(DomainError):
        PolygonParam(0.0, [0.3, 0.3, 0.3, 0.3])
    with pytest.raises(DomainError):
        PolygonParam(0.0, [-0.1, 0.4, 0.4, 0.3])


def test_canonical_picks_smallest_star_base():
    p = PolygonParam(0.6, [0.1, 0.2, 0.3, 0.4])
    c = canonical(p)
    stars = [star_base(cyclic_shift(p, k)) for k in range(4)]
    assert star_base(c) == pytest.approx(min(stars))
    assert orbit_dist(p, c) < 1e-12
