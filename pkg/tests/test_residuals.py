import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pegfinder import (
    DegenerateConfigurationError,
    DomainError,
    EdgeRatioSystem,
    OctahedronSystem,
    ParallelogramSystem,
    PolygonParam,
    PolylineCurve,
    RectangleSystem,
    Rhombus3dSystem,
    SpecialQuadPathSystem,
    SpecialQuadSliceSystem,
    SquareSystem,
    TriangleSystem,
    corpus,
    cyclic_shift,
    edge_diag_map,
    edge_ratio_residual,
    from_vertices,
    octahedron_group,
    octahedron_residual,
    parallelogram_residual,
    planarity_angle,
    rectangle_residual,
    rhombus3d_residual,
    special_quad_residual,
    square_residual,
    triangle_residual,
)
from pegfinder.residuals import octahedron_edge_permutation, shift_square_residual


def chord_circle(u):
    return 2.0 * abs(np.sin(np.pi * u))


def gaps4():
    return st.lists(st.floats(0.05, 1.0), min_size=4, max_size=4).map(
        lambda v: np.array(v) / np.sum(v)
    )


# --- edge/diagonal map -------------------------------------------------------


def test_edge_diag_square(circle):
    p = PolygonParam(0.0, [0.25] * 4)
    expected = [np.sqrt(2)] * 4 + [2.0, 2.0]
    assert np.allclose(edge_diag_map(circle, p), expected, atol=1e-14)


def test_edge_diag_degenerate(circle):
    p = PolygonParam(0.3, [0.0, 0.0, 1.0, 0.0])
    assert np.allclose(edge_diag_map(circle, p), 0.0)


def test_edge_diag_asymmetric_circle(circle):
    p = from_vertices([0.0, 0.1, 0.5, 0.6])
    expected = [
        chord_circle(0.1),
        chord_circle(0.4),
        chord_circle(0.1),
        chord_circle(0.4),
        2.0,
        2.0,
    ]
    assert np.allclose(edge_diag_map(circle, p), expected, atol=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), gaps4())
def test_edge_diag_equivariance_exact(base, gaps):
    curve = corpus("ellipse", a=2, b=1)
    p = PolygonParam(base, gaps)
    before = edge_diag_map(curve, p)
    after = edge_diag_map(curve, cyclic_shift(p))
    # edges permute cyclically, diagonals swap; the only float slack is the
    # re-association of the cumulative gap sums (last-ulp scale)
    assert np.allclose(after[:4], np.roll(before[:4], -1), rtol=0, atol=1e-13)
    assert np.allclose(after[4:], before[[5, 4]], rtol=0, atol=1e-13)


# --- square system -----------------------------------------------------------


def test_square_residual_zero_on_circle_square(circle):
    p = PolygonParam(0.12, [0.25] * 4)
    assert np.max(np.abs(square_residual(circle, p))) < 1e-14


def test_square_residual_on_algebraic_ellipse_square(ellipse):
    t1 = np.arctan(2) / (2 * np.pi)
    p = from_vertices([t1, 0.5 - t1, 0.5 + t1, 1 - t1])
    # vertices (+-2/sqrt5, +-2/sqrt5) lie on the ellipse and form a square
    pts = ellipse.eval(np.array([t1, 0.5 - t1]))
    assert np.allclose(np.abs(pts), 2 / np.sqrt(5), atol=1e-12)
    assert np.linalg.norm(square_residual(ellipse, p)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), gaps4())
def test_square_residual_shift_formula(base, gaps):
    curve = corpus("fourier-random", seed=2)
    p = PolygonParam(base, gaps)
    r = square_residual(curve, p)
    r_shift = square_residual(curve, cyclic_shift(p))
    assert np.allclose(r_shift, shift_square_residual(r), atol=1e-12)


# --- edge-ratio system ---------------------------------------------------------


def test_edge_ratio_square_zero(circle):
    p = PolygonParam(0.0, [0.25] * 4)
    assert np.allclose(edge_ratio_residual(circle, p, [1, 1, 1]), 0.0, atol=1e-14)


def test_edge_ratio_equilateral_triangle(circle):
    p = from_vertices([0.0, 1 / 3, 2 / 3])
    assert np.allclose(edge_ratio_residual(circle, p, [1, 1]), 0.0, atol=1e-14)


def test_edge_ratio_rhombus_mismatch(circle):
    u = 0.2
    p = from_vertices([0.0, u, 0.5, 0.5 + u])
    r = edge_ratio_residual(circle, p, [1, 1, 1])
    assert r[0] == pytest.approx(chord_circle(0.2) - chord_circle(0.3), abs=1e-13)
    assert abs(r[0]) > 1e-2


def test_edge_ratio_polygon_inequality():
    curve = corpus("circle")
    with pytest.raises(DomainError):
        EdgeRatioSystem(curve, 4, [3.0, 0.5, 0.5])
    with pytest.raises(DomainError):
        EdgeRatioSystem(curve, 3, [5.0, 1.0])


# --- special quadrilateral slice ------------------------------------------------


def test_special_quad_symmetric_circle_not_special(circle):
    eps = 0.1
    res, flags = special_quad_residual(
        circle, t=0.0, x2=eps / 3, x3=2 * eps / 3, eps=eps
    )
    assert np.max(np.abs(res)) < 1e-12
    assert flags["a"] == pytest.approx(chord_circle(eps / 3), abs=1e-14)
    assert flags["b"] == pytest.approx(chord_circle(eps), abs=1e-14)
    assert flags["a"] < flags["b"]
    assert not flags["is_special"]
    assert flags["size"] == pytest.approx(eps, abs=1e-14)


def test_special_quad_order_violation(circle):
    with pytest.raises(DomainError):
        special_quad_residual(circle, t=0.0, x2=0.2, x3=0.05, eps=0.1)


def test_special_quad_path_size(circle):
    sys = SpecialQuadPathSystem(circle)
    z = np.array([0.1, 0.05, 0.07, 0.1])
    assert sys.size(z) == pytest.approx(0.22)


# --- parallelogram and rectangle -----------------------------------------------


def test_parallelogram_midpoints_on_circle_rectangles(circle):
    for u in (0.1, 0.2, 0.35):
        p = from_vertices([0.0, u, 0.5, 0.5 + u])
        r = parallelogram_residual(circle, p, 1.7)
        assert np.allclose(r[:2], 0.0, atol=1e-13)


def test_parallelogram_square_ratio_one(circle):
    p = PolygonParam(0.0, [0.25] * 4)
    assert np.allclose(parallelogram_residual(circle, p, 1.0), 0.0, atol=1e-13)


def test_parallelogram_ratio_two_zero_at_arctan(circle):
    u = np.arctan(2.0) / np.pi  # tan(pi u) = 2
    p = from_vertices([0.0, u, 0.5, 0.5 + u])
    assert np.linalg.norm(parallelogram_residual(circle, p, 2.0)) < 1e-12


def test_parallelogram_requires_planar():
    with pytest.raises(DomainError):
        ParallelogramSystem(corpus("trefoil"), 2.0)


def test_rectangle_residual_examples(circle):
    for u in (0.1, 0.25, 0.4):
        p = from_vertices([0.0, u, 0.5, 0.5 + u])
        assert np.allclose(rectangle_residual(circle, p), 0.0, atol=1e-13)
    p = from_vertices([0.0, 0.1, 0.4, 0.6])
    r = rectangle_residual(circle, p)
    expected = [
        chord_circle(0.1) - chord_circle(0.2),
        chord_circle(0.3) - chord_circle(0.4),
        chord_circle(0.4) - chord_circle(0.5),
    ]
    assert np.allclose(r, expected, atol=1e-13)
    assert np.linalg.norm(r) > 1e-2


# --- triangles -------------------------------------------------------------------


def test_triangle_residual_circle_field():
    f = corpus("field-circle")
    assert np.allclose(triangle_residual(f, 0.0, 1 / 3, 2 / 3), 0.0, atol=1e-14)


def test_triangle_residual_sin_field():
    f = corpus("field-sin-mod")
    r = triangle_residual(f, 0.0, 1 / 3, 2 / 3)
    # all pairwise base distances equal sin(pi/3); only the modulation differs
    assert np.max(np.abs(r)) < 0.2


# --- skew rhombus and planarity ---------------------------------------------------


def _skew_rhombus_curve(h):
    # four equal sides sqrt(2 + h^2); vertices 2 and 4 lifted off the plane
    pts = np.array([[1, 0, 0], [0, 1, h], [-1, 0, 0], [0, -1, h]], dtype=float)
    return PolylineCurve(pts), PolygonParam(0.0, [0.25] * 4)


def test_rhombus3d_planar_curve_angle_is_pi():
    circle3 = corpus("tilted-circle", angle=0.0)
    p = from_vertices([0.0, 0.2, 0.5, 0.7])
    assert planarity_angle(circle3, p) == pytest.approx(np.pi, abs=1e-9)


def test_rhombus3d_skew_quadrilateral():
    curve, p = _skew_rhombus_curve(1.0)
    assert np.allclose(rhombus3d_residual(curve, p), 0.0, atol=1e-12)
    ang = planarity_angle(curve, p)
    assert ang == pytest.approx(1.5 * np.pi, abs=1e-9)
    assert abs(ang - np.pi) > 1.0


def test_rhombus3d_degenerate_angle_error():
    curve, _ = _skew_rhombus_curve(1.0)
    degenerate = PolygonParam(0.0, [0.0, 0.5, 0.0, 0.5])
    with pytest.raises(DegenerateConfigurationError):
        planarity_angle(curve, degenerate)


# --- octahedron --------------------------------------------------------------------


def _regular_octahedron():
    e = np.eye(3)
    return np.vstack([e, -e])


def test_octahedron_residual_regular_zero():
    sph = corpus("scaled-sphere", lx=1.0, ly=1.0, lz=1.0)
    assert np.allclose(octahedron_residual(sph, _regular_octahedron()), 0.0, atol=1e-14)


def test_octahedron_rotation_invariance(rng):
    sph = corpus("scaled-sphere", lx=1.0, ly=1.0, lz=1.0)
    M = rng.normal(size=(3, 3))
    Q, _ = np.linalg.qr(M)
    rotated = _regular_octahedron() @ Q.T
    assert np.allclose(octahedron_residual(sph, rotated), 0.0, atol=1e-12)


def test_octahedron_group_structure():
    G = octahedron_group()
    assert len(G) == 48
    for sigma in G[:8]:
        perm = octahedron_edge_permutation(sigma)
        assert sorted(perm) == list(range(12))


def test_octahedron_norm_invariance_under_group(rng):
    sph = corpus("scaled-sphere", lz=0.5)
    sys = OctahedronSystem(sph)
    for _ in range(5):
        q = rng.normal(size=(6, 3))
        q /= np.linalg.norm(q, axis=1, keepdims=True)
        z = q.reshape(18)
        if not sys.guard(z):
            continue
        base_norm = np.linalg.norm(octahedron_residual(sph, q))
        for sigma in octahedron_group()[::7]:
            qp = sys.apply_label_permutation(z, sigma).reshape(6, 3)
            assert np.linalg.norm(octahedron_residual(sph, qp)) == pytest.approx(
                base_norm, abs=1e-12
            )


def test_octahedron_fat_diagonal_guard():
    sph = corpus("scaled-sphere", lz=0.5)
    q = _regular_octahedron()
    q[1] = q[0] + 1e-4  # two labels nearly coincide
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    with pytest.raises(DomainError):
        octahedron_residual(sph, q)


def test_octahedron_antiprism_closed_form():
    lz = 0.5
    sph = corpus("scaled-sphere", lz=lz)
    r = np.sqrt(2 * lz**2 / (2 * lz**2 + 1))
    d = r / np.sqrt(2)
    top = [(r * np.cos(a), r * np.sin(a), 2 * d) for a in 2 * np.pi * np.array([0, 1 / 3, 2 / 3])]
    bot = [
        (r * np.cos(a), r * np.sin(a), -2 * d)
        for a in 2 * np.pi * np.array([1 / 2, 1 / 2 + 1 / 3, 1 / 2 + 2 / 3])
    ]
    q = np.array(top + bot)
    assert np.allclose(np.linalg.norm(q, axis=1), 1.0, atol=1e-14)
    assert np.linalg.norm(octahedron_residual(sph, q)) < 1e-13
    sys = OctahedronSystem(sph)
    L = sys.edge_lengths(q.reshape(18))
    assert np.allclose(L, L[0], atol=1e-13)


# --- Jacobians versus finite differences ----------------------------------------


def _interior_quad_chart(rng):
    g = rng.dirichlet([4, 4, 4, 4])
    return np.concatenate([[rng.uniform()], g[:3]])


@pytest.mark.parametrize(
    "factory",
    [
        lambda e: SquareSystem(e),
        lambda e: EdgeRatioSystem(e, 4),
        lambda e: EdgeRatioSystem(e, 5, [1.0, 1.2, 0.8, 1.1]),
        lambda e: RectangleSystem(e),
        lambda e: ParallelogramSystem(e, 2.0),
        lambda e: SpecialQuadPathSystem(e),
    ],
    ids=["square", "rhombus", "ratio5", "rectangle", "parallelogram", "special-path"],
)
def test_jacobians_match_finite_differences(factory, ellipse, rng):
    sys = factory(ellipse)
    n = getattr(sys, "n", 4)
    worst = 0.0
    for _ in range(50):
        if n == 5:
            g = rng.dirichlet([4] * 5)
            z = np.concatenate([[rng.uniform()], g[:4]])
        else:
            z = _interior_quad_chart(rng)
        J = sys.jacobian(z)
        Jn = sys.numeric_jacobian(z)
        worst = max(worst, np.max(np.abs(J - Jn)) / max(np.max(np.abs(Jn)), 1e-9))
    assert worst < 1e-5


def test_jacobians_triangle_and_slice_and_octahedron(rng):
    f = corpus("field-random", seed=4)
    tri = TriangleSystem(f)
    worst = 0.0
    for _ in range(50):
        g = rng.dirichlet([4, 4, 4])
        z = np.concatenate([[rng.uniform()], g[:2]])
        rel = np.max(np.abs(tri.jacobian(z) - tri.numeric_jacobian(z)))
        worst = max(worst, rel)
    assert worst < 1e-5
    sl = SpecialQuadSliceSystem(corpus("ellipse", a=2, b=1), 0.3)
    for _ in range(50):
        u = rng.dirichlet([3, 3, 3]) * 0.3
        z = np.array([rng.uniform(), u[0], u[1]])
        rel = np.max(np.abs(sl.jacobian(z) - sl.numeric_jacobian(z)))
        assert rel < 1e-5
    oct_sys = OctahedronSystem(corpus("scaled-sphere", lz=0.5))
    for _ in range(10):
        q = rng.normal(size=(6, 3))
        q /= np.linalg.norm(q, axis=1, keepdims=True)
        z = q.reshape(18)
        rel = np.max(np.abs(oct_sys.jacobian(z) - oct_sys.numeric_jacobian(z)))
        assert rel < 1e-5


def test_polyline_system_uses_secant_jacobian():
    cusp = corpus("cusp")
    sys = SquareSystem(cusp)
    z = np.array([0.05, 0.22, 0.28, 0.26])
    J = sys.jacobian(z)
    assert np.all(np.isfinite(J))


def test_rhombus3d_jacobian(trefoil, rng):
    sys = Rhombus3dSystem(trefoil)
    for _ in range(20):
        z = _interior_quad_chart(rng)
        rel = np.max(np.abs(sys.jacobian(z) - sys.numeric_jacobian(z)))
        assert rel < 1e-5
