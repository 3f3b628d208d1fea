import numpy as np
import pytest

from pegfinder import (
    ConvergenceError,
    EdgeRatioSystem,
    RectangleSystem,
    SpecialQuadPathSystem,
    SquareSystem,
    TraceSettings,
    corpus,
    count_special_quads,
    isotropy,
    refine,
    trace_branch,
    winding_number,
)
from pegfinder.polygons import orbit_dist, from_vertices
from pegfinder.solvers import gauss_newton_batch
from pegfinder.tracing import PerturbedSystem, chain_distance


@pytest.fixture(scope="module")
def settings():
    return TraceSettings()


def test_trace_settings_validation():
    with pytest.raises(ValueError):
        TraceSettings(corrector_tol=-1.0)
    with pytest.raises(ValueError):
        TraceSettings(corrector_tol=1e-3, closure_tol=1e-6)


def test_refine_circle_square(circle):
    sq = SquareSystem(circle)
    z = refine(sq, np.array([0.0, 0.24, 0.26, 0.25]))
    assert np.linalg.norm(sq.residual(z)) <= 1e-10
    # converges onto the rotating square family: all gaps 1/4
    assert np.allclose(sq.gaps_of(z), 0.25, atol=1e-8)


def test_refine_ellipse_square(ellipse):
    sq = SquareSystem(ellipse)
    t1 = np.arctan(2) / (2 * np.pi)
    z = refine(sq, np.array([t1 + 0.01, 0.15, 0.34, 0.16]))
    assert np.linalg.norm(sq.residual(z)) < 1e-10
    expected = from_vertices([t1, 0.5 - t1, 0.5 + t1, 1 - t1])
    assert orbit_dist(sq.to_param(z), expected) < 1e-8


def test_refine_diverges_cleanly(ellipse):
    sq = SquareSystem(ellipse)
    with pytest.raises(ConvergenceError):
        refine(sq, np.array([0.0, 0.01, 0.97, 0.01]), max_iter=3)


def test_trace_circle_rhombus_family(circle, settings):
    sys = EdgeRatioSystem(circle, 4)
    br = trace_branch(sys, np.array([0.0, 0.251, 0.25, 0.252]), settings,
                      events={"diagonal_swap": sys.diagonal_gap})
    assert br.closed
    assert abs(br.winding) == 1
    assert br.isotropy_order == 4
    assert winding_number(br) in (1, -1)
    # the circle family is entirely squares: no diagonal swap events
    assert not [e for e in br.events if e.kind == "diagonal_swap"]


def test_trace_ellipse_rhombus_events_hit_known_square(ellipse, settings):
    sys = EdgeRatioSystem(ellipse, 4)
    br = trace_branch(sys, np.array([0.05, 0.26, 0.24, 0.25]), settings,
                      events={"diagonal_swap": sys.diagonal_gap})
    assert br.closed and br.isotropy_order == 4
    swaps = [e for e in br.events if e.kind == "diagonal_swap"]
    assert len(swaps) == 4  # the four labelings of the single square orbit
    t1 = np.arctan(2) / (2 * np.pi)
    expected = from_vertices([t1, 0.5 - t1, 0.5 + t1, 1 - t1])
    for ev in swaps:
        assert orbit_dist(sys.to_param(ev.z), expected) < 1e-6


def test_winding_number_requires_closed(ellipse, settings):
    sys = RectangleSystem(ellipse)
    t1 = np.arctan(2) / (2 * np.pi)
    z0 = sys.from_param(from_vertices([t1, 0.5 - t1, 0.5 + t1, 1 - t1]))
    br = trace_branch(sys, z0, settings, events={"square_on_branch": sys.fatness})
    assert not br.closed
    with pytest.raises(ConvergenceError):
        winding_number(br)
    # exactly one square on the open arc, boundary hits at both ends
    kinds = [e.kind for e in br.events]
    assert kinds.count("square_on_branch") == 1
    assert kinds.count("boundary_approach") == 2


def test_trace_circle_rectangle_sweeps_all_aspects(circle, settings):
    # rectangles on a circle are (x; u, 1/2-u, u, 1/2-u); the branch through
    # the square sweeps u across (0, 1/2) and leaves at both degenerate ends
    sys = RectangleSystem(circle)
    br = trace_branch(sys, np.array([0.0, 0.25, 0.25, 0.25]), settings)
    assert not br.closed
    assert br.termination == "boundary/boundary"
    u = np.array([sys.gaps_of(z)[0] for z in br.points])
    assert u.min() < 5e-4 and u.max() > 0.5 - 5e-4
    gaps = np.array([sys.gaps_of(z) for z in br.points])
    assert np.allclose(gaps[:, 0], gaps[:, 2], atol=1e-7)
    assert np.allclose(gaps[:, 0] + gaps[:, 1], 0.5, atol=1e-7)


def test_spiral_special_quad_path_spans_sizes(settings):
    # the path of special quadrilaterals starts at a quadrilateral collapsed
    # to a point in the spiral middle and ends when the first and last
    # vertex meet again on the far side
    spiral = corpus("spiral")
    rep = count_special_quads(spiral, 0.1, verify_square=False, nt=96, m=10)
    assert rep.total >= 1
    o = rep.orbits[0]
    path = SpecialQuadPathSystem(spiral)
    z0 = np.array([o["t"], o["u1"], o["u2"], 0.1 - o["u1"] - o["u2"]])
    st = TraceSettings(max_steps=150000, step_max=5e-3)
    br = trace_branch(path, z0, st)
    sizes = path.size(br.points)
    assert not br.closed
    assert br.termination == "boundary/boundary"
    assert sizes.min() < 1e-2
    assert sizes.max() > 0.99


def test_isotropy_full_on_invariant_branches(circle, ellipse, settings):
    for curve, n in [(circle, 3), (ellipse, 4), (circle, 5)]:
        sys = EdgeRatioSystem(curve, n)
        z0 = np.concatenate([[0.02], np.full(n - 1, 1.0 / n) + 1e-3 * np.arange(n - 1)])
        br = trace_branch(sys, z0, settings)
        assert br.closed
        assert isotropy(br) == n


def test_bisected_event_location_is_on_zero_set(ellipse, settings):
    sys = EdgeRatioSystem(ellipse, 4)
    br = trace_branch(sys, np.array([0.05, 0.26, 0.24, 0.25]), settings,
                      events={"diagonal_swap": sys.diagonal_gap})
    ev = [e for e in br.events if e.kind == "diagonal_swap"][0]
    assert np.linalg.norm(sys.residual(ev.z)) < 1e-9
    assert abs(float(sys.diagonal_gap(ev.z[None])[0])) < 1e-9


def test_batch_solver_discards_degenerate_corners(ellipse):
    sq = SquareSystem(ellipse)
    seeds = np.array([[0.1, 1e-8, 1e-8, 1.0 - 3e-8], [0.4, 0.15, 0.34, 0.16]])
    zeros = gauss_newton_batch(sq, seeds, tol=1e-11)
    for z in zeros:
        assert sq.boundary_margins(z[None])[0] > 1e-3


def test_perturbed_system_scaling(ellipse):
    sq = SquareSystem(ellipse)
    pert = PerturbedSystem(sq, delta=1e-7, seed=3)
    z = np.array([0.1, 0.2, 0.3, 0.25])
    diff = np.linalg.norm(pert.residual(z) - sq.residual(z))
    assert 0 < diff < 1e-6
    rel = np.max(np.abs(pert.jacobian(z) - pert.numeric_jacobian(z)))
    assert rel < 1e-5
    # decays with the boundary margin
    z_edge = np.array([0.1, 1e-6, 0.5, 0.25])
    diff_edge = np.linalg.norm(pert.residual(z_edge) - sq.residual(z_edge))
    assert diff_edge < 1e-12


def test_asymmetric_branches_isotropy_one_and_contractible_windings(settings):
    # a strong symmetric modulation splits the equilateral zero set into two
    # orbits of asymmetric contractible loops plus one invariant branch: the
    # asymmetric ones have trivial isotropy and winding 0, and the windings
    # still add up to +-1 across all components
    from pegfinder.fields import SyntheticField
    from pegfinder.residuals import TriangleSystem
    from pegfinder.searches import enumerate_branches, polygon_seed_grid

    c = [
        -0.14540130695616313,
        -0.055189293544821424,
        0.14601271155725942,
        0.1882756183517561,
        0.0815822141107617,
        -0.1335388554792382,
    ]
    field = SyntheticField(c0=1.0, ps=c[0:2], qs=c[2:4], rs=c[4:6])
    sys = TriangleSystem(field)
    branches = enumerate_branches(sys, polygon_seed_grid(3, 14, 10), settings, max_branches=10)
    closed = [b for b in branches if b.closed]
    assert len(closed) == 7
    isos = sorted(b.isotropy_order for b in closed)
    assert isos == [1, 1, 1, 1, 1, 1, 3]
    trivial = [b for b in closed if b.isotropy_order == 1]
    assert all(b.winding == 0 for b in trivial)
    assert abs(sum(b.winding for b in closed)) == 1


def test_chain_distance_wraps_base(circle, settings):
    sys = EdgeRatioSystem(circle, 4)
    br = trace_branch(sys, np.array([0.0, 0.251, 0.25, 0.252]), settings)
    probe = np.array([0.999, 0.25, 0.25, 0.25])
    assert chain_distance(sys, br.points, probe) < 1e-3
