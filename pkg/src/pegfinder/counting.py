"""Finite counts over deduplicated solution orbits: parity and mod-8 checks.

The counts are desk-scale evidence for the parity statements: squares come in
free cyclic orbits (the interior of the parameter space is a free Z_4-space),
so the orbit count's parity is the quantity of interest, and the rectangle
component bookkeeping decomposes those orbits along the branches through
them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._threads import parallel_map
from .curves import ClosedCurve, signed_area
from .errors import NonIsolatedSolutionsError
from .polygons import PolygonParam, cyclic_shift, param_dist, vertices
from .residuals import RectangleSystem, SpecialQuadSliceSystem, SquareSystem
from .searches import (
    FAMILY_RANK_TOL,
    dedup_orbits,
    find_square,
    polygon_seed_grid,
    simplex_lattice,
)
from .solvers import gauss_newton_batch, refine, smallest_singular_ratio
from .tracing import TraceSettings, chart_diff, trace_branch


@dataclass
class CountReport:
    kind: str
    total: int
    orbit_count: int
    parity: int
    orbits: list = field(default_factory=list)
    resolution: tuple = ()
    seed: int = 0
    notes: list = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "kind": self.kind,
            "total": self.total,
            "orbit_count": self.orbit_count,
            "parity": self.parity,
            "orbits": self.orbits,
            "resolution": list(self.resolution),
            "seed": self.seed,
            "notes": self.notes,
            "verdicts": self.verdicts,
        }


def count_squares(curve: ClosedCurve, settings=None, nx=150, m=24, condition_limit=1e10):
    """Count square orbits by multistart Newton over >= 64^3 seeds.

    Curves whose squares are not isolated (the round circle) are rejected
    with a family diagnostic rather than silently massaged.
    """
    settings = settings or TraceSettings()
    sq = SquareSystem(curve)
    seeds = polygon_seed_grid(4, nx, m)
    zeros = gauss_newton_batch(sq, seeds, tol=1e-11, prune_after=1, prune_level=0.6)
    reps = dedup_orbits(sq, zeros)
    conditions = [smallest_singular_ratio(sq, sq.from_param(p)) for p in reps]
    notes = []
    flagged = [i for i, c in enumerate(conditions) if c < 1.0 / condition_limit]
    if flagged:
        raise NonIsolatedSolutionsError(
            "zero set is 1-dimensional, not isolated: the Jacobian is rank-"
            "deficient at converged squares (rotational family)",
            {
                "condition_ratios": [conditions[i] for i in flagged],
                "examples": [_param_dict(reps[i]) for i in flagged[:3]],
            },
        )
    close_pairs = [
        (i, j)
        for i in range(len(reps))
        for j in range(i + 1, len(reps))
        if _orbit_dist4(reps[i], reps[j]) < 1e-2
    ]
    if close_pairs:
        raise NonIsolatedSolutionsError(
            "converged squares smear along a family instead of separating",
            {"close_pairs": close_pairs},
        )
    orbits = [
        {
            **_param_dict(p),
            "jacobian_condition_ratio": c,
            "ccw_square_labeling": orientation_check(curve, p) if curve.ambient_dim == 2 else None,
        }
        for p, c in zip(reps, conditions)
    ]
    return CountReport(
        kind="square",
        total=4 * len(reps),
        orbit_count=len(reps),
        parity=len(reps) % 2,
        orbits=orbits,
        resolution=(nx, m, len(seeds)),
        seed=settings.seed,
        notes=notes,
        verdicts={"parity_odd": len(reps) % 2 == 1},
    )


def _param_dict(p: PolygonParam):
    return {"base": p.base, "gaps": p.gaps.tolist(), "vertices": vertices(p).tolist()}


def _orbit_dist4(a, b):
    return min(param_dist(cyclic_shift(a, k), b) for k in range(4))


def count_special_quads(source, eps, path=None, settings=None, nt=64, m=12, verify_square=True):
    """Count special quadrilaterals of a given size on the slice system.

    Only solutions passing the a >= b classifier are counted; a solution
    within 1e-9 of the tie makes the parity unreliable and is flagged.  When
    the parity is even and the source is a curve, the square-existence
    corollary is checked by actually finding the square.
    """
    settings = settings or TraceSettings()
    sys = SpecialQuadSliceSystem(source, eps, path)
    shapes = simplex_lattice(3, m)[:, :2] * eps
    ts = (np.arange(nt) + 0.5) / nt
    seeds = np.empty((len(ts) * len(shapes), 3))
    seeds[:, 0] = np.repeat(ts, len(shapes))
    seeds[:, 1:] = np.tile(shapes, (nt, 1))
    zeros = gauss_newton_batch(
        sys, seeds, tol=1e-11, margin_floor=min(1e-6, eps * 1e-4)
    )
    notes = []
    reps = _dedup_slice(sys, zeros)
    family = any(smallest_singular_ratio(sys, z) < FAMILY_RANK_TOL for z in reps[:64])
    if family:
        notes.append("slice zeros form a family (symmetric source); counting only the classifier-positive ones")
    flags = [sys.classify(z) for z in reps]
    specials = [(z, f) for z, f in zip(reps, flags) if f["is_special"]]
    unreliable = any(f["near_tie"] for f in flags)
    if unreliable:
        notes.append("a solution sits within 1e-9 of the a = b tie; parity unreliable")
    parity = len(specials) % 2
    verdicts = {"parity": "even" if parity == 0 else "odd", "parity_reliable": not unreliable}
    if verify_square and parity == 0:
        curve = source if isinstance(source, ClosedCurve) else getattr(source, "curve", None)
        if curve is not None:
            square, prov = find_square(curve, settings)
            verdicts["square_exists"] = True
            verdicts["square"] = _param_dict(square)
            verdicts["consistent"] = True
        else:
            notes.append("even parity implies a metric square exists; not searched for plain fields")
    return CountReport(
        kind="special_quad",
        total=len(specials),
        orbit_count=len(specials),
        parity=parity,
        orbits=[
            {"t": float(z[0]), "u1": float(z[1]), "u2": float(z[2]), **f}
            for z, f in specials
        ],
        resolution=(nt, m, len(seeds)),
        seed=settings.seed,
        notes=notes + [f"slice zeros found (deduplicated): {len(reps)}"],
        verdicts=verdicts,
    )


def _dedup_slice(sys, zeros, tol=1e-5):
    if len(zeros) == 0:
        return []
    rounded = np.round(zeros / (10 * tol)).astype(np.int64)
    _, first = np.unique(rounded, axis=0, return_index=True)
    coarse = zeros[np.sort(first)]
    reps = []
    for z in coarse:
        if all(np.max(np.abs(chart_diff(sys, z, r))) > tol for r in reps):
            reps.append(z)
    return reps


def classify_rectangle_components(curve: ClosedCurve, settings=None, square_report=None):
    """Trace the rectangle branch through every labeled square and check the
    per-component square parity bookkeeping.

    Closed components are classified by isotropy order (1, 2, or 4); open
    components (branches that run into the chart boundary, which real curves
    produce) are excluded from the parity bookkeeping with a warning.
    """
    settings = settings or TraceSettings()
    report = square_report or count_squares(curve, settings)
    rect = RectangleSystem(curve)
    sq = SquareSystem(curve)
    components = []

    def containing(p_lab):
        for comp in components:
            if any(_orbit_free_dist(p_lab, s) < 1e-4 for s in comp["squares"]):
                return comp
        return None

    def trace_component(p_lab):
        br = trace_branch(
            rect, rect.from_param(p_lab), settings, events={"square_on_branch": rect.fatness}
        )
        squares = []
        for ev in br.events:
            if ev.kind != "square_on_branch":
                continue
            zq = refine(sq, ev.z, tol=1e-10)
            squares.append(sq.to_param(zq))
        return br, squares

    # one orbit at a time: its four labeled traces are independent workers
    # (PEGFINDER_THREADS caps the pool); merging stays in label order
    for orbit in report.orbits:
        p0 = PolygonParam(orbit["base"], orbit["gaps"])
        labeled = [cyclic_shift(p0, k) for k in range(4)]
        todo = [p for p in labeled if containing(p) is None]
        for p_lab, (br, squares) in zip(todo, parallel_map(trace_component, todo)):
            if containing(p_lab) is not None:
                continue  # an earlier worker's component already covers it
            components.append(
                {
                    "branch": br,
                    "squares": squares,
                    "closed": br.closed,
                    "isotropy": br.isotropy_order if br.closed else None,
                    "square_events": len(squares),
                }
            )

    closed = [c for c in components if c["closed"]]
    open_comps = [c for c in components if not c["closed"]]
    notes = []
    if open_comps:
        notes.append(
            f"{len(open_comps)} component(s) escape to the boundary without closing; "
            "excluded from the per-component parity bookkeeping"
        )
    total_squares = sum(c["square_events"] for c in components)
    iso_breakdown = {1: 0, 2: 0, 4: 0}
    iso_square_sums = {1: 0, 2: 0, 4: 0}
    for c in closed:
        iso_breakdown[c["isotropy"]] += 1
        iso_square_sums[c["isotropy"]] += c["square_events"]
    verdicts = {
        "every_closed_component_even": all(c["square_events"] % 2 == 0 for c in closed),
        "r1_square_total_mod8": iso_square_sums[1] % 8,
        "r4_components_square_counts_mod8": [
            c["square_events"] % 8 for c in closed if c["isotropy"] == 4
        ],
        "total_squares_mod8": total_squares % 8,
        "total_matches_orbit_count": total_squares == 4 * report.orbit_count,
    }
    orbits_out = [
        {
            "closed": c["closed"],
            "isotropy": c["isotropy"],
            "square_events": c["square_events"],
            "squares": [_param_dict(s) for s in c["squares"]],
            "termination": c["branch"].termination,
        }
        for c in components
    ]
    return CountReport(
        kind="rectangle_components",
        total=total_squares,
        orbit_count=len(components),
        parity=total_squares % 2,
        orbits=orbits_out,
        resolution=(len(labeled),),
        seed=settings.seed,
        notes=notes,
        verdicts=verdicts,
    )


def _orbit_free_dist(a: PolygonParam, b: PolygonParam):
    """Plain labeled distance (no orbit quotient): labeled squares are the
    bookkeeping unit for component signatures."""
    return param_dist(a, b)


def orientation_check(curve: ClosedCurve, square) -> bool:
    """True iff the square's vertices, in curve order, wind counter-clockwise.

    Accepts a PolygonParam or a raw vertex-parameter sequence.  The curve is
    taken counter-clockwise; a clockwise parametrization is handled by
    flipping the sign convention rather than rejecting.
    """
    vp = vertices(square) if isinstance(square, PolygonParam) else np.asarray(square, dtype=float)
    pts = curve.eval(vp)[:, :2]
    x, y = pts[:, 0], pts[:, 1]
    quad_area = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    if signed_area(curve) < 0:
        quad_area = -quad_area
    return quad_area > 0


__all__ = [
    "CountReport",
    "count_squares",
    "count_special_quads",
    "classify_rectangle_components",
    "orientation_check",
]
