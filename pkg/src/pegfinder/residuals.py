"""Residual systems whose zero sets are the polygon families of interest.

Each system exposes a chart: a flat coordinate vector z that the solvers and
the tracer understand.

* Polygon systems on curves use z = (base, t_0, ..., t_{n-2}); the last gap
  is 1 minus the rest, so the simplex constraint is built into the chart.
* The special-quadrilateral slice uses z = (t, u_1, u_2): first and last
  vertex ride a path (y_1(t), y_4(t)), with u_i the arcs to the two free
  vertices in between.
* The octahedron system uses z = 18 ambient coordinates of six points with
  unit-norm constraints appended to the residual (intrinsic dimensions:
  12 domain, 11 codomain).

All residuals and Jacobians are vectorized over leading batch dimensions.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.linalg import helmert

from .circle import wrap
from .curves import ClosedCurve, EmbeddedSphere
from .errors import DegenerateConfigurationError, DomainError
from .fields import ChordalField, DistanceField
from .polygons import PolygonParam, cyclic_shift, star_base, vertices

_TINY = 1e-300


def _vertex_map(z):
    """Vertex parameters (..., n) from chart (..., n)."""
    x = z[..., :1]
    cum = np.cumsum(z[..., 1:], axis=-1)
    return np.concatenate([x, x + cum], axis=-1)


def _vertex_chart_jacobian(n):
    """Constant dV_i/dz_m matrix, shape (n, n)."""
    J = np.zeros((n, n))
    J[:, 0] = 1.0
    for m in range(1, n):
        J[m:, m] = 1.0
    return J


def _pair_lengths(curve, V, pairs):
    """Lengths of chords between vertex pairs: (..., len(pairs))."""
    P = curve.eval(V)
    i, j = zip(*pairs)
    diff = P[..., i, :] - P[..., j, :]
    return np.linalg.norm(diff, axis=-1)


def _pair_lengths_grad(curve, V, pairs):
    """(lengths, d length / d vertex-parameter) for each pair.

    Returns L with shape (..., m) and G with shape (..., m, n) where
    G[..., e, v] is the derivative of pair e with respect to vertex v.
    """
    P, D = curve.eval_and_deriv(V)
    n = V.shape[-1]
    i, j = zip(*pairs)
    diff = P[..., i, :] - P[..., j, :]
    L = np.linalg.norm(diff, axis=-1)
    safe = np.maximum(L, _TINY)
    gi = np.sum(diff * D[..., i, :], axis=-1) / safe
    gj = -np.sum(diff * D[..., j, :], axis=-1) / safe
    G = np.zeros(L.shape + (n,))
    rows = np.arange(len(pairs))
    G[..., rows, i] = gi
    G[..., rows, j] += gj
    return L, G


class ResidualSystem:
    """Base: a residual map on a flat chart, with cyclic symmetry metadata."""

    kind: str
    domain_dim: int
    codomain_dim: int
    symmetry_order: int = 1

    def residual(self, z):
        raise NotImplementedError

    def jacobian(self, z):
        raise NotImplementedError

    def boundary_margins(self, z):
        """Batched distance to the domain boundary, shape z.shape[:-1]."""
        return np.full(np.shape(z)[:-1], np.inf)

    def guard(self, z) -> bool:
        """True while z is inside the chart's valid open domain."""
        return bool(np.all(self.boundary_margins(z) > 0.0))

    def boundary_margin(self, z) -> float:
        """Distance to the domain boundary (smallest gap or guard margin)."""
        return float(np.min(self.boundary_margins(z)))

    def numeric_jacobian(self, z, step=1e-6):
        z = np.asarray(z, dtype=float)
        cols = []
        for m in range(z.shape[-1]):
            e = np.zeros_like(z)
            e[..., m] = step
            cols.append((self.residual(z + e) - self.residual(z - e)) / (2 * step))
        return np.stack(cols, axis=-1)


class PolygonSystem(ResidualSystem):
    """Shared chart logic for systems living on P_n over a curve."""

    def __init__(self, curve: ClosedCurve, n: int):
        self.curve = curve
        self.n = n
        self.domain_dim = n
        self._chart_jac = _vertex_chart_jacobian(n)

    def to_param(self, z) -> PolygonParam:
        z = np.asarray(z, dtype=float)
        gaps = np.concatenate([z[1:], [1.0 - z[1:].sum()]])
        return PolygonParam(z[0], np.clip(gaps, 0.0, None))

    def from_param(self, p: PolygonParam):
        return np.concatenate([[p.base], p.gaps[:-1]])

    def shift_z(self, z, k=1):
        return self.from_param(cyclic_shift(self.to_param(z), k))

    def star_base_z(self, z):
        z = np.asarray(z, dtype=float)
        n = self.n
        weights = (n - np.arange(1, n)) / n
        return wrap(z[..., 0] + z[..., 1:] @ weights[: n - 1])

    def gaps_of(self, z):
        z = np.asarray(z, dtype=float)
        last = 1.0 - np.sum(z[..., 1:], axis=-1)
        return np.concatenate([z[..., 1:], last[..., None]], axis=-1)

    def boundary_margins(self, z):
        return np.min(self.gaps_of(z), axis=-1)

    def vertex_params(self, z):
        return _vertex_map(np.asarray(z, dtype=float))

    def _lengths(self, z, pairs):
        return _pair_lengths(self.curve, self.vertex_params(z), pairs)

    def _lengths_grad(self, z, pairs):
        L, G = _pair_lengths_grad(self.curve, self.vertex_params(z), pairs)
        return L, G @ self._chart_jac


QUAD_PAIRS = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)]


class SquareSystem(PolygonSystem):
    """Four equal edges and equal diagonals; zeros are metric squares."""

    kind = "square"
    codomain_dim = 4
    symmetry_order = 4
    _mix = np.array(
        [
            [1, -1, 0, 0, 0, 0],
            [0, 1, -1, 0, 0, 0],
            [0, 0, 1, -1, 0, 0],
            [0, 0, 0, 0, 1, -1],
        ],
        dtype=float,
    )

    def __init__(self, curve):
        super().__init__(curve, 4)

    def residual(self, z):
        L = self._lengths(np.asarray(z, dtype=float), QUAD_PAIRS)
        return L @ self._mix.T

    def jacobian(self, z):
        _, G = self._lengths_grad(np.asarray(z, dtype=float), QUAD_PAIRS)
        return self._mix @ G


class EdgeRatioSystem(PolygonSystem):
    """Edges prescribed up to scale: e_i = rho_i * e_n for i < n."""

    kind = "edge_ratio"

    def __init__(self, curve, n, rhos=None):
        super().__init__(curve, n)
        if rhos is None:
            rhos = np.ones(n - 1)
        rhos = np.asarray(rhos, dtype=float)
        if rhos.shape != (n - 1,) or np.any(rhos <= 0):
            raise DomainError(f"need {n - 1} positive edge ratios")
        sides = np.concatenate([rhos, [1.0]])
        if np.any(sides >= sides.sum() - sides):
            raise DomainError("edge ratios violate the polygon inequality")
        self.rhos = rhos
        self.codomain_dim = n - 1
        self.symmetry_order = n if np.all(rhos == 1.0) else 1
        self.pairs = [(i, (i + 1) % n) for i in range(n)]

    def residual(self, z):
        L = self._lengths(np.asarray(z, dtype=float), self.pairs)
        return L[..., :-1] - self.rhos * L[..., -1:]

    def jacobian(self, z):
        _, G = self._lengths_grad(np.asarray(z, dtype=float), self.pairs)
        return G[..., :-1, :] - self.rhos[:, None] * G[..., -1:, :]

    def diagonal_gap(self, z):
        """d13 - d24 for n = 4; the diagonal-swap event function."""
        if self.n != 4:
            raise DomainError("diagonal gap is defined for quadrilaterals")
        L = self._lengths(np.asarray(z, dtype=float), [(0, 2), (1, 3)])
        return L[..., 0] - L[..., 1]


class RectangleSystem(PolygonSystem):
    """Equal opposite edges and equal diagonals."""

    kind = "rectangle"
    codomain_dim = 3
    symmetry_order = 4
    _mix = np.array(
        [
            [1, 0, -1, 0, 0, 0],
            [0, 1, 0, -1, 0, 0],
            [0, 0, 0, 0, 1, -1],
        ],
        dtype=float,
    )

    def __init__(self, curve):
        super().__init__(curve, 4)

    def residual(self, z):
        L = self._lengths(np.asarray(z, dtype=float), QUAD_PAIRS)
        return L @ self._mix.T

    def jacobian(self, z):
        _, G = self._lengths_grad(np.asarray(z, dtype=float), QUAD_PAIRS)
        return self._mix @ G

    def fatness(self, z):
        """e12 - e23: changes sign exactly where the rectangle is a square."""
        L = self._lengths(np.asarray(z, dtype=float), [(0, 1), (1, 2)])
        return L[..., 0] - L[..., 1]

    def aspect_event(self, r):
        """(e12+e34) - r (e23+e41): zero where the aspect ratio hits r."""

        def event(z):
            L = self._lengths(np.asarray(z, dtype=float), QUAD_PAIRS[:4])
            return L[..., 0] + L[..., 2] - r * (L[..., 1] + L[..., 3])

        return event


class ParallelogramSystem(PolygonSystem):
    """Diagonal midpoints coincide and the edge sums have ratio r."""

    kind = "parallelogram"
    codomain_dim = 3
    symmetry_order = 2

    def __init__(self, curve, r):
        if curve.ambient_dim != 2:
            raise DomainError("the parallelogram test map needs a planar curve")
        if r <= 0:
            raise DomainError("aspect ratio must be positive")
        super().__init__(curve, 4)
        self.r = float(r)

    def residual(self, z):
        z = np.asarray(z, dtype=float)
        V = self.vertex_params(z)
        P = self.curve.eval(V)
        mid = P[..., 0, :] + P[..., 2, :] - P[..., 1, :] - P[..., 3, :]
        L = _pair_lengths(self.curve, V, QUAD_PAIRS[:4])
        ratio = L[..., 0] + L[..., 2] - self.r * (L[..., 1] + L[..., 3])
        return np.concatenate([mid, ratio[..., None]], axis=-1)

    def jacobian(self, z):
        z = np.asarray(z, dtype=float)
        V = self.vertex_params(z)
        D = self.curve.deriv(V)
        sign = np.array([1.0, -1.0, 1.0, -1.0])
        # d mid / d V_v = sign_v * gamma'(V_v), per plane coordinate
        Gmid = sign * np.swapaxes(D, -1, -2)  # (..., 2, 4)
        _, Glen = _pair_lengths_grad(self.curve, V, QUAD_PAIRS[:4])
        Gratio = Glen[..., 0, :] + Glen[..., 2, :] - self.r * (Glen[..., 1, :] + Glen[..., 3, :])
        G = np.concatenate([Gmid, Gratio[..., None, :]], axis=-2)
        return G @ self._chart_jac


class Rhombus3dSystem(PolygonSystem):
    """Four equal edges on a space curve; planarity is tracked separately."""

    kind = "rhombus3d"
    codomain_dim = 3
    symmetry_order = 4
    _mix = np.array(
        [
            [1, -1, 0, 0],
            [0, 1, -1, 0],
            [0, 0, 1, -1],
        ],
        dtype=float,
    )

    def __init__(self, curve):
        super().__init__(curve, 4)

    def residual(self, z):
        L = self._lengths(np.asarray(z, dtype=float), QUAD_PAIRS[:4])
        return L @ self._mix.T

    def jacobian(self, z):
        _, G = self._lengths_grad(np.asarray(z, dtype=float), QUAD_PAIRS[:4])
        return self._mix @ G

    def _points(self, z):
        P = self.curve.eval(self.vertex_params(np.asarray(z, dtype=float)))
        if self.curve.ambient_dim == 2:
            P = np.concatenate([P, np.zeros(P.shape[:-1] + (1,))], axis=-1)
        return P

    def coplanarity(self, z):
        """Normalized triple product of the edge frame at vertex 1.

        Zero iff the four points are coplanar; the planarity event function.
        """
        P = self._points(z)
        a = P[..., 1, :] - P[..., 0, :]
        u = P[..., 2, :] - P[..., 0, :]
        b = P[..., 3, :] - P[..., 0, :]
        vol = np.sum(np.cross(a, u) * b, axis=-1)
        scale = (
            np.linalg.norm(a, axis=-1)
            * np.linalg.norm(u, axis=-1)
            * np.linalg.norm(b, axis=-1)
        )
        return vol / np.maximum(scale, _TINY)

    def diameter(self, z):
        L = self._lengths(np.asarray(z, dtype=float), QUAD_PAIRS)
        return np.max(L, axis=-1)

    def planarity_angle(self, z) -> float:
        """Dihedral angle in (0, 2 pi) along diagonal v1 v3; pi means planar."""
        P = self._points(z)
        u = P[2] - P[0]
        nu = np.linalg.norm(u)
        if nu < 1e-12:
            raise DegenerateConfigurationError("diagonal collapsed")
        u = u / nu
        a = P[1] - P[0]
        b = P[3] - P[0]
        a_perp = a - (a @ u) * u
        b_perp = b - (b @ u) * u
        na, nb = np.linalg.norm(a_perp), np.linalg.norm(b_perp)
        if na < 1e-12 or nb < 1e-12:
            raise DegenerateConfigurationError("triangulation triangle is degenerate")
        cos_t = (a_perp @ b_perp) / (na * nb)
        sin_t = (u @ np.cross(a_perp, b_perp)) / (na * nb)
        ang = np.arctan2(sin_t, cos_t)
        return float(ang % (2 * np.pi))


class SpecialQuadSliceSystem(ResidualSystem):
    """Quadrilaterals with first/last vertex on a path, (a, a, a, b, e, e) shape.

    Chart z = (t, u1, u2): x1 = y1(t), x2 = x1 + u1, x3 = x2 + u2,
    x4 = y4(t).  Default path is (id, id + eps), so the size x4 - x1 is eps.
    """

    kind = "special_quad"
    domain_dim = 3
    codomain_dim = 3
    symmetry_order = 1
    tie_tol = 1e-9

    def __init__(self, source, eps, path=None):
        if isinstance(source, ClosedCurve):
            source = ChordalField(source)
        if not isinstance(source, DistanceField):
            raise DomainError("need a curve or a distance field")
        if not 0.0 < eps < 1.0:
            raise DomainError("size must lie in (0, 1)")
        self.field = source
        self.eps = float(eps)
        self.path = path  # None means (id, id + eps)

    def _ends(self, t):
        if self.path is None:
            return t, t + self.eps
        y1, y4 = self.path
        return y1(t), y4(t)

    def _ends_deriv(self, t, step=1e-7):
        if self.path is None:
            one = np.ones_like(np.asarray(t, dtype=float))
            return one, one
        y1, y4 = self.path
        return (
            (y1(t + step) - y1(t - step)) / (2 * step),
            (y4(t + step) - y4(t - step)) / (2 * step),
        )

    def vertex_params(self, z):
        z = np.asarray(z, dtype=float)
        t, u1, u2 = z[..., 0], z[..., 1], z[..., 2]
        x1, x4 = self._ends(t)
        return np.stack([x1, x1 + u1, x1 + u1 + u2, x4], axis=-1)

    def _margins(self, z):
        z = np.asarray(z, dtype=float)
        t, u1, u2 = z[..., 0], z[..., 1], z[..., 2]
        x1, x4 = self._ends(t)
        span = wrap(np.asarray(x4, dtype=float) - np.asarray(x1, dtype=float))
        return np.stack([u1, u2, span - u1 - u2, 1.0 - span], axis=-1)

    def boundary_margins(self, z):
        return np.min(self._margins(z), axis=-1)

    def _dists(self, z, pairs):
        V = self.vertex_params(z)
        i, j = zip(*pairs)
        return self.field.d(V[..., i], V[..., j])

    def residual(self, z):
        D = self._dists(z, [(0, 1), (1, 2), (2, 3), (0, 2), (1, 3)])
        return np.stack(
            [D[..., 0] - D[..., 1], D[..., 1] - D[..., 2], D[..., 3] - D[..., 4]],
            axis=-1,
        )

    def jacobian(self, z):
        z = np.asarray(z, dtype=float)
        V = self.vertex_params(z)
        pairs = [(0, 1), (1, 2), (2, 3), (0, 2), (1, 3)]
        i, j = zip(*pairs)
        dx, dy = self.field.partials(V[..., i], V[..., j])
        G = np.zeros(z.shape[:-1] + (5, 4))
        rows = np.arange(5)
        G[..., rows, i] = dx
        G[..., rows, j] += dy
        d1, d4 = self._ends_deriv(z[..., 0])
        chart = np.zeros(z.shape[:-1] + (4, 3))
        chart[..., 0, 0] = d1
        chart[..., 1, 0] = d1
        chart[..., 2, 0] = d1
        chart[..., 3, 0] = d4
        chart[..., 1, 1] = 1.0
        chart[..., 2, 1] = 1.0
        chart[..., 2, 2] = 1.0
        Gz = G @ chart
        mix = np.array([[1, -1, 0, 0, 0], [0, 1, -1, 0, 0], [0, 0, 0, 1, -1]], dtype=float)
        return mix @ Gz

    def classify(self, z):
        """(is_special, size, a, b, near_tie) at a residual zero."""
        D = self._dists(z, [(0, 1), (3, 0)])
        a, b = float(D[..., 0]), float(D[..., 1])
        V = self.vertex_params(z)
        size = float(wrap(V[..., 3] - V[..., 0]))
        return {
            "is_special": a >= b - self.tie_tol,
            "size": size,
            "a": a,
            "b": b,
            "near_tie": abs(a - b) < self.tie_tol,
        }


class SpecialQuadPathSystem(PolygonSystem):
    """The (a, a, a, b, e, e) equations on all of P_4; zero set is the
    one-dimensional set of special-shaped quadrilaterals, swept over sizes."""

    kind = "special_quad_path"
    codomain_dim = 3
    symmetry_order = 1
    _mix = np.array(
        [[1, -1, 0, 0, 0, 0], [0, 1, -1, 0, 0, 0], [0, 0, 0, 0, 1, -1]],
        dtype=float,
    )

    def __init__(self, curve):
        super().__init__(curve, 4)

    def residual(self, z):
        L = self._lengths(np.asarray(z, dtype=float), QUAD_PAIRS)
        return L @ self._mix.T

    def jacobian(self, z):
        _, G = self._lengths_grad(np.asarray(z, dtype=float), QUAD_PAIRS)
        return self._mix @ G

    def size(self, z):
        """Arc length from the first to the last vertex: 1 minus the last gap."""
        z = np.asarray(z, dtype=float)
        return np.sum(z[..., 1:], axis=-1)


class TriangleSystem(ResidualSystem):
    """Equilateral triangles of a distance field, on the P_3 chart."""

    kind = "triangle"
    domain_dim = 3
    codomain_dim = 2
    symmetry_order = 3

    def __init__(self, field: DistanceField):
        if isinstance(field, ClosedCurve):
            field = ChordalField(field)
        self.field = field
        self._chart_jac = _vertex_chart_jacobian(3)

    def to_param(self, z) -> PolygonParam:
        z = np.asarray(z, dtype=float)
        gaps = np.concatenate([z[1:], [1.0 - z[1:].sum()]])
        return PolygonParam(z[0], np.clip(gaps, 0.0, None))

    def from_param(self, p: PolygonParam):
        return np.concatenate([[p.base], p.gaps[:-1]])

    def shift_z(self, z, k=1):
        return self.from_param(cyclic_shift(self.to_param(z), k))

    def star_base_z(self, z):
        z = np.asarray(z, dtype=float)
        weights = np.array([2.0 / 3.0, 1.0 / 3.0])
        return wrap(z[..., 0] + z[..., 1:] @ weights)

    def gaps_of(self, z):
        z = np.asarray(z, dtype=float)
        last = 1.0 - np.sum(z[..., 1:], axis=-1)
        return np.concatenate([z[..., 1:], last[..., None]], axis=-1)

    def boundary_margins(self, z):
        return np.min(self.gaps_of(z), axis=-1)

    def vertex_params(self, z):
        return _vertex_map(np.asarray(z, dtype=float))

    def residual(self, z):
        V = self.vertex_params(z)
        i, j = (0, 1, 2), (1, 2, 0)
        D = self.field.d(V[..., i], V[..., j])
        return np.stack([D[..., 0] - D[..., 1], D[..., 1] - D[..., 2]], axis=-1)

    def jacobian(self, z):
        z = np.asarray(z, dtype=float)
        V = self.vertex_params(z)
        i, j = (0, 1, 2), (1, 2, 0)
        dx, dy = self.field.partials(V[..., i], V[..., j])
        G = np.zeros(z.shape[:-1] + (3, 3))
        rows = np.arange(3)
        G[..., rows, i] = dx
        G[..., rows, j] += dy
        mix = np.array([[1, -1, 0], [0, 1, -1]], dtype=float)
        return mix @ (G @ self._chart_jac)

    def pairwise(self, z, field=None):
        """The three pairwise distances (d12, d23, d31), optionally in another field."""
        field = field or self.field
        V = self.vertex_params(z)
        i, j = (0, 1, 2), (1, 2, 0)
        return field.d(V[..., i], V[..., j])


# --- octahedron ------------------------------------------------------------

OCT_EDGES = [
    (i, j)
    for i, j in itertools.combinations(range(6), 2)
    if j != i + 3  # opposite vertices (0,3), (1,4), (2,5) are not edges
]
_HELMERT11 = helmert(12)
_HELMERT11.setflags(write=False)


def octahedron_group():
    """The 48 vertex-label permutations preserving the opposite-pair structure."""
    perms = []
    for sigma in itertools.permutations(range(6)):
        if all(sigma[(v + 3) % 6] == (sigma[v] + 3) % 6 for v in range(6)):
            perms.append(sigma)
    return perms


def octahedron_edge_permutation(sigma):
    """Edge index permutation induced by a vertex permutation."""
    index = {e: k for k, e in enumerate(OCT_EDGES)}
    return [index[tuple(sorted((sigma[i], sigma[j])))] for i, j in OCT_EDGES]


class OctahedronSystem(ResidualSystem):
    """Twelve equal octahedron edges on a coordinate-scaled sphere.

    Chart: 18 ambient coordinates of the six unit vectors; the six unit-norm
    constraints are appended to the 11 mean-free edge coordinates, giving a
    17-dimensional residual on an 18-dimensional chart.
    """

    kind = "octahedron"
    domain_dim = 12
    codomain_dim = 11
    symmetry_order = 1
    chart_dim = 18
    fat_diagonal = 0.05  # minimum pairwise spherical distance

    def __init__(self, sphere: EmbeddedSphere):
        self.sphere = sphere

    def points(self, z):
        return np.asarray(z, dtype=float).reshape(np.shape(z)[:-1] + (6, 3))

    def edge_lengths(self, z):
        q = self.points(z)
        p = q * self.sphere.scale
        i, j = zip(*OCT_EDGES)
        return np.linalg.norm(p[..., i, :] - p[..., j, :], axis=-1)

    def residual(self, z):
        L = self.edge_lengths(z)
        unit = 0.5 * (np.sum(self.points(z) ** 2, axis=-1) - 1.0)
        return np.concatenate([L @ _HELMERT11.T, unit], axis=-1)

    def jacobian(self, z):
        z = np.asarray(z, dtype=float)
        q = self.points(z)
        p = q * self.sphere.scale
        i, j = zip(*OCT_EDGES)
        diff = p[..., i, :] - p[..., j, :]
        L = np.maximum(np.linalg.norm(diff, axis=-1), _TINY)
        u = diff / L[..., None] * self.sphere.scale  # d L / d q_i per coordinate
        Gl = np.zeros(z.shape[:-1] + (12, 6, 3))
        rows = np.arange(12)
        Gl[..., rows, i, :] = u
        Gl[..., rows, j, :] -= u
        Gl = Gl.reshape(z.shape[:-1] + (12, 18))
        Gu = np.zeros(z.shape[:-1] + (6, 6, 3))
        rows6 = np.arange(6)
        Gu[..., rows6, rows6, :] = q
        Gu = Gu.reshape(z.shape[:-1] + (6, 18))
        return np.concatenate([_HELMERT11 @ Gl, Gu], axis=-2)

    def min_separation(self, z):
        q = self.points(z)
        norms = np.maximum(np.linalg.norm(q, axis=-1), _TINY)
        qn = q / norms[..., None]
        i, j = np.triu_indices(6, k=1)
        dots = np.clip(np.sum(qn[..., i, :] * qn[..., j, :], axis=-1), -1.0, 1.0)
        return np.min(np.arccos(dots), axis=-1)

    def boundary_margins(self, z):
        return self.min_separation(z) - self.fat_diagonal

    def apply_label_permutation(self, z, sigma):
        q = self.points(z)
        out = np.empty_like(q)
        for v in range(6):
            out[..., sigma[v], :] = q[..., v, :]
        return out.reshape(z.shape)


# --- named operations over the systems --------------------------------------


def edge_diag_map(curve: ClosedCurve, p: PolygonParam):
    """(e12, e23, e34, e41, d13, d24) for a quadrilateral parameter."""
    if p.n != 4:
        raise DomainError("edge/diagonal map needs n = 4")
    return _pair_lengths(curve, vertices(p)[None, :], QUAD_PAIRS)[0]


def square_residual(curve, p: PolygonParam):
    sys = SquareSystem(curve)
    return sys.residual(sys.from_param(p))


def edge_ratio_residual(curve, p: PolygonParam, rhos):
    sys = EdgeRatioSystem(curve, p.n, rhos)
    return sys.residual(sys.from_param(p))


def rectangle_residual(curve, p: PolygonParam):
    sys = RectangleSystem(curve)
    return sys.residual(sys.from_param(p))


def parallelogram_residual(curve, p: PolygonParam, r):
    sys = ParallelogramSystem(curve, r)
    return sys.residual(sys.from_param(p))


def rhombus3d_residual(curve, p: PolygonParam):
    sys = Rhombus3dSystem(curve)
    return sys.residual(sys.from_param(p))


def planarity_angle(curve, p: PolygonParam) -> float:
    sys = Rhombus3dSystem(curve)
    return sys.planarity_angle(sys.from_param(p))


def triangle_residual(field: DistanceField, x, y, z):
    i, j = (0, 1, 2), (1, 2, 0)
    V = np.stack([np.asarray(x, dtype=float), np.asarray(y, dtype=float), np.asarray(z, dtype=float)], axis=-1)
    D = field.d(V[..., i], V[..., j])
    return np.stack([D[..., 0] - D[..., 1], D[..., 1] - D[..., 2]], axis=-1)


def special_quad_residual(source, t, x2, x3, y=None, eps=None):
    """Residual plus classifier flags for the slice system.

    The default path takes x1 = t and x4 = t + eps; eps defaults to the arc
    from t to x4 implied by the path.
    """
    if eps is None and y is None:
        raise DomainError("need either eps or an explicit path")
    sys = SpecialQuadSliceSystem(source, eps if eps is not None else 0.5, path=y)
    x1, _ = sys._ends(np.asarray(t, dtype=float))
    u1 = wrap(np.asarray(x2, dtype=float) - x1)
    u2 = wrap(np.asarray(x3, dtype=float) - np.asarray(x2, dtype=float))
    z = np.stack([np.asarray(t, dtype=float), u1, u2], axis=-1)
    if not sys.guard(z):
        raise DomainError("vertices are not in counter-clockwise slice order")
    return sys.residual(z), sys.classify(z)


def octahedron_residual(sphere: EmbeddedSphere, q):
    """Mean-free edge-length coordinates (R^11) for six unit-sphere points."""
    q = np.asarray(q, dtype=float)
    if q.shape[-2:] != (6, 3):
        raise DomainError("need six points in R^3")
    sys = OctahedronSystem(sphere)
    z = q.reshape(q.shape[:-2] + (18,))
    if not sys.guard(z):
        raise DomainError("configuration violates the fat-diagonal guard")
    return sys.edge_lengths(z) @ _HELMERT11.T


def shift_square_residual(r):
    """Exact image of the square residual under one cyclic relabeling."""
    r = np.asarray(r, dtype=float)
    return np.stack(
        [r[..., 1], r[..., 2], -r[..., 0] - r[..., 1] - r[..., 2], -r[..., 3]],
        axis=-1,
    )
