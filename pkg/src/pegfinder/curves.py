"""Closed curves in R^2 / R^3 and coordinate-scaled spheres.

Two curve representations:

* ``FourierCurve`` -- finite cosine/sine series per coordinate; smooth,
  periodic by construction, with analytic derivatives.
* ``PolylineCurve`` -- closed vertex chain evaluated by constant-speed
  interpolation; derivatives are secant differences (step 1e-6).

Curves are parametrized by t in [0, 1), not by arc length.  Everything is
immutable after construction.
"""

from __future__ import annotations

import warnings

import numpy as np

from .circle import wrap
from .errors import DomainError

SECANT_STEP = 1e-6


class ClosedCurve:
    """Common interface: eval(t) -> points, deriv(t) -> velocity vectors."""

    ambient_dim: int

    def eval(self, t):
        raise NotImplementedError

    def deriv(self, t):
        raise NotImplementedError

    def eval_and_deriv(self, t):
        return self.eval(t), self.deriv(t)

    def spec(self) -> dict:
        """JSON-serializable description (see curve_spec schema)."""
        raise NotImplementedError


class FourierCurve(ClosedCurve):
    """gamma_j(t) = const_j + sum_k cos_jk cos(2 pi k t) + sin_jk sin(2 pi k t)."""

    def __init__(self, const, cos_coeffs, sin_coeffs):
        const = np.atleast_1d(np.asarray(const, dtype=float))
        cos_coeffs = np.atleast_2d(np.asarray(cos_coeffs, dtype=float))
        sin_coeffs = np.atleast_2d(np.asarray(sin_coeffs, dtype=float))
        if cos_coeffs.shape != sin_coeffs.shape or cos_coeffs.shape[0] != const.shape[0]:
            raise DomainError("coefficient arrays disagree in shape")
        if const.shape[0] not in (2, 3):
            raise DomainError("ambient dimension must be 2 or 3")
        self.const = const
        self.cos_coeffs = cos_coeffs
        self.sin_coeffs = sin_coeffs
        self.ambient_dim = const.shape[0]
        self.degree = cos_coeffs.shape[1]
        self._k = np.arange(1, self.degree + 1, dtype=float)
        for a in (self.const, self.cos_coeffs, self.sin_coeffs):
            a.setflags(write=False)

    def _angles(self, t):
        t = np.asarray(t, dtype=float)
        return 2.0 * np.pi * t[..., None] * self._k  # (..., K)

    def eval(self, t):
        ang = self._angles(t)
        return (
            self.const
            + np.cos(ang) @ self.cos_coeffs.T
            + np.sin(ang) @ self.sin_coeffs.T
        )

    def deriv(self, t):
        ang = self._angles(t)
        w = 2.0 * np.pi * self._k
        return (np.cos(ang) * w) @ self.sin_coeffs.T - (np.sin(ang) * w) @ self.cos_coeffs.T

    def eval_and_deriv(self, t):
        ang = self._angles(t)
        c, s = np.cos(ang), np.sin(ang)
        w = 2.0 * np.pi * self._k
        pos = self.const + c @ self.cos_coeffs.T + s @ self.sin_coeffs.T
        vel = (c * w) @ self.sin_coeffs.T - (s * w) @ self.cos_coeffs.T
        return pos, vel

    def spec(self):
        return {
            "kind": "fourier",
            "dim": self.ambient_dim,
            "const": self.const.tolist(),
            "cos": self.cos_coeffs.tolist(),
            "sin": self.sin_coeffs.tolist(),
        }


class PolylineCurve(ClosedCurve):
    """Closed polygonal curve, constant-speed interpolation between vertices."""

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] not in (2, 3):
            raise DomainError("polyline needs >= 3 vertices in R^2 or R^3")
        seg = np.roll(v, -1, axis=0) - v
        seglen = np.linalg.norm(seg, axis=1)
        if np.any(seglen == 0.0):
            raise DomainError("consecutive polyline vertices must be distinct")
        self.vertices = v
        self.ambient_dim = v.shape[1]
        self._seg = seg
        self._seglen = seglen
        self._cum = np.concatenate([[0.0], np.cumsum(seglen)])
        self.length = self._cum[-1]
        for a in (self.vertices, self._seg, self._seglen, self._cum):
            a.setflags(write=False)

    def eval(self, t):
        t = np.asarray(t, dtype=float)
        s = wrap(t) * self.length
        i = np.clip(np.searchsorted(self._cum, s, side="right") - 1, 0, len(self._seglen) - 1)
        lam = (s - self._cum[i]) / self._seglen[i]
        return self.vertices[i] + lam[..., None] * self._seg[i]

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        return (self.eval(t + SECANT_STEP) - self.eval(t - SECANT_STEP)) / (2.0 * SECANT_STEP)

    def spec(self):
        return {
            "kind": "polyline",
            "dim": self.ambient_dim,
            "vertices": self.vertices.tolist(),
        }


class EmbeddedSphere:
    """Unit 2-sphere scaled coordinatewise by (lx, ly, lz), all positive."""

    def __init__(self, scale):
        s = np.asarray(scale, dtype=float)
        if s.shape != (3,) or np.any(s <= 0.0):
            raise DomainError("sphere scale must be three positive reals")
        self.scale = s
        self.scale.setflags(write=False)

    @property
    def is_round(self):
        return bool(np.all(self.scale == self.scale[0]))

    def embed(self, q):
        """Map unit-sphere points (..., 3) to the scaled sphere."""
        return np.asarray(q, dtype=float) * self.scale

    def spec(self):
        return {"kind": "scaled-sphere", "scale": self.scale.tolist()}


def chord(curve: ClosedCurve, s, t):
    """Euclidean distance between curve points at parameters s and t."""
    d = curve.eval(np.asarray(s, dtype=float)) - curve.eval(np.asarray(t, dtype=float))
    return np.linalg.norm(d, axis=-1)


def curve_points(curve: ClosedCurve, n: int = 512):
    return curve.eval(np.arange(n) / n)


def self_intersects(curve: ClosedCurve, n: int = 512, warn: bool = True) -> bool:
    """Pairwise segment test on an n-point polygonization (planar curves).

    Diagnostic only: the inscribed-polygon statements are about embedded
    curves, but nothing here enforces injectivity.  3D curves are projected
    to their first two coordinates, which can report false positives; those
    callers should pass warn=False.
    """
    pts = curve_points(curve, n)[:, :2]
    a = pts
    b = np.roll(pts, -1, axis=0)
    # all segment pairs (i, j), i < j, skipping adjacent segments
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    hit = _segments_cross(a[i], b[i], a[j], b[j])
    found = bool(np.any(hit))
    if found and warn:
        warnings.warn("curve polygonization self-intersects; results assume an embedding")
    return found


def _segments_cross(p1, p2, q1, q2):
    def orient(a, b, c):
        return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])

    d1 = orient(q1, q2, p1)
    d2 = orient(q1, q2, p2)
    d3 = orient(p1, p2, q1)
    d4 = orient(p1, p2, q2)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


def signed_area(curve: ClosedCurve, n: int = 512) -> float:
    """Shoelace area of the n-point polygonization; positive = counter-clockwise."""
    pts = curve_points(curve, n)[:, :2]
    x, y = pts[:, 0], pts[:, 1]
    return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def curve_from_spec(spec: dict) -> ClosedCurve:
    """Rebuild a curve from its JSON spec (inverse of .spec())."""
    kind = spec.get("kind")
    if kind == "fourier":
        return FourierCurve(spec["const"], spec["cos"], spec["sin"])
    if kind == "polyline":
        return PolylineCurve(spec["vertices"])
    # corpus-style specs carry their construction parameters
    from .corpus import corpus as _corpus_build

    params = {k: v for k, v in spec.items() if k not in ("kind", "dim")}
    return _corpus_build(kind, **params)
