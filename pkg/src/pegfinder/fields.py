"""Distance fields on the circle: symmetric, positive definite d(x, y).

Two sources:

* ``ChordalField`` -- pull back chord lengths of an embedded curve.
* ``SyntheticField`` -- 2|sin(pi(x-y))| times a trigonometric modulation in
  (x+y) and (x-y).  The |sin| factor makes d(x, x) = 0 structural; the
  modulation is symmetrized at construction and must stay positive on a
  diagnostic grid.
"""

from __future__ import annotations

import numpy as np

from .curves import ClosedCurve
from .errors import DomainError

GRID = 200  # diagnostic grid resolution for symmetry/definiteness checks


class DistanceField:
    def d(self, x, y):
        raise NotImplementedError

    def partials(self, x, y):
        """(dd/dx, dd/dy) at (x, y); undefined on the diagonal."""
        raise NotImplementedError

    def spec(self) -> dict:
        raise NotImplementedError

    def check_definite(self, grid: int = GRID):
        """Reject fields that vanish or go negative off the diagonal."""
        u = (np.arange(grid) + 0.5) / grid
        X, Y = np.meshgrid(u, u, indexing="ij")
        vals = self.d(X, Y)
        off = ~np.eye(grid, dtype=bool)
        if np.min(vals[off]) <= 0.0:
            raise DomainError("distance field is not positive definite on the diagnostic grid")
        return self


class ChordalField(DistanceField):
    def __init__(self, curve: ClosedCurve):
        self.curve = curve

    def d(self, x, y):
        diff = self.curve.eval(np.asarray(x, dtype=float)) - self.curve.eval(np.asarray(y, dtype=float))
        return np.linalg.norm(diff, axis=-1)

    def partials(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        diff = self.curve.eval(x) - self.curve.eval(y)
        dist = np.linalg.norm(diff, axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            u = diff / dist[..., None]  # nan on the diagonal; callers prune
        return (
            np.sum(u * self.curve.deriv(x), axis=-1),
            -np.sum(u * self.curve.deriv(y), axis=-1),
        )

    def spec(self):
        return {"kind": "chordal", "curve": self.curve.spec()}


class SyntheticField(DistanceField):
    """d(x, y) = 2|sin(pi(x-y))| * m(x, y) with trig-polynomial modulation.

    m(x, y) = c0 + sum_j ps_j cos(2 pi j (x+y)) + qs_j sin(2 pi j (x+y))
                 + sum_j rs_j cos(2 pi j (x-y))  [+ sin(x-y) terms, which
    symmetrization removes].
    """

    def __init__(self, c0=1.0, ps=(), qs=(), rs=(), ss=()):
        self.c0 = float(c0)
        self.ps = np.atleast_1d(np.asarray(ps, dtype=float))
        self.qs = np.atleast_1d(np.asarray(qs, dtype=float))
        self.rs = np.atleast_1d(np.asarray(rs, dtype=float))
        # sin(2 pi j (x-y)) terms are odd under swapping x and y;
        # the (g(x,y)+g(y,x))/2 symmetrization cancels them exactly.
        del ss
        self.check_definite()

    def _modulation(self, x, y):
        s = np.asarray(x, dtype=float) + np.asarray(y, dtype=float)
        u = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        m = self.c0 * np.ones(np.broadcast(s, u).shape)
        for j, p in enumerate(self.ps, start=1):
            m = m + p * np.cos(2 * np.pi * j * s)
        for j, q in enumerate(self.qs, start=1):
            m = m + q * np.sin(2 * np.pi * j * s)
        for j, r in enumerate(self.rs, start=1):
            m = m + r * np.cos(2 * np.pi * j * u)
        return m

    def d(self, x, y):
        u = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return 2.0 * np.abs(np.sin(np.pi * u)) * self._modulation(x, y)

    def partials(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        u = x - y
        s = x + y
        sn = np.sin(np.pi * u)
        base = 2.0 * np.abs(sn)
        dbase = 2.0 * np.pi * np.cos(np.pi * u) * np.sign(sn)
        m = self._modulation(x, y)
        dm_ds = np.zeros(np.broadcast(s, u).shape)
        for j, p in enumerate(self.ps, start=1):
            dm_ds = dm_ds - p * 2 * np.pi * j * np.sin(2 * np.pi * j * s)
        for j, q in enumerate(self.qs, start=1):
            dm_ds = dm_ds + q * 2 * np.pi * j * np.cos(2 * np.pi * j * s)
        dm_du = np.zeros(np.broadcast(s, u).shape)
        for j, r in enumerate(self.rs, start=1):
            dm_du = dm_du - r * 2 * np.pi * j * np.sin(2 * np.pi * j * u)
        ddx = dbase * m + base * (dm_ds + dm_du)
        ddy = -dbase * m + base * (dm_ds - dm_du)
        return ddx, ddy

    def spec(self):
        return {
            "kind": "synthetic-field",
            "c0": self.c0,
            "ps": self.ps.tolist(),
            "qs": self.qs.tolist(),
            "rs": self.rs.tolist(),
        }


def field_from_curve(curve: ClosedCurve) -> ChordalField:
    """Pull the ambient metric back along an (assumed injective) embedding."""
    return ChordalField(curve)


def field_from_spec(spec: dict) -> DistanceField:
    kind = spec.get("kind")
    if kind == "chordal":
        from .curves import curve_from_spec

        return ChordalField(curve_from_spec(spec["curve"]))
    if kind == "synthetic-field":
        return SyntheticField(spec.get("c0", 1.0), spec.get("ps", ()), spec.get("qs", ()), spec.get("rs", ()))
    from .corpus import corpus as _corpus_build

    params = {k: v for k, v in spec.items() if k != "kind"}
    obj = _corpus_build(kind, **params)
    if not isinstance(obj, DistanceField):
        raise DomainError(f"spec {kind!r} is not a distance field")
    return obj
