"""Every knot carries four points spanning a planar rhombus.

On the invariant family of equal-edge quadrilaterals of the trefoil, the
dihedral angle along a diagonal passes through the straight angle; the
crossing point is the planar rhombus.  Rendered as two orthographic views.
"""

import pathlib

import numpy as np

from pegfinder import corpus, find_planar_rhombus, vertices
from pegfinder.svg import render_svg

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

trefoil = corpus("trefoil")
rhombus, info = find_planar_rhombus(trefoil)

print("rhombus:", rhombus)
pts = trefoil.eval(vertices(rhombus))
sides = [np.linalg.norm(pts[(i + 1) % 4] - pts[i]) for i in range(4)]
print("side lengths:", np.round(sides, 10))
print("equal-edge residual:", info["residual"])
print("coplanarity (normalized triple product):", info["coplanarity"])
print("dihedral angle:", info["angle"], "(pi =", np.pi, ")")

svg = render_svg(trefoil, polygons=[vertices(rhombus)],
                 annotations=[(vertices(rhombus), "planar rhombus")])
(OUT / "trefoil_rhombus.svg").write_text(svg)
print("wrote", OUT / "trefoil_rhombus.svg")
