"""Find the inscribed square of an ellipse two independent ways.

The 2:1 ellipse carries exactly one square up to relabeling: the axis-aligned
one through (+-2/sqrt5, +-2/sqrt5).  We locate it by tracing the invariant
family of equal-sided quadrilaterals until the two diagonals swap roles, and
cross-check with plain multistart Newton on the full square system.
"""

import pathlib

import numpy as np

from pegfinder import corpus, find_square, vertices
from pegfinder.svg import render_svg

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

ellipse = corpus("ellipse", a=2, b=1)
square, provenance = find_square(ellipse)

print("square parameter:", square)
print("vertex parameters:", np.round(vertices(square), 9))
print("expected        :", np.round(np.sort([
    np.arctan(2) / (2 * np.pi),
    0.5 - np.arctan(2) / (2 * np.pi),
    0.5 + np.arctan(2) / (2 * np.pi),
    1 - np.arctan(2) / (2 * np.pi),
]), 9))
print("route:", provenance["route"])
print("Newton orbits found:", provenance["newton_orbit_count"])
print("cross-check distance:", provenance["newton_agreement"])

svg = render_svg(ellipse, polygons=[vertices(square)], annotations=[(vertices(square), "square")])
(OUT / "square_on_ellipse.svg").write_text(svg)
print("wrote", OUT / "square_on_ellipse.svg")
