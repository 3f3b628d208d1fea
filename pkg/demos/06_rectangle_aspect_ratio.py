"""Rectangles of a prescribed aspect ratio (the open conjecture, exercised).

On the circle the ratio-2 rectangle has its long-side arc at arctan(2)/pi.
On the ellipse we find a ratio-2 parallelogram by multistart Newton and
cross-check it against the aspect-ratio event on the rectangle branch
through the square.
"""

import pathlib

import numpy as np

from pegfinder import corpus, find_rectangle, vertices
from pegfinder.svg import render_svg

OUT = pathlib.Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

p, info = find_rectangle(corpus("circle"), 2.0)
print("circle, ratio 2: long-side arc =", float(p.gaps[0]))
print("         exact: arctan(2)/pi  =", np.arctan(2) / np.pi)

ellipse = corpus("ellipse", a=2, b=1)
pe, info_e = find_rectangle(ellipse, 2.0, cross_check=True)
print("ellipse, ratio 2:", pe, f" residual {info_e['residual']:.1e}")
print("  branch cross-check:", info_e["aspect_event"])

svg = render_svg(ellipse, polygons=[vertices(pe)], annotations=[(vertices(pe), "ratio 2")])
(OUT / "rectangle_ratio2_ellipse.svg").write_text(svg)
print("wrote", OUT / "rectangle_ratio2_ellipse.svg")
