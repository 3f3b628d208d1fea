"""Equilateral triangles of abstract distance fields on the circle.

Any continuous symmetric d(x, y) admits an equilateral triple; with a second
field, the invariant equilateral family of the first carries points that are
additionally isosceles for the second.
"""

import numpy as np

from pegfinder import corpus, find_equilateral_triangle, find_two_metric_triangle

for seed in (11, 23, 42):
    field = corpus("field-random", seed=seed)
    verts, info = find_equilateral_triangle(field)
    print(f"field seed {seed}: triangle {np.round(verts, 6)}  residual {info['residual']:.1e}")

verts, info = find_equilateral_triangle(corpus("ellipse", a=2, b=1))
print("chordal ellipse  :", np.round(verts, 6), f"residual {info['residual']:.1e}")

verts, info = find_two_metric_triangle(corpus("circle"), corpus("field-sin-mod"))
print(
    "two metrics      :", np.round(verts, 6),
    f"equilateral residual {info['equilateral_residual']:.1e},",
    f"isosceles gap {info['isosceles_gap']:.1e}",
)
print("  (events of the modulated field sit on the 1/12 grid: v1 * 12 =",
      round(verts[0] * 12, 6), ")")
