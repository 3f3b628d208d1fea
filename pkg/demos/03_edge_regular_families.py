"""Closed families of equal-edge polygons and their winding numbers.

For each n the solution branches are disjoint loops in the polygon parameter
space; their winding numbers (suitably oriented) add to +-1, and for prime
powers at least one loop is invariant under cyclic relabeling.
"""

from pegfinder import corpus, edge_ratio_branches, winding_sum

curves = {
    "circle": corpus("circle"),
    "ellipse": corpus("ellipse", a=2, b=1),
    "wobbly(7)": corpus("fourier-random", degree=4, amp=0.3, seed=7),
}

for n in (3, 4, 5):
    print(f"--- n = {n} ---")
    for name, curve in curves.items():
        branches = edge_ratio_branches(curve, n)
        closed = [b for b in branches if b.closed]
        print(
            f"{name:12s} components={len(branches)} "
            f"windings={[b.winding for b in closed]} "
            f"sum={winding_sum(branches):+d} "
            f"isotropies={[b.isotropy_order for b in closed]}"
        )
