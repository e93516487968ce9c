"""Rotation-stable selection rules for the invariant pyramid mode.

Provides the anchor pixel, the geodesic distance field inside an object,
the stable spanning tree (parent choice by exact angle comparison), and the
strict ordering of object-boundary cracks that drives simplification
survivors and the homology-level loop choice.

All geometry is exact integer arithmetic: pixel centers and crack midpoints
are kept in doubled coordinates, and angles are compared through cross and
dot products.  No floating point is used anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections import deque
from typing import Iterable, Optional, Sequence

from cocyc.grid import ObjectComponent, Pixel, PixelMap


def anchor_vertex(obj: ObjectComponent) -> Pixel:
    """Top-left-most object pixel (minimal y, then minimal x)."""
    if not obj.pixels:
        raise ValueError("empty object")
    return min(obj.pixels, key=lambda p: (p[1], p[0]))


@dataclass(frozen=True)
class DistanceField:
    """Geodesic 4-neighborhood hop distances to the anchor within an object.

    ``sweep`` is the exact integer direction from the anchor toward the
    object's pixel centroid.  It rotates with the object and serves as the
    start ray of the angular ordering, which makes that ordering a total
    order (raw cross-product comparison alone is cyclic over a full turn).
    It vanishes only for single-pixel objects, where (1, 0) is substituted.
    """

    obj: ObjectComponent
    anchor: Pixel
    d: dict[Pixel, int]
    sweep: tuple[int, int]

    def __getitem__(self, p: Pixel) -> int:
        return self.d[p]


def distance_field(obj: ObjectComponent, s: Pixel) -> DistanceField:
    """BFS distances from s inside the object (4-connectivity)."""
    if s not in obj.pixels:
        raise ValueError(f"anchor {s} is not a pixel of the object")
    d = {s: 0}
    queue = deque([s])
    while queue:
        x, y = queue.popleft()
        base = d[(x, y)]
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if nb in obj.pixels and nb not in d:
                d[nb] = base + 1
                queue.append(nb)
    if len(d) != len(obj.pixels):
        raise ValueError("object is not 4-connected")
    n = len(obj.pixels)
    dx = sum(p[0] for p in obj.pixels) - n * s[0]
    dy = sum(p[1] for p in obj.pixels) - n * s[1]
    return DistanceField(obj=obj, anchor=s, d=d, sweep=(dx, dy) if (dx, dy) != (0, 0) else (1, 0))


@dataclass(frozen=True)
class StableTree:
    """Spanning tree of an object rooted at the anchor.

    ``parent`` maps every non-anchor pixel to its chosen neighbor one step
    closer to the anchor; ``edges`` are the corresponding base crack ids.
    """

    anchor: Pixel
    parent: dict[Pixel, Pixel]
    edges: frozenset[int]
    edge_child_parent: dict[int, tuple[Pixel, Pixel]]


def _cross(ax: int, ay: int, bx: int, by: int) -> int:
    return ax * by - ay * bx


def stable_tree(obj: ObjectComponent, df: DistanceField, pm: PixelMap) -> StableTree:
    """Parent selection: among neighbors one hop closer to the anchor, take
    the one minimizing the angle between rays V->S and V->V'; on equal
    angles take the clockwise-oriented triple S, V, V' (negative cross of
    V-S and V'-V in screen coordinates, y downward)."""
    s = df.anchor
    parent: dict[Pixel, Pixel] = {}
    edge_cp: dict[int, tuple[Pixel, Pixel]] = {}
    for v in obj.pixels:
        if v == s:
            continue
        vx, vy = v
        dv = df[v]
        cands = [
            nb
            for nb in ((vx + 1, vy), (vx - 1, vy), (vx, vy + 1), (vx, vy - 1))
            if nb in obj.pixels and df.d[nb] == dv - 1
        ]
        ux, uy = s[0] - vx, s[1] - vy  # ray V -> S
        best: Optional[Pixel] = None
        best_dot = None
        for nb in cands:
            wx, wy = nb[0] - vx, nb[1] - vy  # ray V -> V'
            dot = ux * wx + uy * wy
            if best is None or dot > best_dot:
                best, best_dot = nb, dot
            elif dot == best_dot:
                # equal angle: keep the clockwise one
                if _cross(vx - s[0], vy - s[1], wx, wy) < 0:
                    best = nb
        parent[v] = best
        e = pm.crack_between(v, best)
        edge_cp[e] = (v, best)
    return StableTree(
        anchor=s,
        parent=parent,
        edges=frozenset(edge_cp),
        edge_child_parent=edge_cp,
    )


def crack_center_doubled(pm: PixelMap, edge: int) -> tuple[int, int]:
    (x1, y1), (x2, y2) = pm.edge_to_crack(edge)
    return (x1 + x2, y1 + y2)


def crack_object_pixels(pm: PixelMap, edge: int, obj_pixels) -> list[Pixel]:
    """The object pixels (0, 1 or 2 of them) bounded by a crack."""
    (x1, y1), (x2, y2) = pm.edge_to_crack(edge)
    if y1 == y2:  # horizontal crack: pixels above and below
        sides = [(x1, y1 - 1), (x1, y1)]
    else:  # vertical: west and east
        sides = [(x1 - 1, y1), (x1, y1)]
    return [p for p in sides if p in obj_pixels]


def crack_f(pm: PixelMap, edge: int, df: DistanceField) -> int:
    """f(e): minimal anchor distance over the object pixels the crack bounds."""
    pixels = crack_object_pixels(pm, edge, df.obj.pixels)
    if not pixels:
        raise ValueError(f"crack {edge} bounds no pixel of the object")
    return min(df.d[p] for p in pixels)


def _sweep_bucket(dx: int, dy: int, ux: int, uy: int) -> int:
    """Angular position of u relative to the sweep ray d.

    0 on the ray itself, 1 in the open half turn after it (clockwise on
    screen, y downward), 2 on the opposite ray, 3 in the second half turn.
    """
    cr = _cross(dx, dy, ux, uy)
    if cr > 0:
        return 1
    if cr < 0:
        return 3
    return 0 if dx * ux + dy * uy > 0 else 2


def edge_compare(e1: int, e2: int, df: DistanceField, pm: PixelMap) -> int:
    """Strict total order on object-boundary cracks: -1, 0 or 1.

    Criteria, in order: the f value; the angular position of the crack
    centers around the anchor (exact cross-product orientation, swept
    clockwise on screen starting at the anchor-to-centroid ray, which makes
    the angular comparison transitive over the full turn); squared
    Euclidean distance to the anchor; lexicographic crack corners as a
    never-reached safety tail (distinct cracks cannot share a center).
    """
    if e1 == e2:
        return 0
    f1, f2 = crack_f(pm, e1, df), crack_f(pm, e2, df)
    if f1 != f2:
        return -1 if f1 < f2 else 1
    sx, sy = 2 * df.anchor[0] + 1, 2 * df.anchor[1] + 1
    c1x, c1y = crack_center_doubled(pm, e1)
    c2x, c2y = crack_center_doubled(pm, e2)
    ux, uy = c1x - sx, c1y - sy
    wx, wy = c2x - sx, c2y - sy
    dx, dy = df.sweep
    b1 = _sweep_bucket(dx, dy, ux, uy)
    b2 = _sweep_bucket(dx, dy, wx, wy)
    if b1 != b2:
        return -1 if b1 < b2 else 1
    cr = _cross(ux, uy, wx, wy)
    if cr != 0:
        return -1 if cr > 0 else 1
    d1 = ux * ux + uy * uy
    d2 = wx * wx + wy * wy
    if d1 != d2:
        return -1 if d1 < d2 else 1
    k1, k2 = pm.edge_to_crack(e1), pm.edge_to_crack(e2)
    return -1 if k1 < k2 else 1


def min_edge(edges: Iterable[int], df: DistanceField, pm: PixelMap) -> int:
    """Minimum crack under edge_compare (a genuine total order, so the
    result does not depend on iteration order)."""
    best = None
    for e in sorted(edges):
        if best is None or edge_compare(e, best, df, pm) < 0:
            best = e
    if best is None:
        raise ValueError("no edges")
    return best
