"""Base level of the pyramid: pixels, cracks, regions, objects and holes.

Coordinates: x grows rightward, y downward, origin at the top-left pixel.
Pixel (x, y) occupies the unit square with corners (x, y) and (x+1, y+1).
A crack is the unit segment between two lattice corners; every crack
separates two 4-adjacent pixels, or a border pixel from the exterior.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import ndimage

from cocyc.dualgraph import DualGraph, LevelPair

Pixel = tuple[int, int]
Corner = tuple[int, int]
Crack = tuple[Corner, Corner]

FOUR_CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.uint8)


class BinaryImage:
    """A width x height grid of foreground (1) / background (0) pixels."""

    def __init__(self, pixels: np.ndarray):
        arr = np.asarray(pixels, dtype=np.uint8)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be a non-empty 2D grid")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("pixels must be 0 or 1")
        self.pixels = arr  # indexed [y, x]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "BinaryImage":
        """Rows of '0'/'1' characters ('.' also accepted as background)."""
        data = [[0 if ch in "0." else 1 for ch in row] for row in rows]
        return cls(np.array(data, dtype=np.uint8))

    def get(self, x: int, y: int) -> int:
        return int(self.pixels[y, x])

    def foreground(self) -> list[Pixel]:
        ys, xs = np.nonzero(self.pixels)
        return [(int(x), int(y)) for x, y in zip(xs, ys)]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BinaryImage) and np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"BinaryImage({self.width}x{self.height})"


def normalize_crack(c1: Corner, c2: Corner) -> Crack:
    return (c1, c2) if c1 <= c2 else (c2, c1)


@dataclass
class PixelMap:
    """Id scheme tying base graph elements back to image geometry."""

    width: int
    height: int
    exterior_vertex: int  # region id of the exterior

    @property
    def n_h_cracks(self) -> int:
        return self.width * (self.height + 1)

    def pixel_region(self, x: int, y: int) -> int:
        return y * self.width + x

    def region_pixel(self, region: int) -> Pixel:
        if region == self.exterior_vertex:
            raise KeyError("exterior region has no pixel")
        return (region % self.width, region // self.width)

    def corner_id(self, x: int, y: int) -> int:
        return y * (self.width + 1) + x

    def crack_to_edge(self, crack: Crack) -> int:
        (x1, y1), (x2, y2) = normalize_crack(*crack)
        if x2 == x1 + 1 and y2 == y1:
            return y1 * self.width + x1
        if x2 == x1 and y2 == y1 + 1:
            return self.n_h_cracks + y1 * (self.width + 1) + x1
        raise KeyError(f"not a unit crack: {crack}")

    def edge_to_crack(self, edge: int) -> Crack:
        if edge < self.n_h_cracks:
            y, x = divmod(edge, self.width)
            return ((x, y), (x + 1, y))
        v = edge - self.n_h_cracks
        y, x = divmod(v, self.width + 1)
        return ((x, y), (x, y + 1))

    def crack_between(self, p: Pixel, q: Pixel) -> int:
        """Edge id of the crack shared by two 4-adjacent pixels."""
        (px, py), (qx, qy) = p, q
        if abs(px - qx) + abs(py - qy) != 1:
            raise KeyError(f"pixels {p}, {q} are not 4-adjacent")
        if px == qx:
            y = max(py, qy)
            return self.crack_to_edge(((px, y), (px + 1, y)))
        x = max(px, qx)
        return self.crack_to_edge(((x, py), (x, py + 1)))

    def side_crack(self, p: Pixel, side: str) -> int:
        """Crack on one side (N/E/S/W) of a pixel."""
        x, y = p
        if side == "N":
            return self.crack_to_edge(((x, y), (x + 1, y)))
        if side == "S":
            return self.crack_to_edge(((x, y + 1), (x + 1, y + 1)))
        if side == "W":
            return self.crack_to_edge(((x, y), (x, y + 1)))
        if side == "E":
            return self.crack_to_edge(((x + 1, y), (x + 1, y + 1)))
        raise KeyError(side)


def base_dual_graph(img: BinaryImage) -> tuple[DualGraph, PixelMap]:
    """Mutable base-level structure: one region per pixel plus the exterior,
    one boundary vertex per lattice corner, one edge per crack."""
    W, H = img.width, img.height
    pm = PixelMap(width=W, height=H, exterior_vertex=W * H)
    g = DualGraph()
    g.exterior_region = pm.exterior_vertex
    for y in range(H):
        for x in range(W):
            g.add_region(pm.pixel_region(x, y), img.get(x, y))
    g.add_region(pm.exterior_vertex, 0)

    def region_at(x: int, y: int) -> int:
        if 0 <= x < W and 0 <= y < H:
            return pm.pixel_region(x, y)
        return pm.exterior_vertex

    n_h = pm.n_h_cracks
    # horizontal crack (x,y)-(x+1,y): dart0 east at (x,y), dart1 west at (x+1,y)
    for y in range(H + 1):
        for x in range(W):
            e = y * W + x
            g.add_edge(e, pm.corner_id(x, y), pm.corner_id(x + 1, y),
                       region_at(x, y), region_at(x, y - 1))
    # vertical crack (x,y)-(x,y+1): dart0 south at (x,y), dart1 north at (x,y+1)
    for y in range(H):
        for x in range(W + 1):
            e = n_h + y * (W + 1) + x
            g.add_edge(e, pm.corner_id(x, y), pm.corner_id(x, y + 1),
                       region_at(x - 1, y), region_at(x, y))
    # rotations: east, south, west, north
    for y in range(H + 1):
        for x in range(W + 1):
            v = pm.corner_id(x, y)
            g.add_dual_vertex(v)
            darts = []
            if x < W:
                darts.append(2 * (y * W + x))  # east
            if y < H:
                darts.append(2 * (n_h + y * (W + 1) + x))  # south
            if x > 0:
                darts.append(2 * (y * W + (x - 1)) + 1)  # west
            if y > 0:
                darts.append(2 * (n_h + (y - 1) * (W + 1) + x) + 1)  # north
            g.set_rotation(v, darts)
    return g, pm


def build_base(img: BinaryImage) -> tuple[LevelPair, PixelMap]:
    """Level-0 snapshot of the dual graph pair for an image."""
    g, pm = base_dual_graph(img)
    return g.snapshot(0), pm


@dataclass(frozen=True)
class ObjectComponent:
    """One maximal 4-connected set of foreground pixels."""

    index: int
    pixels: frozenset[Pixel]

    def top_left(self) -> Pixel:
        return min(self.pixels, key=lambda p: (p[1], p[0]))

    def __len__(self):
        return len(self.pixels)


def object_components(img: BinaryImage) -> list[ObjectComponent]:
    """Foreground components, ordered by raster position of their
    top-left-most pixel."""
    labels, n = ndimage.label(img.pixels, structure=FOUR_CONN)
    comps: list[set[Pixel]] = [set() for _ in range(n)]
    ys, xs = np.nonzero(labels)
    for x, y in zip(xs, ys):
        comps[labels[y, x] - 1].add((int(x), int(y)))
    comps.sort(key=lambda c: min((p[1], p[0]) for p in c))
    return [ObjectComponent(i, frozenset(c)) for i, c in enumerate(comps)]


def hole_count_oracle(obj: ObjectComponent) -> int:
    """Holes of one object from the Euler characteristic of its pixel
    complex (union of closed unit squares): holes = 1 - (V - E + F)."""
    verts: set[Corner] = set()
    segs: set[Crack] = set()
    for (x, y) in obj.pixels:
        cs = [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)]
        verts.update(cs)
        segs.add(normalize_crack((x, y), (x + 1, y)))
        segs.add(normalize_crack((x, y + 1), (x + 1, y + 1)))
        segs.add(normalize_crack((x, y), (x, y + 1)))
        segs.add(normalize_crack((x + 1, y), (x + 1, y + 1)))
    chi = len(verts) - len(segs) + len(obj.pixels)
    return 1 - chi


@dataclass(frozen=True)
class Hole:
    """One hole of an object: a bounded component of its complement.

    ``pixels`` is the full complement component (background pixels plus any
    nested foreground of other objects); the contour is the closed crack
    curve separating it from the object.
    """

    index: int
    pixels: frozenset[Pixel]
    contour: frozenset[int]  # base edge ids

    def top_left(self) -> Pixel:
        return min(self.pixels, key=lambda p: (p[1], p[0]))


@dataclass(frozen=True)
class ObjectTopology:
    obj: ObjectComponent
    holes: tuple[Hole, ...]
    outer_contour: frozenset[int]  # base edge ids

    def hole_of_pixel(self, p: Pixel) -> Optional[int]:
        for h in self.holes:
            if p in h.pixels:
                return h.index
        return None


def analyze_object(img: BinaryImage, obj: ObjectComponent, pm: PixelMap) -> ObjectTopology:
    """Split an object's boundary cracks into hole contours and the outer
    contour.  A hole is a complement component (4-connectivity, exterior
    included) that cannot reach the image border without crossing the
    object."""
    W, H = img.width, img.height
    in_obj = np.zeros((H, W), dtype=np.uint8)
    for (x, y) in obj.pixels:
        in_obj[y, x] = 1
    comp = 1 - in_obj
    labels, n = ndimage.label(comp, structure=FOUR_CONN)
    border_labels: set[int] = set()
    if H > 0:
        border_labels.update(int(v) for v in labels[0, :] if v)
        border_labels.update(int(v) for v in labels[-1, :] if v)
    if W > 0:
        border_labels.update(int(v) for v in labels[:, 0] if v)
        border_labels.update(int(v) for v in labels[:, -1] if v)
    hole_pixels: dict[int, set[Pixel]] = {}
    ys, xs = np.nonzero(labels)
    for x, y in zip(xs, ys):
        lab = int(labels[y, x])
        if lab and lab not in border_labels:
            hole_pixels.setdefault(lab, set()).add((int(x), int(y)))
    ordered = sorted(hole_pixels.values(), key=lambda c: min((p[1], p[0]) for p in c))

    pixel_hole: dict[Pixel, int] = {}
    for i, pix in enumerate(ordered):
        for p in pix:
            pixel_hole[p] = i
    hole_contours: list[set[int]] = [set() for _ in ordered]
    outer: set[int] = set()
    for (x, y) in obj.pixels:
        for dx, dy, side in ((0, -1, "N"), (1, 0, "E"), (0, 1, "S"), (-1, 0, "W")):
            nx, ny = x + dx, y + dy
            if (nx, ny) in obj.pixels:
                continue
            e = pm.side_crack((x, y), side)
            if 0 <= nx < W and 0 <= ny < H and (nx, ny) in pixel_hole:
                hole_contours[pixel_hole[(nx, ny)]].add(e)
            else:
                outer.add(e)
    holes = tuple(
        Hole(i, frozenset(pix), frozenset(hole_contours[i])) for i, pix in enumerate(ordered)
    )
    return ObjectTopology(obj=obj, holes=holes, outer_contour=frozenset(outer))


def flood_hole_count(img: BinaryImage, obj: ObjectComponent) -> int:
    """Independent hole count: complement components unreachable from the
    exterior (flood fill over non-object pixels)."""
    topo_holes = 0
    W, H = img.width, img.height
    in_obj = np.zeros((H, W), dtype=np.uint8)
    for (x, y) in obj.pixels:
        in_obj[y, x] = 1
    labels, n = ndimage.label(1 - in_obj, structure=FOUR_CONN)
    border_labels = set()
    border_labels.update(int(v) for v in labels[0, :] if v)
    border_labels.update(int(v) for v in labels[-1, :] if v)
    border_labels.update(int(v) for v in labels[:, 0] if v)
    border_labels.update(int(v) for v in labels[:, -1] if v)
    for lab in range(1, n + 1):
        if lab not in border_labels:
            topo_holes += 1
    return topo_holes
