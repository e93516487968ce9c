"""Homology-generator level: one vertex, one self-loop per hole plus one
for the outer boundary.

Starting from the top pyramid level, the closure of an object's face (its
boundary walk) is collapsed by contracting a spanning tree of that closure.
What survives is exactly one self-loop per hole contour and one on the
outer contour; the basis of representative 1-cocycles pairs each hole loop
with the outer loop.

The spanning tree is the complement of one "keeper" edge per contour.
Contours are edge-disjoint closed walks that generate the closure's cycle
space, so removing exactly one edge from each leaves an acyclic spanning
subgraph; equivalently, this realizes the sort-then-contract-in-inverse-
order tree construction without needing a total order on all edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from cocyc.dualgraph import GraphStateError
from cocyc.grid import ObjectComponent
from cocyc.invariant import min_edge
from cocyc.pyramid import Pyramid


@dataclass(frozen=True)
class SelfLoop:
    """A surviving self-loop of the collapsed level."""

    edge: int  # edge id at the top level (pre-image of the loop)
    kind: str  # "hole" or "outer"
    hole: Optional[int]  # hole index when kind == "hole"


@dataclass(frozen=True)
class HomologyLevel:
    object_index: int
    base_vertex: int
    loops: tuple[SelfLoop, ...]
    spanning_tree: tuple[int, ...]
    loop_preimage: dict[int, int]  # loop edge -> surviving top-level edge

    def hole_loops(self) -> list[SelfLoop]:
        return [l for l in self.loops if l.kind == "hole"]

    def outer_loop(self) -> SelfLoop:
        for l in self.loops:
            if l.kind == "outer":
                return l
        raise GraphStateError("missing outer loop")


@dataclass(frozen=True)
class TopCocycle:
    """The pair {hole loop, outer loop} for one hole."""

    hole: int
    alpha: int  # top-level edge id of the hole loop
    beta: int  # top-level edge id of the outer loop

    @property
    def edges(self) -> frozenset[int]:
        return frozenset((self.alpha, self.beta))


def _object_index(p: Pyramid, obj: Union[int, ObjectComponent]) -> int:
    if isinstance(obj, ObjectComponent):
        return obj.index
    return int(obj)


def build_homology_level(p: Pyramid, obj: Union[int, ObjectComponent]) -> HomologyLevel:
    """Collapse the object's top-level boundary to a single vertex.

    Hole loops are numbered by raster order of the enclosed complement
    components; the outer loop prefers an edge on the boundary with the
    background region that contains the exterior.
    """
    idx = _object_index(p, obj)
    topo = p.topologies[idx]
    top = p.top()
    top_region = p.top_region_of_object(idx)

    walk = top.face_walks[top_region]
    closure_edges = sorted({d >> 1 for d in walk})
    closure_vertices: set[int] = set()
    for e in closure_edges:
        u, w = top.edge_dualv[e]
        closure_vertices.add(u)
        closure_vertices.add(w)

    hole_contours: dict[int, list[int]] = {}
    outer_contour: list[int] = []
    bridges: list[int] = []
    for e in closure_edges:
        ra, rb = top.edge_regions[e]
        if ra == rb:
            bridges.append(e)
            continue
        other = rb if ra == top_region else ra
        if top.region_labels[other] != 0:
            raise GraphStateError(f"object boundary edge {e} faces a foreground region")
        if other == p.pixel_map.exterior_vertex or other == top.exterior_region:
            hole = None
        else:
            hole = topo.hole_of_pixel(p.pixel_map.region_pixel(other))
        if hole is None:
            outer_contour.append(e)
        else:
            hole_contours.setdefault(hole, []).append(e)

    if set(hole_contours) != set(range(len(topo.holes))):
        raise GraphStateError(
            f"object {idx}: hole contours at top {sorted(hole_contours)} do not "
            f"match hole count {len(topo.holes)}"
        )
    if not outer_contour:
        raise GraphStateError(f"object {idx} has no outer boundary at the top level")

    def keeper_of(contour: list[int]) -> int:
        if p.mode == "invariant":
            return min_edge(contour, p.fields[idx], p.pixel_map)
        return min(contour)

    keepers: dict[int, int] = {h: keeper_of(es) for h, es in hole_contours.items()}
    exterior_edges = [
        e
        for e in outer_contour
        if top.exterior_region in top.edge_regions[e]
    ]
    outer_keeper = keeper_of(exterior_edges if exterior_edges else outer_contour)

    keeper_set = {outer_keeper} | set(keepers.values())
    tree = [e for e in closure_edges if e not in keeper_set]

    # the tree must be a spanning tree of the closure
    if len(tree) != len(closure_vertices) - 1:
        raise GraphStateError(
            f"object {idx}: closure tree has {len(tree)} edges for "
            f"{len(closure_vertices)} vertices"
        )
    parent = {v: v for v in closure_vertices}

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in tree:
        u, w = top.edge_dualv[e]
        ru, rw = find(u), find(w)
        if ru == rw:
            raise GraphStateError(f"object {idx}: closure tree contains a cycle at edge {e}")
        parent[ru] = rw

    base_vertex = min(closure_vertices)
    loops = [
        SelfLoop(edge=keepers[h], kind="hole", hole=h) for h in sorted(keepers)
    ] + [SelfLoop(edge=outer_keeper, kind="outer", hole=None)]
    return HomologyLevel(
        object_index=idx,
        base_vertex=base_vertex,
        loops=tuple(loops),
        spanning_tree=tuple(tree),
        loop_preimage={l.edge: l.edge for l in loops},
    )


def cocycle_basis(h: HomologyLevel) -> list[TopCocycle]:
    """One {hole loop, outer loop} pair per hole; empty for hole-free objects."""
    hole_loops = h.hole_loops()
    if not hole_loops:
        return []
    beta = h.outer_loop().edge
    return [TopCocycle(hole=l.hole, alpha=l.edge, beta=beta) for l in hole_loops]
