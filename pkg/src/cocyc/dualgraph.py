"""Dual pair of planar graphs stored as one dart structure.

A level of the pyramid is a boundary graph (vertices are points where
region borders meet, edges are border segments) together with its planar
dual, the region adjacency graph.  Both are kept in a single rotation
system: each edge owns two darts (``edge_id * 2 + side``), ``alpha(d) =
d ^ 1`` swaps ends, and sigma orbits (doubly linked ``next_dart`` /
``prev_dart``) give the cyclic dart order around every boundary-graph
vertex.  Faces of the boundary graph are the orbits of ``phi(d) =
next_dart[d ^ 1]``; the region to the walk side of a dart is recorded per
dart, so the region graph never needs separate storage: region-graph
vertices are boundary faces, region-graph edges are the same edge ids.

The two pyramid operations are exact mirror images here:

* contracting a region-graph edge removes the boundary edge (splices its
  darts out of their sigma orbits) and merges the two regions;
* contracting a boundary edge (simplification) merges its two endpoint
  orbits and removes the region-graph counterpart.

Edge ids are stable: an edge alive at level k has the same id it had at
level 0, which makes pre-image lookups during down-projection trivial.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class GraphStateError(Exception):
    """An operation would break the planar dual-pair invariants."""


@dataclass(frozen=True)
class LevelPair:
    """Immutable snapshot of one pyramid level (both graphs at once)."""

    index: int
    regions: tuple[int, ...]
    region_labels: dict[int, int]
    edges: tuple[int, ...]
    edge_regions: dict[int, tuple[int, int]]
    edge_dualv: dict[int, tuple[int, int]]
    dual_vertices: tuple[int, ...]
    rotations: dict[int, tuple[int, ...]]
    face_walks: dict[int, tuple[int, ...]]
    exterior_region: int

    def edge_count(self) -> int:
        return len(self.edges)

    def region_of_dart(self, d: int) -> int:
        return self.edge_regions[d >> 1][d & 1]


class DualGraph:
    """Mutable working structure for building pyramid levels."""

    def __init__(self):
        self.next_dart: dict[int, int] = {}
        self.prev_dart: dict[int, int] = {}
        self.origin: dict[int, int] = {}
        self.region_side: dict[int, int] = {}
        self.region_parent: dict[int, int] = {}
        self.region_label: dict[int, int] = {}
        self.deg: dict[int, int] = {}
        self.rep_dart: dict[int, int] = {}
        self.edges_alive: set[int] = set()
        self.exterior_region: int = -1

    # -- construction ------------------------------------------------

    def add_dual_vertex(self, v: int) -> None:
        self.deg[v] = 0

    def add_region(self, r: int, label: int) -> None:
        self.region_parent[r] = r
        self.region_label[r] = label

    def add_edge(self, e: int, dualv0: int, dualv1: int, region0: int, region1: int) -> None:
        """Register an edge; darts must afterwards be placed with set_rotation."""
        d0, d1 = 2 * e, 2 * e + 1
        self.origin[d0] = dualv0
        self.origin[d1] = dualv1
        self.region_side[d0] = region0
        self.region_side[d1] = region1
        self.edges_alive.add(e)

    def set_rotation(self, v: int, darts: list[int]) -> None:
        """Install the cyclic dart order around dual vertex v."""
        n = len(darts)
        self.deg[v] = n
        if n == 0:
            return
        self.rep_dart[v] = darts[0]
        for i, d in enumerate(darts):
            self.next_dart[d] = darts[(i + 1) % n]
            self.prev_dart[d] = darts[(i - 1) % n]

    # -- queries -----------------------------------------------------

    def find_region(self, r: int) -> int:
        parent = self.region_parent
        root = r
        while parent[root] != root:
            root = parent[root]
        while parent[r] != root:
            parent[r], r = root, parent[r]
        return root

    def edge_regions(self, e: int) -> tuple[int, int]:
        return (self.find_region(self.region_side[2 * e]),
                self.find_region(self.region_side[2 * e + 1]))

    def edge_dualv(self, e: int) -> tuple[int, int]:
        return (self.origin[2 * e], self.origin[2 * e + 1])

    def label_of(self, region: int) -> int:
        return self.region_label[self.find_region(region)]

    def orbit_from(self, d: int):
        """Darts around origin(d), starting at d."""
        cur = d
        while True:
            yield cur
            cur = self.next_dart[cur]
            if cur == d:
                return

    def darts_at(self, v: int) -> list[int]:
        if self.deg.get(v, 0) == 0:
            return []
        return list(self.orbit_from(self.rep_dart[v]))

    def live_regions(self) -> set[int]:
        return {self.find_region(r) for r in self.region_parent}

    # -- mutation ----------------------------------------------------

    def _splice_out(self, d: int) -> int:
        v = self.origin[d]
        p, n = self.prev_dart[d], self.next_dart[d]
        if p == d:
            del self.rep_dart[v]
        else:
            self.next_dart[p] = n
            self.prev_dart[n] = p
            if self.rep_dart[v] == d:
                self.rep_dart[v] = n
        del self.next_dart[d], self.prev_dart[d], self.origin[d]
        self.deg[v] -= 1
        return v

    def contract_primal_edge(self, e: int, root_region: int) -> tuple[int, int]:
        """Merge the two regions of e (removal of e in the boundary graph).

        Returns (absorbed_region, surviving_region).
        """
        ra, rb = self.edge_regions(e)
        if ra == rb:
            raise GraphStateError(f"edge {e} is a region self-loop; cannot contract")
        root = self.find_region(root_region)
        if root not in (ra, rb):
            raise GraphStateError(f"root {root_region} is not an endpoint of edge {e}")
        other = rb if root == ra else ra
        if self.region_label[other] != self.region_label[root]:
            raise GraphStateError(f"edge {e} joins differently labeled regions")
        self.region_parent[other] = root
        self._splice_out(2 * e)
        self._splice_out(2 * e + 1)
        del self.region_side[2 * e], self.region_side[2 * e + 1]
        self.edges_alive.discard(e)
        return other, root

    def contract_dual_edge(self, e: int) -> tuple[int, int]:
        """Merge the two boundary endpoints of e (removal of e in the region graph).

        Returns (absorbed_vertex, surviving_vertex).  Survivor is the higher
        degree endpoint (ties keep the smaller id) so relabeling walks the
        shorter orbit.
        """
        d0, d1 = 2 * e, 2 * e + 1
        u, w = self.origin[d0], self.origin[d1]
        if u == w:
            raise GraphStateError(f"edge {e} is a boundary self-loop; cannot contract")
        if (self.deg[u], -u) < (self.deg[w], -w):
            u, w, d0, d1 = w, u, d1, d0
        for d in list(self.orbit_from(d1)):
            self.origin[d] = u
        p0, n0 = self.prev_dart[d0], self.next_dart[d0]
        p1, n1 = self.prev_dart[d1], self.next_dart[d1]
        u_single = p0 == d0
        w_single = p1 == d1
        if u_single and w_single:
            del self.rep_dart[u]
        elif u_single:
            self.next_dart[p1] = n1
            self.prev_dart[n1] = p1
            self.rep_dart[u] = n1
        elif w_single:
            self.next_dart[p0] = n0
            self.prev_dart[n0] = p0
            if self.rep_dart[u] == d0:
                self.rep_dart[u] = n0
        else:
            self.next_dart[p0] = n1
            self.prev_dart[n1] = p0
            self.next_dart[p1] = n0
            self.prev_dart[n0] = p1
            if self.rep_dart[u] == d0:
                self.rep_dart[u] = n0
        for d in (d0, d1):
            del self.next_dart[d], self.prev_dart[d], self.origin[d], self.region_side[d]
        self.deg[u] = self.deg[u] + self.deg[w] - 2
        del self.deg[w]
        self.rep_dart.pop(w, None)
        self.edges_alive.discard(e)
        return w, u

    # -- faces -------------------------------------------------------

    def phi(self, d: int) -> int:
        return self.prev_dart[d ^ 1]

    def face_walk_from(self, d: int) -> list[int]:
        walk = [d]
        cur = self.phi(d)
        while cur != d:
            walk.append(cur)
            cur = self.phi(cur)
        return walk

    def face_walks(self) -> dict[int, tuple[int, ...]]:
        """One boundary walk per region; regions without darts map to ()."""
        walks: dict[int, tuple[int, ...]] = {}
        seen: set[int] = set()
        for d in self.origin:
            if d in seen:
                continue
            walk = self.face_walk_from(d)
            seen.update(walk)
            region = self.find_region(self.region_side[d])
            for dd in walk:
                if self.find_region(self.region_side[dd]) != region:
                    raise GraphStateError("face walk crosses regions; rotation corrupt")
            if region in walks:
                raise GraphStateError(f"region {region} has two boundary walks")
            walks[region] = tuple(walk)
        for r in self.live_regions():
            walks.setdefault(r, ())
        return walks

    # -- snapshot / restore -------------------------------------------

    def snapshot(self, index: int) -> LevelPair:
        regions = tuple(sorted(self.live_regions()))
        edges = tuple(sorted(self.edges_alive))
        rotations = {v: tuple(self.darts_at(v)) for v in sorted(self.deg)}
        return LevelPair(
            index=index,
            regions=regions,
            region_labels={r: self.region_label[r] for r in regions},
            edges=edges,
            edge_regions={e: self.edge_regions(e) for e in edges},
            edge_dualv={e: self.edge_dualv(e) for e in edges},
            dual_vertices=tuple(sorted(self.deg)),
            rotations=rotations,
            face_walks=self.face_walks(),
            exterior_region=self.find_region(self.exterior_region),
        )

    @classmethod
    def from_level_pair(cls, lp: LevelPair) -> "DualGraph":
        g = cls()
        for r in lp.regions:
            g.add_region(r, lp.region_labels[r])
        for v in lp.dual_vertices:
            g.add_dual_vertex(v)
        for e in lp.edges:
            u, w = lp.edge_dualv[e]
            ra, rb = lp.edge_regions[e]
            g.add_edge(e, u, w, ra, rb)
        for v in lp.dual_vertices:
            g.set_rotation(v, list(lp.rotations.get(v, ())))
        g.exterior_region = lp.exterior_region
        return g
