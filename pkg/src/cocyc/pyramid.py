"""Irregular dual graph pyramid construction.

Each level transition does, in order:

1. region merging: contract the selected same-label kernels in the region
   graph (removal of the counterpart edges in the boundary graph);
2. pendant pruning: contract boundary edges hanging at degree-1 vertices
   (these are always region self-loops bounding empty faces);
3. chain simplification: every maximal run of degree-2 boundary vertices
   collapses to one surviving edge; the survivor is the lowest edge id in
   fast mode and the minimum of the boundary-edge order in invariant mode.

Every operation is logged so that receptive fields, equivalent contraction
kernels and pre-images can be reconstructed, and so a replay of the log
reproduces every level exactly.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from cocyc.dualgraph import DualGraph, GraphStateError, LevelPair
from cocyc.grid import (
    BinaryImage,
    ObjectComponent,
    ObjectTopology,
    PixelMap,
    analyze_object,
    base_dual_graph,
    object_components,
)
from cocyc.invariant import DistanceField, StableTree, anchor_vertex, distance_field, min_edge, stable_tree

KernelEdge = tuple[int, int, int]  # (edge id, child region, parent region)

_M64 = (1 << 64) - 1


@dataclass(frozen=True)
class ContractionKernel:
    """A tree of same-label region edges contracted in one level step."""

    level: int
    root: int
    edges: tuple[KernelEdge, ...]

    def vertices(self) -> set[int]:
        vs = {self.root}
        for _, c, p in self.edges:
            vs.add(c)
            vs.add(p)
        return vs


@dataclass
class ChainMerge:
    survivor: int
    absorbed: tuple[int, ...]


@dataclass
class LevelOps:
    """Everything that happened between level `level` and `level + 1`."""

    level: int
    kernels: list[ContractionKernel] = field(default_factory=list)
    pruned: list[int] = field(default_factory=list)
    chains: list[ChainMerge] = field(default_factory=list)
    ops: list[tuple] = field(default_factory=list)
    merged_regions: dict[int, int] = field(default_factory=dict)

    def absorbed_to_survivor(self) -> dict[int, int]:
        out = {}
        for cm in self.chains:
            for e in cm.absorbed:
                out[e] = cm.survivor
        return out


@dataclass
class OperationLog:
    levels: list[LevelOps] = field(default_factory=list)


def _priority(seed: int, level_index: int, e: int) -> int:
    """Seeded splittable pseudo-random edge priority (splitmix-style)."""
    x = (seed * 0x9E3779B97F4A7C15 + level_index * 0xBF58476D1CE4E5B9 + e * 0x94D049BB133111EB + 0xD6E8FEB86659FD93) & _M64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _M64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _M64
    x ^= x >> 31
    return x


def _orient_kernel(level: int, pairs: list[tuple[int, int, int]], root: int) -> ContractionKernel:
    """Orient kernel edges (e, u, v) child-to-parent toward the root."""
    adj: dict[int, list[tuple[int, int]]] = {}
    for e, u, v in pairs:
        adj.setdefault(u, []).append((e, v))
        adj.setdefault(v, []).append((e, u))
    oriented: list[KernelEdge] = []
    seen = {root}
    stack = [root]
    while stack:
        node = stack.pop()
        for e, other in adj.get(node, ()):
            if other in seen:
                continue
            seen.add(other)
            oriented.append((e, other, node))
            stack.append(other)
    if len(oriented) != len(pairs):
        raise GraphStateError("kernel edges do not form a tree containing the root")
    return ContractionKernel(level=level, root=root, edges=tuple(oriented))


def select_kernels(
    level: LevelPair,
    labels: Optional[dict[int, int]] = None,
    mode: str = "fast",
    seed: int = 0,
    eligible_fg: Optional[set[int]] = None,
    root_chooser: Optional[Callable[[list[int]], int]] = None,
) -> list[ContractionKernel]:
    """Vertex-disjoint same-label contraction trees for one level step.

    Every region proposes its best incident eligible edge; mutually proposed
    edges are matched, and regions left out attach to an adjacent matched
    pair through their own best edge.  Kernel depth is therefore at most 2,
    and whenever any eligible edge exists the globally best one is matched,
    so the pyramid keeps shrinking until no same-label edge remains.

    In fast mode "best" is a seeded pseudo-random priority; in invariant
    mode it is the plain edge id and foreground edges are restricted to the
    marked stable-tree set (``eligible_fg``).
    """
    if labels is None:
        labels = level.region_labels
    if mode not in ("fast", "invariant"):
        raise ValueError(f"unknown mode {mode!r}")

    def prio(e: int) -> int:
        return e if mode == "invariant" else _priority(seed, level.index, e)

    incident: dict[int, list[tuple[int, int, int]]] = {}
    for e in level.edges:
        ra, rb = level.edge_regions[e]
        if ra == rb or labels[ra] != labels[rb]:
            continue
        if mode == "invariant" and labels[ra] == 1 and (eligible_fg is None or e not in eligible_fg):
            continue
        pe = prio(e)
        incident.setdefault(ra, []).append((pe, e, rb))
        incident.setdefault(rb, []).append((pe, e, ra))

    pick: dict[int, tuple[int, int, int]] = {
        r: min(cands) for r, cands in incident.items()
    }
    matched: dict[int, tuple[int, int]] = {}  # edge -> (a, b)
    in_match: dict[int, int] = {}  # region -> matched edge
    for r, (pe, e, other) in sorted(pick.items()):
        if r in in_match or other in in_match:
            continue
        if pick.get(other, (None, None, None))[1] == e:
            matched[e] = (r, other)
            in_match[r] = e
            in_match[other] = e

    attachments: dict[int, list[tuple[int, int, int]]] = {}  # matched edge -> [(e, child, parent)]
    for r, cands in sorted(incident.items()):
        if r in in_match:
            continue
        best = None
        for pe, e, other in sorted(cands):
            if other in in_match:
                best = (e, r, other)
                break
        if best is not None:
            attachments.setdefault(in_match[best[2]], []).append(best)

    kernels = []
    for e in sorted(matched):
        a, b = matched[e]
        pairs = [(e, a, b)] + attachments.get(e, [])
        verts = sorted({a, b} | {c for _, c, _ in attachments.get(e, [])})
        root = root_chooser(verts) if root_chooser else min(a, b)
        kernels.append(_orient_kernel(level.index, pairs, root))
    return kernels


def _kernel_contract_order(kernel: ContractionKernel) -> list[KernelEdge]:
    """Kernel edges ordered children-before-parents (leaves first)."""
    depth = {kernel.root: 0}
    parent_of = {c: p for _, c, p in kernel.edges}
    edge_of = {c: (e, c, p) for e, c, p in kernel.edges}

    def d(v: int) -> int:
        if v not in depth:
            depth[v] = d(parent_of[v]) + 1
        return depth[v]

    return [edge_of[c] for c in sorted(parent_of, key=lambda c: (-d(c), c))]


def _walk_dir(g: DualGraph, start_v: int, d: int):
    """Follow a degree-2 chain starting along dart d; returns (edges, closed)."""
    edges = []
    cur = d
    while True:
        edges.append(cur >> 1)
        u = g.origin[cur ^ 1]
        if u == start_v:
            return edges, True
        if g.deg[u] != 2:
            return edges, False
        du = g.darts_at(u)
        nxt = du[0] if du[0] != (cur ^ 1) else du[1]
        if (nxt >> 1) == (cur >> 1):
            return edges, False
        cur = nxt


def _collect_chain(g: DualGraph, v: int) -> list[int]:
    d0, d1 = g.darts_at(v)
    fwd, closed = _walk_dir(g, v, d0)
    if closed:
        return fwd
    back, _ = _walk_dir(g, v, d1)
    return list(reversed(back)) + fwd


def _apply_level(
    g: DualGraph,
    kernels: list[ContractionKernel],
    level_index: int,
    survivor_fn: Callable[[DualGraph, list[int]], int],
) -> LevelOps:
    ops = LevelOps(level=level_index)
    ops.kernels = list(kernels)

    # 1. region merging
    for kernel in kernels:
        for e, child, parent in _kernel_contract_order(kernel):
            g.contract_primal_edge(e, root_region=parent)
            ops.ops.append(("contract", e, child, parent))
            ops.merged_regions[child] = parent

    # 2. pendant pruning
    pending = [v for v, dg in g.deg.items() if dg == 1]
    heapq.heapify(pending)
    while pending:
        v = heapq.heappop(pending)
        if g.deg.get(v) != 1:
            continue
        e = g.rep_dart[v] >> 1
        ra, rb = g.edge_regions(e)
        if ra != rb:
            raise GraphStateError(f"pendant boundary edge {e} is not a region self-loop")
        _, kept = g.contract_dual_edge(e)
        ops.ops.append(("prune", e))
        ops.pruned.append(e)
        if g.deg.get(kept) == 1:
            heapq.heappush(pending, kept)

    # 3. degree-2 chain simplification
    for v in sorted(g.deg):
        if g.deg.get(v) != 2:
            continue
        darts = g.darts_at(v)
        if not darts or (darts[0] >> 1) == (darts[1] >> 1):
            continue  # lone self-loop vertex: nothing to merge
        chain = _collect_chain(g, v)
        pairs = {g.edge_regions(e) for e in chain}
        if len({tuple(sorted(p)) for p in pairs}) != 1:
            raise GraphStateError("degree-2 chain crosses region pairs")
        survivor = survivor_fn(g, chain)
        absorbed = []
        for e in chain:
            if e == survivor:
                continue
            g.contract_dual_edge(e)
            ops.ops.append(("chain", e, survivor))
            absorbed.append(e)
        if absorbed:
            ops.chains.append(ChainMerge(survivor=survivor, absorbed=tuple(absorbed)))

    # sanity: simplification is complete
    for v, dg in g.deg.items():
        if dg == 0 and g.edges_alive:
            raise GraphStateError(f"boundary vertex {v} was stranded")
        if dg == 1:
            raise GraphStateError(f"pendant vertex {v} survived simplification")
    return ops


def contract_and_simplify(
    level: LevelPair,
    kernels: list[ContractionKernel],
    survivor_fn: Optional[Callable[[DualGraph, list[int]], int]] = None,
) -> tuple[LevelPair, LevelOps]:
    """Functional form of one level transition (snapshot in, snapshot out)."""
    g = DualGraph.from_level_pair(level)
    fn = survivor_fn or (lambda _g, chain: min(chain))
    ops = _apply_level(g, kernels, level.index, fn)
    return g.snapshot(level.index + 1), ops


@dataclass
class Pyramid:
    """The full stack of levels plus everything needed to replay it."""

    image: BinaryImage
    mode: str
    seed: int
    pixel_map: PixelMap
    levels: list[LevelPair]
    log: OperationLog
    objects: list[ObjectComponent]
    topologies: list[ObjectTopology]
    obj_of_base_region: dict[int, int]
    fields: dict[int, DistanceField] = field(default_factory=dict)
    trees: dict[int, StableTree] = field(default_factory=dict)

    @property
    def height(self) -> int:
        return len(self.levels) - 1

    def top(self) -> LevelPair:
        return self.levels[-1]

    def region_at_level(self, base_region: int, k: int) -> int:
        r = base_region
        for lev in range(min(k, self.height)):
            merged = self.log.levels[lev].merged_regions
            while r in merged:
                r = merged[r]
        return r

    def top_region_of_object(self, obj_index: int) -> int:
        px = next(iter(self.objects[obj_index].pixels))
        return self.region_at_level(self.pixel_map.pixel_region(*px), self.height)

    def object_of_region(self, region: int) -> Optional[int]:
        return self.obj_of_base_region.get(region)

    def receptive_field(self, top_region: int) -> set[int]:
        """Base regions merged into a top-level region."""
        if top_region not in self.top().regions:
            raise KeyError(f"{top_region} is not a top-level region")
        s = {top_region}
        for ops in reversed(self.log.levels):
            for kernel in ops.kernels:
                if kernel.root in s:
                    for _, child, _ in kernel.edges:
                        s.add(child)
        return s

    def eck(self, top_region: int) -> set[int]:
        """Equivalent contraction kernel: the accumulated spanning tree (as
        base edge ids) whose contraction produced a top-level region."""
        if top_region not in self.top().regions:
            raise KeyError(f"{top_region} is not a top-level region")
        s = {top_region}
        edges: set[int] = set()
        for ops in reversed(self.log.levels):
            for kernel in ops.kernels:
                if kernel.root in s:
                    for e, child, _ in kernel.edges:
                        edges.add(e)
                        s.add(child)
        return edges

    def dump_level(self, k: int) -> str:
        """Stable text dump of one level (plus the ops that produced it)."""
        lp = self.levels[k]
        pm = self.pixel_map
        lines = [f"level {k}"]
        for r in lp.regions:
            lines.append(f"region {r} label={lp.region_labels[r]}")
        for v in lp.dual_vertices:
            rot = ",".join(str(d) for d in lp.rotations.get(v, ()))
            lines.append(f"dualv {v} rotation=({rot})")
        for e in lp.edges:
            ra, rb = lp.edge_regions[e]
            u, w = lp.edge_dualv[e]
            crack = pm.edge_to_crack(e)
            lines.append(f"edge {e} regions=({ra},{rb}) corners=({u},{w}) crack={crack}")
        if k > 0:
            for op in self.log.levels[k - 1].ops:
                lines.append("op " + " ".join(str(x) for x in op))
        return "\n".join(lines) + "\n"


def _invariant_survivor_factory(pyr_state: dict):
    fields = pyr_state["fields"]
    pending = pyr_state["pending_marked"]
    obj_of = pyr_state["obj_of_base_region"]
    pm = pyr_state["pixel_map"]

    def survivor(g: DualGraph, chain: list[int]) -> int:
        ra, rb = g.edge_regions(chain[0])
        la, lb = g.region_label[ra], g.region_label[rb]
        fg = [r for r, lab in ((ra, la), (rb, lb)) if lab == 1]
        if len(fg) == 2:
            marked = [e for e in chain if e in pending]
            if marked:
                if len(marked) > 1:
                    raise GraphStateError("two pending stable-tree edges in one chain")
                return marked[0]
        if fg:
            df = fields[obj_of[fg[0]]]
            return min_edge(chain, df, pm)
        return min(chain)

    return survivor


def build_pyramid(
    img: BinaryImage,
    mode: str = "fast",
    seed: int = 0,
    anchors: Optional[dict[int, tuple[int, int]]] = None,
    kernel_selector: Optional[Callable[[LevelPair], list[ContractionKernel]]] = None,
    survivor_fn: Optional[Callable[[DualGraph, list[int]], int]] = None,
    max_levels: Optional[int] = None,
) -> Pyramid:
    """Build the full pyramid for an image.

    ``anchors`` optionally pins the invariant-mode anchor pixel per object
    index.  ``kernel_selector`` and ``survivor_fn`` override the per-level
    selection (used by the order/rooting independence tests).
    """
    if mode not in ("fast", "invariant"):
        raise ValueError(f"unknown mode {mode!r}")
    g, pm = base_dual_graph(img)
    objects = object_components(img)
    topologies = [analyze_object(img, o, pm) for o in objects]
    obj_of_base_region = {
        pm.pixel_region(*p): o.index for o in objects for p in o.pixels
    }

    fields: dict[int, DistanceField] = {}
    trees: dict[int, StableTree] = {}
    eligible_fg: Optional[set[int]] = None
    pending_marked: set[int] = set()
    if mode == "invariant":
        eligible_fg = set()
        for o in objects:
            s = anchors.get(o.index) if anchors else None
            if s is None:
                s = anchor_vertex(o)
            df = distance_field(o, s)
            fields[o.index] = df
            tree = stable_tree(o, df, pm)
            trees[o.index] = tree
            eligible_fg |= tree.edges
        pending_marked = set(eligible_fg)

    state = {
        "fields": fields,
        "pending_marked": pending_marked,
        "obj_of_base_region": obj_of_base_region,
        "pixel_map": pm,
    }
    if survivor_fn is None:
        if mode == "invariant":
            survivor_fn = _invariant_survivor_factory(state)
        else:
            survivor_fn = lambda _g, chain: min(chain)

    levels = [g.snapshot(0)]
    log = OperationLog()
    limit = max_levels if max_levels is not None else len(levels[0].edges) + 2
    while len(levels) <= limit:
        lp = levels[-1]
        if kernel_selector is not None:
            kernels = kernel_selector(lp)
        else:
            kernels = select_kernels(lp, mode=mode, seed=seed, eligible_fg=eligible_fg)
        if not kernels:
            break
        ops = _apply_level(g, kernels, lp.index, survivor_fn)
        for kernel in kernels:
            for e, _, _ in kernel.edges:
                pending_marked.discard(e)
        levels.append(g.snapshot(lp.index + 1))
        log.levels.append(ops)
    else:
        raise GraphStateError("pyramid construction did not terminate")

    return Pyramid(
        image=img,
        mode=mode,
        seed=seed,
        pixel_map=pm,
        levels=levels,
        log=log,
        objects=objects,
        topologies=topologies,
        obj_of_base_region=obj_of_base_region,
        fields=fields,
        trees=trees,
    )


def euler_check(level: LevelPair) -> bool:
    """Validity of one level: V - E + F = 2 on the sphere for both graphs,
    rotation/face consistency, one-to-one edge correspondence, and a
    connected boundary graph."""
    V = len(level.dual_vertices)
    E = len(level.edges)
    F = len(level.regions)
    if V - E + F != 2:
        return False
    darts = set()
    for v in level.dual_vertices:
        darts.update(level.rotations.get(v, ()))
    expect = {2 * e for e in level.edges} | {2 * e + 1 for e in level.edges}
    if darts != expect:
        return False
    walk_darts: set[int] = set()
    for region, walk in level.face_walks.items():
        for d in walk:
            if level.edge_regions.get(d >> 1, (None, None))[d & 1] != region:
                return False
            walk_darts.add(d)
    if walk_darts != expect:
        return False
    if set(level.face_walks) != set(level.regions):
        return False
    # boundary graph connectivity
    if E:
        adj: dict[int, set[int]] = {}
        for e in level.edges:
            u, w = level.edge_dualv[e]
            adj.setdefault(u, set()).add(w)
            adj.setdefault(w, set()).add(u)
        start = level.dual_vertices[0]
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in adj.get(u, ()):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != set(level.dual_vertices):
            return False
    elif V != 1:
        return False
    return True
