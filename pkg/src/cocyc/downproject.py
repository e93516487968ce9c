"""Down-projection of cocycles, level by level, to the base.

Going from level k to k-1, the projected set keeps the unique pre-image of
every surviving edge (edge ids are stable, and a merged degree-2 chain is
represented by its survivor, which bounds the same two faces).  It then
adds removed edges from the foreground contraction kernels: orient each
kernel toward its root, count for every kernel vertex how many surviving
cocycle edges bound its face, accumulate the counts from the leaves upward,
and take exactly the tree edges whose child side accumulated an odd count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from cocyc.grid import Crack
from cocyc.homology import HomologyLevel, TopCocycle
from cocyc.pyramid import Pyramid, _kernel_contract_order


class CocycleError(Exception):
    """An edge set violated the per-level cocycle condition."""


@dataclass(frozen=True)
class Cocycle:
    """A set of boundary edges at one pyramid level."""

    level: int
    edges: frozenset[int]
    hole: int


@dataclass
class ProjectionStats:
    """Work counters for complexity reporting."""

    surviving_edges: int = 0
    kernel_edges: int = 0
    levels: int = 0


def check_cocycle(p: Pyramid, c: Cocycle) -> None:
    """Raise unless every foreground face at c's level sees an even number
    of incidences with c (self-loops count once per side)."""
    lp = p.levels[c.level]
    parity: dict[int, int] = {}
    for e in c.edges:
        if e not in lp.edge_regions:
            raise CocycleError(f"edge {e} does not exist at level {c.level}")
        ra, rb = lp.edge_regions[e]
        parity[ra] = parity.get(ra, 0) ^ 1
        parity[rb] = parity.get(rb, 0) ^ 1
    odd = [r for r, bit in parity.items() if bit and lp.region_labels[r] == 1]
    if odd:
        raise CocycleError(
            f"cocycle condition fails at level {c.level}: odd faces {sorted(odd)}"
        )


def down_project_level(a: Cocycle, p: Pyramid, stats: Optional[ProjectionStats] = None) -> Cocycle:
    """Project a cocycle one level down (toward the base)."""
    k = a.level
    if k < 1:
        raise ValueError("cocycle is already at the base level")
    check_cocycle(p, a)
    prev = p.levels[k - 1]
    ops = p.log.levels[k - 1]

    surviving = a.edges
    side_count: dict[int, int] = {}
    for e in surviving:
        ra, rb = prev.edge_regions[e]
        side_count[ra] = side_count.get(ra, 0) + 1
        side_count[rb] = side_count.get(rb, 0) + 1

    added: set[int] = set()
    for kernel in ops.kernels:
        if prev.region_labels[kernel.root] != 1:
            continue
        acc = {v: side_count.get(v, 0) for v in kernel.vertices()}
        for e, child, parent in _kernel_contract_order(kernel):
            if acc[child] & 1:
                added.add(e)
            acc[parent] += acc[child]
        if acc[kernel.root] & 1:
            raise CocycleError(
                f"kernel at region {kernel.root} saw an odd number of cocycle edges"
            )
        if stats is not None:
            stats.kernel_edges += len(kernel.edges)

    if stats is not None:
        stats.surviving_edges += len(surviving)
        stats.levels += 1

    result = Cocycle(level=k - 1, edges=frozenset(surviving | added), hole=a.hole)
    check_cocycle(p, result)
    return result


def down_project_to_base(
    p: Pyramid,
    t: TopCocycle,
    h: HomologyLevel,
    stats: Optional[ProjectionStats] = None,
) -> Cocycle:
    """Project a basis pair {hole loop, outer loop} from the top to level 0."""
    alpha = h.loop_preimage[t.alpha]
    beta = h.loop_preimage[t.beta]
    c = Cocycle(level=p.height, edges=frozenset((alpha, beta)), hole=t.hole)
    while c.level > 0:
        c = down_project_level(c, p, stats=stats)
    return c


def cocycle_cracks(p: Pyramid, c: Cocycle) -> list[Crack]:
    """The cocycle's edges as lexicographically sorted cracks.

    Edge ids are base crack ids at every level, so this also renders
    intermediate-level cocycles by their surviving representatives.
    """
    return sorted(p.pixel_map.edge_to_crack(e) for e in c.edges)
