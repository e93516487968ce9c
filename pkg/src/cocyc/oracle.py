"""Independent GF(2) verification layer.

Builds the explicit cell complex of one object at any pyramid level (its
faces, their boundary edges and vertices) and realizes the boundary
operators as bit matrices.  Everything the pipeline claims about cocycles
is checkable here by plain linear algebra over GF(2): cocycle-hood,
cohomologousness, Betti numbers, basis independence and hole blocking.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from cocyc import gf2
from cocyc.grid import ObjectComponent, Pixel
from cocyc.pyramid import Pyramid


@dataclass
class BoundaryComplex:
    """Cell complex of one object at one level, with GF(2) boundary maps.

    ``d1`` maps edges to vertices, ``d2`` maps faces to edges; ``d1t`` is
    the transpose of d1 (the coboundary of 0-cochains acting on edges),
    built directly from the incidences so no transposition pass is needed.
    """

    level: int
    cells0: tuple[int, ...]
    cells1: tuple[int, ...]
    cells2: tuple[int, ...]
    d1: gf2.Gf2Matrix
    d1t: gf2.Gf2Matrix
    d2: gf2.Gf2Matrix
    edge_index: dict[int, int]
    vertex_index: dict[int, int]
    face_index: dict[int, int]
    face_boundary: dict[int, tuple[int, ...]]  # face -> edges with odd incidence
    edge_odd_faces: dict[int, tuple[int, ...]]

    def edge_vector(self, edges: Iterable[int]) -> gf2.Gf2Vector:
        idx = []
        for e in edges:
            if e not in self.edge_index:
                raise KeyError(f"edge {e} is not a 1-cell of this complex")
            idx.append(self.edge_index[e])
        return gf2.Gf2Vector.from_indices(len(self.cells1), idx)

    def dd_is_zero(self) -> bool:
        for f in self.cells2:
            chain = self.edge_vector(self.face_boundary[f])
            if not self.d1.matvec(chain).is_zero():
                return False
        return True


def boundary_complex(p: Pyramid, obj: Union[int, ObjectComponent], level: int) -> BoundaryComplex:
    """Cell complex of the object at a level: its faces, plus all edges and
    vertices needed to bound them.  An edge whose two sides are the same
    face contributes both incidences (zero mod 2) to that face's boundary."""
    idx = obj.index if isinstance(obj, ObjectComponent) else int(obj)
    if not 0 <= level <= p.height:
        raise IndexError(f"level {level} outside pyramid")
    pm = p.pixel_map
    lp = p.levels[level]
    faces = sorted(
        {p.region_at_level(pm.pixel_region(*px), level) for px in p.objects[idx].pixels}
    )
    face_set = set(faces)
    edges = sorted(
        e
        for e in lp.edges
        if lp.edge_regions[e][0] in face_set or lp.edge_regions[e][1] in face_set
    )
    vertices = sorted({v for e in edges for v in lp.edge_dualv[e]})
    e_ix = {e: i for i, e in enumerate(edges)}
    v_ix = {v: i for i, v in enumerate(vertices)}
    f_ix = {f: i for i, f in enumerate(faces)}

    d1 = gf2.Gf2Matrix(len(vertices), len(edges))
    d1t = gf2.Gf2Matrix(len(edges), len(vertices))
    d2 = gf2.Gf2Matrix(len(edges), len(faces))
    face_boundary: dict[int, list[int]] = {f: [] for f in faces}
    edge_odd_faces: dict[int, list[int]] = {e: [] for e in edges}
    for e in edges:
        j = e_ix[e]
        u, w = lp.edge_dualv[e]
        if u != w:
            d1.set_entry(v_ix[u], j, 1)
            d1.set_entry(v_ix[w], j, 1)
            d1t.set_entry(j, v_ix[u], 1)
            d1t.set_entry(j, v_ix[w], 1)
        ra, rb = lp.edge_regions[e]
        if ra != rb:
            for f in (ra, rb):
                if f in face_set:
                    d2.set_entry(j, f_ix[f], 1)
                    face_boundary[f].append(e)
                    edge_odd_faces[e].append(f)
    return BoundaryComplex(
        level=level,
        cells0=tuple(vertices),
        cells1=tuple(edges),
        cells2=tuple(faces),
        d1=d1,
        d1t=d1t,
        d2=d2,
        edge_index=e_ix,
        vertex_index=v_ix,
        face_index=f_ix,
        face_boundary={f: tuple(es) for f, es in face_boundary.items()},
        edge_odd_faces={e: tuple(fs) for e, fs in edge_odd_faces.items()},
    )


def is_cocycle(k: BoundaryComplex, c: Iterable[int]) -> bool:
    """True iff every face boundary meets c an even number of times."""
    parity: dict[int, int] = {}
    for e in c:
        if e not in k.edge_index:
            raise KeyError(f"edge {e} is not a 1-cell of this complex")
        for f in k.edge_odd_faces[e]:
            parity[f] = parity.get(f, 0) ^ 1
    return not any(parity.values())


def are_cohomologous(k: BoundaryComplex, c: Iterable[int], c2: Iterable[int]) -> bool:
    """True iff the symmetric difference is a coboundary of a 0-cochain."""
    cs, c2s = set(c), set(c2)
    if not is_cocycle(k, cs) or not is_cocycle(k, c2s):
        raise ValueError("inputs must both be cocycles")
    diff = k.edge_vector(cs ^ c2s)
    return gf2.in_column_span(k.d1t, diff)


def betti(k: BoundaryComplex) -> tuple[int, int]:
    """(b0, b1) from rank arithmetic on the boundary matrices."""
    r1 = gf2.rank(k.d1)
    r2 = gf2.rank(k.d2)
    b0 = len(k.cells0) - r1
    b1 = (len(k.cells1) - r1) - r2
    return b0, b1


def basis_independent(k: BoundaryComplex, basis: Sequence[Iterable[int]]) -> bool:
    """True iff the cocycles are independent modulo coboundaries and their
    number matches b1."""
    vecs = []
    for c in basis:
        cs = set(c)
        if not is_cocycle(k, cs):
            raise ValueError("basis element is not a cocycle")
        vecs.append(cs)
    _, b1 = betti(k)
    if len(vecs) != b1:
        return False
    if not vecs:
        return True
    cols = gf2.Gf2Matrix(len(k.cells1), len(vecs))
    for j, cs in enumerate(vecs):
        for e in cs:
            cols.set_entry(k.edge_index[e], j, 1)
    stacked = gf2.hstack(k.d1t, cols)
    return gf2.rank(stacked) == gf2.rank(k.d1t) + len(vecs)


def hole_cycle(p: Pyramid, obj: Union[int, ObjectComponent], hole: int) -> frozenset[int]:
    """The closed crack contour separating one hole from the object."""
    idx = obj.index if isinstance(obj, ObjectComponent) else int(obj)
    topo = p.topologies[idx]
    if not 0 <= hole < len(topo.holes):
        raise IndexError(f"object {idx} has no hole {hole}")
    return topo.holes[hole].contour


def blocking_parity(c: Iterable[int], g: Iterable[int]) -> int:
    """|c intersect g| mod 2."""
    return len(set(c) & set(g)) & 1


def homologous_cycle(k: BoundaryComplex, g: Iterable[int], faces: Iterable[int]) -> frozenset[int]:
    """g XOR the boundary of a set of faces (a cycle homologous to g)."""
    out = set(g)
    for f in faces:
        out ^= set(k.face_boundary[f])
    return frozenset(out)


def rag_path_cocycle(
    p: Pyramid,
    obj: Union[int, ObjectComponent],
    hole: int,
    path: Sequence[Pixel],
) -> frozenset[int]:
    """Cocycle built from a simple foreground path joining a hole to the
    outside: one crack on the hole contour at the first pixel, the cracks
    between consecutive path pixels, and one crack on the outer contour at
    the last pixel."""
    idx = obj.index if isinstance(obj, ObjectComponent) else int(obj)
    o = p.objects[idx]
    topo = p.topologies[idx]
    pm = p.pixel_map
    if not path:
        raise ValueError("empty path")
    if len(set(path)) != len(path):
        raise ValueError("path is not simple")
    for px in path:
        if px not in o.pixels:
            raise ValueError(f"path pixel {px} is not in the object")
    for a, b in zip(path, path[1:]):
        if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
            raise ValueError(f"path pixels {a}, {b} are not 4-adjacent")

    def side_cracks(px: Pixel) -> list[int]:
        return [pm.side_crack(px, s) for s in "NESW"]

    ea_cands = sorted(set(side_cracks(path[0])) & topo.holes[hole].contour)
    if not ea_cands:
        raise ValueError("path does not start at the hole boundary")
    eb_cands = sorted(set(side_cracks(path[-1])) & topo.outer_contour)
    if not eb_cands:
        raise ValueError("path does not end at the outer boundary")
    edges = {ea_cands[0], eb_cands[0]}
    for a, b in zip(path, path[1:]):
        edges.add(pm.crack_between(a, b))
    return frozenset(edges)
