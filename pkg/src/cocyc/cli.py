"""Command line entry point.

Reads a PBM image, builds the pyramid, selects the cocycle basis per
object, down-projects to pixel cracks, and writes a deterministic JSON
document (optionally an SVG overlay, optionally an oracle verification
report).

Exit status: 0 on success, 1 when --verify finds a failure, 2 on input
errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

from cocyc import oracle, pbm
from cocyc.downproject import Cocycle, cocycle_cracks, down_project_level
from cocyc.grid import BinaryImage
from cocyc.homology import build_homology_level, cocycle_basis
from cocyc.invariant import anchor_vertex
from cocyc.pyramid import Pyramid, build_pyramid, euler_check

PALETTE = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"]


@dataclass
class RunConfig:
    input: str
    mode: str = "fast"
    seed: int = 0
    output: Optional[str] = None
    svg: Optional[str] = None
    level: Optional[int] = None
    verify: bool = False
    anchor: Optional[tuple[int, int]] = None
    max_size: int = pbm.DEFAULT_MAX_SIZE


class InputError(Exception):
    pass


def _crack_json(crack) -> list:
    (x1, y1), (x2, y2) = crack
    return [[x1, y1], [x2, y2]]


def _compute_document(img: BinaryImage, cfg: RunConfig) -> tuple[dict, Pyramid, list]:
    anchors = None
    if cfg.mode == "invariant" and cfg.anchor is not None:
        x, y = cfg.anchor
        if not (0 <= x < img.width and 0 <= y < img.height) or not img.get(x, y):
            raise InputError(f"anchor {cfg.anchor} is not a foreground pixel")
    p0_objects = None
    if cfg.anchor is not None and cfg.mode == "invariant":
        from cocyc.grid import object_components

        p0_objects = object_components(img)
        anchors = {}
        for o in p0_objects:
            if cfg.anchor in o.pixels:
                anchors[o.index] = cfg.anchor
    p = build_pyramid(img, mode=cfg.mode, seed=cfg.seed, anchors=anchors)
    if cfg.level is not None and not 0 <= cfg.level <= p.height:
        raise InputError(f"--level {cfg.level} outside pyramid height {p.height}")

    objects_json = []
    per_object = []  # (object, homology level, [(top cocycle, base cocycle)])
    for o in p.objects:
        h = build_homology_level(p, o)
        basis = cocycle_basis(h)
        holes_json = []
        cocycles = []
        for t in basis:
            c = Cocycle(level=p.height, edges=t.edges, hole=t.hole)
            intermediate = {p.height: c}
            while c.level > 0:
                c = down_project_level(c, p)
                intermediate[c.level] = c
            cocycles.append((t, c))
            hole_doc = {
                "index": t.hole,
                "cocycle": [_crack_json(k) for k in cocycle_cracks(p, c)],
            }
            if cfg.level is not None:
                hole_doc["cocycle_at_level"] = {
                    "level": cfg.level,
                    "cracks": [
                        _crack_json(k) for k in cocycle_cracks(p, intermediate[cfg.level])
                    ],
                }
            holes_json.append(hole_doc)
        obj_doc = {
            "id": o.index,
            "pixel_count": len(o.pixels),
            "hole_count": len(basis),
            "holes": holes_json,
        }
        if cfg.mode == "invariant":
            s = anchors.get(o.index) if anchors else None
            if s is None:
                s = anchor_vertex(o)
            obj_doc["anchor"] = list(s)
        objects_json.append(obj_doc)
        per_object.append((o, h, cocycles))

    doc = {
        "schema": 1,
        "input": {"width": img.width, "height": img.height},
        "mode": cfg.mode,
        "seed": None if cfg.mode == "invariant" else cfg.seed,
        "pyramid_height": p.height,
        "objects": objects_json,
    }
    return doc, p, per_object


def _verify(p: Pyramid, per_object) -> dict:
    from cocyc.grid import hole_count_oracle

    report = {"passed": True, "objects": []}
    if not all(euler_check(lp) for lp in p.levels):
        report["passed"] = False
        report["euler"] = False
    else:
        report["euler"] = True
    for o, h, cocycles in per_object:
        k = oracle.boundary_complex(p, o, 0)
        b0, b1 = oracle.betti(k)
        n_oracle = hole_count_oracle(o)
        entry = {
            "object": o.index,
            "basis_size": len(cocycles),
            "hole_count_oracle": n_oracle,
            "betti": [b0, b1],
        }
        ok = len(cocycles) == n_oracle == b1 and b0 == 1
        try:
            entry["cocycles_pass"] = all(
                oracle.is_cocycle(k, c.edges) for _, c in cocycles
            )
            entry["basis_independent"] = oracle.basis_independent(
                k, [c.edges for _, c in cocycles]
            )
            blocking = [
                [
                    oracle.blocking_parity(c.edges, oracle.hole_cycle(p, o, j))
                    for j in range(len(cocycles))
                ]
                for _, c in cocycles
            ]
            entry["blocking_identity"] = all(
                blocking[i][j] == (1 if i == j else 0)
                for i in range(len(cocycles))
                for j in range(len(cocycles))
            )
        except Exception as exc:  # oracle refused: report as failure
            entry["error"] = str(exc)
            entry["cocycles_pass"] = False
            entry["basis_independent"] = False
            entry["blocking_identity"] = False
        ok = ok and entry["cocycles_pass"] and entry["basis_independent"] and entry["blocking_identity"]
        entry["passed"] = ok
        report["objects"].append(entry)
        report["passed"] = report["passed"] and ok
    return report


def render_svg(img: BinaryImage, per_object, p: Pyramid) -> str:
    """Pixel squares with cocycle cracks drawn as bold colored segments."""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="-0.5 -0.5 {img.width + 1} '
        f'{img.height + 1}" width="{24 * (img.width + 1)}" height="{24 * (img.height + 1)}">',
        '<rect x="-0.5" y="-0.5" width="100%" height="100%" fill="white"/>',
    ]
    for y in range(img.height):
        for x in range(img.width):
            if img.get(x, y):
                parts.append(
                    f'<rect x="{x}" y="{y}" width="1" height="1" fill="#c8c8c8" stroke="#aaa" stroke-width="0.02"/>'
                )
    ci = 0
    for _, _, cocycles in per_object:
        for t, c in cocycles:
            color = PALETTE[ci % len(PALETTE)]
            ci += 1
            for (x1, y1), (x2, y2) in cocycle_cracks(p, c):
                parts.append(
                    f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{color}" '
                    f'stroke-width="0.14" stroke-linecap="round"/>'
                )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def run(cfg: RunConfig) -> tuple[int, Optional[dict]]:
    """Run the pipeline per config; returns (exit status, document)."""
    try:
        img = pbm.load(cfg.input, max_size=cfg.max_size)
    except (pbm.PbmError, OSError) as exc:
        print(f"cocyc: input error: {exc}", file=sys.stderr)
        return 2, None
    try:
        doc, p, per_object = _compute_document(img, cfg)
    except InputError as exc:
        print(f"cocyc: input error: {exc}", file=sys.stderr)
        return 2, None

    status = 0
    if cfg.verify:
        report = _verify(p, per_object)
        doc["verification"] = report
        if not report["passed"]:
            status = 1

    payload = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    if cfg.svg:
        with open(cfg.svg, "w") as fh:
            fh.write(render_svg(img, per_object, p))
    return status, doc


def _parse_anchor(text: str) -> tuple[int, int]:
    try:
        x, y = text.split(",")
        return int(x), int(y)
    except ValueError:
        raise argparse.ArgumentTypeError("anchor must be X,Y") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cocyc", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    c = sub.add_parser("compute", help="compute hole cocycles for a PBM image")
    c.add_argument("--input", required=True, help="input image (PBM, P1 or P4)")
    c.add_argument("--mode", choices=["fast", "invariant"], default="fast")
    c.add_argument("--seed", type=int, default=0, help="seed for fast mode (ignored in invariant mode)")
    c.add_argument("--level", type=int, default=None, help="also emit the cocycle at this pyramid level")
    c.add_argument("--anchor", type=_parse_anchor, default=None, help="pin the invariant-mode anchor pixel (X,Y)")
    c.add_argument("--output", default=None, help="output JSON path (stdout when omitted)")
    c.add_argument("--svg", default=None, help="optional SVG overlay path")
    c.add_argument("--verify", action="store_true", help="run the GF(2) oracle on every result")
    c.add_argument("--max-size", type=int, default=pbm.DEFAULT_MAX_SIZE, help="maximum accepted image dimension")
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        input=args.input,
        mode=args.mode,
        seed=args.seed,
        output=args.output,
        svg=args.svg,
        level=args.level,
        verify=args.verify,
        anchor=args.anchor,
        max_size=args.max_size,
    )
    status, _ = run(cfg)
    return status


if __name__ == "__main__":
    sys.exit(main())
