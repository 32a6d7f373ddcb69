"""STL reading/writing, syntactic pre-filtering, layer extraction and wire
collection.

Only vertex positions are trusted: stored facet normals and any per-file
orientation convention are discarded on read.  Vertex identity is exact
coordinate equality throughout; in practice STL vertices either match
bitwise or differ by far more than rounding noise, so no welding tolerance
is needed or wanted.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable

from .exact_geom import ExactPoint, collinear, to_rational


class StlParseError(ValueError):
    """Malformed STL input; message carries a byte or line offset."""


class StlWriteError(ValueError):
    """A component could not be serialized (non-finite rounded coordinate)."""


@dataclass(frozen=True)
class StlTriangle:
    """An ordered vertex triplet; all nine coordinates finite."""

    v1: ExactPoint
    v2: ExactPoint
    v3: ExactPoint

    @property
    def vertices(self) -> tuple[ExactPoint, ExactPoint, ExactPoint]:
        return (self.v1, self.v2, self.v3)


@dataclass
class StlModel:
    """Raw ordered triangle soup plus its derived set of distinct points."""

    triangles: list[StlTriangle]
    name: str = ""
    vertex_set: frozenset = field(init=False)

    def __post_init__(self):
        vs = set()
        for t in self.triangles:
            vs.update(t.vertices)
        self.vertex_set = frozenset(vs)

    def __len__(self) -> int:
        return len(self.triangles)


@dataclass(frozen=True)
class WireSegment:
    """A degenerate-triangle footprint kept for later inflation; a != b."""

    a: ExactPoint
    b: ExactPoint

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("wire segment endpoints must be distinct")


def _float_to_rational(f: float):
    return to_rational(f)


def _parse_binary(data: bytes) -> StlModel:
    if len(data) < 84:
        raise StlParseError(
            f"binary STL truncated: need 84 header bytes, have {len(data)}"
        )
    (count,) = struct.unpack_from("<I", data, 80)
    expected = 84 + 50 * count
    if len(data) < expected:
        raise StlParseError(
            f"binary STL truncated at byte {len(data)}: "
            f"{count} triangles need {expected} bytes"
        )
    name = data[:80].split(b"\0", 1)[0].decode("ascii", "replace").strip()
    triangles = []
    offset = 84
    for i in range(count):
        rec = struct.unpack_from("<12f", data, offset)
        coords = rec[3:]  # skip stored normal
        for c in coords:
            if c != c or c in (float("inf"), float("-inf")):
                raise StlParseError(f"non-finite coordinate in record at byte {offset}")
        pts = [
            ExactPoint(
                _float_to_rational(coords[k]),
                _float_to_rational(coords[k + 1]),
                _float_to_rational(coords[k + 2]),
            )
            for k in (0, 3, 6)
        ]
        triangles.append(StlTriangle(*pts))
        offset += 50
    return StlModel(triangles, name=name)


def _parse_ascii(text: str) -> StlModel:
    # Case-insensitive keywords, arbitrary whitespace; the solid name is kept.
    triangles = []
    name = ""
    verts: list[ExactPoint] = []
    in_solid = False
    in_loop = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens:
            continue
        key = tokens[0].lower()
        if key == "solid":
            if in_solid:
                raise StlParseError(f"line {lineno}: nested 'solid'")
            in_solid = True
            name = " ".join(tokens[1:])
        elif key == "facet":
            if not in_solid:
                raise StlParseError(f"line {lineno}: 'facet' outside 'solid'")
        elif key == "outer":
            if in_loop:
                raise StlParseError(f"line {lineno}: nested 'outer loop'")
            in_loop = True
            verts = []
        elif key == "vertex":
            if not in_loop:
                raise StlParseError(f"line {lineno}: 'vertex' outside loop")
            if len(tokens) != 4:
                raise StlParseError(f"line {lineno}: vertex needs 3 coordinates")
            try:
                coords = [float(tok) for tok in tokens[1:]]
            except ValueError as exc:
                raise StlParseError(f"line {lineno}: bad coordinate: {exc}") from exc
            for c in coords:
                if c != c or c in (float("inf"), float("-inf")):
                    raise StlParseError(f"line {lineno}: non-finite coordinate")
            verts.append(
                ExactPoint(*(_float_to_rational(c) for c in coords))
            )
        elif key == "endloop":
            if not in_loop:
                raise StlParseError(f"line {lineno}: 'endloop' without loop")
            if len(verts) != 3:
                raise StlParseError(
                    f"line {lineno}: loop has {len(verts)} vertices, expected 3"
                )
            triangles.append(StlTriangle(*verts))
            in_loop = False
        elif key == "endfacet":
            if in_loop:
                raise StlParseError(f"line {lineno}: 'endfacet' inside loop")
        elif key == "endsolid":
            in_solid = False
        # Unknown tokens (e.g. normal components on the facet line) are part
        # of already-consumed constructs and never reach here on valid input.
    if in_loop or in_solid:
        raise StlParseError("unexpected end of file inside open construct")
    return StlModel(triangles, name=name)


def parse_stl(data: bytes) -> StlModel:
    """Parse binary or ASCII STL bytes into an ordered triangle soup.

    Format detection: a file whose length matches the binary layout promised
    by its header count is binary; otherwise it must parse as ASCII.
    """
    if len(data) >= 84:
        (count,) = struct.unpack_from("<I", data, 80)
        if len(data) == 84 + 50 * count:
            return _parse_binary(data)
    head = data[:512].lstrip()
    if head[:5].lower() == b"solid":
        try:
            return _parse_ascii(data.decode("utf-8", "replace"))
        except StlParseError:
            if len(data) >= 84:
                return _parse_binary(data)
            raise
    return _parse_binary(data)


def _longest_spanned_segment(pts: Iterable[ExactPoint]) -> WireSegment | None:
    """Segment between the two extreme points of a coincident/collinear
    vertex set; None when all points coincide."""
    distinct = []
    for p in pts:
        if p not in distinct:
            distinct.append(p)
    if len(distinct) < 2:
        return None
    best = None
    best_d2 = None
    for i in range(len(distinct)):
        for j in range(i + 1, len(distinct)):
            d = tuple(distinct[j][k] - distinct[i][k] for k in range(3))
            d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
            if best_d2 is None or d2 > best_d2:
                best_d2 = d2
                best = (distinct[i], distinct[j])
    return WireSegment(*best)


def filter_regular(model: StlModel):
    """Drop irregular (repeated-vertex) and degenerate (collinear) triangles.

    Each removed triangle with at least two distinct vertices contributes its
    longest spanned segment to the wire list so the footprint survives.
    Returns (filtered model, wires, removal counts by category).
    """
    kept = []
    wires: list[WireSegment] = []
    removed = {"irregular": 0, "degenerate": 0, "fully_coincident": 0}
    for t in model.triangles:
        a, b, c = t.vertices
        if a == b and b == c:
            removed["fully_coincident"] += 1
            continue
        if a == b or b == c or a == c:
            removed["irregular"] += 1
            seg = _longest_spanned_segment(t.vertices)
            if seg is not None:
                wires.append(seg)
            continue
        if collinear(a, b, c):
            removed["degenerate"] += 1
            seg = _longest_spanned_segment(t.vertices)
            if seg is not None:
                wires.append(seg)
            continue
        kept.append(t)
    return StlModel(kept, name=model.name), wires, removed


def _triangle_key(t: StlTriangle):
    return tuple(sorted((tuple(t.v1), tuple(t.v2), tuple(t.v3))))


def extract_layer(model: StlModel) -> StlModel:
    """Keep the first occurrence of each equivalence class of triangles
    (same vertex set up to permutation)."""
    seen = set()
    kept = []
    for t in model.triangles:
        key = _triangle_key(t)
        if key in seen:
            continue
        seen.add(key)
        kept.append(t)
    return StlModel(kept, name=model.name)


def _round_coord_binary(c) -> float:
    f = float(c)
    packed = struct.pack("<f", f)
    (back,) = struct.unpack("<f", packed)
    return back


def write_stl(components, fmt: str = "binary", precision: int = 9):
    """Serialize oriented meshes, one byte stream per component.

    Facet normals are recomputed from the vertex winding.  Exact coordinates
    are rounded to the nearest float32 (binary) or to the given number of
    decimal digits (ASCII).  Returns (streams, warnings): a warning is
    recorded whenever rounding collapses two distinct vertices of a triangle.
    """
    import math as _math

    if fmt not in ("binary", "ascii"):
        raise ValueError(f"unknown format {fmt!r}")
    streams = []
    warnings = []
    for ci, mesh in enumerate(components):
        tri_rows = []
        for tid, (ia, ib, ic) in enumerate(mesh.triangles):
            pts = [mesh.vertices[k] for k in (ia, ib, ic)]
            if fmt == "binary":
                rounded = [tuple(_round_coord_binary(c) for c in p) for p in pts]
            else:
                rounded = [tuple(round(float(c), precision) for c in p) for p in pts]
            for r in rounded:
                for c in r:
                    if not _math.isfinite(c):
                        raise StlWriteError(
                            f"component {ci}: non-finite rounded coordinate in triangle {tid}"
                        )
            if len({rounded[0], rounded[1], rounded[2]}) < 3:
                warnings.append(
                    f"component {ci}: rounding collapsed vertices of triangle {tid}"
                )
            ux = [rounded[1][k] - rounded[0][k] for k in range(3)]
            vx = [rounded[2][k] - rounded[0][k] for k in range(3)]
            n = (
                ux[1] * vx[2] - ux[2] * vx[1],
                ux[2] * vx[0] - ux[0] * vx[2],
                ux[0] * vx[1] - ux[1] * vx[0],
            )
            norm = _math.sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2])
            if norm > 0:
                n = (n[0] / norm, n[1] / norm, n[2] / norm)
            else:
                n = (0.0, 0.0, 0.0)
            tri_rows.append((n, rounded))

        if fmt == "binary":
            buf = bytearray()
            header = b"stlfix repaired component"
            buf += header + b"\0" * (80 - len(header))
            buf += struct.pack("<I", len(tri_rows))
            for n, rounded in tri_rows:
                buf += struct.pack("<3f", *n)
                for r in rounded:
                    buf += struct.pack("<3f", *r)
                buf += struct.pack("<H", 0)
            streams.append(bytes(buf))
        else:
            lines = [f"solid component{ci}"]
            for n, rounded in tri_rows:
                lines.append(
                    f"  facet normal {n[0]:.{precision}g} {n[1]:.{precision}g} {n[2]:.{precision}g}"
                )
                lines.append("    outer loop")
                for r in rounded:
                    lines.append(
                        f"      vertex {r[0]:.{precision}f} {r[1]:.{precision}f} {r[2]:.{precision}f}"
                    )
                lines.append("    endloop")
                lines.append("  endfacet")
            lines.append(f"endsolid component{ci}")
            streams.append(("\n".join(lines) + "\n").encode("ascii"))
    return streams, warnings
