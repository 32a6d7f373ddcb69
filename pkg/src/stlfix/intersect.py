"""Self-intersection detection and resolution.

Detection pairs a conservative bounding-volume hierarchy with an exact
narrow phase; resolution inserts every improper intersection as constraint
geometry into both involved triangles, re-triangulates each one in its own
plane with exact arithmetic, and identifies constructed vertices globally by
exact coordinate equality.  The output realizes the same point set as the
input and is a valid Euclidean simplicial complex: every pairwise
intersection of output triangles is the realization of a shared face.
"""

from __future__ import annotations

import numpy as np

from .cdt import Triangulation2D
from .exact_geom import (
    EMPTY_FEATURE,
    ExactPoint,
    IntersectionFeature,
    collinear,
    cross,
    dominant_axis,
    dot,
    lift_point,
    orient2d,
    orient3d,
    point_in_triangle_3d,
    project_point,
    sub,
    triangle_normal,
    triangle_triangle_intersection,
)
from .mesh_core import Mesh


class CandidatePairIndex:
    """BVH over triangle bounding boxes; yields a conservative superset of
    the truly intersecting triangle pairs."""

    LEAF_SIZE = 8

    def __init__(self, boxes: np.ndarray):
        n = len(boxes)
        self.boxes = boxes
        self.order = np.arange(n, dtype=np.int64)
        # Nodes as parallel arrays: bounding box, children (-1 = leaf),
        # [start, count) into self.order for leaves.
        self.node_min = []
        self.node_max = []
        self.node_left = []
        self.node_right = []
        self.node_start = []
        self.node_count = []
        if n:
            centers = (boxes[:, :3] + boxes[:, 3:]) * 0.5
            self._build(0, n, centers)
        self.node_min = np.asarray(self.node_min).reshape(-1, 3)
        self.node_max = np.asarray(self.node_max).reshape(-1, 3)

    def _build(self, start: int, end: int, centers: np.ndarray) -> int:
        idx = self.order[start:end]
        bmin = self.boxes[idx, :3].min(axis=0)
        bmax = self.boxes[idx, 3:].max(axis=0)
        node = len(self.node_left)
        self.node_min.append(bmin)
        self.node_max.append(bmax)
        self.node_left.append(-1)
        self.node_right.append(-1)
        self.node_start.append(start)
        self.node_count.append(end - start)
        if end - start <= self.LEAF_SIZE:
            return node
        axis = int(np.argmax(bmax - bmin))
        mid = (start + end) // 2
        keys = centers[idx, axis]
        part = np.argpartition(keys, mid - start)
        self.order[start:end] = idx[part]
        left = self._build(start, mid, centers)
        right = self._build(mid, end, centers)
        self.node_left[node] = left
        self.node_right[node] = right
        return node

    def _is_leaf(self, n: int) -> bool:
        return self.node_left[n] < 0

    def overlapping_pairs(self):
        """All index pairs (i < j) whose boxes overlap."""
        if not len(self.boxes):
            return []
        out = []
        boxes = self.boxes
        order = self.order
        stack = [(0, 0)]
        while stack:
            x, y = stack.pop()
            if (
                np.any(self.node_min[x] > self.node_max[y])
                or np.any(self.node_min[y] > self.node_max[x])
            ):
                continue
            if self._is_leaf(x) and self._is_leaf(y):
                ix = order[self.node_start[x]: self.node_start[x] + self.node_count[x]]
                if x == y:
                    for a in range(len(ix)):
                        for b in range(a + 1, len(ix)):
                            i, j = ix[a], ix[b]
                            bi, bj = boxes[i], boxes[j]
                            if (
                                bi[0] <= bj[3] and bj[0] <= bi[3]
                                and bi[1] <= bj[4] and bj[1] <= bi[4]
                                and bi[2] <= bj[5] and bj[2] <= bi[5]
                            ):
                                out.append((int(min(i, j)), int(max(i, j))))
                else:
                    # Leaves partition the triangles, so each unordered pair
                    # shows up under exactly one leaf pair: no dedup needed.
                    iy = order[self.node_start[y]: self.node_start[y] + self.node_count[y]]
                    for i in ix:
                        bi = boxes[i]
                        for j in iy:
                            if i == j:
                                continue
                            bj = boxes[j]
                            if (
                                bi[0] <= bj[3] and bj[0] <= bi[3]
                                and bi[1] <= bj[4] and bj[1] <= bi[4]
                                and bi[2] <= bj[5] and bj[2] <= bi[5]
                            ):
                                out.append((int(min(i, j)), int(max(i, j))))
                continue
            if x == y:
                l, r = self.node_left[x], self.node_right[x]
                stack.extend(((l, l), (r, r), (l, r)))
            elif self._is_leaf(x) or (
                not self._is_leaf(y)
                and self.node_count[y] >= self.node_count[x]
            ):
                stack.append((x, self.node_left[y]))
                stack.append((x, self.node_right[y]))
            else:
                stack.append((self.node_left[x], y))
                stack.append((self.node_right[x], y))
        return out

    def query_box(self, box) -> list[int]:
        """Indices whose boxes overlap the given box."""
        if not len(self.boxes):
            return []
        out = []
        stack = [0]
        bmin = np.asarray(box[:3])
        bmax = np.asarray(box[3:])
        while stack:
            n = stack.pop()
            if np.any(self.node_min[n] > bmax) or np.any(self.node_max[n] < bmin):
                continue
            if self._is_leaf(n):
                for i in self.order[self.node_start[n]: self.node_start[n] + self.node_count[n]]:
                    b = self.boxes[i]
                    if (
                        b[0] <= bmax[0] and bmin[0] <= b[3]
                        and b[1] <= bmax[1] and bmin[1] <= b[4]
                        and b[2] <= bmax[2] and bmin[2] <= b[5]
                    ):
                        out.append(int(i))
            else:
                stack.append(self.node_left[n])
                stack.append(self.node_right[n])
        return out


def triangle_boxes(mesh: Mesh) -> np.ndarray:
    """Conservative float boxes: vertex doubles are correctly rounded, so a
    relative pad dominates the representation error."""
    coords = mesh.float_coords
    tri = np.asarray(mesh.triangles, dtype=np.int64)
    if not len(tri):
        return np.zeros((0, 6))
    pts = coords[tri]  # (n, 3, 3)
    bmin = pts.min(axis=1)
    bmax = pts.max(axis=1)
    scale = np.abs(coords).max() if coords.size else 1.0
    pad = scale * 1e-12 + 1e-300
    return np.concatenate([bmin - pad, bmax + pad], axis=1)


def _same_side_of_shared_edge(mesh: Mesh, a: int, b: int, c1: int, c2: int) -> int:
    """For coplanar triangles sharing edge (a,b): +1 if the apexes lie on the
    same side of the edge line (overlap), -1 opposite sides."""
    pa, pb = mesh.vertices[a], mesh.vertices[b]
    d = sub(pb, pa)
    n1 = cross(d, sub(mesh.vertices[c1], pa))
    n2 = cross(d, sub(mesh.vertices[c2], pa))
    s = dot(n1, n2)
    if s > 0:
        return 1
    if s < 0:
        return -1
    raise AssertionError("degenerate apex on shared-edge line")


class _PlaneContext:
    """Exact supporting-plane groups plus memoized vertex-vs-plane signs.

    Two triangles are coplanar iff they share a plane group (the canonical
    key scales the plane equation so its leading coefficient is one).  Sign
    queries repeat heavily across candidate pairs, so they are cached per
    (vertex, plane group).
    """

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        self._group_of: dict[int, int] = {}
        self.ref_tri: list[tuple] = []
        self._axes: list[int] = []
        self._keys: dict[tuple, int] = {}
        self._signs: dict[tuple[int, int], int] = {}
        self._uv: dict[tuple[int, int], tuple[float, float]] = {}
        self._bbox2d: dict[int, tuple] = {}

    def group(self, tid: int) -> int:
        gid = self._group_of.get(tid)
        if gid is None:
            a, b, c = self.mesh.triangle_points(tid)
            n = triangle_normal(a, b, c)
            off = dot(n, a)
            lead = n[0] if n[0] != 0 else (n[1] if n[1] != 0 else n[2])
            key = (n[0] / lead, n[1] / lead, n[2] / lead, off / lead)
            gid = self._keys.get(key)
            if gid is None:
                gid = len(self._keys)
                self._keys[key] = gid
                self.ref_tri.append((a, b, c))
                self._axes.append(dominant_axis(n))
            self._group_of[tid] = gid
        return gid

    def sign(self, vid: int, gid: int) -> int:
        key = (vid, gid)
        s = self._signs.get(key)
        if s is None:
            ra, rb, rc = self.ref_tri[gid]
            s = orient3d(ra, rb, rc, self.mesh.vertices[vid])
            self._signs[key] = s
        return s

    def _uv_float(self, vid: int, gid: int) -> tuple[float, float]:
        key = (vid, gid)
        uv = self._uv.get(key)
        if uv is None:
            u, v = project_point(self.mesh.vertices[vid], self._axes[gid])
            uv = (float(u), float(v))
            self._uv[key] = uv
        return uv

    def bbox2d(self, tid: int, gid: int) -> tuple:
        """Conservative in-plane float bbox (pad covers float rounding)."""
        box = self._bbox2d.get(tid)
        if box is None:
            pts = [self._uv_float(v, gid) for v in self.mesh.triangles[tid]]
            us = [p[0] for p in pts]
            vs = [p[1] for p in pts]
            pad = (max(abs(x) for x in us + vs) + 1.0) * 1e-12
            box = (min(us) - pad, min(vs) - pad, max(us) + pad, max(vs) + pad)
            self._bbox2d[tid] = box
        return box


def _pair_feature_ctx(ctx: _PlaneContext, i: int, j: int) -> IntersectionFeature | None:
    mesh = ctx.mesh
    ti = mesh.triangles[i]
    tj = mesh.triangles[j]
    shared = [v for v in ti if v in tj]
    gi, gj = ctx.group(i), ctx.group(j)
    coplanar = gi == gj

    if coplanar and not shared:
        # Same supporting plane: a disjoint in-plane bbox settles it.
        bi = ctx.bbox2d(i, gi)
        bj = ctx.bbox2d(j, gj)
        if bi[2] < bj[0] or bj[2] < bi[0] or bi[3] < bj[1] or bj[3] < bi[1]:
            return None

    if len(shared) == 2:
        if not coplanar:
            return None  # non-coplanar edge mates meet exactly at the edge
        a, b = shared
        c1 = next(v for v in ti if v not in shared)
        c2 = next(v for v in tj if v not in shared)
        if _same_side_of_shared_edge(mesh, a, b, c1, c2) < 0:
            return None  # coplanar butterfly: intersection is the edge itself
        return triangle_triangle_intersection(
            [mesh.vertices[v] for v in ti], [mesh.vertices[v] for v in tj],
            coplanar=True,
        )

    if not coplanar:
        if len(shared) == 1:
            # Touching only at the shared vertex is the proper contact; it is
            # certified when the other triangle's remaining vertices lie
            # strictly on one side of this one's plane.
            v = shared[0]
            o1 = [ctx.sign(x, gj) for x in ti if x != v]
            if o1[0] == o1[1] and o1[0] != 0:
                return None
            o2 = [ctx.sign(x, gi) for x in tj if x != v]
            if o2[0] == o2[1] and o2[0] != 0:
                return None
        else:
            s1 = [ctx.sign(v, gj) for v in ti]
            if all(s > 0 for s in s1) or all(s < 0 for s in s1):
                return None
            s2 = [ctx.sign(v, gi) for v in tj]
            if all(s > 0 for s in s2) or all(s < 0 for s in s2):
                return None
            # Single-vertex touch: only that point can be in the contact.
            for (signs, tri_ids, other) in ((s1, ti, tj), (s2, tj, ti)):
                zeros = [k for k, s in enumerate(signs) if s == 0]
                if len(zeros) == 1 and signs.count(0) == 1 and (
                    sum(1 for s in signs if s > 0) == 2 or sum(1 for s in signs if s < 0) == 2
                ):
                    p = mesh.vertices[tri_ids[zeros[0]]]
                    op = [mesh.vertices[x] for x in other]
                    if point_in_triangle_3d(p, *op):
                        return IntersectionFeature("point", (p,))
                    return None

    pi = [mesh.vertices[v] for v in ti]
    pj = [mesh.vertices[v] for v in tj]
    feat = triangle_triangle_intersection(pi, pj, coplanar=coplanar)
    if feat.kind == "empty":
        return None
    if len(shared) == 1 and feat.kind == "point" and feat.geometry[0] == mesh.vertices[shared[0]]:
        return None
    return feat


def pair_improper_feature(mesh: Mesh, i: int, j: int) -> IntersectionFeature | None:
    """Exact intersection feature if triangles i, j intersect improperly
    (their intersection is not the realization of a shared face), else None."""
    ctx = _PlaneContext(mesh)
    return _pair_feature_ctx(ctx, i, j)


def detect_intersections(mesh: Mesh):
    """All improperly intersecting triangle pairs with their exact features."""
    boxes = triangle_boxes(mesh)
    index = CandidatePairIndex(boxes)
    ctx = _PlaneContext(mesh)
    out = []
    for i, j in sorted(index.overlapping_pairs()):
        feat = _pair_feature_ctx(ctx, i, j)
        if feat is not None:
            out.append((i, j, feat))
    return out


# -- resolution ---------------------------------------------------------------


def _seg_param_axis(a, b) -> int:
    d = (abs(b[0] - a[0]), abs(b[1] - a[1]))
    return 0 if d[0] >= d[1] else 1


def _seg_seg_split_points(a1, b1, a2, b2):
    """Exact 2D interaction of two segments: returns (splits_for_1,
    splits_for_2) as point lists (proper crossings and T-contacts)."""
    d1 = orient2d(a1, b1, a2)
    d2 = orient2d(a1, b1, b2)
    d3 = orient2d(a2, b2, a1)
    d4 = orient2d(a2, b2, b1)
    s1: list = []
    s2: list = []
    if d1 == 0 and d2 == 0:
        # Collinear: split each at the other's endpoints that fall inside.
        k = _seg_param_axis(a1, b1)
        lo1, hi1 = sorted((a1[k], b1[k]))
        lo2, hi2 = sorted((a2[k], b2[k]))
        for p in (a2, b2):
            if lo1 < p[k] < hi1:
                s1.append(p)
        for p in (a1, b1):
            if lo2 < p[k] < hi2:
                s2.append(p)
        return s1, s2
    if d1 * d2 < 0 and d3 * d4 < 0:
        ux = b1[0] - a1[0]
        uy = b1[1] - a1[1]
        vx = b2[0] - a2[0]
        vy = b2[1] - a2[1]
        denom = ux * vy - uy * vx
        t = ((a2[0] - a1[0]) * vy - (a2[1] - a1[1]) * vx) / denom
        p = (a1[0] + t * ux, a1[1] + t * uy)
        s1.append(p)
        s2.append(p)
        return s1, s2
    # T-contacts: an endpoint of one strictly inside the other.
    if d1 == 0 and d3 * d4 <= 0 and _strictly_between(a1, b1, a2):
        s1.append(a2)
    if d2 == 0 and d3 * d4 <= 0 and _strictly_between(a1, b1, b2):
        s1.append(b2)
    if d3 == 0 and d1 * d2 <= 0 and _strictly_between(a2, b2, a1):
        s2.append(a1)
    if d4 == 0 and d1 * d2 <= 0 and _strictly_between(a2, b2, b1):
        s2.append(b1)
    return s1, s2


def _strictly_between(a, b, p) -> bool:
    k = _seg_param_axis(a, b)
    lo, hi = sorted((a[k], b[k]))
    return lo < p[k] < hi


def _retriangulate_triangle(mesh: Mesh, tid: int, points3d, segments3d):
    """Constrained re-triangulation of one triangle in its own plane.

    points3d/segments3d are the exact constraint geometry (all lying on the
    closed triangle).  Returns sub-triangles as 3D vertex triples whose
    winding matches the original triangle's orientation.
    """
    a, b, c = mesh.triangle_points(tid)
    normal = triangle_normal(a, b, c)
    axis = dominant_axis(normal)
    offset = dot(normal, a)

    to3d: dict = {}

    def proj(p: ExactPoint):
        uv = project_point(p, axis)
        known = to3d.get(uv)
        if known is None:
            to3d[uv] = p
        return uv

    corners = [proj(p) for p in (a, b, c)]
    flipped = orient2d(*corners) < 0
    if flipped:
        corners = [corners[0], corners[2], corners[1]]

    pts2d = {proj(p) for p in points3d}
    segs2d = []
    for (p, q) in segments3d:
        up, uq = proj(p), proj(q)
        if up != uq:
            segs2d.append((up, uq))
        else:
            pts2d.add(up)

    # Pre-split: record every point that must subdivide each segment so that
    # after splitting, no constraint contains a vertex or crosses another.
    splits = [set() for _ in segs2d]
    for i in range(len(segs2d)):
        for j in range(i + 1, len(segs2d)):
            s1, s2 = _seg_seg_split_points(*segs2d[i], *segs2d[j])
            splits[i].update(s1)
            splits[j].update(s2)
            for p in s1 + s2:
                pts2d.add(p)
    all_pts = set(pts2d)
    all_pts.update(corners)  # a constraint may pass exactly through a corner
    for (p, q) in segs2d:
        all_pts.add(p)
        all_pts.add(q)
    for i, (p, q) in enumerate(segs2d):
        for r in all_pts:
            if r != p and r != q and orient2d(p, q, r) == 0 and _strictly_between(p, q, r):
                splits[i].add(r)

    sub_segments = set()
    for i, (p, q) in enumerate(segs2d):
        k = _seg_param_axis(p, q)
        chain = sorted(splits[i] | {p, q}, key=lambda r: r[k])
        if p[k] > q[k]:
            chain.reverse()
        for u, v in zip(chain, chain[1:]):
            if u != v:
                sub_segments.add((u, v) if u <= v else (v, u))

    tri = Triangulation2D(corners)
    ids = {}
    for p in sorted(all_pts):
        ids[p] = tri.insert_point(p)
    for (u, v) in sorted(sub_segments):
        tri.insert_segment(ids[u], ids[v])
    tri.canonicalize()

    out = []
    for (i, j, k) in tri.triangles_ccw():
        p3 = []
        for idx in (i, j, k):
            uv = tri.points[idx]
            known = to3d.get(uv)
            if known is None:
                known = lift_point(uv, axis, normal, offset)
                to3d[uv] = known
            p3.append(known)
        if flipped:
            p3 = [p3[0], p3[2], p3[1]]
        out.append(tuple(p3))
    return out


def resolve_intersections(mesh: Mesh) -> Mesh:
    """Insert all pairwise improper intersections as shared simplices.

    The output realization equals the input realization as a point set; a
    second detection pass over the output finds nothing.
    """
    pairs = detect_intersections(mesh)
    if not pairs:
        return mesh

    points: dict[int, list] = {}
    segments: dict[int, list] = {}
    for (i, j, feat) in pairs:
        geom = feat.geometry
        if feat.kind == "point":
            for t in (i, j):
                points.setdefault(t, []).append(geom[0])
        elif feat.kind == "segment":
            for t in (i, j):
                segments.setdefault(t, []).append((geom[0], geom[1]))
        elif feat.kind == "polygon":
            m = len(geom)
            for t in (i, j):
                lst = segments.setdefault(t, [])
                for k in range(m):
                    lst.append((geom[k], geom[(k + 1) % m]))

    touched = sorted(set(points) | set(segments))
    replacements = {}
    for tid in touched:
        replacements[tid] = _retriangulate_triangle(
            mesh, tid, points.get(tid, ()), segments.get(tid, ())
        )

    index: dict[ExactPoint, int] = {}
    vertices: list[ExactPoint] = []

    def vid(p: ExactPoint) -> int:
        known = index.get(p)
        if known is None:
            known = len(vertices)
            index[p] = known
            vertices.append(p)
        return known

    triangles = []
    for tid in range(len(mesh.triangles)):
        if tid in replacements:
            for tri3 in replacements[tid]:
                triangles.append(tuple(vid(p) for p in tri3))
        else:
            triangles.append(tuple(vid(mesh.vertices[v]) for v in mesh.triangles[tid]))
    return Mesh(vertices, triangles)


def post_filter(mesh: Mesh):
    """Drop newly created equivalent triangles (coplanar overlap regions keep
    one copy per equivalence class) and, defensively, degenerate ones.
    Returns (mesh, removal counts)."""
    seen = set()
    kept = []
    removed = {"equivalent": 0, "degenerate": 0}
    for t in mesh.triangles:
        key = tuple(sorted(t))
        if key in seen:
            removed["equivalent"] += 1
            continue
        seen.add(key)
        a, b, c = (mesh.vertices[v] for v in t)
        if collinear(a, b, c):  # cannot arise under exact arithmetic
            removed["degenerate"] += 1
            continue
        kept.append(t)
    if not removed["equivalent"] and not removed["degenerate"]:
        return mesh, removed
    used = sorted({v for t in kept for v in t})
    remap = {v: i for i, v in enumerate(used)}
    out = Mesh(
        [mesh.vertices[v] for v in used],
        [tuple(remap[v] for v in t) for t in kept],
    )
    return out, removed
