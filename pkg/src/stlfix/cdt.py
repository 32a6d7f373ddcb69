"""Exact 2D constrained triangulation of a triangular domain.

Used to re-triangulate each self-intersecting triangle in its own plane:
intersection points/segments become vertices/constrained edges.  After
insertion, the triangulation is normalized to the constrained Delaunay one
with a geometric tie-break on cocircular quads, so that two coplanar
overlapping triangles triangulate their common region identically and the
copies can be deduplicated afterwards.

All coordinates are rational 2-tuples; every branch is decided exactly.
"""

from __future__ import annotations

from .exact_geom import incircle2d, orient2d


class TriangulationError(RuntimeError):
    """Internal invariant violation during constrained triangulation."""


def _edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


class Triangulation2D:
    """Incremental exact triangulation of a (counterclockwise) triangle."""

    def __init__(self, corners):
        if orient2d(*corners) <= 0:
            raise TriangulationError("domain corners must be counterclockwise")
        self.points = list(corners)
        self.point_ids = {p: i for i, p in enumerate(corners)}
        self.tris: dict[int, tuple[int, int, int]] = {0: (0, 1, 2)}
        self._next_tid = 1
        self.edge2tris: dict[tuple[int, int], set[int]] = {
            _edge(0, 1): {0}, _edge(1, 2): {0}, _edge(0, 2): {0},
        }
        self.vert2tris: dict[int, set[int]] = {0: {0}, 1: {0}, 2: {0}}
        self.constrained: set[tuple[int, int]] = set()
        self._last_tid = 0

    # -- structure maintenance ----------------------------------------------

    def _add_tri(self, a: int, b: int, c: int) -> int:
        tid = self._next_tid
        self._next_tid += 1
        self.tris[tid] = (a, b, c)
        for e in (_edge(a, b), _edge(b, c), _edge(a, c)):
            self.edge2tris.setdefault(e, set()).add(tid)
        for v in (a, b, c):
            self.vert2tris.setdefault(v, set()).add(tid)
        self._last_tid = tid
        return tid

    def _remove_tri(self, tid: int):
        a, b, c = self.tris.pop(tid)
        for e in (_edge(a, b), _edge(b, c), _edge(a, c)):
            s = self.edge2tris[e]
            s.discard(tid)
            if not s:
                del self.edge2tris[e]
        for v in (a, b, c):
            self.vert2tris[v].discard(tid)

    # -- point insertion ------------------------------------------------------

    def _tri_signs(self, tid: int, p):
        a, b, c = self.tris[tid]
        pa, pb, pc = self.points[a], self.points[b], self.points[c]
        return orient2d(pa, pb, p), orient2d(pb, pc, p), orient2d(pc, pa, p)

    def _locate(self, p):
        """Exact location: ('vertex', id) | ('edge', edge) | ('tri', tid).

        Walks from the most recently created triangle; falls back to a full
        scan if the walk revisits a triangle (possible while the current
        triangulation is far from Delaunay)."""
        pid = self.point_ids.get(p)
        if pid is not None:
            return ("vertex", pid)
        tid = self._last_tid if self._last_tid in self.tris else next(iter(self.tris))
        seen = set()
        while tid not in seen:
            seen.add(tid)
            a, b, c = self.tris[tid]
            s1, s2, s3 = self._tri_signs(tid, p)
            step = None
            if s1 < 0:
                step = _edge(a, b)
            elif s2 < 0:
                step = _edge(b, c)
            elif s3 < 0:
                step = _edge(c, a)
            if step is None:
                if s1 == 0:
                    return ("edge", _edge(a, b))
                if s2 == 0:
                    return ("edge", _edge(b, c))
                if s3 == 0:
                    return ("edge", _edge(c, a))
                return ("tri", tid)
            nxt = self.edge2tris[step] - {tid}
            if not nxt:
                break  # walked to the hull; p must be elsewhere, rescan
            tid = nxt.pop()
        for tid, (a, b, c) in self.tris.items():
            s1, s2, s3 = self._tri_signs(tid, p)
            if s1 < 0 or s2 < 0 or s3 < 0:
                continue
            if s1 == 0:
                return ("edge", _edge(a, b))
            if s2 == 0:
                return ("edge", _edge(b, c))
            if s3 == 0:
                return ("edge", _edge(c, a))
            return ("tri", tid)
        raise TriangulationError("point outside triangulation domain")

    def insert_point(self, p) -> int:
        where = self._locate(p)
        if where[0] == "vertex":
            return where[1]
        pid = len(self.points)
        self.points.append(p)
        self.point_ids[p] = pid
        if where[0] == "tri":
            a, b, c = self.tris[where[1]]
            self._remove_tri(where[1])
            self._add_tri(a, b, pid)
            self._add_tri(b, c, pid)
            self._add_tri(c, a, pid)
        else:
            u, v = where[1]
            if where[1] in self.constrained:
                # Splitting a constrained edge keeps both halves constrained.
                self.constrained.discard(where[1])
                self.constrained.add(_edge(u, pid))
                self.constrained.add(_edge(v, pid))
            for tid in list(self.edge2tris[where[1]]):
                a, b, c = self.tris[tid]
                # Rotate so (a, b) is the split edge.
                for _ in range(3):
                    if _edge(a, b) == where[1]:
                        break
                    a, b, c = b, c, a
                self._remove_tri(tid)
                self._add_tri(a, pid, c)
                self._add_tri(pid, b, c)
        return pid

    # -- constrained segment insertion ---------------------------------------

    def insert_segment(self, a: int, b: int):
        """Force edge (a,b) into the triangulation and mark it constrained.

        Precondition (established by the caller's pre-splitting): the open
        segment contains no vertex and crosses no constrained edge.
        """
        key = _edge(a, b)
        if key in self.edge2tris:
            self.constrained.add(key)
            return
        pa, pb = self.points[a], self.points[b]

        # Find the triangle at a whose far edge the segment leaves through:
        # for counterclockwise (a, y, z) the ray a->b exits through (y, z)
        # when y lies strictly right and z strictly left of a->b.
        start = None
        for tid in self.vert2tris[a]:
            x, y, z = self.tris[tid]
            for _ in range(3):
                if x == a:
                    break
                x, y, z = y, z, x
            sy = orient2d(pa, pb, self.points[y])
            sz = orient2d(pa, pb, self.points[z])
            if sy < 0 and sz > 0:
                # b must lie on or beyond the far edge, never short of it.
                if orient2d(self.points[y], self.points[z], pa) * orient2d(
                    self.points[y], self.points[z], pb
                ) <= 0:
                    start = (tid, z, y)
                    break
        if start is None:
            raise TriangulationError("segment start triangle not found")

        tid, up, lo = start
        crossed = [tid]
        upper = [up]
        lower = [lo]
        cur = _edge(up, lo)
        while True:
            if cur in self.constrained:
                raise TriangulationError("corridor crosses a constrained edge")
            nxts = self.edge2tris[cur] - set(crossed)
            if not nxts:
                raise TriangulationError("corridor walk left the domain")
            nxt = nxts.pop()
            crossed.append(nxt)
            x, y, z = self.tris[nxt]
            r = x if x not in cur else (y if y not in cur else z)
            if r == b:
                break
            s = orient2d(pa, pb, self.points[r])
            if s == 0:
                raise TriangulationError("vertex on open constrained segment")
            if s > 0:
                upper.append(r)
                cur = _edge(r, lower[-1])
            else:
                lower.append(r)
                cur = _edge(upper[-1], r)

        for tid in crossed:
            self._remove_tri(tid)
        self._fill(a, b, upper)
        self._fill(b, a, lower[::-1])
        self.constrained.add(key)

    def _fill(self, a: int, b: int, chain: list[int]):
        """Triangulate the pseudo-polygon left of a->b (Anglada's method:
        pick the Delaunay apex, recurse on both sides)."""
        if not chain:
            return
        c = chain[0]
        ci = 0
        pa, pb = self.points[a], self.points[b]
        for i in range(1, len(chain)):
            d = chain[i]
            if incircle2d(pa, pb, self.points[c], self.points[d]) > 0:
                c, ci = d, i
        self._add_tri(a, b, c)
        self._fill(a, c, chain[:ci])
        self._fill(c, b, chain[ci + 1:])

    # -- canonical Delaunay normalization --------------------------------------

    def _edge_pref_key(self, u: int, v: int):
        cu, cv = self.points[u], self.points[v]
        return min((cu, cv), (cv, cu))

    def canonicalize(self, max_rounds: int | None = None):
        """Lawson flips to the constrained Delaunay triangulation, then
        cocircular quads settled onto the lexicographically smaller diagonal.
        The result depends only on the vertex/constraint geometry."""
        from collections import deque

        queue = deque(e for e in self.edge2tris if len(self.edge2tris[e]) == 2)
        inqueue = set(queue)
        guard = 0
        limit = max(64, 8 * len(self.points) ** 2) if max_rounds is None else max_rounds
        while queue:
            guard += 1
            if guard > limit:
                raise TriangulationError("flip normalization did not converge")
            e = queue.popleft()
            inqueue.discard(e)
            if e in self.constrained:
                continue
            tids = self.edge2tris.get(e)
            if tids is None or len(tids) != 2:
                continue
            t1, t2 = sorted(tids)
            u, v = e
            c = next(x for x in self.tris[t1] if x not in e)
            d = next(x for x in self.tris[t2] if x not in e)
            pu, pv, pc, pd = (self.points[i] for i in (u, v, c, d))
            # Flip requires the quad to be strictly convex.
            su = orient2d(pc, pd, pu)
            sv = orient2d(pc, pd, pv)
            if su == 0 or sv == 0 or su * sv > 0:
                continue
            # Evaluate incircle on the counterclockwise (u, v, c) triangle.
            if orient2d(pu, pv, pc) > 0:
                s = incircle2d(pu, pv, pc, pd)
            else:
                s = incircle2d(pv, pu, pc, pd)
            do_flip = s > 0 or (
                s == 0 and self._edge_pref_key(c, d) < self._edge_pref_key(u, v)
            )
            if not do_flip:
                continue
            self._remove_tri(t1)
            self._remove_tri(t2)
            if su > 0:
                self._add_tri(c, d, u)
                self._add_tri(d, c, v)
            else:
                self._add_tri(d, c, u)
                self._add_tri(c, d, v)
            for ne in (_edge(u, c), _edge(u, d), _edge(v, c), _edge(v, d)):
                if ne not in inqueue:
                    queue.append(ne)
                    inqueue.add(ne)

    # -- output -----------------------------------------------------------------

    def triangles_ccw(self):
        """Deterministically ordered counterclockwise triangles."""
        out = []
        for tid in sorted(self.tris):
            a, b, c = self.tris[tid]
            if orient2d(self.points[a], self.points[b], self.points[c]) < 0:
                a, b = b, a
            out.append((a, b, c))
        return out
