"""Exact geometric kernel: rational points, sign predicates, constructive
intersections.

Every geometric decision downstream (degeneracy filtering, self-intersection
resolution, fan ordering, containment) is routed through this module so that
the pipeline never takes a branch based on a rounded value.  Coordinates are
arbitrary-precision rationals (gmpy2 ``mpq``); a static floating-point filter
short-circuits the common case where all operands are exactly representable
as doubles.
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple, Sequence

try:
    from gmpy2 import mpq
except ImportError:  # pragma: no cover - gmpy2 is a hard dependency in practice
    from fractions import Fraction as mpq

RAT_ZERO = mpq(0)
RAT_ONE = mpq(1)

# Static filter bound for the 3x3 determinant; (7 + 56u)u with u = 2^-53.
_O3D_ERR = 7.771561172376103e-16
# Same style of bound for the 2x2 determinant: (3 + 16u)u.
_O2D_ERR = 3.3306690738754716e-16


def to_rational(value) -> mpq:
    """Coerce ints, floats, strings, Fractions to a canonical rational."""
    if isinstance(value, mpq):
        return value
    return mpq(value)


class ExactPoint(NamedTuple):
    """A 3D point with exact rational coordinates (model units)."""

    x: "mpq"
    y: "mpq"
    z: "mpq"

    @classmethod
    def of(cls, x, y, z) -> "ExactPoint":
        return cls(to_rational(x), to_rational(y), to_rational(z))

    def as_floats(self) -> tuple[float, float, float]:
        return (float(self.x), float(self.y), float(self.z))


def point(x, y, z) -> ExactPoint:
    return ExactPoint.of(x, y, z)


def sub(p: ExactPoint, q: ExactPoint):
    return (p[0] - q[0], p[1] - q[1], p[2] - q[2])


def cross(u, v):
    return (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def triangle_normal(a: ExactPoint, b: ExactPoint, c: ExactPoint):
    """Unnormalized normal of the ordered triangle (twice its area vector)."""
    return cross(sub(b, a), sub(c, a))


def _sign(v) -> int:
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


def orient3d_exact(p, q, r, s) -> int:
    """Integer evaluation: rows are cleared of denominators (each row may be
    scaled by any positive factor without changing the determinant sign),
    avoiding per-operation rational canonicalization."""
    pxn, pxd = p[0].numerator, p[0].denominator
    pyn, pyd = p[1].numerator, p[1].denominator
    pzn, pzd = p[2].numerator, p[2].denominator
    rows = []
    for t in (q, r, s):
        tx, ty, tz = t[0], t[1], t[2]
        an = tx.numerator * pxd - pxn * tx.denominator
        ad = tx.denominator * pxd
        bn = ty.numerator * pyd - pyn * ty.denominator
        bd = ty.denominator * pyd
        cn = tz.numerator * pzd - pzn * tz.denominator
        cd = tz.denominator * pzd
        rows.append((an * bd * cd, bn * ad * cd, cn * ad * bd))
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = rows
    det = a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) + a3 * (b1 * c2 - b2 * c1)
    return _sign(det)


def orient3d(p, q, r, s) -> int:
    """Sign of det[q-p, r-p, s-p]: +1 if s is on the positive side of the
    oriented plane (p,q,r), -1 on the negative side, 0 if coplanar.

    Tries a float evaluation first; the result is trusted only when every
    coordinate converts to a double without rounding and the magnitude beats
    the static error bound.  Otherwise falls back to exact arithmetic.
    """
    try:
        pf = (float(p[0]), float(p[1]), float(p[2]))
        qf = (float(q[0]), float(q[1]), float(q[2]))
        rf = (float(r[0]), float(r[1]), float(r[2]))
        sf = (float(s[0]), float(s[1]), float(s[2]))
    except OverflowError:
        return orient3d_exact(p, q, r, s)
    ax = qf[0] - pf[0]
    ay = qf[1] - pf[1]
    az = qf[2] - pf[2]
    bx = rf[0] - pf[0]
    by = rf[1] - pf[1]
    bz = rf[2] - pf[2]
    cx = sf[0] - pf[0]
    cy = sf[1] - pf[1]
    cz = sf[2] - pf[2]
    t1 = by * cz
    t2 = bz * cy
    t3 = bx * cz
    t4 = bz * cx
    t5 = bx * cy
    t6 = by * cx
    det = ax * (t1 - t2) - ay * (t3 - t4) + az * (t5 - t6)
    perm = (
        (abs(t1) + abs(t2)) * abs(ax)
        + (abs(t3) + abs(t4)) * abs(ay)
        + (abs(t5) + abs(t6)) * abs(az)
    )
    bound = _O3D_ERR * perm
    if det > bound or -det > bound:
        # Certified only if the doubles are exact images of the rationals.
        if (
            pf[0] == p[0] and pf[1] == p[1] and pf[2] == p[2]
            and qf[0] == q[0] and qf[1] == q[1] and qf[2] == q[2]
            and rf[0] == r[0] and rf[1] == r[1] and rf[2] == r[2]
            and sf[0] == s[0] and sf[1] == s[1] and sf[2] == s[2]
        ):
            return 1 if det > 0 else -1
    return orient3d_exact(p, q, r, s)


def orient2d_exact(p, q, r) -> int:
    """Integer evaluation, denominators cleared (all positive)."""
    pxn, pxd = p[0].numerator, p[0].denominator
    pyn, pyd = p[1].numerator, p[1].denominator
    uxn = q[0].numerator * pxd - pxn * q[0].denominator
    uxd = q[0].denominator * pxd
    uyn = q[1].numerator * pyd - pyn * q[1].denominator
    uyd = q[1].denominator * pyd
    vxn = r[0].numerator * pxd - pxn * r[0].denominator
    vxd = r[0].denominator * pxd
    vyn = r[1].numerator * pyd - pyn * r[1].denominator
    vyd = r[1].denominator * pyd
    det = uxn * vyn * uyd * vxd - uyn * vxn * uxd * vyd
    return _sign(det)


def orient2d(p, q, r) -> int:
    """Sign of the 2D orientation test (positive = counterclockwise)."""
    try:
        pf = (float(p[0]), float(p[1]))
        qf = (float(q[0]), float(q[1]))
        rf = (float(r[0]), float(r[1]))
    except OverflowError:
        return orient2d_exact(p, q, r)
    detl = (qf[0] - pf[0]) * (rf[1] - pf[1])
    detr = (qf[1] - pf[1]) * (rf[0] - pf[0])
    det = detl - detr
    bound = _O2D_ERR * (abs(detl) + abs(detr))
    if det > bound or -det > bound:
        if (
            pf[0] == p[0] and pf[1] == p[1]
            and qf[0] == q[0] and qf[1] == q[1]
            and rf[0] == r[0] and rf[1] == r[1]
        ):
            return 1 if det > 0 else -1
    return orient2d_exact(p, q, r)


def incircle2d(a, b, c, d) -> int:
    """Exact incircle test: +1 iff d lies strictly inside the circumcircle of
    the counterclockwise triangle (a,b,c), 0 if cocircular.

    Evaluated over integers: differences are put over per-axis common
    denominators Dx, Dy; scaling the x, y columns by Dx, Dy and the lifted
    column by Dx^2 Dy^2 leaves the determinant sign unchanged."""
    dxn, dxd = d[0].numerator, d[0].denominator
    dyn, dyd = d[1].numerator, d[1].denominator
    xs = []
    ys = []
    for t in (a, b, c):
        xs.append((t[0].numerator * dxd - dxn * t[0].denominator, t[0].denominator))
        ys.append((t[1].numerator * dyd - dyn * t[1].denominator, t[1].denominator))
    # Common denominators across the three rows per axis.
    Dx = xs[0][1] * xs[1][1] * xs[2][1] * dxd
    Dy = ys[0][1] * ys[1][1] * ys[2][1] * dyd
    X = []
    Y = []
    for k in range(3):
        other = xs[(k + 1) % 3][1] * xs[(k + 2) % 3][1]
        X.append(xs[k][0] * other)
        other = ys[(k + 1) % 3][1] * ys[(k + 2) % 3][1]
        Y.append(ys[k][0] * other)
    Dx2 = Dx * Dx
    Dy2 = Dy * Dy
    L = [X[k] * X[k] * Dy2 + Y[k] * Y[k] * Dx2 for k in range(3)]
    det = (
        L[0] * (X[1] * Y[2] - X[2] * Y[1])
        + L[1] * (X[2] * Y[0] - X[0] * Y[2])
        + L[2] * (X[0] * Y[1] - X[1] * Y[0])
    )
    return _sign(det)


def collinear(p: ExactPoint, q: ExactPoint, r: ExactPoint) -> bool:
    """True iff (q-p) x (r-p) is exactly the zero vector (includes
    coincident points); evaluated as three projected orientation tests."""
    return (
        orient2d((p[1], p[2]), (q[1], q[2]), (r[1], r[2])) == 0
        and orient2d((p[2], p[0]), (q[2], q[0]), (r[2], r[0])) == 0
        and orient2d((p[0], p[1]), (q[0], q[1]), (r[0], r[1])) == 0
    )


class IntersectionFeature(NamedTuple):
    """Exact intersection of two closed triangles.

    kind is one of "empty", "point", "segment", "polygon"; geometry holds the
    0, 1, 2 or >=3 defining points (polygon vertices are coplanar, convex and
    cyclically ordered).
    """

    kind: str
    geometry: tuple

    @classmethod
    def empty(cls):
        return cls("empty", ())


EMPTY_FEATURE = IntersectionFeature.empty()


def dominant_axis(normal) -> int:
    """Index of the normal component with the largest magnitude."""
    ax, ay, az = abs(normal[0]), abs(normal[1]), abs(normal[2])
    if ax >= ay and ax >= az:
        return 0
    if ay >= az:
        return 1
    return 2


def project_point(p, axis: int):
    """Drop the given axis, keeping the other two in x,y,z cyclic order."""
    if axis == 0:
        return (p[1], p[2])
    if axis == 1:
        return (p[2], p[0])
    return (p[0], p[1])


def lift_point(uv, axis: int, normal, offset):
    """Recover the dropped coordinate of a 2D point known to lie on the plane
    normal . x = offset. Requires normal[axis] != 0."""
    u, v = uv
    n = normal
    if axis == 0:
        x = (offset - n[1] * u - n[2] * v) / n[0]
        return ExactPoint(x, u, v)
    if axis == 1:
        y = (offset - n[2] * u - n[0] * v) / n[1]
        return ExactPoint(v, y, u)
    z = (offset - n[0] * u - n[1] * v) / n[2]
    return ExactPoint(u, v, z)


def _point_in_triangle_2d(p, a, b, c) -> bool:
    """Closed 2D containment; (a,b,c) need not be counterclockwise."""
    s1 = orient2d(a, b, p)
    s2 = orient2d(b, c, p)
    s3 = orient2d(c, a, p)
    return (s1 >= 0 and s2 >= 0 and s3 >= 0) or (s1 <= 0 and s2 <= 0 and s3 <= 0)


def projection_axis(a: ExactPoint, b: ExactPoint, c: ExactPoint) -> int:
    """An axis along which projecting the triangle's plane is injective:
    chosen from float normals, then certified exactly (the projected area is
    the corresponding normal component)."""
    try:
        af, bf, cf = a.as_floats(), b.as_floats(), c.as_floats()
        ux, uy, uz = bf[0] - af[0], bf[1] - af[1], bf[2] - af[2]
        vx, vy, vz = cf[0] - af[0], cf[1] - af[1], cf[2] - af[2]
        n = (abs(uy * vz - uz * vy), abs(uz * vx - ux * vz), abs(ux * vy - uy * vx))
        first = max(range(3), key=lambda k: n[k])
    except OverflowError:
        first = 0
    for axis in (first, (first + 1) % 3, (first + 2) % 3):
        if orient2d(
            project_point(a, axis), project_point(b, axis), project_point(c, axis)
        ) != 0:
            return axis
    raise ValueError("degenerate triangle has no projection axis")


def point_in_triangle_3d(p: ExactPoint, a: ExactPoint, b: ExactPoint, c: ExactPoint) -> bool:
    """Exact test: does p lie on the closed triangle (a,b,c)?"""
    if orient3d(a, b, c, p) != 0:
        return False
    axis = projection_axis(a, b, c)
    return _point_in_triangle_2d(
        project_point(p, axis),
        project_point(a, axis),
        project_point(b, axis),
        project_point(c, axis),
    )


def _seg_param_range(direction):
    """Pick the dominant axis of a direction vector for 1D parametrization."""
    ax, ay, az = abs(direction[0]), abs(direction[1]), abs(direction[2])
    if ax >= ay and ax >= az:
        return 0
    if ay >= az:
        return 1
    return 2


def _plane_cross_points(tri, signs, other_plane):
    """Points where a triangle meets a plane, given vertex signs wrt it."""
    n, off = other_plane
    pts = []
    for i in range(3):
        if signs[i] == 0:
            pts.append(tri[i])
    for i in range(3):
        j = (i + 1) % 3
        if signs[i] * signs[j] < 0:
            a, b = tri[i], tri[j]
            d = sub(b, a)
            t = (off - dot(n, a)) / dot(n, d)
            pts.append(ExactPoint(a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]))
    uniq = []
    for p in pts:
        if p not in uniq:
            uniq.append(p)
    return uniq


def _clip_polygon_halfplane(poly, a, b, keep_sign):
    """Sutherland-Hodgman step: clip 2D polygon by the line (a,b)."""
    out = []
    n = len(poly)
    for i in range(n):
        cur = poly[i]
        nxt = poly[(i + 1) % n]
        s_cur = orient2d(a, b, cur)
        s_nxt = orient2d(a, b, nxt)
        inside_cur = s_cur * keep_sign >= 0
        inside_nxt = s_nxt * keep_sign >= 0
        if inside_cur:
            out.append(cur)
        if inside_cur != inside_nxt:
            # Exact crossing of segment (cur,nxt) with line (a,b).
            dx1 = b[0] - a[0]
            dy1 = b[1] - a[1]
            dx2 = nxt[0] - cur[0]
            dy2 = nxt[1] - cur[1]
            denom = dx1 * dy2 - dy1 * dx2
            t = (dx1 * (a[1] - cur[1]) - dy1 * (a[0] - cur[0])) / denom
            out.append((cur[0] + t * dx2, cur[1] + t * dy2))
    dedup = []
    for p in out:
        if not dedup or p != dedup[-1]:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def _coplanar_intersection(t1, t2, normal, offset) -> IntersectionFeature:
    axis = dominant_axis(normal)
    p1 = [project_point(v, axis) for v in t1]
    p2 = [project_point(v, axis) for v in t2]
    if orient2d(*p1) < 0:
        p1.reverse()
    if orient2d(*p2) < 0:
        p2.reverse()
    poly = list(p1)
    for i in range(3):
        a, b = p2[i], p2[(i + 1) % 3]
        poly = _clip_polygon_halfplane(poly, a, b, 1)
        if not poly:
            return EMPTY_FEATURE
    pts = tuple(lift_point(uv, axis, normal, offset) for uv in poly)
    if len(pts) == 1:
        return IntersectionFeature("point", pts)
    if len(pts) == 2:
        return IntersectionFeature("segment", pts)
    # Degenerate flat polygons (all clipped points collinear) are segments.
    base = pts[0]
    if all(collinear(base, pts[1], p) for p in pts[2:]):
        d = sub(pts[1], base)
        k = _seg_param_range(d)
        lo = min(pts, key=lambda p: p[k])
        hi = max(pts, key=lambda p: p[k])
        if lo == hi:
            return IntersectionFeature("point", (lo,))
        return IntersectionFeature("segment", (lo, hi))
    return IntersectionFeature("polygon", pts)


def triangle_triangle_intersection(
    t1: Sequence[ExactPoint], t2: Sequence[ExactPoint], coplanar: bool | None = None
) -> IntersectionFeature:
    """Exact intersection of two closed non-degenerate triangles.

    `coplanar` is an optional caller-known fact that skips the plane-side
    classification; it never changes the result."""
    if coplanar:
        n1 = triangle_normal(*t1)
        return _coplanar_intersection(t1, t2, n1, dot(n1, t1[0]))
    s1 = tuple(orient3d(t2[0], t2[1], t2[2], v) for v in t1)
    if all(s > 0 for s in s1) or all(s < 0 for s in s1):
        return EMPTY_FEATURE
    n1 = triangle_normal(*t1)
    off1 = dot(n1, t1[0])
    if s1 == (0, 0, 0):
        return _coplanar_intersection(t1, t2, n1, off1)
    s2 = tuple(orient3d(t1[0], t1[1], t1[2], v) for v in t2)
    if all(s > 0 for s in s2) or all(s < 0 for s in s2):
        return EMPTY_FEATURE
    n2 = triangle_normal(*t2)
    off2 = dot(n2, t2[0])

    pts1 = _plane_cross_points(t1, s1, (n2, off2))
    pts2 = _plane_cross_points(t2, s2, (n1, off1))
    if not pts1 or not pts2:
        return EMPTY_FEATURE

    if len(pts1) == 1:
        p = pts1[0]
        if point_in_triangle_3d(p, *t2):
            return IntersectionFeature("point", (p,))
        return EMPTY_FEATURE
    if len(pts2) == 1:
        p = pts2[0]
        if point_in_triangle_3d(p, *t1):
            return IntersectionFeature("point", (p,))
        return EMPTY_FEATURE

    # Both cross-sections are segments on the common plane-intersection line.
    d = sub(pts1[1], pts1[0])
    k = _seg_param_range(d)
    a1, b1 = sorted((pts1[0], pts1[1]), key=lambda p: p[k])
    a2, b2 = sorted((pts2[0], pts2[1]), key=lambda p: p[k])
    lo = a1 if a1[k] >= a2[k] else a2
    hi = b1 if b1[k] <= b2[k] else b2
    if lo[k] > hi[k]:
        return EMPTY_FEATURE
    if lo[k] == hi[k]:
        return IntersectionFeature("point", (ExactPoint(*lo),))
    return IntersectionFeature("segment", (ExactPoint(*lo), ExactPoint(*hi)))


def radial_order_around_edge(edge: tuple, opposite_vertices: Sequence[ExactPoint]) -> list[int]:
    """Counterclockwise cyclic order (right-hand rule about a->b) of the
    half-planes spanned by the edge and each opposite vertex.

    Returns indices into opposite_vertices, starting from index 0.  Decided
    entirely by orientation signs on the input coordinates; no angles.
    Raises ValueError when two vertices span the same half-plane, which
    cannot occur on a resolved, deduplicated complex.
    """
    a, b = edge
    m = len(opposite_vertices)
    if m == 0:
        raise ValueError("edge has no incident triangles")
    if m == 1:
        return [0]
    d = sub(b, a)
    w0 = opposite_vertices[0]

    keys = []
    for i, w in enumerate(opposite_vertices):
        if i == 0:
            keys.append((0, i))
            continue
        side = orient3d(a, b, w0, w)
        if side == 0:
            # Same supporting plane: distinguish same direction (error) from
            # the opposite half-plane via the perpendicular components.
            wv = sub(w, a)
            front = _sign(
                dot(d, d) * dot(sub(w0, a), wv) - dot(d, sub(w0, a)) * dot(d, wv)
            )
            if front > 0:
                raise ValueError("coincident half-planes around edge")
            keys.append((2, i))  # opposite direction, angle pi
        elif side > 0:
            keys.append((1, i))  # strictly within (0, pi)
        else:
            keys.append((3, i))  # strictly within (pi, 2 pi)

    def cmp_within(i, j):
        s = orient3d(a, b, opposite_vertices[i], opposite_vertices[j])
        if s == 0:
            raise ValueError("coincident half-planes around edge")
        return -1 if s > 0 else 1

    import functools

    groups: dict[int, list[int]] = {0: [], 1: [], 2: [], 3: []}
    for cls, i in keys:
        groups[cls].append(i)
    out = []
    for cls in (0, 1, 2, 3):
        grp = groups[cls]
        if len(grp) > 1:
            grp = sorted(grp, key=functools.cmp_to_key(cmp_within))
        out.extend(grp)
    return out


# Deterministic ray directions for point-in-polyhedron; regenerated until the
# ray is generic for the mesh at hand.  Directions are pairwise distinct and
# keep |dy|, |dz| <= 0.6 per unit x so the bbox prefilter cone stays valid.
def _ray_direction(attempt: int):
    if attempt == 0:
        return (mpq(1), mpq(1, 64), mpq(1, 4096))
    return (mpq(1), mpq(3 + 2 * attempt, 1024), mpq(5 + 3 * attempt, 8192))


def point_in_polyhedron(p: ExactPoint, closed_mesh, max_attempts: int = 256) -> str:
    """Classify p against a closed, intersection-free mesh by exact ray-crossing
    parity: returns "inside", "outside" or "on_surface".

    The mesh object only needs .vertices (ExactPoints) and .triangles (index
    triples).  Rays hitting an edge or vertex exactly are detected exactly and
    the direction is redrawn from a deterministic sequence.
    """
    verts = closed_mesh.vertices
    tris = closed_mesh.triangles

    import numpy as np

    coords = getattr(closed_mesh, "float_coords", None)
    if coords is None:
        coords = np.array([v.as_floats() for v in verts], dtype=np.float64)
    tri_idx = np.asarray(tris, dtype=np.int64)
    pf = np.array([float(c) for c in p], dtype=np.float64)

    # Conservative prefilter: triangles whose padded bbox can meet the +x-ish
    # ray halfspace from p. Directions stay within a bounded cone, so padding
    # y/z by the maximal slope times x-extent is safe.
    tv = coords[tri_idx]  # (n, 3, 3)
    tmin = tv.min(axis=1)
    tmax = tv.max(axis=1)
    span = float(np.max(tmax[:, 0]) - pf[0]) if len(tris) else 0.0
    slope = 0.6  # all generated directions have |dy|,|dz| <= 0.6 per unit x
    pad = slope * max(span, 0.0) + 1e-9
    cand = np.nonzero(
        (tmax[:, 0] >= pf[0])
        & (tmin[:, 1] <= pf[1] + pad)
        & (tmax[:, 1] >= pf[1] - pad)
        & (tmin[:, 2] <= pf[2] + pad)
        & (tmax[:, 2] >= pf[2] - pad)
    )[0]

    for ti in cand:
        ia, ib, ic = tris[int(ti)]
        if point_in_triangle_3d(p, verts[ia], verts[ib], verts[ic]):
            return "on_surface"

    for attempt in range(max_attempts):
        d = _ray_direction(attempt)
        q = ExactPoint(p[0] + d[0], p[1] + d[1], p[2] + d[2])
        crossings = 0
        degenerate = False
        for ti in cand:
            ia, ib, ic = tris[int(ti)]
            a, b, c = verts[ia], verts[ib], verts[ic]
            sa = orient3d(p, q, a, b)
            sb = orient3d(p, q, b, c)
            sc = orient3d(p, q, c, a)
            if sa == sb == sc == 0:
                # Ray line lies in the triangle plane; p itself is off the
                # triangle, so redraw to stay generic.
                degenerate = True
                break
            if (sa >= 0 and sb >= 0 and sc >= 0) or (sa <= 0 and sb <= 0 and sc <= 0):
                if sa == 0 or sb == 0 or sc == 0:
                    degenerate = True
                    break
                # Crossing parameter sign without explicit normals:
                # sign(n.(a-p)) = -orient3d(a,b,c,p), sign(n.d) via a+d.
                s_num = -orient3d(a, b, c, p)
                a_plus_d = ExactPoint(a[0] + d[0], a[1] + d[1], a[2] + d[2])
                s_dir = orient3d(a, b, c, a_plus_d)
                if s_dir == 0:
                    degenerate = True
                    break
                s_t = s_num * s_dir
                if s_t > 0:
                    crossings += 1
                elif s_t == 0:
                    # Hit at parameter 0 means p on the triangle; handled above.
                    degenerate = True
                    break
        if degenerate:
            continue
        return "inside" if crossings % 2 == 1 else "outside"
    raise RuntimeError("no generic ray direction found")


def max_coordinate_bits(points: Iterable[ExactPoint]) -> int:
    """Largest numerator/denominator bit length over all coordinates; a
    cheap observability metric for rational growth."""
    worst = 0
    for p in points:
        for c in p:
            q = to_rational(c)
            worst = max(worst, q.numerator.bit_length(), q.denominator.bit_length())
    return worst


def float_unit_vector(v, bits: int = 30):
    """Rational approximation of v/|v| with ~2^-bits relative error.

    Directions are irrational in general; the snapped rational keeps all
    downstream arithmetic exact. Returns None for the zero vector.
    """
    fx, fy, fz = float(v[0]), float(v[1]), float(v[2])
    norm = math.sqrt(fx * fx + fy * fy + fz * fz)
    if norm == 0.0 or not math.isfinite(norm):
        # Rescale exactly and retry once for extreme magnitudes.
        m = max(abs(v[0]), abs(v[1]), abs(v[2]))
        if m == 0:
            return None
        v = (v[0] / m, v[1] / m, v[2] / m)
        fx, fy, fz = float(v[0]), float(v[1]), float(v[2])
        norm = math.sqrt(fx * fx + fy * fy + fz * fz)
        if norm == 0.0 or not math.isfinite(norm):
            return None
    scale = 1 << bits
    return tuple(mpq(round(f / norm * scale), scale) for f in (fx, fy, fz))
