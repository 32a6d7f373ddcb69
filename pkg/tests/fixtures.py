"""Geometric fixtures shared across the test suite.

All builders are deterministic; random soups take an explicit seed.
Coordinates are chosen so that intended tangencies and shared edges are
bit-exact (rings snapped onto the relevant planes instead of relying on
float trig to land there).
"""

from __future__ import annotations

import math
import random
import struct

from stlfix.exact_geom import ExactPoint
from stlfix.stl_io import StlModel, StlTriangle


def T(a, b, c) -> StlTriangle:
    return StlTriangle(ExactPoint.of(*a), ExactPoint.of(*b), ExactPoint.of(*c))


def model(coord_triples, name="fixture") -> StlModel:
    return StlModel([T(*t) for t in coord_triples], name=name)


def quad(a, b, c, d):
    """Two triangles covering the quad a-b-c-d (order sets the normal)."""
    return [(a, b, c), (a, c, d)]


def box_triangles(x0, y0, z0, x1, y1, z1):
    """12 outward-oriented triangles of an axis-aligned box."""
    tris = []
    tris += quad((x0, y0, z0), (x0, y1, z0), (x1, y1, z0), (x1, y0, z0))  # bottom, -z
    tris += quad((x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1))  # top, +z
    tris += quad((x0, y0, z0), (x1, y0, z0), (x1, y0, z1), (x0, y0, z1))  # front, -y
    tris += quad((x0, y1, z0), (x0, y1, z1), (x1, y1, z1), (x1, y1, z0))  # back, +y
    tris += quad((x0, y0, z0), (x0, y0, z1), (x0, y1, z1), (x0, y1, z0))  # left, -x
    tris += quad((x1, y0, z0), (x1, y1, z0), (x1, y1, z1), (x1, y0, z1))  # right, +x
    return tris


def cube12_model() -> StlModel:
    """Unit cube, 12 triangles, outward windings, 8 distinct vertices."""
    return model(box_triangles(0, 0, 0, 1, 1, 1), name="cube12")


def cube12_binary_bytes() -> bytes:
    m = cube12_model()
    buf = bytearray()
    buf += b"cube12 fixture".ljust(80, b"\0")
    buf += struct.pack("<I", len(m.triangles))
    for t in m.triangles:
        buf += struct.pack("<3f", 0.0, 0.0, 0.0)
        for v in t.vertices:
            buf += struct.pack("<3f", *(float(c) for c in v))
        buf += struct.pack("<H", 0)
    return bytes(buf)


def square_model() -> StlModel:
    """The two-triangle unit square in z=0 (4 distinct vertices)."""
    return model(
        [((1, 0, 0), (0, 1, 0), (0, 0, 0)), ((0, 1, 0), (1, 0, 0), (1, 1, 0))],
        name="square",
    )


def flat_cube_model() -> StlModel:
    """Unit cube with every z coordinate set to zero."""
    tris = []
    for a, b, c in box_triangles(0, 0, 0, 1, 1, 1):
        tris.append(((a[0], a[1], 0), (b[0], b[1], 0), (c[0], c[1], 0)))
    return model(tris, name="flat_cube")


def plus_sign_model() -> StlModel:
    """Four triangles sharing the z-axis edge, opposite vertices on +x, +y,
    -x, -y; a canonical 4-fan."""
    a, b = (0, 0, 0), (0, 0, 1)
    return model(
        [
            (a, b, (1, 0, 0)),
            (a, b, (0, 1, 0)),
            (a, b, (-1, 0, 0)),
            (a, b, (0, -1, 0)),
        ],
        name="plus_sign",
    )


def book_model() -> StlModel:
    """Three triangles sharing one edge (singular, odd count)."""
    a, b = (0, 0, 0), (0, 0, 1)
    return model(
        [(a, b, (1, 0, 0)), (a, b, (0, 1, 0)), (a, b, (-1, 1, 0))], name="book"
    )


def two_tetra_glued_model() -> StlModel:
    """Two closed tetrahedra sharing one edge: every edge has even incidence
    (the shared edge has four)."""
    def tetra(p0, p1, p2, p3):
        return [(p0, p2, p1), (p0, p1, p3), (p1, p2, p3), (p2, p0, p3)]

    a, b = (0, 0, 0), (1, 0, 0)
    t1 = tetra(a, b, (0, 1, 0), (0, 0, 1))
    t2 = tetra(a, b, (0, -1, 0), (0, 0, -1))
    return model(t1 + t2, name="two_tetra")


def pyramids_model() -> StlModel:
    """Two square pyramids touching at their shared apex (a singular vertex)."""
    apex = (0, 0, 0)
    tris = []
    base1 = [(1, 1, -1), (-1, 1, -1), (-1, -1, -1), (1, -1, -1)]
    for i in range(4):
        tris.append((base1[i], base1[(i + 1) % 4], apex))
    tris += quad(*base1[::-1])
    base2 = [(1, 1, 1), (1, -1, 1), (-1, -1, 1), (-1, 1, 1)]
    for i in range(4):
        tris.append((base2[i], base2[(i + 1) % 4], apex))
    tris += quad(*base2[::-1])
    return model(tris, name="pyramids")


def edge_boxes_model() -> StlModel:
    """Two unit boxes sharing exactly one vertical edge (a singular edge)."""
    tris = box_triangles(-1, -1, 0, 0, 0, 1) + box_triangles(0, 0, 0, 1, 1, 1)
    return model(tris, name="edge_boxes")


def pinched_pie_model(n: int = 8) -> StlModel:
    """Cylinder whose two base centers were pushed to the same central point
    (singular vertex, still manifold-connected)."""
    top = []
    bot = []
    for i in range(n):
        ang = 2 * math.pi * i / n
        x, y = math.cos(ang), math.sin(ang)
        top.append((x, y, 1))
        bot.append((x, y, -1))
    o = (0, 0, 0)
    tris = []
    for i in range(n):
        j = (i + 1) % n
        tris += quad(top[i], top[j], bot[j], bot[i])
        tris.append((o, top[i], top[j]))
        tris.append((o, bot[j], bot[i]))
    return model(tris, name="pinched_pie")


def edge_pinched_model() -> StlModel:
    """Square tube pinched in the middle: two base edges pushed onto one
    central edge (singular edge, still manifold-connected)."""
    e0, e1 = (0, -1, 0), (0, 1, 0)
    tr = [(-1, -1, 1), (-1, 1, 1), (1, 1, 1), (1, -1, 1)]
    br = [(-1, -1, -1), (-1, 1, -1), (1, 1, -1), (1, -1, -1)]
    tris = []
    # Top tent: slants from the rim down to the central edge, plus caps.
    tris += quad(tr[0], tr[1], e1, e0)  # x = -1 slant
    tris += quad(tr[2], tr[3], e0, e1)  # x = +1 slant
    tris.append((tr[3], tr[0], e0))  # y = -1 cap
    tris.append((tr[1], tr[2], e1))  # y = +1 cap
    # Bottom tent mirrored (windings flipped to stay outward).
    tris += quad(br[1], br[0], e0, e1)
    tris += quad(br[3], br[2], e1, e0)
    tris.append((br[0], br[3], e0))
    tris.append((br[2], br[1], e1))
    # Side wall connecting the two rims.
    tris += quad(tr[1], tr[0], br[0], br[1])  # x = -1
    tris += quad(tr[3], tr[2], br[2], br[3])  # x = +1
    tris += quad(tr[0], tr[3], br[3], br[0])  # y = -1
    tris += quad(tr[2], tr[1], br[1], br[2])  # y = +1
    return model(tris, name="edge_pinched")


def torus_model(n: int = 36, m: int = 8, R: float = 2.0, r: float = 0.5,
                center=(0.0, 0.0, 0.0), snap_top: bool = False,
                name: str = "torus") -> StlModel:
    """Torus with axis z. With snap_top, the tube ring at the top is placed
    exactly at z = center_z + r (radius exactly R) so a plane there is
    bit-exactly tangent."""
    cx, cy, cz = center
    verts = []
    for i in range(n):
        a = 2 * math.pi * i / n
        ca, sa = math.cos(a), math.sin(a)
        ring = []
        for j in range(m):
            p = 2 * math.pi * j / m
            cp, sp = math.cos(p), math.sin(p)
            if snap_top and 4 * j == m:
                cp, sp = 0.0, 1.0
            ring.append((cx + (R + r * cp) * ca, cy + (R + r * cp) * sa, cz + r * sp))
        verts.append(ring)
    tris = []
    for i in range(n):
        i2 = (i + 1) % n
        for j in range(m):
            j2 = (j + 1) % m
            tris += quad(verts[i][j], verts[i2][j], verts[i2][j2], verts[i][j2])
    return model(tris, name=name)


def uv_sphere_model(n: int = 18, m: int = 12, rad: float = 1.0,
                    center=(0.0, 0.0, 0.0), snap_equator: bool = False,
                    name: str = "sphere") -> StlModel:
    """UV sphere with poles on the z axis. With snap_equator, the middle ring
    lies exactly in the plane z = center_z (radius exactly rad)."""
    cx, cy, cz = center
    rows = []
    for k in range(1, m):
        th = math.pi * k / m
        st, ct = math.sin(th), math.cos(th)
        if snap_equator and 2 * k == m:
            st, ct = 1.0, 0.0
        row = []
        for i in range(n):
            a = 2 * math.pi * i / n
            row.append((cx + rad * st * math.cos(a), cy + rad * st * math.sin(a), cz + rad * ct))
        rows.append(row)
    north = (cx, cy, cz + rad)
    south = (cx, cy, cz - rad)
    tris = []
    for i in range(n):
        i2 = (i + 1) % n
        tris.append((north, rows[0][i], rows[0][i2]))
        tris.append((south, rows[-1][i2], rows[-1][i]))
    for k in range(len(rows) - 1):
        for i in range(n):
            i2 = (i + 1) % n
            tris += quad(rows[k][i], rows[k + 1][i], rows[k + 1][i2], rows[k][i2])
    return model(tris, name=name)


def icosphere_model(subdiv: int = 1, rad: float = 1.0, name: str = "icosphere") -> StlModel:
    phi = (1 + math.sqrt(5)) / 2
    raw = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    def norm(p):
        s = math.sqrt(p[0] ** 2 + p[1] ** 2 + p[2] ** 2)
        return (rad * p[0] / s, rad * p[1] / s, rad * p[2] / s)
    verts = [norm(p) for p in raw]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    for _ in range(subdiv):
        cache = {}
        new_faces = []
        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                a, b = verts[i], verts[j]
                verts.append(norm(((a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2)))
                cache[key] = len(verts) - 1
            return cache[key]
        for (a, b, c) in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    return model([(verts[a], verts[b], verts[c]) for a, b, c in faces], name=name)


def voxel_solid_model(cells, scale: float = 1.0, name: str = "voxels") -> StlModel:
    """Boundary mesh of a set of unit cells (i,j,k); faces adjacent to empty
    space are emitted with outward windings."""
    cells = set(cells)
    tris = []
    for (i, j, k) in sorted(cells):
        x0, y0, z0 = i * scale, j * scale, k * scale
        x1, y1, z1 = x0 + scale, y0 + scale, z0 + scale
        if (i, j, k - 1) not in cells:
            tris += quad((x0, y0, z0), (x0, y1, z0), (x1, y1, z0), (x1, y0, z0))
        if (i, j, k + 1) not in cells:
            tris += quad((x0, y0, z1), (x1, y0, z1), (x1, y1, z1), (x0, y1, z1))
        if (i, j - 1, k) not in cells:
            tris += quad((x0, y0, z0), (x1, y0, z0), (x1, y0, z1), (x0, y0, z1))
        if (i, j + 1, k) not in cells:
            tris += quad((x0, y1, z0), (x0, y1, z1), (x1, y1, z1), (x1, y1, z0))
        if (i - 1, j, k) not in cells:
            tris += quad((x0, y0, z0), (x0, y0, z1), (x0, y1, z1), (x0, y1, z0))
        if (i + 1, j, k) not in cells:
            tris += quad((x1, y0, z0), (x1, y1, z0), (x1, y1, z1), (x1, y0, z1))
    return model(tris, name=name)


def genus3_model() -> StlModel:
    """A 7x3 slab of cells with three square through-holes (genus 3)."""
    cells = set()
    holes = {(1, 1), (3, 1), (5, 1)}
    for i in range(7):
        for j in range(3):
            if (i, j) in holes:
                continue
            cells.add((i, j, 0))
    return voxel_solid_model(cells, name="genus3")


def nested_cubes_model() -> StlModel:
    tris = box_triangles(0, 0, 0, 1, 1, 1)
    tris += box_triangles(0.25, 0.25, 0.25, 0.75, 0.75, 0.75)
    return model(tris, name="nested_cubes")


def fig8_scene_model() -> StlModel:
    """Torus + sphere + rectangle scene: after intersection resolution this
    decomposes into six face clusters (2 solid, 3 sheet, 1 internal).

    The rectangle lies in the plane z = 1/2, bit-exactly tangent to the top
    ring of the torus, slicing straight through the sphere, with its left
    edge hanging over the torus hole and its right edge beyond the sphere.
    """
    tris = []
    torus = torus_model(n=36, m=8, R=2.0, r=0.5, center=(-4.0, 0.0, 0.0),
                        snap_top=True)
    sphere = uv_sphere_model(n=18, m=12, rad=1.0, center=(3.0, 0.0, 0.5),
                             snap_equator=True)
    for t in torus.triangles:
        tris.append(tuple(tuple(v) for v in t.vertices))
    for t in sphere.triangles:
        tris.append(tuple(tuple(v) for v in t.vertices))
    z = 0.5
    y = 0.6
    tris += quad((-5, -y, z), (4.5, -y, z), (4.5, y, z), (-5, y, z))
    return model(tris, name="fig8_scene")


def klein_model(n: int = 24, m: int = 12, c: float = 2.0) -> StlModel:
    """Figure-8 immersion of the Klein bottle; self-intersects along a circle
    where the two lobes of the cross-section cross."""
    def pt(i, j):
        u = 2 * math.pi * i / n
        v = 2 * math.pi * j / m
        cu2, su2 = math.cos(u / 2), math.sin(u / 2)
        w = c + cu2 * math.sin(v) - su2 * math.sin(2 * v)
        return (w * math.cos(u), w * math.sin(u), su2 * math.sin(v) + cu2 * math.sin(2 * v))

    verts = {}
    def vid(i, j):
        # Seam identification: (n, j) glues to (0, -j).
        if i == n:
            i, j = 0, (m - j) % m
        j %= m
        key = (i, j)
        if key not in verts:
            verts[key] = pt(*key)
        return key

    tris = []
    for i in range(n):
        for j in range(m):
            a = vid(i, j)
            b = vid(i + 1, j)
            cc = vid(i + 1, j + 1)
            d = vid(i, j + 1)
            tris.append((verts[a], verts[b], verts[cc]))
            tris.append((verts[a], verts[cc], verts[d]))
    return model(tris, name="klein")


def random_soup_model(seed: int, count: int, box: float = 1.0) -> StlModel:
    rng = random.Random(seed)
    tris = []
    while len(tris) < count:
        t = [
            (rng.uniform(0, box), rng.uniform(0, box), rng.uniform(0, box))
            for _ in range(3)
        ]
        tris.append(tuple(t))
    return model(tris, name=f"soup{seed}")


def scanned_like_model(total: int = 50000, seed: int = 5) -> StlModel:
    """A fine closed torus with small tetrahedra straddling its surface:
    a stand-in for a scanned mesh with scattered self-intersections."""
    m = 125
    n = max(4, (total - 100) // (2 * m))
    base = torus_model(n=n, m=m, R=20.0, r=6.0, center=(0.0, 0.0, 0.0), name="scan")
    tris = [tuple(tuple(v) for v in t.vertices) for t in base.triangles]
    rng = random.Random(seed)
    for _ in range(25):
        a = rng.uniform(0, 2 * math.pi)
        # Center on the outer equator of the tube so the tetra straddles it.
        cx, cy, cz = 26.0 * math.cos(a), 26.0 * math.sin(a), 0.0
        s = 1.5
        p0 = (cx - s, cy - s, cz - s)
        p1 = (cx + s, cy - s, cz + s)
        p2 = (cx, cy + s, cz - s)
        p3 = (cx, cy, cz + s)
        tris += [(p0, p2, p1), (p0, p1, p3), (p1, p2, p3), (p2, p0, p3)]
    return model(tris, name="scanned_like")
