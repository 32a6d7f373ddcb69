"""Vertex-embedded abstract 2-complex: edge incidence, triangle fans,
continuation, closedness, and manifold decomposition.

The structure is deliberately uniform over non-manifold inputs: an edge may
carry any number of incident triangles, and all fan/continuation queries are
answered from exact radial orders around the edge.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .exact_geom import ExactPoint, radial_order_around_edge, sub, cross


class EdgeClass(enum.Enum):
    BOUNDARY = "boundary"
    TWO_CONNECTED = "two_connected"
    SINGULAR = "singular"


def edge_key(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass
class Fan:
    """Radial ordering of an edge's incident triangles from a reference
    triangle, direction fixed by the reference triangle's orientation."""

    edge: tuple[int, int]
    triangles: list[int]
    upward: bool = True


class Mesh:
    """Triangle mesh with exact vertex embedding and full edge incidence.

    vertices: list of ExactPoint (no two equal); triangles: ordered
    vertex-index triples whose winding is the committed orientation;
    edge_map: unordered index pair -> incident triangle ids (in triangle
    order).  Completed meshes are treated as immutable.
    """

    def __init__(self, vertices: list[ExactPoint], triangles: list[tuple[int, int, int]],
                 vertex_origins: Optional[list[int]] = None):
        self.vertices = vertices
        self.triangles = [tuple(t) for t in triangles]
        self.vertex_origins = vertex_origins
        self.edge_map: dict[tuple[int, int], list[int]] = {}
        for tid, (a, b, c) in enumerate(self.triangles):
            for e in (edge_key(a, b), edge_key(b, c), edge_key(c, a)):
                self.edge_map.setdefault(e, []).append(tid)
        self._float_coords: Optional[np.ndarray] = None
        self._radial_cache: dict[tuple[int, int], list[int]] = {}

    # -- basic derived data -------------------------------------------------

    @property
    def float_coords(self) -> np.ndarray:
        if self._float_coords is None:
            if self.vertices:
                self._float_coords = np.array(
                    [v.as_floats() for v in self.vertices], dtype=np.float64
                )
            else:
                self._float_coords = np.zeros((0, 3), dtype=np.float64)
        return self._float_coords

    def triangle_points(self, tid: int):
        a, b, c = self.triangles[tid]
        return self.vertices[a], self.vertices[b], self.vertices[c]

    def signed_volume(self):
        """Sum of tetrahedron volumes against the origin, times 6 kept
        rational; positive for closed outward-oriented meshes."""
        total = 0
        for a, b, c in self.triangles:
            pa, pb, pc = self.vertices[a], self.vertices[b], self.vertices[c]
            d = cross(tuple(pb), tuple(pc))
            total += pa[0] * d[0] + pa[1] * d[1] + pa[2] * d[2]
        return total / 6

    def copy(self) -> "Mesh":
        return Mesh(list(self.vertices), list(self.triangles),
                    list(self.vertex_origins) if self.vertex_origins else None)

    def __repr__(self):
        return f"Mesh({len(self.vertices)} vertices, {len(self.triangles)} triangles)"


def build_induced_mesh(layer) -> Mesh:
    """Build the induced complex of a regular, duplicate-free layer: vertices
    identified by exact coordinate equality, windings preserved."""
    index: dict[ExactPoint, int] = {}
    vertices: list[ExactPoint] = []
    triangles = []
    for t in layer.triangles:
        ids = []
        for v in t.vertices:
            vid = index.get(v)
            if vid is None:
                vid = len(vertices)
                index[v] = vid
                vertices.append(v)
            ids.append(vid)
        triangles.append(tuple(ids))
    return Mesh(vertices, triangles)


def classify_edge(mesh: Mesh, edge: tuple[int, int]) -> EdgeClass:
    key = edge_key(*edge)
    tris = mesh.edge_map.get(key)
    if tris is None:
        raise KeyError(f"edge {edge} not in mesh")
    n = len(tris)
    if n == 1:
        return EdgeClass.BOUNDARY
    if n == 2:
        return EdgeClass.TWO_CONNECTED
    return EdgeClass.SINGULAR


def is_closed(mesh: Mesh) -> bool:
    """True iff every edge has an even number of incident triangles."""
    return all(len(tris) % 2 == 0 for tris in mesh.edge_map.values())


def triangle_orders_edge(tri: tuple[int, int, int], a: int, b: int) -> bool:
    """True iff the winding visits a immediately before b (cyclically)."""
    x, y, z = tri
    return (x, y) == (a, b) or (y, z) == (a, b) or (z, x) == (a, b)


def _radial_order(mesh: Mesh, key: tuple[int, int], alive=None) -> list[int]:
    """Cyclic CCW order (right-hand rule about low->high vertex id) of all
    incident triangles; cached, computed once from exact coordinates."""
    cached = mesh._radial_cache.get(key)
    if cached is None:
        tids = mesh.edge_map[key]
        a, b = key
        opposite = []
        for tid in tids:
            tri = mesh.triangles[tid]
            w = next(v for v in tri if v != a and v != b)
            opposite.append(mesh.vertices[w])
        order = radial_order_around_edge(
            (mesh.vertices[a], mesh.vertices[b]), opposite
        )
        cached = [tids[i] for i in order]
        mesh._radial_cache[key] = cached
    if alive is None:
        return cached
    return [t for t in cached if alive[t]]


def upward_fan(mesh: Mesh, edge: tuple[int, int], t0: int, alive=None) -> Fan:
    """The fan at `edge` whose second element is the first triangle reached
    when rotating around the edge in the direction of t0's normal.

    With `alive` given, triangles removed from the working set are skipped
    while preserving the radial order of the survivors.
    """
    key = edge_key(*edge)
    tids = mesh.edge_map.get(key)
    if tids is None or t0 not in tids:
        raise KeyError(f"triangle {t0} not incident at edge {edge}")
    order = _radial_order(mesh, key, alive)
    if len(order) == 1:
        return Fan(edge=key, triangles=[t0])
    a, b = key
    forward = triangle_orders_edge(mesh.triangles[t0], a, b)
    cyc = order if forward else order[::-1]
    i = cyc.index(t0)
    return Fan(edge=key, triangles=cyc[i:] + cyc[:i])


def continuation(mesh: Mesh, edge: tuple[int, int], t: int, alive=None) -> int:
    """Successor of t in its upward fan at `edge`, cyclically."""
    key = edge_key(*edge)
    tris = mesh.edge_map.get(key, [])
    count = len(tris) if alive is None else sum(1 for x in tris if alive[x])
    if count < 2:
        raise ValueError(f"continuation undefined on boundary edge {edge}")
    fan = upward_fan(mesh, edge, t, alive)
    return fan.triangles[1]


# -- manifold decomposition ------------------------------------------------


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def two_connected_components(mesh: Mesh) -> list[list[int]]:
    """Groups of triangles connected through edges with exactly two incident
    triangles; this is the combinatorial grain of manifold decomposition."""
    uf = _UnionFind(len(mesh.triangles))
    for tris in mesh.edge_map.values():
        if len(tris) == 2:
            uf.union(tris[0], tris[1])
    groups: dict[int, list[int]] = {}
    for tid in range(len(mesh.triangles)):
        groups.setdefault(uf.find(tid), []).append(tid)
    return [groups[k] for k in sorted(groups, key=lambda r: groups[r][0])]


def _umbrella_labels(mesh: Mesh, tids: list[int]):
    """Per (triangle, corner) umbrella ids: triangles around a vertex are
    glued only across edges with exactly two incident triangles."""
    tidset = set(tids)
    # vertex -> list of (tid, corner)
    star: dict[int, list[int]] = {}
    for tid in tids:
        for v in mesh.triangles[tid]:
            star.setdefault(v, []).append(tid)
    labels: dict[tuple[int, int], int] = {}
    next_label = 0
    for v, vtids in sorted(star.items()):
        local = {t: i for i, t in enumerate(vtids)}
        uf = _UnionFind(len(vtids))
        for t in vtids:
            tri = mesh.triangles[t]
            for u in tri:
                if u == v:
                    continue
                key = edge_key(v, u)
                inc = mesh.edge_map[key]
                if len(inc) == 2 and inc[0] in tidset and inc[1] in tidset:
                    if inc[0] in local and inc[1] in local:
                        uf.union(local[inc[0]], local[inc[1]])
        roots: dict[int, int] = {}
        for t in vtids:
            r = uf.find(local[t])
            if r not in roots:
                roots[r] = next_label
                next_label += 1
            labels[(t, v)] = roots[r]
    return labels


def manifold_decompose(mesh: Mesh) -> list[Mesh]:
    """Unique combinatorial decomposition into manifold-with-boundary parts:
    triangle stars split at singular vertices into umbrella components, and
    edges left with three or more incidences split fully.

    Purely combinatorial: duplicated vertices keep identical coordinates, so
    the union of the output realizations equals the input realization.
    """
    components = two_connected_components(mesh)
    out = []
    for tids in components:
        labels = _umbrella_labels(mesh, tids)
        # Map umbrella label -> new vertex id per component.
        vid_of: dict[tuple[int, int], int] = {}
        vertices: list[ExactPoint] = []
        origins: list[int] = []
        new_tris = []
        for tid in tids:
            tri = mesh.triangles[tid]
            ids = []
            for v in tri:
                lab = labels[(tid, v)]
                key = (v, lab)
                nid = vid_of.get(key)
                if nid is None:
                    nid = len(vertices)
                    vid_of[key] = nid
                    vertices.append(mesh.vertices[v])
                    origins.append(v)
                ids.append(nid)
            new_tris.append(tuple(ids))
        sub = Mesh(vertices, new_tris, vertex_origins=origins)
        # Residual singular edges (stars reconnecting around both endpoints):
        # detach those triangles entirely so every edge carries <= 2 faces.
        bad = [e for e, tr in sub.edge_map.items() if len(tr) > 2]
        if bad:
            verts = list(sub.vertices)
            orig = list(sub.vertex_origins)
            tris2 = [list(t) for t in sub.triangles]
            for e in bad:
                for tid in sub.edge_map[e][1:]:
                    for corner, v in enumerate(tris2[tid]):
                        if v in e:
                            verts.append(verts[v])
                            orig.append(orig[v])
                            tris2[tid][corner] = len(verts) - 1
            sub = Mesh(verts, [tuple(t) for t in tris2], vertex_origins=orig)
        out.append(sub)
    return out


def is_manifold_connected(mesh: Mesh) -> bool:
    """True iff the manifold decomposition is a single component."""
    if not mesh.triangles:
        return True
    return len(two_connected_components(mesh)) == 1


def split_manifold_connected(mesh: Mesh) -> list[Mesh]:
    """Separate manifold-connected components, duplicating the singular
    vertices/edges they share; geometry is untouched and the union of the
    outputs' realizations equals the input realization."""
    out = []
    for tids in two_connected_components(mesh):
        remap: dict[int, int] = {}
        vertices: list[ExactPoint] = []
        origins: list[int] = []
        tris = []
        for tid in tids:
            ids = []
            for v in mesh.triangles[tid]:
                nid = remap.get(v)
                if nid is None:
                    nid = len(vertices)
                    remap[v] = nid
                    vertices.append(mesh.vertices[v])
                    origins.append(v)
                ids.append(nid)
            tris.append(tuple(ids))
        out.append(Mesh(vertices, tris, vertex_origins=origins))
    return out


def edge_connected_components(mesh: Mesh) -> list[list[int]]:
    """Groups of triangles connected through shared edges (any incidence)."""
    uf = _UnionFind(len(mesh.triangles))
    for tris in mesh.edge_map.values():
        for other in tris[1:]:
            uf.union(tris[0], other)
    groups: dict[int, list[int]] = {}
    for tid in range(len(mesh.triangles)):
        groups.setdefault(uf.find(tid), []).append(tid)
    return [groups[k] for k in sorted(groups, key=lambda r: groups[r][0])]


def submesh(mesh: Mesh, tids: Iterable[int]) -> Mesh:
    """Mesh restricted to the given triangles, vertices reindexed."""
    remap: dict[int, int] = {}
    vertices: list[ExactPoint] = []
    origins: list[int] = []
    tris = []
    for tid in tids:
        ids = []
        for v in mesh.triangles[tid]:
            nid = remap.get(v)
            if nid is None:
                nid = len(vertices)
                remap[v] = nid
                vertices.append(mesh.vertices[v])
                origins.append(v)
            ids.append(nid)
        tris.append(tuple(ids))
    return Mesh(vertices, tris, vertex_origins=origins)
