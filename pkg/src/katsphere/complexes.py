"""Oriented sphere triangulations and their trivalent duals.

A triangulation is given as a list of oriented triangles over vertices
0..n-1.  Validation enforces that the face list encodes a simplicial
triangulation of the 2-sphere with more than four vertices; everything
else here (rotation system, curve enumeration, dualization) is derived
from that face list alone.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import (
    NotManifold,
    NotSimple,
    NotSphere,
    NotTrivalent,
    TooFewVertices,
)

Vertex = int
Edge = tuple[int, int]  # undirected, always stored with u < v
Face = tuple[int, int, int]


def norm_edge(u: Vertex, v: Vertex) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class CurveReport:
    """A combinatorial curve on the triangulation.

    kind is one of 'arc2', 'face3', 'separating3', 'separating4',
    'prismatic3', 'prismatic4'.  For arcs, vertices = (endpoint, middle,
    endpoint); for cycles, vertices in cyclic order.  side_counts gives
    the number of vertices strictly on each side of a closed curve
    (sorted ascending), and is None for arcs.
    """

    kind: str
    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]
    side_counts: tuple[int, int] | None = None


class Triangulation:
    """Immutable oriented triangulation of the sphere.

    Built via build_triangulation; do not mutate fields after construction.
    """

    def __init__(self, faces: tuple[Face, ...], n_vertices: int,
                 edges: tuple[Edge, ...],
                 neighbors: tuple[tuple[int, ...], ...],
                 vertex_face_cycles: tuple[tuple[int, ...], ...],
                 faces_of_edge: dict[Edge, tuple[int, int]]):
        self.faces = faces
        self.n_vertices = n_vertices
        self.edges = edges                      # sorted; fixes coordinate order
        self.edge_index = {e: i for i, e in enumerate(edges)}
        self.neighbors = neighbors              # cyclic rotation order per vertex
        self.adjacent = tuple(frozenset(nb) for nb in neighbors)
        self.vertex_face_cycles = vertex_face_cycles  # face indices around each vertex
        self.faces_of_edge = faces_of_edge
        self.face_index = {frozenset(f): i for i, f in enumerate(faces)}

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degree(self, v: Vertex) -> int:
        return len(self.neighbors[v])

    def is_face(self, u: Vertex, v: Vertex, w: Vertex) -> bool:
        return frozenset((u, v, w)) in self.face_index

    @property
    def is_double_tetrahedron(self) -> bool:
        """Triangular bipyramid: 5 vertices, two of them of degree 3."""
        if self.n_vertices != 5:
            return False
        return sum(1 for v in range(5) if self.degree(v) == 3) == 2

    def __repr__(self) -> str:
        return (f"Triangulation(V={self.n_vertices}, E={self.n_edges}, "
                f"F={self.n_faces})")


def build_triangulation(faces: Iterable[Iterable[int]]) -> Triangulation:
    """Validate an oriented face list and derive the combinatorial structure.

    Raises NotSimple, NotManifold, NotSphere or TooFewVertices when the
    list does not describe a simplicial triangulation of the sphere on
    more than four vertices.
    """
    face_list: list[Face] = []
    for f in faces:
        tf = tuple(int(x) for x in f)
        if len(tf) != 3:
            raise NotSimple(f"face {tf} is not a triangle")
        if len(set(tf)) != 3:
            raise NotSimple(f"face {tf} repeats a vertex")
        if min(tf) < 0:
            raise NotSimple(f"face {tf} has a negative vertex index")
        face_list.append(tf)  # type: ignore[arg-type]
    if not face_list:
        raise TooFewVertices("empty face list")

    seen_sets = set()
    for f in face_list:
        key = frozenset(f)
        if key in seen_sets:
            raise NotSimple(f"two faces share the vertex set {sorted(f)}")
        seen_sets.add(key)

    vertices = sorted({v for f in face_list for v in f})
    n = vertices[-1] + 1
    if vertices != list(range(n)):
        raise NotSimple("vertex indices are not dense from 0")
    if n <= 4:
        raise TooFewVertices(f"{n} vertices; at least 5 required")

    # Each directed edge must appear exactly once; the reverse once too.
    directed: dict[tuple[int, int], int] = {}
    for fi, (a, b, c) in enumerate(face_list):
        for u, v in ((a, b), (b, c), (c, a)):
            if (u, v) in directed:
                raise NotManifold(f"directed edge {u}->{v} appears twice")
            directed[(u, v)] = fi
    for (u, v) in directed:
        if (v, u) not in directed:
            raise NotManifold(f"edge {{{u},{v}}} lacks a second face")

    edges = tuple(sorted({norm_edge(u, v) for (u, v) in directed}))
    if n - len(edges) + len(face_list) != 2:
        raise NotSphere(
            f"Euler characteristic {n - len(edges) + len(face_list)} != 2")

    # Rotation system: inside face (v, x, y) the successor of x around v is y.
    succ: list[dict[int, int]] = [dict() for _ in range(n)]
    for (a, b, c) in face_list:
        for v, x, y in ((a, b, c), (b, c, a), (c, a, b)):
            succ[v][x] = y
    neighbors: list[tuple[int, ...]] = []
    for v in range(n):
        nb = succ[v]
        start = next(iter(nb))
        cycle = [start]
        cur = nb[start]
        while cur != start:
            cycle.append(cur)
            if len(cycle) > len(nb):
                raise NotManifold(f"link of vertex {v} is not a single cycle")
            cur = nb[cur]
        if len(cycle) != len(nb):
            raise NotManifold(f"link of vertex {v} is not a single cycle")
        neighbors.append(tuple(cycle))

    faces_of_edge: dict[Edge, tuple[int, int]] = {}
    for (u, v), fi in directed.items():
        e = norm_edge(u, v)
        if e not in faces_of_edge:
            faces_of_edge[e] = (fi, directed[(v, u)])

    face_idx = {frozenset(f): i for i, f in enumerate(face_list)}
    vertex_face_cycles: list[tuple[int, ...]] = []
    for v in range(n):
        cyc = neighbors[v]
        d = len(cyc)
        vertex_face_cycles.append(tuple(
            face_idx[frozenset((v, cyc[t], cyc[(t + 1) % d]))] for t in range(d)))

    return Triangulation(tuple(face_list), n, edges, tuple(neighbors),
                         tuple(vertex_face_cycles), faces_of_edge)


def two_edge_arcs(tri: Triangulation) -> tuple[CurveReport, ...]:
    """All two-edge arcs whose endpoints are distinct and non-adjacent.

    Each arc is reported once, as (endpoint, middle, endpoint) with the
    endpoints sorted.
    """
    out = []
    for mid in range(tri.n_vertices):
        nb = sorted(tri.neighbors[mid])
        for i, u in enumerate(nb):
            for w in nb[i + 1:]:
                if w not in tri.adjacent[u]:
                    out.append(CurveReport(
                        kind="arc2",
                        vertices=(u, mid, w),
                        edges=(norm_edge(u, mid), norm_edge(mid, w))))
    return tuple(out)


def _cycle_sides(tri: Triangulation, cycle: tuple[int, ...]) -> tuple[int, int]:
    """Vertex counts strictly inside the two sides of an embedded cycle.

    Faces are flood-filled without crossing the cycle's edges; a simple
    closed curve on the sphere yields exactly two face components, and
    every off-cycle vertex lies with all of its faces in one of them.
    """
    k = len(cycle)
    cedges = {norm_edge(cycle[i], cycle[(i + 1) % k]) for i in range(k)}
    comp = [-1] * tri.n_faces
    label = 0
    for start in range(tri.n_faces):
        if comp[start] != -1:
            continue
        comp[start] = label
        dq = deque([start])
        while dq:
            f = dq.popleft()
            a, b, c = tri.faces[f]
            for e in (norm_edge(a, b), norm_edge(b, c), norm_edge(c, a)):
                if e in cedges:
                    continue
                for g in tri.faces_of_edge[e]:
                    if comp[g] == -1:
                        comp[g] = label
                        dq.append(g)
        label += 1
    if label != 2:
        raise NotSphere(f"cutting along {cycle} produced {label} regions")
    on_cycle = set(cycle)
    counts = [0, 0]
    for v in range(tri.n_vertices):
        if v in on_cycle:
            continue
        counts[comp[tri.vertex_face_cycles[v][0]]] += 1
    lo, hi = sorted(counts)
    return (lo, hi)


def separating_cycles(tri: Triangulation, k: int) -> tuple[CurveReport, ...]:
    """Simple k-cycles (k = 3 or 4) with at least one vertex on each side."""
    if k == 3:
        raw = _three_cycles(tri)
    elif k == 4:
        raw = _four_cycles(tri)
    else:
        raise ValueError(f"cycle length {k} not supported (only 3 and 4)")
    out = []
    for cyc in raw:
        sides = _cycle_sides(tri, cyc)
        if sides[0] >= 1:
            edges = tuple(norm_edge(cyc[i], cyc[(i + 1) % k]) for i in range(k))
            out.append(CurveReport(kind=f"separating{k}", vertices=cyc,
                                   edges=edges, side_counts=sides))
    return tuple(out)


def _three_cycles(tri: Triangulation) -> list[tuple[int, int, int]]:
    out = []
    for (u, v) in tri.edges:
        for w in sorted(tri.adjacent[u] & tri.adjacent[v]):
            if w > v:
                out.append((u, v, w))
    return out


def _four_cycles(tri: Triangulation) -> list[tuple[int, int, int, int]]:
    # u is the least vertex; a < b are its two cycle neighbors; x opposite.
    out = []
    for u in range(tri.n_vertices):
        nb = sorted(x for x in tri.adjacent[u] if x > u)
        for i, a in enumerate(nb):
            for b in nb[i + 1:]:
                for x in sorted(tri.adjacent[a] & tri.adjacent[b]):
                    if x > u and x != u:
                        out.append((u, a, x, b))
    return out


def face_cycles_report(tri: Triangulation) -> tuple[CurveReport, ...]:
    """Each face boundary as a curve report (kind 'face3')."""
    out = []
    for f in tri.faces:
        edges = tuple(norm_edge(f[i], f[(i + 1) % 3]) for i in range(3))
        out.append(CurveReport(kind="face3", vertices=f, edges=edges))
    return tuple(out)


# -- dual complex ------------------------------------------------------------

class DualComplex:
    """Oriented trivalent complex on the sphere (faces as vertex cycles)."""

    def __init__(self, faces: tuple[tuple[int, ...], ...], n_vertices: int,
                 edges: tuple[Edge, ...],
                 faces_of_edge: dict[Edge, tuple[int, int]]):
        self.faces = faces
        self.n_vertices = n_vertices
        self.edges = edges
        self.faces_of_edge = faces_of_edge

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def __repr__(self) -> str:
        return (f"DualComplex(V={self.n_vertices}, E={self.n_edges}, "
                f"F={self.n_faces})")


def build_dual_complex(faces: Iterable[Iterable[int]]) -> DualComplex:
    """Validate a trivalent oriented polyhedral complex given by face cycles."""
    face_list: list[tuple[int, ...]] = []
    for f in faces:
        tf = tuple(int(x) for x in f)
        if len(tf) < 3:
            raise NotSimple(f"face {tf} has fewer than three vertices")
        if len(set(tf)) != len(tf):
            raise NotSimple(f"face {tf} repeats a vertex")
        face_list.append(tf)
    if not face_list:
        raise NotSphere("empty face list")
    verts = sorted({v for f in face_list for v in f})
    n = verts[-1] + 1 if verts else 0
    if verts != list(range(n)):
        raise NotSimple("vertex indices are not dense from 0")

    directed: dict[tuple[int, int], int] = {}
    for fi, f in enumerate(face_list):
        d = len(f)
        for i in range(d):
            u, v = f[i], f[(i + 1) % d]
            if (u, v) in directed:
                raise NotManifold(f"directed edge {u}->{v} appears twice")
            directed[(u, v)] = fi
    for (u, v) in directed:
        if (v, u) not in directed:
            raise NotManifold(f"edge {{{u},{v}}} lacks a second face")

    deg = defaultdict(int)
    for (u, v) in directed:
        deg[u] += 1
    for v in range(n):
        if deg[v] != 3:
            raise NotTrivalent(f"vertex {v} has degree {deg[v]}, expected 3")

    edges = tuple(sorted({norm_edge(u, v) for (u, v) in directed}))
    if n - len(edges) + len(face_list) != 2:
        raise NotSphere(
            f"Euler characteristic {n - len(edges) + len(face_list)} != 2")

    faces_of_edge: dict[Edge, tuple[int, int]] = {}
    for (u, v), fi in directed.items():
        e = norm_edge(u, v)
        if e not in faces_of_edge:
            faces_of_edge[e] = (fi, directed[(v, u)])
    return DualComplex(tuple(face_list), n, edges, faces_of_edge)


def dualize(tri: Triangulation) -> DualComplex:
    """Dual complex: one trivalent vertex per face, one face per vertex."""
    return build_dual_complex(tri.vertex_face_cycles)


class PrimalizeResult(NamedTuple):
    triangulation: Triangulation
    edge_map: dict[Edge, Edge]  # dual edge -> primal edge


def primalize(dual: DualComplex) -> PrimalizeResult:
    """Triangulation whose faces are the trivalent vertices of the dual.

    Also returns the induced bijection from dual edges to primal edges:
    the dual edge {w1, w2} maps to the primal edge joining the two dual
    faces that contain it.
    """
    # Corner (a, w, b) of a face cycle: edges {a,w} and {w,b} meet at w.
    # Around w, the face whose corner leaves through b follows this one.
    corners: dict[int, dict[int, tuple[int, int]]] = defaultdict(dict)
    for fi, f in enumerate(dual.faces):
        d = len(f)
        for i in range(d):
            a, w, b = f[(i - 1) % d], f[i], f[(i + 1) % d]
            corners[w][a] = (fi, b)
    triangles = []
    for w in range(dual.n_vertices):
        entry = corners[w]
        a0 = next(iter(entry))
        cyc = []
        a = a0
        for _ in range(3):
            fi, b = entry[a]
            cyc.append(fi)
            a = b
        if a != a0 or len(set(cyc)) != 3:
            raise NotTrivalent(f"faces around dual vertex {w} do not close up")
        # the corner chain walks clockwise around w, so flip to restore
        # the orientation the dual faces came from
        triangles.append(tuple(reversed(cyc)))
    tri = build_triangulation(triangles)
    edge_map: dict[Edge, Edge] = {}
    for e, (f1, f2) in dual.faces_of_edge.items():
        edge_map[e] = norm_edge(f1, f2)
    if set(edge_map.values()) != set(tri.edges):
        raise NotManifold("dual edges do not biject onto primal edges")
    return PrimalizeResult(tri, edge_map)


def prismatic_circuits(dual: DualComplex, k: int) -> tuple[CurveReport, ...]:
    """Length-k circuits (k = 3 or 4) crossing k dual edges with all
    endpoints distinct.

    The circuits live on the primal triangulation of the dual complex;
    vertices in the report are primal vertices, i.e. dual face indices.
    Every prismatic circuit is a separating cycle; for k = 4 the distinct
    flank requirement also excludes cycles two consecutive edges of which
    lie on one triangle.
    """
    tri, _ = primalize(dual)
    out = []
    for rep in separating_cycles(tri, k):
        flanks: list[int] = []
        for e in rep.edges:
            flanks.extend(tri.faces_of_edge[e])
        if len(set(flanks)) == 2 * k:
            out.append(CurveReport(kind=f"prismatic{k}", vertices=rep.vertices,
                                   edges=rep.edges, side_counts=rep.side_counts))
    return tuple(out)


# -- isomorphism -------------------------------------------------------------

def _canonical_encoding(tri: Triangulation) -> tuple:
    """Minimum over starting flags of a BFS relabeling of the rotation system.

    Two oriented triangulations have equal encodings exactly when an
    orientation-preserving relabeling carries one to the other.
    """
    best = None
    for u in range(tri.n_vertices):
        for v in tri.neighbors[u]:
            enc = _encode_from(tri, u, v)
            if best is None or enc < best:
                best = enc
    return best  # type: ignore[return-value]


def _encode_from(tri: Triangulation, u: int, v: int) -> tuple:
    label = {u: 0, v: 1}
    order = [u, v]
    ref = {u: v}  # reference neighbor used to start each rotation scan
    # v's reference is u (guaranteed adjacent)
    ref[v] = u
    queue = deque([u, v])
    rows = []
    seen_rows = {}
    while queue:
        x = queue.popleft()
        nb = tri.neighbors[x]
        i = nb.index(ref[x])
        scan = nb[i:] + nb[:i]
        row = []
        for y in scan:
            if y not in label:
                label[y] = len(order)
                order.append(y)
                ref[y] = x
                queue.append(y)
            row.append(label[y])
        seen_rows[label[x]] = tuple(row)
    for i in range(len(order)):
        rows.append(seen_rows[i])
    return tuple(rows)


def is_isomorphic(a: Triangulation, b: Triangulation) -> bool:
    """Orientation-preserving combinatorial isomorphism test."""
    if (a.n_vertices, a.n_edges, a.n_faces) != (b.n_vertices, b.n_edges, b.n_faces):
        return False
    return _canonical_encoding(a) == _canonical_encoding(b)
