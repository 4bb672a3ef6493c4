"""Small reference triangulations used in tests and examples.

All face lists are consistently oriented (each directed edge appears
exactly once), so build_triangulation accepts them as given.
"""

from __future__ import annotations

from .complexes import Triangulation, build_triangulation


def octahedron() -> Triangulation:
    """Vertices 0..5 with antipodal pairs (0,1), (2,3), (4,5)."""
    faces = [
        (0, 2, 4), (2, 1, 4), (1, 3, 4), (3, 0, 4),
        (2, 0, 5), (1, 2, 5), (3, 1, 5), (0, 3, 5),
    ]
    return build_triangulation(faces)


def bipyramid(m: int) -> Triangulation:
    """Double pyramid over an m-gon: equator 0..m-1, apexes m and m+1."""
    if m < 3:
        raise ValueError("equator needs at least 3 vertices")
    top, bot = m, m + 1
    faces = []
    for i in range(m):
        j = (i + 1) % m
        faces.append((i, j, top))
        faces.append((j, i, bot))
    return build_triangulation(faces)


def stacked_tetrahedra(stacks: int) -> Triangulation:
    """Tetrahedron with `stacks` successive face subdivisions (stacks >= 1).

    Each step replaces the current first face by the cone over its
    boundary from a fresh vertex.  One stack gives the 5-vertex double
    tetrahedron; more stacks grow a deterministic stacked family.
    """
    if stacks < 1:
        raise ValueError("at least one stack required (4 vertices is too few)")
    faces = [(0, 1, 2), (0, 2, 3), (0, 3, 1), (1, 3, 2)]
    nxt = 4
    for _ in range(stacks):
        a, b, c = faces.pop(0)
        faces.extend([(a, b, nxt), (b, c, nxt), (c, a, nxt)])
        nxt += 1
    return build_triangulation(faces)


def icosahedron() -> Triangulation:
    """Vertex 0 on top, upper ring 1..5, lower ring 6..10, vertex 11 below."""
    faces = []
    for i in range(1, 6):
        j = i % 5 + 1
        faces.append((0, i, j))
        faces.append((i, i + 5, j))
        faces.append((i + 5, j + 5, j))
        faces.append((11, j + 5, i + 5))
    return build_triangulation(faces)
