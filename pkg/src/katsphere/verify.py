"""Diagnostics for solved circle patterns.

The checks are organized around a chain of nested configuration classes:

* contact structure: adjacent caps overlap, non-adjacent caps are
  strictly disjoint,
* prescribed angles: the overlap angles match a target assignment,
* gauge position: the distinguished face sits in normalized position
  with great-circle caps,
* irreducibility: no proper subset of the caps already covers the
  sphere.

Each stage implies the previous one, and `verify_pattern` reports the
deepest stage a configuration reaches together with all the individual
diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .angles import AngleAssignment
from .complexes import Triangulation, separating_cycles
from .sphere import (
    circle_intersection_points,
    fibonacci_sphere,
    signed_excess,
    triple_intersection_empty,
)

_PI = math.pi

TANGENCY_EPS = 1e-9         # |I - 1| below this counts as tangency
GAUGE_POSITION_EPS = 1e-9   # allowed drift of the gauge caps
ANGLE_TOL = 1e-8            # overlap angle match for target assignments
EXCESS_TOL = 1e-6           # allowed defect of the total signed area


# ---------------------------------------------------------------------------
# contact graph
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContactViolation:
    kind: str                       # lost_overlap | engulfing | overlap
    pair: tuple[int, int]           # | containment | tangency
    inversive: float


@dataclass(frozen=True)
class ContactReport:
    ok: bool
    violations: tuple[ContactViolation, ...]
    overlapping_edges: int
    separated_pairs: int


def _pair_inversive(cfg, u: int, v: int) -> float:
    cr = math.cos(cfg.radii[u]) * math.cos(cfg.radii[v])
    sr = math.sin(cfg.radii[u]) * math.sin(cfg.radii[v])
    return (cr - float(cfg.centers[u] @ cfg.centers[v])) / sr


def check_contact_graph(tri: Triangulation, cfg,
                        tangency_eps: float = TANGENCY_EPS) -> ContactReport:
    """Adjacent caps must genuinely cross, all others must stay apart.

    Non-adjacent pairs at inversive distance 1 (within tangency_eps) are
    flagged as `tangency`, the boundary case where two disks touch in a
    single point.
    """
    bad: list[ContactViolation] = []
    n_edges = 0
    for (u, v) in tri.edges:
        inv = _pair_inversive(cfg, u, v)
        if inv >= 1.0:
            bad.append(ContactViolation("lost_overlap", (u, v), inv))
        elif inv <= -1.0:
            bad.append(ContactViolation("engulfing", (u, v), inv))
        else:
            n_edges += 1
    n_apart = 0
    for u in range(tri.n_vertices):
        for v in range(u + 1, tri.n_vertices):
            if v in tri.adjacent[u]:
                continue
            inv = _pair_inversive(cfg, u, v)
            if abs(inv - 1.0) <= tangency_eps:
                bad.append(ContactViolation("tangency", (u, v), inv))
            elif inv <= -1.0:
                bad.append(ContactViolation("containment", (u, v), inv))
            elif inv < 1.0:
                bad.append(ContactViolation("overlap", (u, v), inv))
            else:
                n_apart += 1
    return ContactReport(not bad, tuple(bad), n_edges, n_apart)


def separation_margin(tri: Triangulation, cfg) -> float:
    """Min over non-adjacent pairs of (inversive distance - 1)."""
    vals = [_pair_inversive(cfg, u, v)
            for u in range(tri.n_vertices)
            for v in range(u + 1, tri.n_vertices)
            if v not in tri.adjacent[u]]
    return min(vals) - 1.0 if vals else float("inf")


# ---------------------------------------------------------------------------
# irreducibility
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IrreducibilityReport:
    ok: bool
    witnesses: dict[int, np.ndarray]    # vertex -> point only its cap covers
    inconclusive: tuple[int, ...]
    covering_caps: tuple[int, ...]      # caps that alone cover the sphere


def _witness_candidates(tri: Triangulation, cfg, samples: int) -> np.ndarray:
    """Deterministic probe points: cap centers, corner points nudged
    outward, face circumpoints, and a Fibonacci lattice."""
    pts = [cfg.centers]
    for (u, v) in tri.edges:
        try:
            corners = circle_intersection_points(cfg.cap(u), cfg.cap(v))
        except Exception:
            continue
        for x in corners:
            away = 2.0 * x - cfg.centers[u] - cfg.centers[v]
            away = away - float(away @ x) * x
            n = float(np.linalg.norm(away))
            if n < 1e-12:
                continue
            away /= n
            for eps in (1e-7, 1e-4, 3e-2):
                y = x + eps * away
                pts.append((y / np.linalg.norm(y))[None, :])
    for (i, j, k) in tri.faces:
        n = np.cross(cfg.centers[j] - cfg.centers[i],
                     cfg.centers[k] - cfg.centers[i])
        norm = float(np.linalg.norm(n))
        if norm > 1e-12:
            pts.append((n / norm)[None, :])
            pts.append((-n / norm)[None, :])
    pts.append(fibonacci_sphere(samples))
    return np.vstack(pts)


def check_irreducible(tri: Triangulation, cfg,
                      samples: int = 20000) -> IrreducibilityReport:
    """Search a witness point per vertex that only this vertex's cap covers.

    A pattern is irreducible exactly when no union over a strict vertex
    subset covers the sphere; since unions grow with the subset, it is
    enough that for every single vertex the union of all other caps
    misses some point.  A vertex with no witness among the probes is
    reported inconclusive rather than reducible.
    """
    radii = np.asarray(cfg.radii, dtype=float)
    covering = tuple(int(v) for v in np.nonzero(radii >= _PI)[0])
    if covering:
        return IrreducibilityReport(False, {}, tuple(range(tri.n_vertices)),
                                    covering)
    probes = _witness_candidates(tri, cfg, samples)
    # cover[i, v] <=> probe i lies strictly inside cap v
    cover = probes @ cfg.centers.T > np.cos(radii)[None, :]
    only_one = cover.sum(axis=1) == 1
    witnesses: dict[int, np.ndarray] = {}
    for v in range(tri.n_vertices):
        hits = np.nonzero(only_one & cover[:, v])[0]
        if hits.size:
            witnesses[v] = probes[int(hits[0])]
    missing = tuple(v for v in range(tri.n_vertices) if v not in witnesses)
    return IrreducibilityReport(not missing, witnesses, missing, ())


# ---------------------------------------------------------------------------
# separating triples and tangencies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TripleResult:
    cycle: tuple[int, int, int]
    empty: bool
    witness: np.ndarray | None


@dataclass(frozen=True)
class TripleReport:
    ok: bool
    results: tuple[TripleResult, ...]


def check_separating_triples(tri: Triangulation, cfg) -> TripleReport:
    """Every separating 3-cycle's caps must have empty triple intersection."""
    results = []
    for rep in separating_cycles(tri, 3):
        i, j, k = rep.vertices
        empty, witness = triple_intersection_empty(
            cfg.cap(i), cfg.cap(j), cfg.cap(k))
        results.append(TripleResult((i, j, k), empty,
                                    None if witness is None else witness))
    return TripleReport(all(r.empty for r in results), tuple(results))


@dataclass(frozen=True)
class TangencyDiagnostic:
    pair: tuple[int, int]
    inversive: float
    point: np.ndarray
    third: int
    angle_sum: float
    consistent: bool


def tangency_diagnostics(tri: Triangulation, cfg,
                         tangency_eps: float = 1e-6,
                         angle_eps: float = 1e-6
                         ) -> tuple[TangencyDiagnostic, ...]:
    """Inspect near-tangent non-adjacent pairs.

    When non-adjacent disks touch, any third disk containing the contact
    point must see the pair under angles summing to at least pi.  A
    diagnostic with consistent=False signals a geometry violation near
    the degenerate boundary.
    """
    out: list[TangencyDiagnostic] = []
    for u in range(tri.n_vertices):
        for v in range(u + 1, tri.n_vertices):
            if v in tri.adjacent[u]:
                continue
            inv = _pair_inversive(cfg, u, v)
            if abs(inv - 1.0) > tangency_eps:
                continue
            # contact point: midpoint of the two boundary points facing
            # each other along the arc through the centers
            point = _facing_midpoint(cfg, u, v)
            for w in range(tri.n_vertices):
                if w in (u, v):
                    continue
                margin = float(point @ cfg.centers[w]) - math.cos(cfg.radii[w])
                if margin < -1e-9:
                    continue
                th_wu = _clipped_angle(_pair_inversive(cfg, w, u))
                th_wv = _clipped_angle(_pair_inversive(cfg, w, v))
                total = th_wu + th_wv
                out.append(TangencyDiagnostic(
                    (u, v), inv, point, w, total,
                    total >= _PI - angle_eps))
    return tuple(out)


def _facing_midpoint(cfg, u: int, v: int) -> np.ndarray:
    p, q = cfg.centers[u], cfg.centers[v]
    axis = np.cross(p, q)
    n = float(np.linalg.norm(axis))
    if n < 1e-12:
        return p.copy()
    axis /= n
    x_u = _rotate_toward(p, q, cfg.radii[u], axis)
    x_v = _rotate_toward(q, p, cfg.radii[v], axis)
    mid = x_u + x_v
    return mid / np.linalg.norm(mid)


def _rotate_toward(p: np.ndarray, q: np.ndarray, angle: float,
                   axis: np.ndarray) -> np.ndarray:
    t = q - float(q @ p) * p
    t /= np.linalg.norm(t)
    return math.cos(angle) * p + math.sin(angle) * t


def _clipped_angle(inv: float) -> float:
    return math.acos(min(1.0, max(-1.0, inv)))


# ---------------------------------------------------------------------------
# layout shape
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LayoutReport:
    ok: bool
    total_excess: float
    flipped_faces: tuple[tuple[int, int, int], ...]
    degenerate_faces: tuple[tuple[int, int, int], ...]


def check_center_triangulation(tri: Triangulation, cfg,
                               excess_tol: float = EXCESS_TOL) -> LayoutReport:
    """The centers must span a geodesic triangulation of the sphere.

    Each face's center triple has to be positively oriented for the
    stored rotation system and the signed areas have to add up to the
    full sphere area 4*pi.
    """
    flipped = []
    degenerate = []
    total = 0.0
    for f in tri.faces:
        ex = signed_excess(cfg.centers[f[0]], cfg.centers[f[1]],
                           cfg.centers[f[2]])
        total += ex
        if ex == 0.0:
            degenerate.append(f)
        elif ex < 0.0:
            flipped.append(f)
    ok = (not flipped and not degenerate
          and abs(total - 4.0 * _PI) <= excess_tol)
    return LayoutReport(ok, total, tuple(flipped), tuple(degenerate))


@dataclass(frozen=True)
class RadiiStats:
    ok: bool
    min_radius: float
    max_nongauge_radius: float


def radii_bounds(tri: Triangulation, cfg) -> RadiiStats:
    """Non-gauge radii must stay below pi/2 for a gauged pattern."""
    nongauge = [v for v in range(tri.n_vertices) if v not in cfg.gauge_face]
    top = float(np.max(cfg.radii[nongauge])) if nongauge else float("nan")
    return RadiiStats(bool(top < _PI / 2), float(np.min(cfg.radii)), top)


@dataclass(frozen=True)
class RingRatioReport:
    max_ratio: float
    table: dict[tuple[int, int], float]


def ring_ratios(tri: Triangulation, cfg) -> RingRatioReport:
    """Largest radius ratio across an edge; bounded on compact families."""
    table = {}
    for (u, v) in tri.edges:
        hi = max(cfg.radii[u], cfg.radii[v])
        lo = min(cfg.radii[u], cfg.radii[v])
        table[(u, v)] = float(hi / lo)
    return RingRatioReport(max(table.values()), table)


# ---------------------------------------------------------------------------
# aggregate report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    in_contact: bool            # adjacency realized, others separated
    in_target: bool             # overlap angles match the assignment
    in_gauge: bool              # gauge face in normalized position
    in_irreducible: bool        # deepest class: irreducible gauged pattern
    angle_error_inf: float
    separation_margin: float
    contact: ContactReport
    irreducibility: IrreducibilityReport
    triples: TripleReport
    tangencies: tuple[TangencyDiagnostic, ...]
    layout: LayoutReport
    radii: RadiiStats
    rings: RingRatioReport

    @property
    def ok(self) -> bool:
        return self.in_irreducible and self.triples.ok and self.layout.ok


def _gauge_in_position(cfg) -> bool:
    a, b, c = cfg.gauge_face
    eps = GAUGE_POSITION_EPS
    if np.linalg.norm(cfg.centers[a] - np.array([0.0, 0.0, -1.0])) > eps:
        return False
    if abs(cfg.centers[b][1]) > eps or cfg.centers[b][0] <= 0.0:
        return False
    if cfg.centers[c][1] <= 0.0:
        return False
    return bool(np.max(np.abs(cfg.radii[[a, b, c]] - _PI / 2)) <= eps)


def verify_pattern(tri: Triangulation, cfg, theta: AngleAssignment,
                   samples: int = 20000,
                   angle_tol: float = ANGLE_TOL) -> VerificationReport:
    """Run the full diagnostic battery on a configuration.

    The four headline flags form a chain: matching the target angles
    presumes a correct contact graph, gauge position presumes matching
    angles, and the irreducibility flag presumes all of the above.
    """
    contact = check_contact_graph(tri, cfg)
    err = 0.0
    for (u, v) in tri.edges:
        inv = _pair_inversive(cfg, u, v)
        if abs(inv) < 1.0:
            err = max(err, abs(math.acos(inv) - theta[(u, v)]))
        else:
            err = float("inf")
    in_contact = contact.ok
    in_target = in_contact and err <= angle_tol
    in_gauge = in_target and _gauge_in_position(cfg)
    irr = check_irreducible(tri, cfg, samples)
    in_irr = in_gauge and irr.ok
    return VerificationReport(
        in_contact=in_contact,
        in_target=in_target,
        in_gauge=in_gauge,
        in_irreducible=in_irr,
        angle_error_inf=err,
        separation_margin=separation_margin(tri, cfg),
        contact=contact,
        irreducibility=irr,
        triples=check_separating_triples(tri, cfg),
        tangencies=tangency_diagnostics(tri, cfg),
        layout=check_center_triangulation(tri, cfg),
        radii=radii_bounds(tri, cfg),
        rings=ring_ratios(tri, cfg),
    )
