"""Gauged Levenberg-Marquardt solver for spherical circle patterns.

Unknowns and gauge
------------------
A configuration assigns to every vertex of the triangulation a spherical
cap.  The Moebius group of the sphere has dimension six, which the solver
removes by pinning the caps of one distinguished face (a, b, c):

* all three gauge radii are held at pi/2 (great circles),
* the center of `a` is the south pole (0, 0, -1),
* the center of `b` stays on the meridian y = 0 with x > 0, leaving a
  single colatitude coordinate,
* the center of `c` keeps y > 0, which fixes the remaining reflection.

The free coordinates are then the meridian angle of `b`, two tangent-plane
coordinates per remaining vertex, and one radius per vertex outside the
gauge face.  That is 1 + 2(n-2) + (n-3) = 3n - 6 coordinates against one
overlap-angle residual per edge, a square system.

The target angles are reached by a homotopy that pulls the prescribed
assignment toward the uniform pi/3 assignment and walks back out, warm
starting each leg from the previous solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .angles import AngleAssignment, check_admissible, interpolate
from .complexes import Triangulation
from .errors import (
    ConditionsViolated,
    EdgeNotOverlapping,
    NearSingularChart,
    NotAFace,
)
from .sphere import (
    Cap,
    boost_to_center,
    cap_plane_normal,
    common_orthogonal_point,
    plane_normal_cap,
    signed_excess,
)

_PI = math.pi

RADIUS_FLOOR = 0.01
RADIUS_CEILING = _PI - 0.01
_GAUGE_RADIUS = _PI / 2


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Configuration:
    """Cap centers and radii for every vertex, plus the gauged face."""

    tri: Triangulation
    centers: np.ndarray          # (n, 3) unit rows
    radii: np.ndarray            # (n,) in (0, pi)
    gauge_face: tuple[int, int, int]

    def cap(self, v: int) -> Cap:
        return Cap(self.centers[v], float(self.radii[v]))

    def caps(self) -> list[Cap]:
        return [self.cap(v) for v in range(self.tri.n_vertices)]

    def with_data(self, centers: np.ndarray, radii: np.ndarray) -> "Configuration":
        return replace(self, centers=centers, radii=radii)


@dataclass(frozen=True)
class HomotopyRecord:
    """Diagnostics for one accepted homotopy target."""

    s: float
    iterations: int
    residual_inf: float
    damping: float
    step_norm: float
    min_radius: float
    max_nongauge_radius: float
    separation_margin: float


@dataclass(frozen=True)
class SolveReport:
    converged: bool
    residual_inf: float
    iterations: int
    targets: tuple[HomotopyRecord, ...]
    repairs: int
    failure_reason: str | None = None


@dataclass(frozen=True)
class SolveOptions:
    tolerance: float = 1e-10
    max_iterations: int = 250          # per homotopy target
    initial_damping: float = 1e-3
    damping_grow: float = 10.0
    damping_shrink: float = 3.0
    damping_max: float = 1e10
    anchor_attempts: int = 10          # cold starts tried per gauge
    fallback_gauges: int = 6           # other faces tried when the gauge resists
    homotopy_step: float = 0.25
    step_grow: float = 1.5
    step_shrink: float = 0.5
    min_step: float = 1e-4
    repair_attempts: int = 80
    seed: int | None = None
    first_anchor: float | None = None  # interpolation parameter tried first


# ---------------------------------------------------------------------------
# gauge bookkeeping
# ---------------------------------------------------------------------------

def _require_oriented_face(tri: Triangulation, face) -> tuple[int, int, int]:
    """The face as stored, provided `face` is one of its cyclic rotations."""
    f = tuple(int(v) for v in face)
    if len(f) != 3:
        raise NotAFace(f"gauge face must have three vertices, got {f}")
    for stored in tri.faces:
        for k in range(3):
            if f == stored[k:] + stored[:k]:
                return stored
    raise NotAFace(f"{f} is not an oriented face of the triangulation")


class _Layout:
    """Index bookkeeping between free coordinates and configuration data."""

    def __init__(self, tri: Triangulation, gauge: tuple[int, int, int]):
        a, b, c = gauge
        self.a, self.b, self.c = a, b, c
        self.tangent_vertices = sorted(v for v in range(tri.n_vertices)
                                       if v not in (a, b))
        self.radius_vertices = sorted(v for v in range(tri.n_vertices)
                                      if v not in (a, b, c))
        self.tangent_col = {v: 1 + 2 * i
                            for i, v in enumerate(self.tangent_vertices)}
        base = 1 + 2 * len(self.tangent_vertices)
        self.radius_col = {v: base + i
                           for i, v in enumerate(self.radius_vertices)}
        self.n_free = base + len(self.radius_vertices)


def _tangent_basis(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of the tangent plane at a unit vector."""
    seed = np.zeros(3)
    seed[int(np.argmin(np.abs(p)))] = 1.0
    e1 = seed - float(seed @ p) * p
    n = float(np.linalg.norm(e1))
    if n < 1e-12:
        raise NearSingularChart(f"tangent chart degenerate at {p}")
    e1 = e1 / n
    return e1, np.cross(p, e1)


def _meridian_angle(p: np.ndarray) -> float:
    """Colatitude of a point on the meridian y = 0, measured from south."""
    return math.atan2(float(p[0]), -float(p[2]))


def _meridian_point(phi: float) -> np.ndarray:
    return np.array([math.sin(phi), 0.0, -math.cos(phi)])


# ---------------------------------------------------------------------------
# initial configuration
# ---------------------------------------------------------------------------

def initial_configuration(tri: Triangulation, gauge_face=None) -> Configuration:
    """Deterministic starting configuration in exact gauge position.

    The gauge caps are placed as three mutually orthogonal great circles
    (centers at the south pole, +x and +y).  The remaining caps must then
    live in the far octant, the spherical triangle cut out by the three
    gauge circles on the opposite side of the sphere; a harmonic layout
    places each free vertex at the average of its neighbors, with gauge
    neighbors standing in as soft anchors on the matching side of a model
    triangle, and the model is mapped to the far octant barycentrically.
    Free radii start at half the mean distance to the neighbors.
    """
    gauge = _require_oriented_face(tri, gauge_face or tri.faces[0])
    a, b, c = gauge
    n = tri.n_vertices

    # model triangle corners stand for the far-octant corners, which lie
    # on the circle pairs (a, b), (b, c) and (c, a) respectively
    m_ab = np.array([0.0, 0.0])
    m_bc = np.array([1.0, 0.0])
    m_ca = np.array([0.5, math.sqrt(3.0) / 2.0])
    side_mid = {a: 0.5 * (m_ab + m_ca),    # midpoint of the side on circle a
                b: 0.5 * (m_ab + m_bc),
                c: 0.5 * (m_bc + m_ca)}
    corner = {frozenset((a, b)): m_ab,
              frozenset((b, c)): m_bc,
              frozenset((c, a)): m_ca}
    centroid = (m_ab + m_bc + m_ca) / 3.0

    def anchor_for(v: int) -> np.ndarray:
        """Model-plane stand-in for the gauge neighbors of a free vertex.

        A vertex tied to one gauge circle belongs near that side; tied to
        two, near their shared corner; tied to all three, in the middle.
        """
        gs = frozenset(gauge) & frozenset(tri.neighbors[v])
        if len(gs) == 1:
            return side_mid[next(iter(gs))]
        if len(gs) == 2:
            return corner[gs]
        return centroid

    free = [v for v in range(n) if v not in gauge]
    idx = {v: i for i, v in enumerate(free)}
    mat = np.zeros((len(free), len(free)))
    rhs = np.zeros((len(free), 2))
    for v in free:
        nbrs = tri.neighbors[v]
        mat[idx[v], idx[v]] = float(len(nbrs))
        for u in nbrs:
            if u in gauge:
                rhs[idx[v]] += anchor_for(v)
            else:
                mat[idx[v], idx[u]] -= 1.0
    plane = np.linalg.solve(mat, rhs)

    # barycentric transfer onto the far octant of the orthogonal gauge
    q_ab = np.array([0.0, -1.0, 0.0])
    q_bc = np.array([0.0, 0.0, 1.0])
    q_ca = np.array([-1.0, 0.0, 0.0])
    area = _tri_area2(m_ab, m_bc, m_ca)
    centers = np.zeros((n, 3))
    centers[a] = np.array([0.0, 0.0, -1.0])
    centers[b] = np.array([1.0, 0.0, 0.0])
    centers[c] = np.array([0.0, 1.0, 0.0])
    for v in free:
        w = plane[idx[v]]
        lam_ab = _tri_area2(w, m_bc, m_ca) / area
        lam_bc = _tri_area2(m_ab, w, m_ca) / area
        lam_ca = _tri_area2(m_ab, m_bc, w) / area
        p = lam_ab * q_ab + lam_bc * q_bc + lam_ca * q_ca
        centers[v] = p / np.linalg.norm(p)

    radii = np.empty(n)
    for v in range(n):
        dots = centers[list(tri.neighbors[v])] @ centers[v]
        mean = float(np.mean(np.arccos(np.clip(dots, -1.0, 1.0))))
        radii[v] = min(max(0.5 * mean, 0.05), _GAUGE_RADIUS - 0.05)
    radii[[a, b, c]] = _GAUGE_RADIUS
    return Configuration(tri, centers, radii, gauge)


def _tri_area2(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


# ---------------------------------------------------------------------------
# residual and Jacobian
# ---------------------------------------------------------------------------

def _edge_arrays(tri: Triangulation) -> tuple[np.ndarray, np.ndarray]:
    e = np.asarray(tri.edges, dtype=int)
    return e[:, 0], e[:, 1]


def _inversive_all(cfg: Configuration) -> np.ndarray:
    """Inversive distance per edge, in the order of tri.edges."""
    u, v = _edge_arrays(cfg.tri)
    cr = np.cos(cfg.radii)
    sr = np.sin(cfg.radii)
    dots = np.einsum("ij,ij->i", cfg.centers[u], cfg.centers[v])
    return (cr[u] * cr[v] - dots) / (sr[u] * sr[v])


def pattern_angles(cfg: Configuration) -> dict[tuple[int, int], float]:
    """Overlap angle on every edge; EdgeNotOverlapping if a pair separated."""
    inv = _inversive_all(cfg)
    bad = np.nonzero(np.abs(inv) >= 1.0)[0]
    if bad.size:
        e = cfg.tri.edges[int(bad[0])]
        raise EdgeNotOverlapping(
            f"caps on edge {e} have inversive distance {inv[int(bad[0])]:.6f}")
    th = np.arccos(inv)
    return {e: float(th[i]) for i, e in enumerate(cfg.tri.edges)}


def residual(cfg: Configuration, theta: AngleAssignment) -> np.ndarray:
    """Angle errors, one entry per edge of the triangulation (sorted)."""
    target = np.array([theta[e] for e in cfg.tri.edges])
    inv = _inversive_all(cfg)
    bad = np.nonzero(np.abs(inv) >= 1.0)[0]
    if bad.size:
        e = cfg.tri.edges[int(bad[0])]
        raise EdgeNotOverlapping(
            f"caps on edge {e} have inversive distance {inv[int(bad[0])]:.6f}")
    return np.arccos(inv) - target


def _residual_or_none(cfg: Configuration, target: np.ndarray) -> np.ndarray | None:
    inv = _inversive_all(cfg)
    if np.any(np.abs(inv) >= 1.0 - 1e-12):
        return None
    return np.arccos(inv) - target


def jacobian(cfg: Configuration) -> np.ndarray:
    """Analytic derivative of the edge angles in the free coordinates.

    Rows follow tri.edges; columns follow the gauge layout (meridian angle
    of b, tangent pairs, radii).  The angle on edge (u, v) is
    arccos(I(u, v)), so each entry carries the factor -1/sqrt(1 - I^2).
    """
    tri = cfg.tri
    lay = _Layout(tri, cfg.gauge_face)
    P, R = cfg.centers, cfg.radii
    cr, sr = np.cos(R), np.sin(R)
    inv = _inversive_all(cfg)
    scale = 1.0 / np.sqrt(np.maximum(1.0 - inv * inv, 1e-30))

    bases = {v: _tangent_basis(P[v]) for v in lay.tangent_vertices}
    t_b = _tangent_basis_meridian(P[lay.b])

    J = np.zeros((len(tri.edges), lay.n_free))
    for row, (u, v) in enumerate(tri.edges):
        s = scale[row]
        denom = sr[u] * sr[v]
        for end, other in ((u, v), (v, u)):
            # position derivative: dTheta/dt = (t . p_other) / (denom sqrt)
            if end == lay.b:
                J[row, 0] = s * float(t_b @ P[other]) / denom
            elif end in bases:
                e1, e2 = bases[end]
                col = lay.tangent_col[end]
                J[row, col] = s * float(e1 @ P[other]) / denom
                J[row, col + 1] = s * float(e2 @ P[other]) / denom
            # radius derivative:
            # dTheta/dr_end = (cos r_other - C cos r_end) / (sin^2 r_end sin r_other sqrt)
            if end in lay.radius_col:
                C = float(P[end] @ P[other])
                J[row, lay.radius_col[end]] = (
                    s * (cr[other] - C * cr[end]) / (sr[end] ** 2 * sr[other]))
    return J


def _tangent_basis_meridian(p_b: np.ndarray) -> np.ndarray:
    """Unit tangent of the meridian curve at the gauge vertex b."""
    return np.array([-p_b[2], 0.0, p_b[0]])


def apply_step(cfg: Configuration, delta: np.ndarray,
               clip_radii: bool = False) -> Configuration:
    """Move the free coordinates by `delta`, staying exactly in gauge.

    With clip_radii the updated radii are clamped just inside the
    feasibility box, letting a descent step slide along the wall instead
    of being rejected outright.
    """
    lay = _Layout(cfg.tri, cfg.gauge_face)
    if delta.shape != (lay.n_free,):
        raise ValueError(f"step has shape {delta.shape}, expected ({lay.n_free},)")
    centers = cfg.centers.copy()
    radii = cfg.radii.copy()

    phi = _meridian_angle(centers[lay.b]) + float(delta[0])
    centers[lay.b] = _meridian_point(phi)

    for v in lay.tangent_vertices:
        e1, e2 = _tangent_basis(cfg.centers[v])
        col = lay.tangent_col[v]
        p = cfg.centers[v] + delta[col] * e1 + delta[col + 1] * e2
        centers[v] = p / np.linalg.norm(p)

    for v in lay.radius_vertices:
        r = radii[v] + float(delta[lay.radius_col[v]])
        if clip_radii:
            r = min(max(r, RADIUS_FLOOR + 1e-6), RADIUS_CEILING - 1e-6)
        radii[v] = r
    return cfg.with_data(centers, radii)


# ---------------------------------------------------------------------------
# gauge normalization of external configurations
# ---------------------------------------------------------------------------

def gauge_normalize(cfg: Configuration) -> Configuration:
    """Rotate (and reflect across y = 0 if needed) into gauge position.

    Afterwards the center of the first gauge vertex is exactly the south
    pole, the second sits on the meridian y = 0 with x >= 0, and the third
    has y > 0.  Radii are untouched; this is the rigid-motion part of the
    gauge only.
    """
    a, b, c = cfg.gauge_face
    z = -cfg.centers[a]
    x = cfg.centers[b] - float(cfg.centers[b] @ z) * z
    nx = float(np.linalg.norm(x))
    if nx < 1e-12:
        raise NearSingularChart("gauge vertices a and b are (anti)podal")
    x = x / nx
    y = np.cross(z, x)
    rot = np.vstack([x, y, z])
    centers = cfg.centers @ rot.T
    if centers[c, 1] < 0.0:
        centers[:, 1] *= -1.0
    centers[a] = np.array([0.0, 0.0, -1.0])
    centers[b, 1] = 0.0
    centers[b] /= np.linalg.norm(centers[b])
    return cfg.with_data(centers, cfg.radii.copy())


def regauge(cfg: Configuration, gauge_face) -> Configuration:
    """Transport a solved pattern to a different gauge face.

    Patterns are rigid up to sphere inversions, so the gauge is changed by
    the Lorentz boost that moves the intersection point of the new gauge
    planes to the ball center (turning those caps into great circles),
    followed by the rigid normalization.  Overlap angles are preserved.
    """
    stored = _require_oriented_face(cfg.tri, gauge_face)
    normals = np.array([cap_plane_normal(cfg.cap(v)) for v in stored])
    boost = boost_to_center(common_orthogonal_point(normals))
    centers = np.empty_like(cfg.centers)
    radii = np.empty_like(cfg.radii)
    for v in range(cfg.tri.n_vertices):
        moved = plane_normal_cap(boost @ cap_plane_normal(cfg.cap(v)))
        centers[v] = moved.center
        radii[v] = moved.radius
    out = replace(cfg, centers=centers, radii=radii, gauge_face=stored)
    out = gauge_normalize(out)
    radii = out.radii.copy()
    radii[list(stored)] = _GAUGE_RADIUS
    return out.with_data(out.centers, radii)


# ---------------------------------------------------------------------------
# feasibility gates
# ---------------------------------------------------------------------------

def _gate_state(cfg: Configuration) -> tuple[frozenset, frozenset]:
    """Current soft-violation instances: flipped faces and overlapping
    non-adjacent pairs."""
    tri = cfg.tri
    flipped = frozenset(
        f for f in tri.faces
        if signed_excess(cfg.centers[f[0]], cfg.centers[f[1]],
                         cfg.centers[f[2]]) <= 1e-12)
    bad_pairs = []
    inv_pairs = _nonadjacent_inversive(cfg)
    for pair, val in inv_pairs.items():
        if val <= 1.0:
            bad_pairs.append(pair)
    return flipped, frozenset(bad_pairs)


def _nonadjacent_inversive(cfg: Configuration) -> dict[tuple[int, int], float]:
    tri = cfg.tri
    cr, sr = np.cos(cfg.radii), np.sin(cfg.radii)
    out = {}
    for u in range(tri.n_vertices):
        for v in range(u + 1, tri.n_vertices):
            if v in tri.adjacent[u]:
                continue
            dot = float(cfg.centers[u] @ cfg.centers[v])
            out[(u, v)] = (cr[u] * cr[v] - dot) / (sr[u] * sr[v])
    return out


def _hard_feasible(cfg: Configuration, lay: _Layout) -> bool:
    phi = _meridian_angle(cfg.centers[lay.b])
    if not 1e-9 < phi < _PI - 1e-9:
        return False
    if cfg.centers[lay.c, 1] <= 0.0:
        return False
    nongauge = [v for v in range(cfg.tri.n_vertices)
                if v not in cfg.gauge_face]
    if nongauge:
        r = cfg.radii[nongauge]
        if np.any(r <= RADIUS_FLOOR) or np.any(r >= RADIUS_CEILING):
            return False
    return True


def _acceptable(cfg: Configuration, lay: _Layout,
                prev: tuple[frozenset, frozenset]) -> tuple[bool, tuple]:
    if not _hard_feasible(cfg, lay):
        return False, prev
    state = _gate_state(cfg)
    if not (state[0] <= prev[0] and state[1] <= prev[1]):
        return False, prev
    return True, state


# ---------------------------------------------------------------------------
# repair and the inner Levenberg-Marquardt loop
# ---------------------------------------------------------------------------

def _repair_overlaps(cfg: Configuration, attempts: int) -> tuple[Configuration, int]:
    """Nudge radii until every edge pair genuinely crosses.

    Edges with inversive distance at or above 1 (boundaries separated) get
    both radii grown.  Engulfing pairs (at or below -1) get the smaller
    radius grown until its boundary pokes out of the bigger cap.  Gauge
    radii stay fixed, so repairs act on the free radii only.
    """
    tri = cfg.tri
    gauge = set(cfg.gauge_face)
    radii = cfg.radii.copy()
    repairs = 0
    for _ in range(attempts):
        work = cfg.with_data(cfg.centers, radii)
        inv = _inversive_all(work)
        lost = np.nonzero(inv >= 1.0 - 1e-3)[0]
        engulfed = np.nonzero(inv <= -1.0 + 1e-3)[0]
        if lost.size == 0 and engulfed.size == 0:
            break
        repairs += 1
        for i in lost:
            for v in tri.edges[int(i)]:
                if v not in gauge:
                    radii[v] = min(radii[v] * 1.1, RADIUS_CEILING - 1e-3)
        for i in engulfed:
            u, v = tri.edges[int(i)]
            small, big = (u, v) if radii[u] <= radii[v] else (v, u)
            if small not in gauge:
                radii[small] = min(radii[small] * 1.15, RADIUS_CEILING - 1e-3)
            elif big not in gauge:
                radii[big] = max(radii[big] * 0.9, RADIUS_FLOOR + 1e-3)
    return cfg.with_data(cfg.centers, radii), repairs


def _levenberg(cfg: Configuration, target: np.ndarray, opts: SolveOptions,
               state: tuple[frozenset, frozenset]
               ) -> tuple[Configuration, tuple, bool, int, float, float]:
    """Solve one homotopy target.  Returns (cfg, state, converged,
    iterations, damping, last_step_norm)."""
    lay = _Layout(cfg.tri, cfg.gauge_face)
    lam = opts.initial_damping
    r = _residual_or_none(cfg, target)
    if r is None:
        return cfg, state, False, 0, lam, 0.0
    cost = float(r @ r)
    step_norm = 0.0
    for it in range(1, opts.max_iterations + 1):
        if float(np.max(np.abs(r))) < opts.tolerance:
            return cfg, state, True, it - 1, lam, step_norm
        J = jacobian(cfg)
        g = J.T @ r
        JtJ = J.T @ J
        diag = np.diag(JtJ).copy()
        diag[diag < 1e-12] = 1e-12
        accepted = False
        while lam <= opts.damping_max:
            try:
                delta = np.linalg.solve(JtJ + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= opts.damping_grow
                continue
            trial = apply_step(cfg, delta, clip_radii=True)
            ok, new_state = _acceptable(trial, lay, state)
            if ok:
                r_trial = _residual_or_none(trial, target)
                if r_trial is not None and float(r_trial @ r_trial) < cost:
                    step_norm = float(np.linalg.norm(delta))
                    cfg, r, state = trial, r_trial, new_state
                    cost = float(r_trial @ r_trial)
                    lam = max(lam / opts.damping_shrink, 1e-13)
                    accepted = True
                    break
            lam *= opts.damping_grow
        if not accepted:
            return cfg, state, False, it, lam, step_norm
    converged = float(np.max(np.abs(r))) < opts.tolerance
    return cfg, state, converged, opts.max_iterations, lam, step_norm


# ---------------------------------------------------------------------------
# public solve
# ---------------------------------------------------------------------------

def _anchor_schedule(attempts: int) -> list[float]:
    """Cold-start interpolation parameters: s = 1 first, then a dyadic
    grid refined from the middle, preferring values closer to 1."""
    out = [1.0]
    level = 2
    while len(out) < attempts:
        vals = sorted((k / level for k in range(1, level, 2)), reverse=True)
        out.extend(vals)
        level *= 2
    return out[:attempts]


def _solve_in_gauge(tri: Triangulation, theta: AngleAssignment, gauge,
                    opts: SolveOptions
                    ) -> tuple[Configuration, bool, int, list[HomotopyRecord], int]:
    """Run the cold-start schedule and homotopy walk in one fixed gauge."""
    cfg = initial_configuration(tri, gauge)
    cfg, repairs = _repair_overlaps(cfg, opts.repair_attempts)
    state = _gate_state(cfg)
    records: list[HomotopyRecord] = []
    total_iters = 0

    def target_for(s: float) -> np.ndarray:
        th_s = interpolate(theta, s)
        return np.array([th_s[e] for e in tri.edges])

    def try_target(c0: Configuration, st, s: float):
        tgt = target_for(s)
        out, st2, ok, iters, lam, step_norm = _levenberg(c0, tgt, opts, st)
        if ok:
            ok = _solution_radii_ok(out)
        return out, st2, ok, iters, lam, step_norm, _residual_inf(out, tgt)

    # cold starts: the prescribed angles directly, then interpolated
    # targets on a refining grid until one leg converges
    schedule = _anchor_schedule(opts.anchor_attempts)
    if opts.first_anchor is not None:
        schedule = [opts.first_anchor] + [s_val for s_val in schedule
                                          if s_val != opts.first_anchor]
    s = None
    for s_try in schedule:
        out, st2, ok, iters, lam, step_norm, rinf = try_target(
            cfg, state, s_try)
        total_iters += iters
        if ok:
            cfg, state, s = out, st2, s_try
            records.append(_record(cfg, s, iters, lam, step_norm, rinf))
            break
    if s is None:
        return cfg, False, total_iters, records, repairs

    # walk s to 1 with an adaptive step, warm starting each leg
    step = opts.homotopy_step
    while s < 1.0:
        s_next = min(1.0, s + step)
        out, st2, ok, iters, lam, step_norm, rinf = try_target(cfg, state, s_next)
        total_iters += iters
        if ok:
            cfg, state, s = out, st2, s_next
            records.append(_record(cfg, s, iters, lam, step_norm, rinf))
            step = min(step * opts.step_grow, 0.5)
        else:
            step *= opts.step_shrink
            if step < opts.min_step:
                return cfg, False, total_iters, records, repairs
    done = _residual_inf(cfg, target_for(1.0)) < opts.tolerance
    return cfg, done, total_iters, records, repairs


def solve(tri: Triangulation, theta: AngleAssignment, gauge_face=None,
          options: SolveOptions | None = None
          ) -> tuple[Configuration, SolveReport]:
    """Compute the gauged circle pattern for an admissible assignment.

    Raises ConditionsViolated when the admissibility check fails and
    NotAFace for a bad gauge face.  Numerical failure is reported through
    SolveReport.converged = False with a failure reason, never by an
    exception.

    If the requested gauge resists direct solution, the pattern is solved
    in another gauge and carried over by a sphere inversion, which leaves
    all overlap angles unchanged.
    """
    opts = options or SolveOptions()
    theta.check_domain(tri.edges)
    report = check_admissible(tri, theta)
    if not report.ok:
        raise ConditionsViolated(report)

    requested = _require_oriented_face(tri, gauge_face or tri.faces[0])
    total_iters = 0
    cfg = best = None
    records: list[HomotopyRecord] = []
    repairs = 0

    faces = [requested] + [f for f in tri.faces if f != requested]
    for gauge in faces[:1 + opts.fallback_gauges]:
        cfg, done, iters, recs, reps = _solve_in_gauge(tri, theta, gauge, opts)
        total_iters += iters
        if not records:
            records, repairs = recs, reps
        if done:
            best, records, repairs = cfg, recs, reps
            break

    target = np.array([theta[e] for e in tri.edges])
    if best is None:
        return cfg, SolveReport(
            converged=False, residual_inf=_residual_inf(cfg, target),
            iterations=total_iters, targets=tuple(records), repairs=repairs,
            failure_reason="homotopy_stalled")

    if best.gauge_face != requested:
        best = regauge(best, requested)
        # polish away the float noise of the transfer
        state = _gate_state(best)
        best, _, _, it2, _, _ = _levenberg(best, target, opts, state)
        total_iters += it2

    res_inf = _residual_inf(best, target)
    good = res_inf < opts.tolerance
    return best, SolveReport(
        converged=good, residual_inf=res_inf, iterations=total_iters,
        targets=tuple(records), repairs=repairs,
        failure_reason=None if good else "tolerance_missed")


def _solution_radii_ok(cfg: Configuration) -> bool:
    """Accepted homotopy solutions must keep non-gauge radii below pi/2."""
    nongauge = [v for v in range(cfg.tri.n_vertices)
                if v not in cfg.gauge_face]
    if not nongauge:
        return True
    return bool(np.all(cfg.radii[nongauge] < _GAUGE_RADIUS))


def _residual_inf(cfg: Configuration, target: np.ndarray) -> float:
    r = _residual_or_none(cfg, target)
    if r is None:
        return float("inf")
    return float(np.max(np.abs(r)))


def _record(cfg: Configuration, s: float, iters: int, lam: float,
            step_norm: float, residual_inf: float) -> HomotopyRecord:
    nongauge = [v for v in range(cfg.tri.n_vertices)
                if v not in cfg.gauge_face]
    inv = _nonadjacent_inversive(cfg)
    margin = min((val - 1.0 for val in inv.values()), default=float("inf"))
    return HomotopyRecord(
        s=s, iterations=iters,
        residual_inf=residual_inf,
        damping=lam, step_norm=step_norm,
        min_radius=float(np.min(cfg.radii)),
        max_nongauge_radius=float(np.max(cfg.radii[nongauge]))
        if nongauge else float("nan"),
        separation_margin=margin)
