"""SVG rendering of circle patterns through stereographic projection.

Stereographic projection maps circles to circles as long as no boundary
circle passes through the projection pole.  The pole is picked from a
deterministic candidate lattice to maximize the angular clearance from
every boundary circle and every cap center, the configuration is
rotated to put that pole on top, and each cap boundary then lands on an
ordinary circle in the plane with a closed-form center and radius.
"""

from __future__ import annotations

import math

import numpy as np

from .complexes import Triangulation
from .sphere import fibonacci_sphere

_POLE_CANDIDATES = 400


def choose_projection_pole(cfg, candidates: int = _POLE_CANDIDATES
                           ) -> np.ndarray:
    """Point with the largest clearance from circles and centers."""
    probes = fibonacci_sphere(candidates)
    dots = np.clip(probes @ cfg.centers.T, -1.0, 1.0)
    dist = np.arccos(dots)
    clearance = np.minimum(np.abs(dist - cfg.radii[None, :]), dist)
    return probes[int(np.argmax(clearance.min(axis=1)))]


def _rotation_to_north(pole: np.ndarray) -> np.ndarray:
    seed = np.eye(3)[int(np.argmin(np.abs(pole)))]
    x = seed - float(seed @ pole) * pole
    x /= np.linalg.norm(x)
    y = np.cross(pole, x)
    return np.vstack([x, y, pole])


def _project_point(p: np.ndarray) -> tuple[float, float]:
    return float(p[0] / (1.0 - p[2])), float(p[1] / (1.0 - p[2]))


def _project_circle(p: np.ndarray, rho: float
                    ) -> tuple[float, float, float]:
    """Image (cx, cy, radius) of a cap boundary under projection from
    the north pole onto the equatorial plane."""
    k = float(p[2]) - math.cos(rho)
    cx, cy = -float(p[0]) / k, -float(p[1]) / k
    return cx, cy, math.sin(rho) / abs(k)


def render_svg(tri: Triangulation, cfg) -> str:
    pole = choose_projection_pole(cfg)
    rot = _rotation_to_north(pole)
    centers = cfg.centers @ rot.T

    circles = [_project_circle(centers[v], float(cfg.radii[v]))
               for v in range(tri.n_vertices)]
    points = [_project_point(centers[v]) for v in range(tri.n_vertices)]

    xs = [c[0] - c[2] for c in circles] + [c[0] + c[2] for c in circles]
    ys = [c[1] - c[2] for c in circles] + [c[1] + c[2] for c in circles]
    xs += [p[0] for p in points]
    ys += [p[1] for p in points]
    lo_x, hi_x, lo_y, hi_y = min(xs), max(xs), min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y)
    pad = 0.05 * span
    view = (lo_x - pad, lo_y - pad,
            (hi_x - lo_x) + 2 * pad, (hi_y - lo_y) + 2 * pad)
    stroke = 0.004 * span

    def fmt(x: float) -> str:
        return f"{x:.4f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="800" height="800" '
        f'viewBox="{fmt(view[0])} {fmt(view[1])} {fmt(view[2])} '
        f'{fmt(view[3])}">',
        f'<g stroke="#888888" stroke-width="{fmt(stroke)}">',
    ]
    for (u, v) in tri.edges:
        parts.append(
            f'<line x1="{fmt(points[u][0])}" y1="{fmt(points[u][1])}" '
            f'x2="{fmt(points[v][0])}" y2="{fmt(points[v][1])}"/>')
    parts.append("</g>")
    parts.append(f'<g fill="none" stroke="#1f77b4" '
                 f'stroke-width="{fmt(stroke)}">')
    for (cx, cy, r) in circles:
        parts.append(f'<circle cx="{fmt(cx)}" cy="{fmt(cy)}" '
                     f'r="{fmt(r)}"/>')
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_to_file(tri: Triangulation, cfg, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_svg(tri, cfg))
