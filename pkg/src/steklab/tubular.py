"""Thin tubular domains modelled on a metric graph, and their convergence to the graph spectrum.

Each vertex becomes a half-disk whose diameter carries the Steklov condition,
each edge becomes a strip of half-width ``epsilon`` joining the curved sides
of two half-disks.  Everything else is Neumann boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fem import DensitySpec, solve_steklov_neumann
from .graphs import MetricGraph, graph_spectrum
from .mesh import NEUMANN, STEKLOV, Mesh, MeshError, _mesh_from_triangulation, triangulate_pslg

SNAP = 1e-9
OVERLAP_TOL = 1e-10


@dataclass(frozen=True)
class TubularParams:
    """Geometry and discretisation of a tubular domain.

    ``disk_gamma=None`` gives the half-disks conductivity ``1/epsilon`` so that
    they behave as near-perfect conductors compared to the strips.
    """

    epsilon: float
    disk_radius: float | Sequence[float] = 0.5
    layout: Sequence[Sequence[float]] | None = None
    h: float = 0.05
    disk_gamma: float | None = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.h > 0:
            raise ValueError("mesh size h must be positive")
        radii = np.atleast_1d(np.asarray(self.disk_radius, float))
        if np.any(radii <= 0):
            raise ValueError("disk radii must be positive")
        if np.any(self.epsilon >= radii):
            raise ValueError("epsilon must be smaller than every disk radius")
        if self.disk_gamma is not None and not self.disk_gamma > 0:
            raise ValueError("disk_gamma must be positive")

    def radii(self, n: int) -> np.ndarray:
        r = np.atleast_1d(np.asarray(self.disk_radius, float))
        if r.size == 1:
            return np.full(n, r[0])
        if r.size != n:
            raise ValueError(f"need {n} disk radii, got {r.size}")
        return r

    def positions(self, n: int) -> np.ndarray:
        if self.layout is not None:
            pts = np.asarray(self.layout, float)
            if pts.shape != (n, 2):
                raise ValueError(f"layout must have shape ({n}, 2)")
            return pts
        return default_layout(n, float(self.radii(n).max()))

    def with_epsilon(self, epsilon: float) -> "TubularParams":
        return TubularParams(epsilon, self.disk_radius, self.layout, self.h, self.disk_gamma)


def default_layout(n: int, radius: float) -> np.ndarray:
    """Vertices on a circle with neighbouring centres ``4 * radius`` apart."""
    if n == 1:
        return np.zeros((1, 2))
    R = 2.0 * radius / math.sin(math.pi / n)
    t = 2 * math.pi * np.arange(n) / n + math.pi / 2
    return np.column_stack([R * np.cos(t), R * np.sin(t)])


@dataclass(frozen=True, eq=False)
class TubularDomain:
    mesh: Mesh
    densities: DensitySpec
    steklov_vertex: np.ndarray  # graph vertex of each boundary edge, -1 for Neumann edges
    triangle_piece: np.ndarray  # graph vertex id for half-disk triangles, n + edge index for strips
    normals: np.ndarray = field(repr=False)


def _normals(G: MetricGraph, pos: np.ndarray, radii: np.ndarray, eps: float) -> np.ndarray:
    """Outward normal of each diameter, pointing into the widest gap between incident edges."""
    normals = np.zeros((G.n, 2))
    for x in range(G.n):
        dirs = [pos[y] - pos[x] for y in G.neighbours(x)]
        if not dirs:
            normals[x] = (0.0, -1.0)
            continue
        ang = sorted(math.atan2(d[1], d[0]) for d in dirs)
        gaps = [(ang[(i + 1) % len(ang)] - ang[i]) % (2 * math.pi) or 2 * math.pi for i in range(len(ang))]
        i = int(np.argmax(gaps))
        mid = ang[i] + gaps[i] / 2
        normals[x] = (math.cos(mid), math.sin(mid))
        for d in dirs:
            a = -float(np.dot(d, normals[x])) / float(np.linalg.norm(d))
            # the strip start must sit in front of the diameter and inside the disk
            if 0.75 * radii[x] * a <= eps * math.sqrt(max(0.0, 1 - a * a)) or eps >= 0.66 * radii[x]:
                raise MeshError(f"edges at vertex {x} do not fit on one side of a diameter for epsilon={eps}")
    return normals


def _subdivide(a, b, step: float) -> np.ndarray:
    """Points from ``a`` to ``b`` inclusive, spaced at most ``step`` apart."""
    m = max(1, math.ceil(float(np.linalg.norm(b - a)) / step - 1e-9))
    s = np.arange(m + 1)[:, None] / m
    return a + (b - a) * s


def _arc(x, c, r, normal, edge_dirs, eps, h, h_strip):
    """Curved side of half-disk ``x`` with the strip corners inserted as arc vertices.

    Returns the arc points (angles increasing) and, per incident edge, the indices of
    its two corners ``(lo, hi)``; ``hi`` sits on the left of the direction towards the neighbour.
    """
    base = math.atan2(-normal[1], -normal[0])
    alpha = math.asin(eps / r)
    spans = []
    for e, d in edge_dirs:
        psi = (math.atan2(d[1], d[0]) - base + math.pi) % (2 * math.pi) - math.pi
        if abs(psi) + alpha >= math.pi / 2 - 1e-6:
            raise MeshError(f"a strip at vertex {x} does not leave through the curved side for epsilon={eps}")
        spans.append((psi - alpha, psi + alpha, e))
    spans.sort()
    for (_, hi, e1), (lo, _, e2) in zip(spans, spans[1:]):
        if lo <= hi + 1e-9:
            raise MeshError(f"strips of edges {e1} and {e2} overlap at vertex {x}")

    angles = [-math.pi / 2]
    corners = {}
    def extend(t_end, step):
        m = max(1, math.ceil(r * (t_end - angles[-1]) / step - 1e-9))
        angles.extend(np.linspace(angles[-1], t_end, m + 1)[1:])
    for lo, hi, e in spans:
        extend(lo, h)
        i_lo = len(angles) - 1
        extend(hi, h_strip)
        corners[e] = (i_lo, len(angles) - 1)
    extend(math.pi / 2, h)
    t = base + np.asarray(angles)
    return np.column_stack([c[0] + r * np.cos(t), c[1] + r * np.sin(t)]), corners


def build_tubular_domain(G: MetricGraph, params: TubularParams) -> TubularDomain:
    """Mesh the union of half-disks and strips with Steklov diameters and Neumann elsewhere."""
    from shapely.geometry import Polygon as ShPolygon
    from shapely.ops import unary_union

    n, eps, h = G.n, params.epsilon, params.h
    pos, radii = params.positions(n), params.radii(n)
    for x in range(n):
        for y in range(x + 1, n):
            if np.linalg.norm(pos[x] - pos[y]) <= radii[x] + radii[y] + 2 * eps:
                raise MeshError(f"half-disks {x} and {y} overlap or touch")
    normals = _normals(G, pos, radii, eps)
    h_strip = min(h, eps / 2)

    incident = [[] for _ in range(n)]
    for e, (x, y, _) in enumerate(G.edges):
        incident[x].append((e, pos[y] - pos[x]))
        incident[y].append((e, pos[x] - pos[y]))

    verts: list[np.ndarray] = []
    segs: list[tuple[int, int]] = []
    arc_ids, disks, corner_of = [], [], []
    for x in range(n):
        pts, corners = _arc(x, pos[x], radii[x], normals[x], incident[x], eps, h, h_strip)
        chord = _subdivide(pts[-1], pts[0], h)[1:-1]
        start = len(verts)
        verts.extend(pts)
        verts.extend(chord)
        ring = list(range(start, len(verts)))
        segs.extend(zip(ring, ring[1:] + ring[:1]))
        arc_ids.append(ring[:len(pts)])
        disks.append(ShPolygon(np.vstack([pts, chord])))
        corner_of.append(corners)

    strips = []
    for e, (x, y, _) in enumerate(G.edges):
        (xl, xh), (yl, yh) = corner_of[x][e], corner_of[y][e]
        for a, b in ((arc_ids[x][xh], arc_ids[y][yl]), (arc_ids[y][yh], arc_ids[x][xl])):
            side = _subdivide(verts[a], verts[b], h_strip)[1:-1]
            ids = [a] + list(range(len(verts), len(verts) + len(side))) + [b]
            verts.extend(side)
            segs.extend(zip(ids[:-1], ids[1:]))
        ring = np.vstack([np.asarray(verts)[arc_ids[x][xl:xh + 1]], np.asarray(verts)[arc_ids[y][yl:yh + 1]]])
        strips.append(ShPolygon(ring))

    for e, s in enumerate(strips):
        if not s.is_valid:
            raise MeshError(f"strip of edge {G.edges[e][:2]} is self-intersecting")
        for z in range(n):
            if s.intersection(disks[z]).area > OVERLAP_TOL:
                raise MeshError(f"strip of edge {G.edges[e][:2]} crosses half-disk {z}")
    for a in range(len(strips)):
        for b in range(a + 1, len(strips)):
            if strips[a].intersection(strips[b]).area > OVERLAP_TOL:
                ea, eb = G.edges[a][:2], G.edges[b][:2]
                raise MeshError(f"strips of edges {ea} and {eb} overlap; layout is not planar")

    pieces = disks + strips
    domain = unary_union(pieces)
    if domain.geom_type != "Polygon":
        raise MeshError("tubular domain is disconnected")
    holes = [ShPolygon(ring).representative_point().coords[0] for ring in domain.interiors]
    regions = []
    for pid, piece in enumerate(pieces):
        hh = h if pid < n else h_strip
        q = piece.representative_point()
        regions.append((q.x, q.y, pid, math.sqrt(3) / 4 * hh * hh))
    v, t, attr = triangulate_pslg(np.asarray(verts), np.asarray(segs, np.int64), holes, regions=regions)
    mesh = _mesh_from_triangulation(v, t)

    piece_of = np.rint(attr).astype(np.int64)
    disk_gamma = 1.0 / eps if params.disk_gamma is None else params.disk_gamma
    gamma = np.full(len(t), disk_gamma)
    for e, (x, y, length) in enumerate(G.edges):
        L = float(np.linalg.norm(pos[x] - pos[y])) - radii[x] - radii[y]
        gamma[piece_of == n + e] = L / (2 * eps * length)

    mid = 0.5 * (mesh.vertices[mesh.boundary_edges[:, 0]] + mesh.vertices[mesh.boundary_edges[:, 1]])
    owner = np.full(len(mid), -1, dtype=np.int64)
    for x in range(n):
        rel = mid - pos[x]
        on_line = np.abs(rel @ normals[x]) < 1e-9 * max(1.0, radii[x])
        inside = np.linalg.norm(rel, axis=1) < radii[x] + SNAP
        owner[on_line & inside] = x
    if any(np.count_nonzero(owner == x) == 0 for x in range(n)):
        raise MeshError("a diameter received no boundary edges")
    markers = tuple(STEKLOV if o >= 0 else NEUMANN for o in owner)
    mesh = mesh.with_markers(markers)
    rho = np.ones(len(owner))
    rho[owner >= 0] = G.measures[owner[owner >= 0]] / (2 * radii[owner[owner >= 0]])
    return TubularDomain(mesh, DensitySpec(gamma, rho), owner, piece_of, normals)


@dataclass(frozen=True)
class StudyRow:
    epsilon: float
    k: int
    sigma: float
    lambda_graph: float

    @property
    def abs_error(self) -> float:
        return abs(self.sigma - self.lambda_graph)


def convergence_study(G: MetricGraph, epsilons: Sequence[float], k: int,
                      params: TubularParams) -> list[StudyRow]:
    """First ``k`` Steklov-Neumann eigenvalues of each tubular domain against the graph eigenvalues."""
    eps = [float(e) for e in epsilons]
    if not eps:
        raise ValueError("at least one epsilon is required")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilons must be strictly decreasing")
    if not 1 <= k <= G.n:
        raise ValueError(f"k must lie in 1..{G.n}")
    lam = graph_spectrum(G)[0][:k]
    rows = []
    for e in eps:
        dom = build_tubular_domain(G, params.with_epsilon(e))
        res = solve_steklov_neumann(dom.mesh, dom.densities, k - 1)
        rows.extend(StudyRow(e, j, float(res.eigenvalues[j]), float(lam[j])) for j in range(k))
    return rows


def study_csv(rows: Sequence[StudyRow]) -> str:
    lines = ["epsilon,k,sigma,lambda_graph,abs_error"]
    for r in rows:
        lines.append(f"{r.epsilon:.17g},{r.k},{r.sigma:.17g},{r.lambda_graph:.17g},{r.abs_error:.17g}")
    return "\n".join(lines) + "\n"
