"""Conforming P1 triangulations of flat planar domains with holes.

A :class:`Mesh` carries counter-clockwise triangles and a list of boundary
edges, each tagged with a marker (``"S"`` for Steklov, ``"N"`` for Neumann)
and the id of the boundary loop it belongs to.  Disks and concentric annuli
are built from structured ring templates so that vertex counts are
reproducible and the discrete rotation symmetry is exact; any other domain
goes through Shewchuk's Triangle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.spatial import cKDTree

STEKLOV = "S"
NEUMANN = "N"
DUPLICATE_TOL = 1e-12


class MeshError(ValueError):
    """Raised for invalid domain specifications or malformed meshes."""


@dataclass(frozen=True)
class Circle:
    center: tuple[float, float]
    radius: float

    def polygon(self, h: float) -> np.ndarray:
        """Inscribed polygon, counter-clockwise, with edge length <= h."""
        n = max(8, math.ceil(2.0 * math.pi * self.radius / h))
        t = 2.0 * math.pi * np.arange(n) / n
        cx, cy = self.center
        return np.column_stack([cx + self.radius * np.cos(t), cy + self.radius * np.sin(t)])


@dataclass(frozen=True)
class Polygon:
    points: tuple[tuple[float, float], ...]

    def __init__(self, points):
        object.__setattr__(self, "points", tuple((float(x), float(y)) for x, y in points))

    def polygon(self, h: float) -> np.ndarray:
        pts = np.asarray(self.points, dtype=float)
        if _signed_area(pts) < 0:
            pts = pts[::-1]
        return _subdivide_closed(pts, h)


Shape = Circle | Polygon


@dataclass(frozen=True)
class DomainSpec:
    outer: Shape
    holes: tuple[Shape, ...] = ()
    target_h: float = 0.1

    def __init__(self, outer: Shape, holes: Sequence[Shape] = (), target_h: float = 0.1):
        object.__setattr__(self, "outer", outer)
        object.__setattr__(self, "holes", tuple(holes))
        object.__setattr__(self, "target_h", float(target_h))


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable triangulation with tagged boundary edges.

    ``boundary_edges`` is a ``(B, 2)`` integer array oriented so that the
    domain lies to the left; ``markers`` and ``components`` are aligned with it.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    markers: tuple[str, ...]
    components: np.ndarray
    _edges: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float)
        t = np.ascontiguousarray(self.triangles, dtype=np.int64)
        b = np.ascontiguousarray(self.boundary_edges, dtype=np.int64).reshape(-1, 2)
        c = np.ascontiguousarray(self.components, dtype=np.int64)
        for name, arr in (("vertices", v), ("triangles", t), ("boundary_edges", b), ("components", c)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "markers", tuple(self.markers))
        edges = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
        edges = np.unique(edges, axis=0)
        edges.setflags(write=False)
        object.__setattr__(self, "_edges", edges)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def edges(self) -> np.ndarray:
        """All unique undirected edges, sorted pairs."""
        return self._edges

    @property
    def n_components(self) -> int:
        return int(self.components.max()) + 1 if len(self.components) else 0

    def steklov_mask(self) -> np.ndarray:
        return np.array([m == STEKLOV for m in self.markers], dtype=bool)

    def boundary_vertices(self, marker: str | None = None) -> np.ndarray:
        edges = self.boundary_edges
        if marker is not None:
            edges = edges[np.array([m == marker for m in self.markers], dtype=bool)]
        return np.unique(edges)

    def edge_lengths(self) -> np.ndarray:
        d = self.vertices[self.boundary_edges[:, 1]] - self.vertices[self.boundary_edges[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    def areas(self) -> np.ndarray:
        return _triangle_areas(self.vertices, self.triangles)

    def with_markers(self, markers: Sequence[str]) -> "Mesh":
        return Mesh(self.vertices, self.triangles, self.boundary_edges, tuple(markers), self.components)


def _signed_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _triangle_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    p0, p1, p2 = (vertices[triangles[:, i]] for i in range(3))
    d1, d2 = p1 - p0, p2 - p0
    return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])


def _subdivide_closed(pts: np.ndarray, h: float) -> np.ndarray:
    out = []
    for a, b in zip(pts, np.roll(pts, -1, axis=0)):
        n = max(1, math.ceil(np.hypot(*(b - a)) / h))
        for s in range(n):
            out.append(a + (b - a) * (s / n))
    return np.asarray(out)


def _shape_geometry(shape: Shape, h: float):
    from shapely.geometry import Polygon as ShPolygon

    return ShPolygon(shape.polygon(min(h, 0.05)) if isinstance(shape, Circle) else shape.points)


# ---------------------------------------------------------------------------
# validation


def boundary_loops(triangles: np.ndarray) -> list[list[int]]:
    """Closed vertex loops of the boundary, each oriented with the domain on the left."""
    directed = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    key = np.sort(directed, axis=1)
    _, inverse, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    inverse = inverse.ravel()
    if counts.max(initial=0) > 2:
        raise MeshError("non-manifold edge shared by more than two triangles")
    bnd = directed[counts[inverse] == 1]
    succ: dict[int, int] = {}
    for a, b in bnd:
        if a in succ:
            raise MeshError(f"boundary vertex {a} is not simple (pinched boundary)")
        succ[int(a)] = int(b)
    loops = []
    seen: set[int] = set()
    for start in sorted(succ):
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        cur = succ[start]
        while cur != start:
            if cur in seen or cur not in succ:
                raise MeshError("boundary edges do not close into simple loops")
            loop.append(cur)
            seen.add(cur)
            cur = succ[cur]
        loops.append(loop)
    return loops


def validate(mesh: Mesh) -> None:
    """Check every structural invariant; raises :class:`MeshError`."""
    v, t = mesh.vertices, mesh.triangles
    if v.ndim != 2 or v.shape[1] != 2 or not np.all(np.isfinite(v)):
        raise MeshError("vertices must be a finite (N, 2) array")
    if t.size == 0 or t.min() < 0 or t.max() >= len(v):
        raise MeshError("triangle indices out of range")
    areas = mesh.areas()
    if np.any(areas <= 0):
        bad = int(np.argmin(areas))
        raise MeshError(f"triangle {bad} is degenerate or clockwise (area {areas[bad]:.3e})")
    pairs = cKDTree(v).query_pairs(DUPLICATE_TOL)
    if pairs:
        i, j = sorted(pairs)[0]
        raise MeshError(f"duplicate vertices {i} and {j}")
    loops = boundary_loops(t)
    expected = {(a, b) for loop in loops for a, b in zip(loop, loop[1:] + loop[:1])}
    given = {(int(a), int(b)) for a, b in mesh.boundary_edges}
    if given != expected or len(given) != len(mesh.boundary_edges):
        raise MeshError("boundary_edges do not match the triangulation boundary")
    if len(mesh.markers) != len(mesh.boundary_edges) or len(mesh.components) != len(mesh.boundary_edges):
        raise MeshError("markers/components must align with boundary_edges")
    if any(m not in (STEKLOV, NEUMANN) for m in mesh.markers):
        raise MeshError("markers must be 'S' or 'N'")
    comp_of = {(int(a), int(b)): int(c) for (a, b), c in zip(mesh.boundary_edges, mesh.components)}
    ids = set()
    for loop in loops:
        cs = {comp_of[(a, b)] for a, b in zip(loop, loop[1:] + loop[:1])}
        if len(cs) != 1:
            raise MeshError("a boundary loop carries several component ids")
        ids |= cs
    if ids != set(range(len(loops))):
        raise MeshError(f"component ids {sorted(ids)} do not enumerate 0..{len(loops) - 1}")


def _assemble(vertices, triangles, loops_in_order, markers=None) -> Mesh:
    edges, comps = [], []
    for cid, loop in enumerate(loops_in_order):
        for a, b in zip(loop, loop[1:] + loop[:1]):
            edges.append((a, b))
            comps.append(cid)
    if markers is None:
        markers = (STEKLOV,) * len(edges)
    mesh = Mesh(np.asarray(vertices, float), np.asarray(triangles, np.int64),
                np.asarray(edges, np.int64).reshape(-1, 2), tuple(markers), np.asarray(comps, np.int64))
    validate(mesh)
    return mesh


# ---------------------------------------------------------------------------
# builders


def _zip_rings(inner: np.ndarray, outer: np.ndarray, inner_t: np.ndarray, outer_t: np.ndarray):
    """Triangulate the band between two closed rings, merging by angle."""
    ni, no = len(inner), len(outer)

    def angle(ts, k, n):
        return ts[k % n] + 2 * math.pi * (k // n)

    tris = []
    i = j = 0
    while i < ni or j < no:
        if j >= no or (i < ni and angle(inner_t, i + 1, ni) <= angle(outer_t, j + 1, no) + 1e-12):
            tris.append((inner[i % ni], outer[j % no], inner[(i + 1) % ni]))
            i += 1
        else:
            tris.append((inner[i % ni], outer[j % no], outer[(j + 1) % no]))
            j += 1
    return tris


def disk_mesh(center=(0.0, 0.0), radius: float = 1.0, h: float = 0.1) -> Mesh:
    """Ring template: ring j carries 8j equispaced points, so the mesh is C8-symmetric."""
    rings = max(1, math.ceil(radius / h))
    cx, cy = center
    verts = [(cx, cy)]
    ring_ids, ring_t = [np.array([0])], [np.array([0.0])]
    for j in range(1, rings + 1):
        n = 8 * j
        t = 2 * math.pi * np.arange(n) / n
        r = radius * j / rings
        start = len(verts)
        verts.extend(zip(cx + r * np.cos(t), cy + r * np.sin(t)))
        ring_ids.append(np.arange(start, start + n))
        ring_t.append(t)
    tris = [(0, ring_ids[1][k], ring_ids[1][(k + 1) % 8]) for k in range(8)]
    for j in range(1, rings):
        tris.extend(_zip_rings(ring_ids[j], ring_ids[j + 1], ring_t[j], ring_t[j + 1]))
    return _assemble(verts, tris, [list(map(int, ring_ids[-1]))])


def annulus_mesh(center=(0.0, 0.0), inner_radius: float = 0.5, outer_radius: float = 1.0,
                 h: float = 0.1) -> Mesh:
    """Polar template with the same angular count on every ring (multiple of 8)."""
    if not 0 < inner_radius < outer_radius:
        raise MeshError("annulus needs 0 < inner_radius < outer_radius")
    ntheta = 8 * max(1, math.ceil(2 * math.pi * outer_radius / (8 * h)))
    nr = max(1, math.ceil((outer_radius - inner_radius) / h))
    t = 2 * math.pi * np.arange(ntheta) / ntheta
    cx, cy = center
    verts = []
    for i in range(nr + 1):
        r = inner_radius + (outer_radius - inner_radius) * i / nr
        verts.extend(zip(cx + r * np.cos(t), cy + r * np.sin(t)))

    def vid(i, k):
        return i * ntheta + k % ntheta

    tris = []
    for i in range(nr):
        for k in range(ntheta):
            a, b, c, d = vid(i, k), vid(i, k + 1), vid(i + 1, k + 1), vid(i + 1, k)
            tris.append((a, c, b))
            tris.append((a, d, c))
    outer = [vid(nr, k) for k in range(ntheta)]
    inner = [vid(0, k) for k in range(ntheta)][::-1]
    return _assemble(verts, tris, [outer, inner])


def _check_spec(spec: DomainSpec) -> None:
    if not spec.target_h > 0:
        raise MeshError("target_h must be positive")
    h = spec.target_h
    outer = _shape_geometry(spec.outer, h)
    if not outer.is_valid or outer.area <= 0:
        raise MeshError("outer boundary is not a valid simple region")
    holes = [_shape_geometry(s, h) for s in spec.holes]
    for i, g in enumerate(holes):
        if not outer.contains(g) or outer.exterior.distance(g) <= 0:
            raise MeshError(f"hole {i} is not strictly inside the outer boundary")
        if outer.exterior.distance(g) < h:
            raise MeshError(f"target_h={h} too coarse to separate hole {i} from the outer boundary")
        for j in range(i):
            if g.intersects(holes[j]):
                raise MeshError(f"holes {j} and {i} overlap")
            if g.distance(holes[j]) < h:
                raise MeshError(f"target_h={h} too coarse to separate holes {j} and {i}")


def triangulate_pslg(vertices: np.ndarray, segments: np.ndarray, holes: Sequence[Sequence[float]] = (),
                     max_area: float | None = None, regions: Sequence[Sequence[float]] | None = None,
                     min_angle: float = 30.0) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Quality constrained Delaunay triangulation via Triangle.

    Returns ``(vertices, triangles, region_attribute)``; Triangle never moves
    input vertices, it only inserts Steiner points.
    """
    import triangle

    data: dict = {"vertices": np.asarray(vertices, float), "segments": np.asarray(segments, np.int32)}
    if len(holes):
        data["holes"] = np.asarray(holes, float)
    opts = f"pq{min_angle:g}"
    if regions is not None:
        data["regions"] = np.asarray(regions, float)
        opts += "Aa"
    elif max_area is not None:
        opts += f"a{max_area:.12g}"
    opts += "Q"
    out = triangle.triangulate(data, opts)
    tris = np.asarray(out["triangles"], np.int64)
    verts = np.asarray(out["vertices"], float)
    areas = _triangle_areas(verts, tris)
    tris[areas < 0] = tris[areas < 0][:, [0, 2, 1]]
    attr = out.get("triangle_attributes")
    return verts, tris, None if attr is None else np.asarray(attr[:, 0])


def _generic_mesh(spec: DomainSpec) -> Mesh:
    from shapely.geometry import Polygon as ShPolygon

    h = spec.target_h
    rings = [spec.outer.polygon(h)] + [s.polygon(h) for s in spec.holes]
    verts, segs, hole_pts = [], [], []
    for k, ring in enumerate(rings):
        start = len(verts)
        verts.extend(map(tuple, ring))
        n = len(ring)
        segs.extend((start + i, start + (i + 1) % n) for i in range(n))
        if k > 0:
            p = ShPolygon(ring).representative_point()
            hole_pts.append((p.x, p.y))
    v, t, _ = triangulate_pslg(np.asarray(verts), np.asarray(segs), hole_pts,
                               max_area=math.sqrt(3) / 4 * h * h)
    return _mesh_from_triangulation(v, t, [ShPolygon(r) for r in rings[1:]])


def _mesh_from_triangulation(vertices, triangles, hole_shapes=()) -> Mesh:
    """Order loops: outer first, then holes in the order of ``hole_shapes``."""
    from shapely.geometry import Point

    loops = boundary_loops(triangles)
    areas = [_signed_area(vertices[loop]) for loop in loops]
    outer = [lp for lp, a in zip(loops, areas) if a > 0]
    inner = [lp for lp, a in zip(loops, areas) if a <= 0]
    if len(outer) != 1:
        raise MeshError(f"expected one outer boundary loop, found {len(outer)}")

    def hole_rank(loop):
        c = vertices[loop].mean(axis=0)
        dists = [g.distance(Point(*c)) for g in hole_shapes]
        return (int(np.argmin(dists)) if dists else 0, min(loop))

    inner.sort(key=hole_rank)
    return _assemble(vertices, triangles, outer + inner)


def build_domain(spec: DomainSpec) -> Mesh:
    """Mesh a disk-with-holes domain; every boundary edge starts out Steklov."""
    _check_spec(spec)
    h = spec.target_h
    if isinstance(spec.outer, Circle) and not spec.holes:
        return disk_mesh(spec.outer.center, spec.outer.radius, h)
    if (isinstance(spec.outer, Circle) and len(spec.holes) == 1 and isinstance(spec.holes[0], Circle)
            and np.allclose(spec.holes[0].center, spec.outer.center, atol=DUPLICATE_TOL)):
        return annulus_mesh(spec.outer.center, spec.holes[0].radius, spec.outer.radius, h)
    return _generic_mesh(spec)


def rectangle_mesh(x0: float, x1: float, y0: float, y1: float, h: float) -> Mesh:
    return build_domain(DomainSpec(Polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)]), (), h))


# ---------------------------------------------------------------------------
# operations


def refine_uniform(mesh: Mesh) -> Mesh:
    """Split each triangle into four through edge midpoints.

    Child triangles of triangle ``t`` are ``4t .. 4t+3``; boundary edge ``b``
    becomes edges ``2b`` and ``2b+1`` with the same marker and component.
    """
    edges = mesh.edges
    n = mesh.n_vertices
    index = {(int(a), int(b)): n + i for i, (a, b) in enumerate(edges)}
    mids = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])

    def mid(a, b):
        return index[(a, b) if a < b else (b, a)]

    tris = []
    for a, b, c in mesh.triangles.tolist():
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        tris.extend([(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)])
    bedges, markers, comps = [], [], []
    for (a, b), m, c in zip(mesh.boundary_edges.tolist(), mesh.markers, mesh.components.tolist()):
        k = mid(a, b)
        bedges.extend([(a, k), (k, b)])
        markers.extend([m, m])
        comps.extend([c, c])
    out = Mesh(np.vstack([mesh.vertices, mids]), np.asarray(tris), np.asarray(bedges),
               tuple(markers), np.asarray(comps))
    validate(out)
    return out


def euler_characteristic(mesh: Mesh) -> int:
    """V - E + F over all vertices, edges and triangles."""
    return mesh.n_vertices - len(mesh.edges) + mesh.n_triangles


def mark_boundary(mesh: Mesh, assignment: Mapping[int, str]) -> Mesh:
    """Replace markers per boundary component; components absent from ``assignment`` keep theirs."""
    present = set(mesh.components.tolist())
    unknown = set(assignment) - present
    if unknown:
        raise MeshError(f"unknown boundary component ids {sorted(unknown)}")
    if any(m not in (STEKLOV, NEUMANN) for m in assignment.values()):
        raise MeshError("markers must be 'S' or 'N'")
    markers = tuple(assignment.get(int(c), m) for c, m in zip(mesh.components, mesh.markers))
    if STEKLOV not in markers:
        raise MeshError("at least one Steklov edge must remain; the Steklov spectrum is undefined otherwise")
    return mesh.with_markers(markers)


def mark_edges(mesh: Mesh, select: Callable[[np.ndarray], np.ndarray], marker: str) -> Mesh:
    """Set ``marker`` on boundary edges whose midpoints satisfy ``select`` (vectorised predicate)."""
    if marker not in (STEKLOV, NEUMANN):
        raise MeshError("markers must be 'S' or 'N'")
    mid = 0.5 * (mesh.vertices[mesh.boundary_edges[:, 0]] + mesh.vertices[mesh.boundary_edges[:, 1]])
    hit = np.asarray(select(mid), dtype=bool)
    markers = tuple(marker if s else m for s, m in zip(hit, mesh.markers))
    if STEKLOV not in markers:
        raise MeshError("at least one Steklov edge must remain")
    return mesh.with_markers(markers)


# ---------------------------------------------------------------------------
# JSON interchange


def mesh_to_dict(mesh: Mesh) -> dict:
    return {
        "vertices": mesh.vertices.tolist(),
        "triangles": mesh.triangles.tolist(),
        "boundary": [
            {"edge": [int(a), int(b)], "marker": m, "component": int(c)}
            for (a, b), m, c in zip(mesh.boundary_edges, mesh.markers, mesh.components)
        ],
    }


def mesh_from_dict(data: dict) -> Mesh:
    try:
        bnd = data["boundary"]
        mesh = Mesh(
            np.asarray(data["vertices"], float).reshape(-1, 2),
            np.asarray(data["triangles"], np.int64).reshape(-1, 3),
            np.asarray([b["edge"] for b in bnd], np.int64).reshape(-1, 2),
            tuple(b["marker"] for b in bnd),
            np.asarray([b["component"] for b in bnd], np.int64),
        )
    except (KeyError, TypeError) as exc:
        raise MeshError(f"malformed mesh document: {exc}") from exc
    validate(mesh)
    return mesh


def save_mesh(mesh: Mesh, path: str | Path) -> None:
    Path(path).write_text(json.dumps(mesh_to_dict(mesh)), encoding="utf-8")


def load_mesh(path: str | Path) -> Mesh:
    return mesh_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
