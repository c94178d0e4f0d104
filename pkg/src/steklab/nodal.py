"""Discrete nodal domains of P1 eigenfunctions and the structural checks on them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .mesh import Mesh

DEFAULT_ZERO_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class NodalDecomposition:
    vertex_signs: np.ndarray  # +1, -1 or 0 per vertex
    domain_labels: np.ndarray  # domain id per triangle
    domain_signs: np.ndarray  # +1 / -1 per domain
    touches_boundary: np.ndarray  # bool per domain

    @property
    def n_domains(self) -> int:
        return len(self.domain_signs)


def triangle_neighbours(mesh: Mesh) -> list[list[int]]:
    """Edge-adjacent triangles, each list sorted ascending."""
    t = mesh.triangles
    owner: dict[tuple[int, int], int] = {}
    nbrs: list[list[int]] = [[] for _ in range(len(t))]
    for ti, tri in enumerate(t.tolist()):
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (a, b) if a < b else (b, a)
            other = owner.pop(key, None)
            if other is None:
                owner[key] = ti
            else:
                nbrs[ti].append(other)
                nbrs[other].append(ti)
    for lst in nbrs:
        lst.sort()
    return nbrs


def _boundary_triangles(mesh: Mesh) -> np.ndarray:
    keys = {tuple(sorted(e)) for e in mesh.boundary_edges.tolist()}
    hit = np.zeros(mesh.n_triangles, bool)
    for ti, (a, b, c) in enumerate(mesh.triangles.tolist()):
        for e in ((a, b), (b, c), (c, a)):
            if tuple(sorted(e)) in keys:
                hit[ti] = True
                break
    return hit


def triangle_signs(vertex_signs: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Majority of the non-zero vertex signs; ties go positive, all-zero triangles get 0."""
    s = vertex_signs[triangles]
    pos = (s > 0).sum(axis=1)
    neg = (s < 0).sum(axis=1)
    out = np.where(pos >= neg, 1, -1)
    out[(pos == 0) & (neg == 0)] = 0
    return out


def label_components(mesh: Mesh, tri_signs: np.ndarray, nbrs: list[list[int]] | None = None) -> np.ndarray:
    """Edge-connected components of equally signed triangles, flooded lowest index first.

    Triangles with sign 0 are wildcards: they are attached afterwards to the
    domain of their first labelled neighbour in breadth-first order.
    """
    if nbrs is None:
        nbrs = triangle_neighbours(mesh)
    n = len(tri_signs)
    labels = np.full(n, -1, dtype=np.int64)
    nxt = 0
    for seed in range(n):
        if labels[seed] >= 0 or tri_signs[seed] == 0:
            continue
        labels[seed] = nxt
        queue = deque([seed])
        while queue:
            cur = queue.popleft()
            for nb in nbrs[cur]:
                if labels[nb] < 0 and tri_signs[nb] == tri_signs[seed]:
                    labels[nb] = nxt
                    queue.append(nb)
        nxt += 1
    queue = deque(i for i in range(n) if labels[i] >= 0)
    while queue:
        cur = queue.popleft()
        for nb in nbrs[cur]:
            if labels[nb] < 0:
                labels[nb] = labels[cur]
                queue.append(nb)
    if np.any(labels < 0):  # a component made only of zero triangles
        for seed in np.flatnonzero(labels < 0):
            if labels[seed] >= 0:
                continue
            labels[seed] = nxt
            queue = deque([seed])
            while queue:
                cur = queue.popleft()
                for nb in nbrs[cur]:
                    if labels[nb] < 0:
                        labels[nb] = nxt
                        queue.append(nb)
            nxt += 1
    return labels


def nodal_domains(mesh: Mesh, eigenvector, zero_tol: float = DEFAULT_ZERO_TOL) -> NodalDecomposition:
    """Split the mesh into nodal domains of a vertex-valued function.

    Vertices with ``|u| <= zero_tol * max|u|`` count as zeros.  Domains are
    edge-connected components of triangles with the same majority sign.
    """
    u = np.asarray(eigenvector, dtype=float).ravel()
    if u.size != mesh.n_vertices:
        raise ValueError(f"eigenvector has {u.size} entries, mesh has {mesh.n_vertices} vertices")
    scale = np.max(np.abs(u)) if u.size else 0.0
    if not scale > 0:
        raise ValueError("eigenvector is identically zero")
    vsign = np.sign(u).astype(np.int64)
    vsign[np.abs(u) <= zero_tol * scale] = 0
    tsign = triangle_signs(vsign, mesh.triangles)
    labels = label_components(mesh, tsign)
    ndom = int(labels.max()) + 1
    dsign = np.ones(ndom, dtype=np.int64)
    for d in range(ndom):
        s = tsign[labels == d]
        s = s[s != 0]
        if s.size:
            dsign[d] = s[0]
    on_bnd = _boundary_triangles(mesh)
    touches = np.zeros(ndom, bool)
    touches[np.unique(labels[on_bnd])] = True
    return NodalDecomposition(vsign, labels, dsign, touches)


def courant_check(decomposition: NodalDecomposition, k: int) -> bool:
    """The k-th eigenfunction has at most k + 1 nodal domains."""
    return decomposition.n_domains <= k + 1


def boundary_contact_check(decomposition: NodalDecomposition, mesh: Mesh) -> bool:
    """Every nodal domain owns at least one triangle with a boundary edge."""
    on_bnd = _boundary_triangles(mesh)
    labels = decomposition.domain_labels
    if len(labels) != mesh.n_triangles:
        raise ValueError("decomposition does not belong to this mesh")
    touched = np.zeros(decomposition.n_domains, bool)
    touched[np.unique(labels[on_bnd])] = True
    return bool(touched.all())


def multiplicity_bound(k: int, chi: int) -> int:
    """Upper bound k - 2 chi + 3 on the multiplicity of sigma_k (k >= 1)."""
    if k < 1:
        raise ValueError("the bound is stated for k >= 1")
    return k - 2 * chi + 3


def decomposition_csv(decomposition: NodalDecomposition) -> str:
    lines = ["triangle_id,domain_id,sign"]
    sgn = decomposition.domain_signs
    for t, d in enumerate(decomposition.domain_labels.tolist()):
        lines.append(f"{t},{d},{'+' if sgn[d] > 0 else '-'}")
    return "\n".join(lines) + "\n"
