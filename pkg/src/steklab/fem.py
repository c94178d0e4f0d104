"""P1 finite elements for the Steklov and Steklov-Neumann eigenproblems.

The discrete problem is the pencil ``K u = sigma M u`` where ``K`` is the
gamma-weighted stiffness matrix and ``M`` the rho-weighted mass matrix of the
Steklov part of the boundary.  Interior (and Neumann) degrees of freedom are
eliminated by a Schur complement, which is the discrete Dirichlet-to-Neumann
operator; the reduced dense pencil is then solved with LAPACK.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import splu

from .mesh import Mesh, MeshError

DEFAULT_REL_TOL = 1e-2


class SolverError(RuntimeError):
    """Raised when an eigenproblem is ill-posed or the solver fails."""


@dataclass(frozen=True, eq=False)
class DensitySpec:
    """Piecewise-constant densities: ``gamma`` per triangle, ``rho`` per boundary edge."""

    gamma: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        for name in ("gamma", "rho"):
            arr = np.array(getattr(self, name), dtype=float).ravel()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def uniform(cls, mesh: Mesh, gamma: float = 1.0, rho: float = 1.0) -> "DensitySpec":
        return cls(np.full(mesh.n_triangles, gamma), np.full(len(mesh.boundary_edges), rho))

    def scaled(self, gamma: float = 1.0, rho: float = 1.0) -> "DensitySpec":
        return DensitySpec(self.gamma * gamma, self.rho * rho)

    def refined(self) -> "DensitySpec":
        """Densities carried over to :func:`steklab.mesh.refine_uniform` output."""
        return DensitySpec(np.repeat(self.gamma, 4), np.repeat(self.rho, 2))


def check_densities(mesh: Mesh, densities: DensitySpec, steklov: np.ndarray | None = None) -> None:
    g, r = densities.gamma, densities.rho
    if len(g) != mesh.n_triangles:
        raise ValueError(f"gamma has {len(g)} entries, mesh has {mesh.n_triangles} triangles")
    if len(r) != len(mesh.boundary_edges):
        raise ValueError(f"rho has {len(r)} entries, mesh has {len(mesh.boundary_edges)} boundary edges")
    if not (np.all(np.isfinite(g)) and np.all(g > 0)):
        raise ValueError("gamma must be finite and strictly positive on every triangle")
    if not (np.all(np.isfinite(r)) and np.all(r >= 0)):
        raise ValueError("rho must be finite and non-negative")
    if steklov is None:
        steklov = mesh.steklov_mask()
    if np.any(r[steklov] <= 0):
        raise ValueError("rho must be strictly positive on every Steklov edge")


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # (n_vertices, k + 1), column j belongs to eigenvalues[j]
    boundary_dofs: np.ndarray
    clusters: tuple[tuple[float, int], ...]

    def cluster_ids(self) -> np.ndarray:
        return np.repeat(np.arange(len(self.clusters)), [m for _, m in self.clusters])

    def multiplicity(self, k: int) -> int:
        return int(self.clusters[self.cluster_ids()[k]][1])


# ---------------------------------------------------------------------------
# assembly


def _p1_gradients(mesh: Mesh):
    p = mesh.vertices[mesh.triangles]  # (T, 3, 2)
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    if np.any(det <= 0):
        raise MeshError(f"degenerate triangle {int(np.argmin(det))}")
    # gradient of barycentric coordinate i is the rotated opposite edge / (2 * area)
    opp = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
    grads = np.stack([-opp[..., 1], opp[..., 0]], axis=-1) / det[:, None, None]
    return grads, 0.5 * det


def element_stiffness(mesh: Mesh, gamma: np.ndarray) -> np.ndarray:
    """``(T, 3, 3)`` local matrices ``gamma * area * grad(phi_i) . grad(phi_j)``."""
    grads, area = _p1_gradients(mesh)
    return (gamma * area)[:, None, None] * np.einsum("tid,tjd->tij", grads, grads)


def assemble_stiffness(mesh: Mesh, densities: DensitySpec) -> sp.csr_matrix:
    check_densities(mesh, densities, steklov=np.zeros(len(mesh.boundary_edges), bool))
    local = element_stiffness(mesh, densities.gamma)
    t = mesh.triangles
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    n = mesh.n_vertices
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


_EDGE_MASS = np.array([[1.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 3.0]])


def assemble_boundary_mass(mesh: Mesh, densities: DensitySpec,
                           steklov: np.ndarray | None = None) -> sp.csr_matrix:
    """Exact P1 mass on Steklov edges, ``rho * length * [[1/3, 1/6], [1/6, 1/3]]`` each."""
    if steklov is None:
        steklov = mesh.steklov_mask()
    check_densities(mesh, densities, steklov)
    e = mesh.boundary_edges[steklov]
    w = (densities.rho * mesh.edge_lengths())[steklov]
    local = w[:, None, None] * _EDGE_MASS
    rows = np.repeat(e, 2, axis=1).ravel()
    cols = np.tile(e, (1, 2)).ravel()
    n = mesh.n_vertices
    return sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


# ---------------------------------------------------------------------------
# Dirichlet-to-Neumann reduction


@dataclass(frozen=True, eq=False)
class _Reduction:
    dtn: np.ndarray
    boundary: np.ndarray
    interior: np.ndarray
    extension: np.ndarray  # interior values = extension @ boundary values


def _reduce(K: sp.spmatrix, steklov_dofs: np.ndarray) -> _Reduction:
    K = sp.csr_matrix(K)
    n = K.shape[0]
    b = np.unique(np.asarray(steklov_dofs, dtype=np.int64))
    if b.size == 0:
        raise SolverError("no Steklov degrees of freedom")
    if b.min() < 0 or b.max() >= n:
        raise SolverError("Steklov dof index out of range")
    mask = np.zeros(n, bool)
    mask[b] = True
    i = np.flatnonzero(~mask)
    Kbb = K[b][:, b].toarray()
    if i.size == 0:
        return _Reduction(0.5 * (Kbb + Kbb.T), b, i, np.zeros((0, b.size)))

    # a coupling component without Steklov dofs keeps the constant mode: K_ii singular
    ncomp, labels = connected_components(K, directed=False)
    touched = np.zeros(ncomp, bool)
    touched[labels[b]] = True
    if not touched.all():
        lonely = np.flatnonzero(~touched[labels])
        raise SolverError(
            f"interior block is singular: {lonely.size} dofs (e.g. vertex {int(lonely[0])}) "
            "lie in a component that never reaches the Steklov boundary")
    Kii = K[i][:, i].tocsc()
    Kib = K[i][:, b].toarray()
    try:
        lu = splu(Kii)
    except RuntimeError as exc:
        raise SolverError(f"interior factorisation failed: {exc}") from exc
    X = lu.solve(Kib)
    if not np.all(np.isfinite(X)):
        raise SolverError("interior solve produced non-finite values")
    S = Kbb - Kib.T @ X
    return _Reduction(0.5 * (S + S.T), b, i, -X)


def dtn_reduce(K: sp.spmatrix, steklov_dofs: Sequence[int]) -> np.ndarray:
    """Schur complement ``K_bb - K_bi K_ii^{-1} K_ib`` on the (sorted) Steklov dofs."""
    return _reduce(K, np.asarray(steklov_dofs)).dtn


# ---------------------------------------------------------------------------
# eigenproblems


def cluster_multiplicities(eigenvalues: Sequence[float], rel_tol: float = DEFAULT_REL_TOL
                           ) -> list[tuple[float, int]]:
    """Greedy chain clustering of a sorted spectrum.

    A value joins the running cluster when its gap to the previous value is at
    most ``rel_tol * max(1, |value|)``.  Each cluster is reported by its first
    (smallest) member.
    """
    vals = np.asarray(eigenvalues, dtype=float).ravel()
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    if np.any(np.diff(vals) < 0):
        raise ValueError("eigenvalues must be sorted in ascending order")
    clusters: list[list] = []
    for k, v in enumerate(vals):
        if k and v - vals[k - 1] <= rel_tol * max(1.0, abs(v)):
            clusters[-1][1] += 1
        else:
            clusters.append([float(v), 1])
    return [(v, m) for v, m in clusters]


def _solve(mesh: Mesh, densities: DensitySpec, k: int, steklov: np.ndarray,
           rel_tol: float) -> SpectrumResult:
    if not np.any(steklov):
        raise SolverError("at least one Steklov edge is required")
    check_densities(mesh, densities, steklov)
    if k < 0:
        raise ValueError("k must be non-negative")
    K = assemble_stiffness(mesh, densities)
    M = assemble_boundary_mass(mesh, densities, steklov)
    dofs = np.unique(mesh.boundary_edges[steklov])
    if k + 1 > dofs.size:
        raise SolverError(f"k={k} too large: only {dofs.size} Steklov boundary vertices")
    red = _reduce(K, dofs)
    Mbb = M[red.boundary][:, red.boundary].toarray()
    try:
        vals, vecs = scipy.linalg.eigh(red.dtn, Mbb, subset_by_index=[0, k], driver="gvx")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"generalised eigensolver failed: {exc}") from exc
    vals = np.maximum(vals, 0.0)
    full = np.empty((mesh.n_vertices, k + 1))
    full[red.boundary] = vecs
    if red.interior.size:
        full[red.interior] = red.extension @ vecs
    return SpectrumResult(vals, full, red.boundary, tuple(cluster_multiplicities(vals, rel_tol)))


def solve_steklov(mesh: Mesh, densities: DensitySpec, k: int,
                  rel_tol: float = DEFAULT_REL_TOL) -> SpectrumResult:
    """First ``k + 1`` Steklov eigenpairs with the whole boundary carrying the Steklov condition."""
    return _solve(mesh, densities, k, np.ones(len(mesh.boundary_edges), bool), rel_tol)


def solve_steklov_neumann(mesh: Mesh, densities: DensitySpec, k: int,
                          rel_tol: float = DEFAULT_REL_TOL) -> SpectrumResult:
    """Mixed problem: Steklov on ``"S"`` edges, homogeneous Neumann on ``"N"`` edges."""
    return _solve(mesh, densities, k, mesh.steklov_mask(), rel_tol)


def full_pencil_eigenvalues(mesh: Mesh, densities: DensitySpec, k: int,
                            steklov: np.ndarray | None = None) -> np.ndarray:
    """Steklov eigenvalues from the unreduced pencil, for cross-checking small meshes.

    ``M`` is singular, so the shifted pencil ``M u = mu (K + M) u`` is solved
    densely and ``sigma = 1/mu - 1`` recovered from its largest ``mu``.
    """
    if steklov is None:
        steklov = mesh.steklov_mask()
    K = assemble_stiffness(mesh, densities).toarray()
    M = assemble_boundary_mass(mesh, densities, steklov).toarray()
    n = K.shape[0]
    mu = scipy.linalg.eigh(M, K + M, eigvals_only=True, subset_by_index=[n - k - 1, n - 1])
    return np.sort(1.0 / mu[::-1] - 1.0)


def boundary_gram(mesh: Mesh, densities: DensitySpec, result: SpectrumResult,
                  steklov: np.ndarray | None = None) -> np.ndarray:
    """``V^T M V`` for the computed eigenvectors (identity when boundary-orthonormal)."""
    M = assemble_boundary_mass(mesh, densities, steklov)
    V = result.eigenvectors
    return V.T @ (M @ V)


# ---------------------------------------------------------------------------
# reference spectra


def disk_spectrum(count: int, radius: float = 1.0) -> np.ndarray:
    """Homogeneous disk: eigenfunctions r^m cos(m t), r^m sin(m t) with sigma = m / radius."""
    m = np.concatenate([[0], np.repeat(np.arange(1, count), 2)])[:count]
    return m / radius


def strip_spectrum(count: int, height: float = 1.0) -> np.ndarray:
    """[0, pi] x [0, height], Steklov on y = 0 only: cos(m x) cosh(m (height - y)), sigma = m tanh(m height)."""
    m = np.arange(count)
    return m * np.tanh(m * height)


def annulus_mode_pencil(m: int, inner: float, outer: float = 1.0) -> np.ndarray:
    """Both Steklov eigenvalues of angular mode ``m`` on a concentric annulus.

    Radial basis ``(r^m, r^-m)`` (or ``(1, log r)`` for m = 0); rows of ``A`` hold
    boundary traces at (outer, inner), rows of ``B`` the outward normal derivatives.
    """
    R, a = inner, outer
    if m == 0:
        A = np.array([[1.0, np.log(a)], [1.0, np.log(R)]])
        B = np.array([[0.0, 1.0 / a], [0.0, -1.0 / R]])
    else:
        A = np.array([[a**m, a**-m], [R**m, R**-m]])
        B = np.array([[m * a ** (m - 1), -m * a ** (-m - 1)], [-m * R ** (m - 1), m * R ** (-m - 1)]])
    vals = scipy.linalg.eigvals(B, A)
    return np.sort(vals.real)


def annulus_spectrum(count: int, inner: float, outer: float = 1.0, max_mode: int = 64) -> np.ndarray:
    vals = list(annulus_mode_pencil(0, inner, outer))
    for m in range(1, max_mode + 1):
        for v in annulus_mode_pencil(m, inner, outer):
            vals.extend([v, v])
    return np.sort(np.asarray(vals))[:count]


# ---------------------------------------------------------------------------
# file formats


def densities_to_dict(d: DensitySpec) -> dict:
    return {"gamma": d.gamma.tolist(), "rho": d.rho.tolist()}


def densities_from_dict(data: dict) -> DensitySpec:
    try:
        return DensitySpec(np.asarray(data["gamma"], float), np.asarray(data["rho"], float))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed density document: {exc}") from exc


def save_densities(d: DensitySpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(densities_to_dict(d)), encoding="utf-8")


def load_densities(path: str | Path) -> DensitySpec:
    return densities_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def spectrum_csv(result: SpectrumResult) -> str:
    lines = ["k,sigma,cluster,multiplicity"]
    for k, (s, c) in enumerate(zip(result.eigenvalues, result.cluster_ids())):
        lines.append(f"{k},{float(s):.17g},{int(c)},{result.clusters[c][1]}")
    return "\n".join(lines) + "\n"
