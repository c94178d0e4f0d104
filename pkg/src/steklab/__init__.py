"""Steklov eigenvalue laboratory.

Finite element Steklov and Steklov-Neumann spectra on planar domains, nodal
domain analysis, metric graph operators and their thin tubular approximations,
and combinatorics of graph embeddings in surfaces with boundary.
"""

from .fem import DensitySpec, SpectrumResult, cluster_multiplicities, solve_steklov, solve_steklov_neumann
from .graphs import MetricGraph, graph_laplacian, graph_spectrum, mu_reference
from .mesh import DomainSpec, Mesh, build_domain, disk_mesh, annulus_mesh, rectangle_mesh, refine_uniform
from .nodal import nodal_domains, courant_check, boundary_contact_check, multiplicity_bound

__version__ = "0.1.0"

__all__ = [
    "DensitySpec",
    "DomainSpec",
    "Mesh",
    "MetricGraph",
    "SpectrumResult",
    "annulus_mesh",
    "boundary_contact_check",
    "build_domain",
    "cluster_multiplicities",
    "courant_check",
    "disk_mesh",
    "graph_laplacian",
    "graph_spectrum",
    "multiplicity_bound",
    "mu_reference",
    "nodal_domains",
    "rectangle_mesh",
    "refine_uniform",
    "solve_steklov",
    "solve_steklov_neumann",
]
