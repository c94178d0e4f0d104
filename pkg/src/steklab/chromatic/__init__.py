"""Embeddings of graphs in surfaces and relative chromatic numbers."""

from .bounds import (
    SurfaceSignature,
    chr0_bounds,
    chr0_exact,
    chr0_interval,
    chr_closed,
    min_degree_bound,
    parse_surface,
)
from .coloring import ColoringResult, complete_graph, greedy_color, is_proper
from .maps import (
    EmbeddingCertificate,
    Face,
    face_id,
    RotationSystem,
    canonical_cycle,
    check_certificate,
    classify_surface,
    fixture_names,
    load_certificate,
    load_fixture,
    rotation_system_from_faces,
    save_certificate,
    trace_faces,
    verify_proper,
)

__all__ = [
    "ColoringResult",
    "EmbeddingCertificate",
    "Face",
    "face_id",
    "RotationSystem",
    "SurfaceSignature",
    "canonical_cycle",
    "check_certificate",
    "chr0_bounds",
    "chr0_exact",
    "chr0_interval",
    "chr_closed",
    "classify_surface",
    "complete_graph",
    "fixture_names",
    "greedy_color",
    "is_proper",
    "load_certificate",
    "load_fixture",
    "min_degree_bound",
    "parse_surface",
    "rotation_system_from_faces",
    "save_certificate",
    "trace_faces",
    "verify_proper",
]
