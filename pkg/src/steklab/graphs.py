"""Weighted graph Laplacians and Schrodinger operators on finite metric graphs."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components


@dataclass(frozen=True, eq=False)
class MetricGraph:
    """Simple graph on vertices ``0..n-1`` with edge lengths, vertex measures and a potential."""

    n: int
    edges: tuple[tuple[int, int, float], ...]
    measures: np.ndarray
    potential: np.ndarray

    def __init__(self, n: int, edges: Sequence[Sequence[float]], measures=None, potential=None):
        n = int(n)
        if n < 1:
            raise ValueError("a graph needs at least one vertex")
        clean, seen = [], set()
        for e in edges:
            i, j, length = int(e[0]), int(e[1]), float(e[2]) if len(e) > 2 else 1.0
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"multiple edges between {key[0]} and {key[1]}")
            if not length > 0 or not np.isfinite(length):
                raise ValueError(f"edge {key} must have a positive length")
            seen.add(key)
            clean.append((key[0], key[1], length))
        mu = np.ones(n) if measures is None else np.array(measures, dtype=float).ravel()
        V = np.zeros(n) if potential is None else np.array(potential, dtype=float).ravel()
        if mu.size != n or V.size != n:
            raise ValueError("measures and potential need one entry per vertex")
        if not np.all(mu > 0):
            raise ValueError("vertex measures must be strictly positive")
        mu.setflags(write=False)
        V.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(clean))
        object.__setattr__(self, "measures", mu)
        object.__setattr__(self, "potential", V)

    @classmethod
    def complete(cls, n: int, length: float = 1.0) -> "MetricGraph":
        return cls(n, [(i, j, length) for i in range(n) for j in range(i + 1, n)])

    @classmethod
    def path(cls, n: int, length: float = 1.0) -> "MetricGraph":
        return cls(n, [(i, i + 1, length) for i in range(n - 1)])

    @classmethod
    def cycle(cls, n: int, length: float = 1.0) -> "MetricGraph":
        return cls(n, [(i, (i + 1) % n, length) for i in range(n)])

    def neighbours(self, i: int) -> list[int]:
        return sorted([b for a, b, _ in self.edges if a == i] + [a for a, b, _ in self.edges if b == i])

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        if not self.edges:
            return False
        rows = [a for a, _, _ in self.edges]
        cols = [b for _, b, _ in self.edges]
        adj = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n, self.n))
        return connected_components(adj, directed=False)[0] == 1


def graph_laplacian(G: MetricGraph) -> np.ndarray:
    """``(L f)(x) = sum_{y ~ x} (f(x) - f(y)) / l_xy`` as a dense symmetric matrix."""
    L = np.zeros((G.n, G.n))
    for i, j, length in G.edges:
        w = 1.0 / length
        L[i, j] -= w
        L[j, i] -= w
        L[i, i] += w
        L[j, j] += w
    return L


def graph_spectrum(G: MetricGraph) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of ``(L + diag V) f = lambda diag(mu) f``, eigenvectors mu-orthonormal."""
    if not G.is_connected():
        raise ValueError("graph_spectrum requires a connected graph")
    H = graph_laplacian(G) + np.diag(G.potential)
    vals, vecs = scipy.linalg.eigh(H, np.diag(G.measures))
    return vals, vecs


def mu_reference(n: int) -> int:
    """Colin de Verdiere invariant of the complete graph K_n, which is n - 1."""
    if n < 2:
        raise ValueError("mu_reference needs n >= 2")
    return n - 1


def graph_to_dict(G: MetricGraph) -> dict:
    return {
        "n": G.n,
        "edges": [[i, j, length] for i, j, length in G.edges],
        "mu": G.measures.tolist(),
        "V": G.potential.tolist(),
    }


def graph_from_dict(data: dict) -> MetricGraph:
    try:
        return MetricGraph(data["n"], data.get("edges", []), data.get("mu"), data.get("V"))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph document: {exc}") from exc


def load_graph(path: str | Path) -> MetricGraph:
    return graph_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_graph(G: MetricGraph, path: str | Path) -> None:
    Path(path).write_text(json.dumps(graph_to_dict(G)), encoding="utf-8")
