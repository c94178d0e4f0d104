"""Greedy colouring by repeated removal of a vertex of minimum degree."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping


@dataclass(frozen=True)
class ColoringResult:
    success: bool
    colors: dict[int, int] = field(default_factory=dict)  # vertex -> colour in 0..c-1
    blocking_vertex: int | None = None

    @property
    def n_colors(self) -> int:
        return len(set(self.colors.values()))


def complete_graph(n: int) -> dict[int, set[int]]:
    return {v: {w for w in range(1, n + 1) if w != v} for v in range(1, n + 1)}


def _normalise(graph) -> dict[int, set[int]]:
    if hasattr(graph, "adjacency"):
        graph = graph.adjacency()
    adj = {int(v): {int(w) for w in nb} for v, nb in graph.items()}
    for v, nb in adj.items():
        if v in nb:
            raise ValueError(f"self-loop at {v}")
        for w in nb:
            if v not in adj.get(w, ()):
                raise ValueError(f"adjacency is not symmetric at {v}-{w}")
    return adj


def elimination_order(adj: Mapping[int, Iterable[int]]) -> list[int]:
    """Smallest-last order: repeatedly remove a vertex of minimum remaining degree, lowest label first."""
    deg = {v: len(set(nb)) for v, nb in adj.items()}
    alive = set(adj)
    order = []
    while alive:
        v = min(alive, key=lambda x: (deg[x], x))
        order.append(v)
        alive.remove(v)
        for w in adj[v]:
            if w in alive:
                deg[w] -= 1
    return order


def greedy_color(graph, c: int) -> ColoringResult:
    """Colour with at most ``c`` colours, re-inserting vertices in reverse elimination order.

    ``graph`` is an adjacency mapping or any object with an ``adjacency()`` method.
    On failure the first vertex that sees all ``c`` colours among its neighbours is reported.
    """
    if c < 1:
        raise ValueError("need at least one colour")
    adj = _normalise(graph)
    colors: dict[int, int] = {}
    for v in reversed(elimination_order(adj)):
        used = {colors[w] for w in adj[v] if w in colors}
        free = next((k for k in range(c) if k not in used), None)
        if free is None:
            return ColoringResult(False, colors, v)
        colors[v] = free
    return ColoringResult(True, colors)


def is_proper(graph, colors: Mapping[int, int]) -> bool:
    adj = _normalise(graph)
    return set(colors) == set(adj) and all(colors[v] != colors[w] for v in adj for w in adj[v])
