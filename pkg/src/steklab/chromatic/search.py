"""Backtracking search for cellular embeddings of complete graphs with a prescribed face set.

Faces are placed one at a time.  The link of every vertex (the cyclic order of
its neighbours seen through the incident faces) is kept as a union of
disjoint paths, and a path may only close up once it visits every neighbour.
When every edge lies on two faces, the links are Hamiltonian cycles and the
faces glue into a closed surface.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .maps import RotationSystem, canonical_cycle, classify_surface, rotation_system_from_faces, trace_faces


class SearchExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchResult:
    faces: tuple[tuple[int, ...], ...]
    rotation_system: RotationSystem
    seed: int
    nodes: int


class _State:
    def __init__(self, n: int, budget: Mapping[int, int], orientable: bool):
        self.n = n
        self.orientable = orientable
        self.budget = dict(budget)
        self.deg = [[0] * (n + 1) for _ in range(n + 1)]
        self.end = [list(range(n + 1)) for _ in range(n + 1)]
        self.nlink = [0] * (n + 1)
        self.directed: set[tuple[int, int]] = set()
        self.faces: list[tuple[int, ...]] = []

    def _link_ok(self, v, a, b) -> bool:
        deg = self.deg[v]
        if deg[a] >= 2 or deg[b] >= 2:
            return False
        return self.end[v][a] != b or self.nlink[v] == self.n - 2

    def _link_add(self, v, a, b):
        end = self.end[v]
        ea, eb = end[a], end[b]
        saved = (v, a, b, ea, eb, end[ea], end[eb])
        self.deg[v][a] += 1
        self.deg[v][b] += 1
        self.nlink[v] += 1
        if ea != b:
            end[ea], end[eb] = eb, ea
        return saved

    def _link_undo(self, saved):
        v, a, b, ea, eb, old_a, old_b = saved
        end = self.end[v]
        end[ea], end[eb] = old_a, old_b
        self.deg[v][a] -= 1
        self.deg[v][b] -= 1
        self.nlink[v] -= 1

    def fits(self, face) -> bool:
        L = len(face)
        if self.budget.get(L, 0) <= 0:
            return False
        if self.orientable and any((face[i], face[(i + 1) % L]) in self.directed for i in range(L)):
            return False
        log = []
        ok = True
        for i in range(L):
            v, a, b = face[i], face[i - 1], face[(i + 1) % L]
            if not self._link_ok(v, a, b):
                ok = False
                break
            log.append(self._link_add(v, a, b))
        for saved in reversed(log):
            self._link_undo(saved)
        return ok

    def push(self, face):
        L = len(face)
        log = []
        for i in range(L):
            log.append(self._link_add(face[i], face[i - 1], face[(i + 1) % L]))
        darts = [(face[i], face[(i + 1) % L]) for i in range(L)]
        if self.orientable:
            self.directed.update(darts)
        self.budget[L] -= 1
        self.faces.append(tuple(face))
        return log, darts

    def pop(self, token):
        log, darts = token
        face = self.faces.pop()
        self.budget[len(face)] += 1
        if self.orientable:
            self.directed.difference_update(darts)
        for saved in reversed(log):
            self._link_undo(saved)

    def open_edges(self):
        n, deg = self.n, self.deg
        return [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1) if deg[u][v] < 2]

    def candidates(self, u, v):
        others = [w for w in range(1, self.n + 1) if w not in (u, v)]
        starts = [(u, v), (v, u)] if self.orientable else [(u, v)]
        out = []
        for a, b in starts:
            if self.budget.get(3, 0) > 0:
                out.extend((a, b, w) for w in others)
            if self.budget.get(4, 0) > 0:
                out.extend((a, b, w, x) for w in others for x in others if x != w)
            if self.budget.get(5, 0) > 0:
                out.extend((a, b, w, x, y) for w in others for x in others for y in others
                           if len({w, x, y}) == 3)
        return [f for f in out if self.fits(f)]


def search_embedding(n: int, face_sizes: Mapping[int, int], orientable: bool,
                     required: Sequence[Sequence[int]] = (), seeds: Sequence[int] = range(20),
                     node_limit: int = 200_000) -> SearchResult:
    """Closed-surface embedding of K_n whose faces have the given size counts and include ``required``.

    ``orientable=True`` asks for a coherently oriented face set; ``False`` asks for a
    non-orientable surface (orientable solutions are rejected and the search continues).
    Each seed runs a randomised depth-first search capped at ``node_limit`` nodes.
    """
    total = sum(k * c for k, c in face_sizes.items())
    if total != n * (n - 1):
        raise ValueError(f"face sizes cover {total} edge sides, K_{n} needs {n * (n - 1)}")
    for seed in seeds:
        rng = random.Random(seed)
        state = _State(n, face_sizes, orientable)
        for f in required:
            if not state.fits(tuple(f)):
                raise ValueError(f"required face {tuple(f)} cannot be placed")
            state.push(tuple(f))
        nodes = [0]

        def solve() -> bool:
            nodes[0] += 1
            if nodes[0] > node_limit:
                raise SearchExhausted
            open_ = state.open_edges()
            if not open_:
                return _accept(n, state.faces, orientable)
            best = None
            for u, v in open_:
                cand = state.candidates(u, v)
                if best is None or len(cand) < len(best):
                    best = cand
                    if len(best) <= 1:
                        break
            rng.shuffle(best)
            for face in best:
                token = state.push(face)
                if solve():
                    return True
                state.pop(token)
            return False

        try:
            if solve():
                faces = tuple(state.faces)
                return SearchResult(faces, rotation_system_from_faces(n, faces), seed, nodes[0])
        except SearchExhausted:
            continue
    raise SearchExhausted(f"no embedding of K_{n} with faces {dict(face_sizes)} found")


def _accept(n: int, faces, orientable: bool) -> bool:
    rs = rotation_system_from_faces(n, faces)
    traced = sorted(f.vertices for f in trace_faces(rs))
    if traced != sorted(canonical_cycle(f) for f in faces):
        return False
    return classify_surface(rs).orientable == orientable
