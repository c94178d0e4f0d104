"""Combinatorial maps: rotation systems with edge signs, face tracing and proper embeddings."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .bounds import SurfaceSignature

Edge = tuple[int, int]


def _edge(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


def canonical_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    """Lexicographically least rotation of the cycle or of its reversal."""
    c = list(cycle)
    if not c:
        return ()
    options = []
    for seq in (c, c[::-1]):
        for i in range(len(seq)):
            options.append(tuple(seq[i:] + seq[:i]))
    return min(options)


class RotationSystem:
    """Cyclic neighbour order at each vertex plus a sign on every edge.

    Vertices are ``1..n``.  A sign of ``-1`` means the local orientations at the
    two ends of the edge disagree.
    """

    def __init__(self, n: int, rotations: Mapping[int, Sequence[int]], signs: Mapping[Edge, int] | None = None):
        self.n = int(n)
        if self.n < 1:
            raise ValueError("need at least one vertex")
        if set(rotations) != set(range(1, self.n + 1)):
            raise ValueError(f"rotations must be given for exactly the vertices 1..{self.n}")
        self.rotations: dict[int, tuple[int, ...]] = {}
        for v in range(1, self.n + 1):
            rot = tuple(int(x) for x in rotations[v])
            if len(set(rot)) != len(rot):
                raise ValueError(f"rotation at {v} repeats a neighbour")
            if v in rot or any(not 1 <= x <= self.n for x in rot):
                raise ValueError(f"rotation at {v} names an invalid neighbour")
            self.rotations[v] = rot
        for v, rot in self.rotations.items():
            for w in rot:
                if v not in self.rotations[w]:
                    raise ValueError(f"dart {v}->{w} has no reverse dart {w}->{v}")
        self.edges: tuple[Edge, ...] = tuple(sorted({_edge(v, w) for v, rot in self.rotations.items() for w in rot}))
        given = {} if signs is None else {_edge(*map(int, e)): int(s) for e, s in signs.items()}
        unknown = set(given) - set(self.edges)
        if unknown:
            raise ValueError(f"signs given for non-edges {sorted(unknown)}")
        if any(s not in (1, -1) for s in given.values()):
            raise ValueError("edge signs must be +1 or -1")
        self.signs: dict[Edge, int] = {e: given.get(e, 1) for e in self.edges}
        self._succ = {v: {rot[i]: rot[(i + 1) % len(rot)] for i in range(len(rot))} for v, rot in self.rotations.items()}
        self._pred = {v: {b: a for a, b in s.items()} for v, s in self._succ.items()}

    def sign(self, a: int, b: int) -> int:
        return self.signs[_edge(a, b)]

    def neighbours(self, v: int) -> tuple[int, ...]:
        return self.rotations[v]

    def adjacency(self) -> dict[int, set[int]]:
        return {v: set(rot) for v, rot in self.rotations.items()}

    def is_connected(self) -> bool:
        seen, queue = {1}, deque([1])
        while queue:
            v = queue.popleft()
            for w in self.rotations[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == self.n

    def step(self, state: tuple[int, int, int]) -> tuple[int, int, int]:
        """Next state of a face walk: traverse ``u -> w`` carrying local orientation ``s``."""
        u, w, s = state
        s = s * self.sign(u, w)
        x = self._succ[w][u] if s > 0 else self._pred[w][u]
        return (w, x, s)

    def reverse(self, state: tuple[int, int, int]) -> tuple[int, int, int]:
        """The same face side walked backwards."""
        u, w, s = state
        return (w, u, -s * self.sign(u, w))


@dataclass(frozen=True)
class Face:
    vertices: tuple[int, ...]  # canonical vertex cycle
    darts: tuple[Edge, ...]  # darts in walk order

    def __len__(self) -> int:
        return len(self.darts)


def _trace(rs: RotationSystem) -> tuple[list[Face], dict[tuple[int, int, int], int]]:
    orbit_of: dict[tuple[int, int, int], int] = {}
    orbits: list[list[tuple[int, int, int]]] = []
    for u in range(1, rs.n + 1):
        for w in rs.rotations[u]:
            for s in (1, -1):
                start = (u, w, s)
                if start in orbit_of:
                    continue
                walk, cur = [], start
                while cur not in orbit_of:
                    orbit_of[cur] = len(orbits)
                    walk.append(cur)
                    cur = rs.step(cur)
                if cur != start:
                    raise ValueError("rotation system produced a non-cyclic face walk")
                orbits.append(walk)
    kept = []
    for oid, walk in enumerate(orbits):
        partner = orbit_of[rs.reverse(walk[0])]
        if partner == oid:
            raise ValueError("face walk coincides with its own reversal")
        if oid < partner:
            face = Face(canonical_cycle([st[0] for st in walk]), tuple((st[0], st[1]) for st in walk))
            kept.append((face, oid, partner))
    kept.sort(key=lambda item: (item[0].vertices, item[0].darts))
    face_of_orbit = {}
    for fid, (_, a, b) in enumerate(kept):
        face_of_orbit[a] = face_of_orbit[b] = fid
    return [f for f, _, _ in kept], {st: face_of_orbit[o] for st, o in orbit_of.items()}


def trace_faces(rs: RotationSystem) -> list[Face]:
    """All faces of the map, sorted by canonical vertex cycle; index in the list is the face id."""
    return _trace(rs)[0]


def face_id(rs: RotationSystem, cycle: Sequence[int]) -> int:
    """Id of the face with this vertex cycle.

    If several faces share the cycle (a triangle on the sphere bounds two), the
    face walked from the first dart of ``cycle`` with positive local orientation wins.
    """
    faces, state_face = _trace(rs)
    key = canonical_cycle(cycle)
    hits = [i for i, f in enumerate(faces) if f.vertices == key]
    if not hits:
        raise ValueError(f"removed face {tuple(cycle)} is not a face of the map")
    if len(hits) == 1:
        return hits[0]
    state = (int(cycle[0]), int(cycle[1]), 1)
    if state not in state_face or state_face[state] not in hits:
        raise ValueError(f"removed face {tuple(cycle)} names more than one face")
    return state_face[state]


def is_orientable(rs: RotationSystem) -> bool:
    """True iff vertex switchings can make every edge sign positive."""
    flip = {1: 1}
    queue = deque([1])
    while queue:
        v = queue.popleft()
        for w in rs.rotations[v]:
            want = flip[v] * rs.sign(v, w)
            if w not in flip:
                flip[w] = want
                queue.append(w)
            elif flip[w] != want:
                return False
    return True


def classify_surface(rs: RotationSystem) -> SurfaceSignature:
    """Closed surface carried by the map, as Euler characteristic and orientability."""
    if not rs.is_connected():
        raise ValueError("classify_surface needs a connected graph")
    chi = rs.n - len(rs.edges) + len(trace_faces(rs))
    return SurfaceSignature(chi, is_orientable(rs), 0)


@dataclass(frozen=True)
class EmbeddingCertificate:
    rotation_system: RotationSystem
    removed_faces: tuple[tuple[int, ...], ...]
    claims: SurfaceSignature | None = None
    name: str = ""

    def removed_face_ids(self) -> list[int]:
        """Face ids of the removed faces; raises if one of them is not a face of the map."""
        ids = [face_id(self.rotation_system, cyc) for cyc in self.removed_faces]
        if len(set(ids)) != len(ids):
            raise ValueError("a face is removed twice")
        return ids


def verify_proper(cert: EmbeddingCertificate) -> bool:
    """Every vertex lies on the boundary of some removed face."""
    cert.removed_face_ids()
    on_boundary = {v for cyc in cert.removed_faces for v in cyc}
    return on_boundary == set(range(1, cert.rotation_system.n + 1))


def check_certificate(cert: EmbeddingCertificate) -> dict:
    """Trace, classify and verify; compare against the declared surface when present."""
    rs = cert.rotation_system
    closed = classify_surface(rs)
    report = {
        "n": rs.n,
        "faces": len(trace_faces(rs)),
        "chi": closed.chi,
        "orientable": closed.orientable,
        "p": len(cert.removed_faces),
        "proper": verify_proper(cert),
    }
    if cert.claims is not None:
        c = cert.claims
        report["claims_match"] = (c.chi, c.orientable, c.p) == (closed.chi, closed.orientable, report["p"])
    return report


# ---------------------------------------------------------------------------
# JSON


def certificate_to_dict(cert: EmbeddingCertificate) -> dict:
    rs = cert.rotation_system
    out = {
        "n": rs.n,
        "rotations": [list(rs.rotations[v]) for v in range(1, rs.n + 1)],
        "signs": {f"{a}-{b}": s for (a, b), s in rs.signs.items()},
        "removed_faces": [list(c) for c in cert.removed_faces],
    }
    if cert.claims is not None:
        out["claims"] = {"chi": cert.claims.chi, "orientable": cert.claims.orientable, "p": cert.claims.p}
    if cert.name:
        out["name"] = cert.name
    return out


def certificate_from_dict(data: Mapping) -> EmbeddingCertificate:
    try:
        n = int(data["n"])
        rot = data["rotations"]
        if len(rot) != n:
            raise ValueError(f"expected {n} rotations, got {len(rot)}")
        signs = {}
        for key, s in data.get("signs", {}).items():
            a, b = key.split("-")
            signs[(int(a), int(b))] = int(s)
        rs = RotationSystem(n, {v + 1: rot[v] for v in range(n)}, signs)
        claims = None
        if "claims" in data:
            c = data["claims"]
            claims = SurfaceSignature(int(c["chi"]), bool(c["orientable"]), int(c["p"]))
        removed = tuple(tuple(int(v) for v in f) for f in data["removed_faces"])
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed certificate: {exc}") from exc
    return EmbeddingCertificate(rs, removed, claims, str(data.get("name", "")))


def load_certificate(path: str | Path) -> EmbeddingCertificate:
    return certificate_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def save_certificate(cert: EmbeddingCertificate, path: str | Path) -> None:
    body = ",\n".join(f" {json.dumps(k)}: {json.dumps(v)}" for k, v in certificate_to_dict(cert).items())
    Path(path).write_text("{\n" + body + "\n}\n", encoding="utf-8")


def _fixture_dir():
    return resources.files("steklab").joinpath("data", "certificates")


def fixture_names() -> list[str]:
    return sorted(p.name[:-5] for p in _fixture_dir().iterdir() if p.name.endswith(".json"))


def load_fixture(name: str) -> EmbeddingCertificate:
    res = _fixture_dir().joinpath(f"{name}.json")
    if not res.is_file():
        raise KeyError(f"no certificate fixture named {name!r}")
    return certificate_from_dict(json.loads(res.read_text(encoding="utf-8")))


def rotation_system_from_faces(n: int, faces: Iterable[Sequence[int]]) -> RotationSystem:
    """Rotation system of the closed surface obtained by gluing the given polygons.

    Every edge must lie on exactly two faces and every vertex link must be a single cycle.
    """
    faces = [list(f) for f in faces]
    link: dict[int, dict[int, list[int]]] = {v: {} for v in range(1, n + 1)}
    for f in faces:
        L = len(f)
        for i, v in enumerate(f):
            a, b = f[i - 1], f[(i + 1) % L]
            link[v].setdefault(a, []).append(b)
            link[v].setdefault(b, []).append(a)
    rotations = {}
    for v in range(1, n + 1):
        nb = link[v]
        if not nb or any(len(x) != 2 for x in nb.values()):
            raise ValueError(f"the link of vertex {v} is not a union of cycles")
        start = min(nb)
        order, prev, cur = [start], None, start
        while True:
            a, b = nb[cur]
            nxt = a if a != prev else b
            if nxt == start:
                break
            order.append(nxt)
            prev, cur = cur, nxt
        if len(order) != len(nb):
            raise ValueError(f"the link of vertex {v} is not a single cycle")
        rotations[v] = order
    succ = {v: {r[i]: r[(i + 1) % len(r)] for i in range(len(r))} for v, r in rotations.items()}
    signs: dict[Edge, int] = {}
    for f in faces:
        L = len(f)
        corner = [1 if succ[f[i]][f[i - 1]] == f[(i + 1) % L] else -1 for i in range(L)]
        for i in range(L):
            e = _edge(f[i], f[(i + 1) % L])
            s = corner[i] * corner[(i + 1) % L]
            if signs.setdefault(e, s) != s:
                raise ValueError(f"faces give edge {e} inconsistent signs")
    return RotationSystem(n, rotations, signs)
