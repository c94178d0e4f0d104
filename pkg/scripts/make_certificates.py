#!/usr/bin/env python3
"""Regenerate the frozen embedding certificates shipped with the package.

Each certificate is found by the face-set search with fixed seeds, converted to
a rotation system, re-traced and checked before it is written.  Run from the
repository root:

    python3 scripts/make_certificates.py
"""

from __future__ import annotations

import sys
from pathlib import Path

from steklab.chromatic import EmbeddingCertificate, RotationSystem, SurfaceSignature, check_certificate
from steklab.chromatic.maps import save_certificate
from steklab.chromatic.search import search_embedding

OUT = Path(__file__).resolve().parents[1] / "src" / "steklab" / "data" / "certificates"

# name, n, face sizes, orientable, required faces (all removed), extra removed faces given by a
# vertex or an edge they must contain
TARGETS = [
    ("k5_mobius", 5, {3: 5, 5: 1}, False, [(1, 2, 3, 4, 5)], []),
    ("k6_klein", 6, {3: 6, 4: 3}, False, [(1, 2, 5), (3, 4, 6)], []),
    ("k7_three_crosscaps", 7, {3: 10, 4: 3}, False, [(1, 2, 3), (4, 5, 6, 7)], []),
    ("k8_genus2_p3", 8, {3: 16, 4: 2}, True, [(5, 6, 2, 8)], [(1, 3), (4, 7)]),
    ("k8_four_crosscaps_p3", 8, {3: 16, 4: 2}, False, [(5, 6, 2, 8)], [(1, 3), (4, 7)]),
    ("k8_genus2_p2", 8, {3: 16, 4: 2}, True, [(1, 3, 5, 7), (2, 4, 6, 8)], []),
    ("k9_five_crosscaps_p3", 9, {3: 24}, False, [(1, 2, 9), (6, 7, 8), (3, 4, 5)], []),
    ("k9_genus3_p3", 9, {3: 20, 4: 3}, True, [(1, 2, 3, 4), (5, 6, 7, 8)], [(9,)]),
    ("k10_seven_crosscaps_p4", 10, {3: 30}, False, [(1, 2, 3), (4, 5, 6)], [(7, 8), (9, 10)]),
    ("k10_genus4_p3", 10, {3: 26, 4: 3}, True, [(1, 2, 3, 4), (5, 6, 7), (8, 9, 10)], []),
]


def k3_disk() -> EmbeddingCertificate:
    rs = RotationSystem(3, {1: (2, 3), 2: (3, 1), 3: (1, 2)})
    return EmbeddingCertificate(rs, ((1, 2, 3),), SurfaceSignature(2, True, 1), "k3_disk")


def extra_face(faces, chosen, needle):
    """Lexicographically least face containing ``needle`` (a vertex or an edge) not yet chosen."""
    def hit(f):
        if len(needle) == 1:
            return needle[0] in f
        L = len(f)
        return any({f[i], f[(i + 1) % L]} == set(needle) for i in range(L))

    taken = {tuple(sorted(c)) for c in chosen}
    options = sorted(tuple(f) for f in faces if hit(f) and tuple(sorted(f)) not in taken)
    return options[0]


def build(target) -> EmbeddingCertificate:
    name, n, sizes, orientable, required, extras = target
    res = search_embedding(n, sizes, orientable, required)
    removed = [tuple(f) for f in required]
    for needle in extras:
        removed.append(extra_face(res.faces, removed, needle))
    closed_chi = n - n * (n - 1) // 2 + sum(sizes.values())
    claims = SurfaceSignature(closed_chi, orientable, len(removed))
    return EmbeddingCertificate(res.rotation_system, tuple(removed), claims, name)


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    certs = [k3_disk()] + [build(t) for t in TARGETS]
    for cert in certs:
        report = check_certificate(cert)
        if not (report["proper"] and report["claims_match"]):
            print(f"{cert.name}: check failed {report}", file=sys.stderr)
            return 1
        save_certificate(cert, OUT / f"{cert.name}.json")
        print(f"{cert.name}: chi={report['chi']} orientable={report['orientable']} p={report['p']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
