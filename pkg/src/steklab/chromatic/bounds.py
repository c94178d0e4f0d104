"""Chromatic numbers of closed surfaces and relative chromatic numbers of surfaces with boundary."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class SurfaceSignature:
    """Closed surface ``(chi, orientable)`` with ``p`` boundary disks removed."""

    chi: int
    orientable: bool
    p: int = 0

    def __post_init__(self):
        if self.chi > 2:
            raise ValueError(f"Euler characteristic {self.chi} > 2 is not a closed surface")
        if self.orientable and self.chi % 2:
            raise ValueError("an orientable closed surface has even Euler characteristic")
        if not self.orientable and self.chi > 1:
            raise ValueError("a non-orientable closed surface has chi <= 1")
        if self.p < 0:
            raise ValueError("p must be non-negative")

    @property
    def closed(self) -> "SurfaceSignature":
        return SurfaceSignature(self.chi, self.orientable, 0)

    @property
    def chi_bounded(self) -> int:
        return self.chi - self.p

    def with_boundary(self, p: int) -> "SurfaceSignature":
        return SurfaceSignature(self.chi, self.orientable, p)


SURFACE_NAMES = ("sphere", "projective", "klein", "torus", "genus2o", "sumkP", "sumkT")


def parse_surface(name: str) -> SurfaceSignature:
    """``sphere``, ``projective``, ``klein``, ``torus``, ``genus2o``, ``sum<k>P`` or ``sum<k>T``."""
    fixed = {
        "sphere": (2, True),
        "projective": (1, False),
        "klein": (0, False),
        "torus": (0, True),
        "genus2o": (-2, True),
    }
    if name in fixed:
        return SurfaceSignature(*fixed[name])
    m = re.fullmatch(r"sum(\d+)([PT])", name)
    if m and int(m.group(1)) >= 1:
        k = int(m.group(1))
        return SurfaceSignature(2 - k, False) if m.group(2) == "P" else SurfaceSignature(2 - 2 * k, True)
    raise ValueError(f"unknown surface {name!r}; expected one of {', '.join(SURFACE_NAMES)}")


def chr_closed(sig: SurfaceSignature) -> int:
    """Heawood number, except 6 on the Klein bottle."""
    if sig.chi == 0 and not sig.orientable:
        return 6
    return (7 + math.isqrt(49 - 24 * sig.chi)) // 2


def colour_bound(chi: int, p: int) -> float:
    """Real colour bound (5 + sqrt(25 - 24 chi + 24 p)) / 2 for graphs properly embedded with p holes."""
    return (5 + math.sqrt(25 - 24 * chi + 24 * p)) / 2


def chr0_bounds(closed_sig: SurfaceSignature, p: int) -> tuple[int, int]:
    """Two-sided bound ``(Chr - 1, min(Chr, floor c))`` on the relative chromatic number."""
    if p < 1:
        raise ValueError("p must be at least 1")
    chr_ = chr_closed(closed_sig)
    floor_c = (5 + math.isqrt(25 - 24 * closed_sig.chi + 24 * p)) // 2
    return chr_ - 1, min(chr_, floor_c)


def min_degree_bound(chi_bounded: int) -> float:
    """Upper bound on the minimum degree of a graph properly embedded in a surface of that characteristic."""
    if chi_bounded > 0:
        raise ValueError("the bound is stated for chi <= 0")
    return (3 + math.sqrt(25 - 24 * chi_bounded)) / 2


# Values established by explicit proper embeddings of complete graphs; None matches either orientation.
KNOWN_VALUES: dict[tuple[int, bool | None, int], int] = {
    (1, False, 2): 5,
    (0, False, 2): 6,
    (-1, False, 2): 7,
    (-2, True, 2): 8,
    (-2, False, 3): 8,
    (-3, None, 3): 9,
    (-4, None, 3): 9,
    (-5, None, 4): 10,
    (-6, True, 3): 10,
}


def _known(chi: int, orientable: bool, p: int) -> int | None:
    for key in ((chi, orientable, p), (chi, None, p)):
        if key in KNOWN_VALUES:
            return KNOWN_VALUES[key]
    return None


def _surfaces_above(chi: int, orientable: bool):
    """Closed surfaces S' with chi(S') > chi such that S' # S'' has the given type for some S''."""
    for c in range(2, chi, -1):
        if orientable:
            if (chi - c) % 2 == 0:
                yield c, True
        else:
            if c % 2 == 0:
                yield c, True
            if c <= 1:
                yield c, False


def _threshold(chr_: int) -> int:
    return math.ceil((chr_ - 1) / 2)


@lru_cache(maxsize=None)
def _lower(chi: int, orientable: bool, p: int) -> int:
    sig = SurfaceSignature(chi, orientable)
    chr_ = chr_closed(sig)
    if p >= _threshold(chr_):
        return chr_
    if p == 1:
        return chr_ - 1
    known = _known(chi, orientable, p)
    if known is not None:
        return known
    best = chr0_bounds(sig, p)[0]
    if p > 1:
        best = max(best, _lower(chi, orientable, p - 1))
    for c, o in _surfaces_above(chi, orientable):
        best = max(best, _lower(c, o, p))
    return best


@lru_cache(maxsize=None)
def _upper(chi: int, orientable: bool, p: int) -> int:
    sig = SurfaceSignature(chi, orientable)
    chr_ = chr_closed(sig)
    if p >= _threshold(chr_):
        return chr_
    if p == 1:
        return chr_ - 1
    known = _known(chi, orientable, p)
    if known is not None:
        return known
    return min(chr0_bounds(sig, p)[1], _upper(chi, orientable, p + 1))


def chr0_interval(closed_sig: SurfaceSignature, p: int) -> tuple[int, int]:
    """Tightest interval obtained from the bounds, known values, monotonicity in p and connected sums."""
    if p < 1:
        raise ValueError("p must be at least 1")
    lo, hi = _lower(closed_sig.chi, closed_sig.orientable, p), _upper(closed_sig.chi, closed_sig.orientable, p)
    if lo > hi:
        raise AssertionError(f"inconsistent interval {lo} > {hi} for {closed_sig}, p={p}")
    return lo, hi


def chr0_exact(closed_sig: SurfaceSignature, p: int) -> int | None:
    """Relative chromatic number when it is determined, ``None`` when it remains open."""
    lo, hi = chr0_interval(closed_sig, p)
    return lo if lo == hi else None
