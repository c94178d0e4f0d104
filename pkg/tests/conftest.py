import numpy as np
import pytest

from steklab.fem import DensitySpec
from steklab.mesh import annulus_mesh, disk_mesh

ACCEPTANCE_LINES: list[str] = []

# relative chromatic numbers of small closed surfaces with p = 1..5 boundary components; None is an open cell
RELATIVE_TABLE: dict[str, tuple[int, bool, tuple[int | None, ...]]] = {
    "sphere": (2, True, (3, 4, 4, 4, 4)),
    "projective plane": (1, False, (5, 5, 6, 6, 6)),
    "klein bottle": (0, False, (5, 6, 6, 6, 6)),
    "torus": (0, True, (6, 6, 7, 7, 7)),
    "chi=-1": (-1, False, (6, 7, 7, 7, 7)),
    "#2T": (-2, True, (7, 8, 8, 8, 8)),
    "#4P": (-2, False, (7, None, 8, 8, 8)),
    "chi=-3": (-3, False, (8, 8, 9, 9, 9)),
    "#3T": (-4, True, (8, None, 9, 9, 9)),
    "#6P": (-4, False, (8, None, 9, 9, 9)),
    "chi=-5": (-5, False, (9, 9, 9, 10, 10)),
    "#4T": (-6, True, (9, 9, 10, 10, 10)),
    "chi=-7": (-7, False, (9, None, 10, 10, 10)),
}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance report")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def disk_coarse():
    return disk_mesh((0.0, 0.0), 1.0, 0.1)


@pytest.fixture(scope="session")
def disk_fine():
    return disk_mesh((0.0, 0.0), 1.0, 0.05)


@pytest.fixture(scope="session")
def annulus_coarse():
    return annulus_mesh((0.0, 0.0), 0.5, 1.0, 0.1)


@pytest.fixture(scope="session")
def annulus_fine():
    return annulus_mesh((0.0, 0.0), 0.5, 1.0, 0.05)


@pytest.fixture
def uniform():
    return lambda m: DensitySpec.uniform(m)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
