import pathlib

import pytest

from lltwalk import LatticePMF, load_walk_spec, validate_walk_spec

CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def lazy_pert():
    """1-D lazy walk, exit law drifted by d = 0.1."""
    return load_walk_spec(CONFIGS / "lazy_pert_1d.cfg")


@pytest.fixture(scope="session")
def lazy_sym():
    """1-D lazy walk, q = p (unperturbed)."""
    return load_walk_spec(CONFIGS / "lazy_sym_1d.cfg")


@pytest.fixture(scope="session")
def unit_cov_2d():
    """2-D walk with B = I and d = (0.1, 0)."""
    return load_walk_spec(CONFIGS / "unit_cov_2d.cfg")


@pytest.fixture(scope="session")
def lazy_p():
    return LatticePMF.from_points(1, {0: "1/2", 1: "1/4", -1: "1/4"})


@pytest.fixture(scope="session")
def spec3d():
    """Small 3-D spec: lazy axis walk with a drifted exit law."""
    p = {(0, 0, 0): "1/4"}
    for i in range(3):
        for s in (1, -1):
            pt = [0, 0, 0]
            pt[i] = s
            p[tuple(pt)] = "1/8"
    q = dict(p)
    q[(1, 0, 0)] = "1/8 + 1/40"
    q[(-1, 0, 0)] = "1/8 - 1/40"
    from fractions import Fraction

    q = {k: (Fraction(1, 8) + Fraction(1, 40) if k == (1, 0, 0)
             else Fraction(1, 8) - Fraction(1, 40) if k == (-1, 0, 0)
             else v) for k, v in q.items()}
    return validate_walk_spec(
        LatticePMF.from_points(3, p), LatticePMF.from_points(3, q)
    )


def config_path(name: str) -> str:
    return str(CONFIGS / name)
