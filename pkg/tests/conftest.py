import math
import time

import pytest

from specpart import geometry, partition

ACCEPTANCE = {}


def _timed_optimize(domain, k):
    t0 = time.perf_counter()
    part = partition.optimize_minimal_partition(domain, k)
    part.meta["elapsed"] = time.perf_counter() - t0
    return part


@pytest.fixture(scope="session")
def square():
    return geometry.DomainSpec.rectangle(1, 1)


@pytest.fixture(scope="session")
def unit_disk():
    return geometry.DomainSpec.disk(1.0)


@pytest.fixture(scope="session")
def mercedes(unit_disk):
    """Optimizer output for the disk, k = 3, at the default resolution."""
    return _timed_optimize(unit_disk, 3)


@pytest.fixture(scope="session")
def square_k2(square):
    return _timed_optimize(square, 2)


@pytest.fixture(scope="session")
def square_k4(square):
    return _timed_optimize(square, 4)


@pytest.fixture(scope="session")
def quadrants(square):
    mask = geometry.rasterize(square, math.pi / 33)
    xy = mask.coords()
    labels = 1 + (xy[:, 0] > math.pi / 2) + 2 * (xy[:, 1] > math.pi / 2)
    return partition.from_labels(mask, labels)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda s: (int(s.split(".")[0]), s)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
