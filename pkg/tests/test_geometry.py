import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specpart import geometry as g
from specpart.errors import ConfigError, ResolutionError


def test_builtin_areas_are_one():
    for d in (g.SQ1, g.HEXA1, g.T1, g.DISK1):
        assert g.area(d) == pytest.approx(1.0, rel=1e-14)


def test_hexagon_inradius():
    # apothem of the unit-area regular hexagon
    assert g.inradius(g.HEXA1) == pytest.approx(math.sqrt(2 / (3 * math.sqrt(3))) * math.sqrt(3) / 2, rel=1e-12)


def test_polygon_inradius_matches_closed_form():
    tri = g.DomainSpec.polygon(g.T1.vertices())
    assert g.inradius(tri) == pytest.approx(g.inradius(g.T1), rel=1e-4)


def test_polygon_validation():
    with pytest.raises(ConfigError):
        g.DomainSpec.polygon([(0, 0), (1, 1), (1, 0), (0, 1)])  # self-intersecting
    cw = g.DomainSpec.polygon([(0, 0), (0, 1), (1, 0)])
    assert g.area(cw) == pytest.approx(0.5)  # reoriented counter-clockwise
    with pytest.raises(ConfigError):
        g.DomainSpec.rectangle(0, 1)


def test_text_roundtrip():
    for d in (g.SQ1, g.HEXA1, g.DISK1, g.DomainSpec.polygon([(0, 0), (2, 0), (1, 1.5)])):
        assert g.DomainSpec.from_text(d.to_text()) == d
        assert g.DomainSpec.from_dict(d.to_dict()) == d


def test_rasterize_square_counts():
    sq = g.DomainSpec.rectangle(1, 1)
    m = g.rasterize(sq, math.pi / 10)
    assert m.n == 81


def test_rasterize_disk_example():
    # nodes at +-0.25, +-0.75: the 12 points strictly inside the unit circle
    m = g.rasterize(g.DomainSpec.disk(1.0), 0.5)
    assert m.n == 12
    xy = m.coords()
    assert np.all(np.hypot(xy[:, 0], xy[:, 1]) < 1)


def test_rasterize_too_coarse():
    with pytest.raises(ResolutionError):
        g.rasterize(g.DomainSpec.disk(1.0), 1.5)


def test_nodes_strictly_inside():
    for d in (g.HEXA1, g.T1, g.DISK1):
        m = g.rasterize(d, 0.02)
        xy = m.coords()
        assert g.contains(d, xy[:, 0], xy[:, 1]).all()


def test_axis_boundary_distance_disk():
    d = g.DomainSpec.disk(1.0)
    t = g.axis_boundary_distance(d, np.array([0.5]), np.array([0.0]), (1, 0))
    assert t[0] == pytest.approx(0.5)


def test_fraenkel_square():
    # optimal disk is centered; closed form for the unit square
    r = 1 / math.sqrt(math.pi)
    seg = r * r * math.acos(0.5 / r) - 0.5 * math.sqrt(r * r - 0.25)
    exact = 2 * (4 * seg)
    assert g.fraenkel_asymmetry(g.SQ1, 1 / 600) == pytest.approx(exact, abs=5e-4)
    assert g.fraenkel_asymmetry(g.DISK1, 0.01) == 0.0


def test_tiling_square_k4_exact():
    til = g.build_tiling(g.DomainSpec.rectangle(1, 1), 4, "square")
    assert len(til.cells) == 4
    assert til.cell_area == pytest.approx(math.pi ** 2 / 4, rel=1e-9)


def test_hexagon_tiling_cells_inside_and_disjoint():
    til = g.build_tiling(g.SQ1, 30, "hexagon")
    assert len(til.cells) == 30
    V = np.concatenate(til.cells)
    assert g.contains(g.SQ1, V[:, 0], V[:, 1], closed=True, tol=1e-9).all()
    centers = np.array([c.mean(axis=0) for c in til.cells])
    d = np.hypot(*(centers[:, None, :] - centers[None, :, :]).transpose(2, 0, 1))
    np.fill_diagonal(d, np.inf)
    assert d.min() >= math.sqrt(3) * til.scale * (1 - 1e-9)
    assert 30 * til.cell_area <= 1.0 + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 3.0))
def test_scaling_area(s):
    for d in (g.HEXA1, g.DISK1, g.SQ1):
        assert g.area(d.scaled(s)) == pytest.approx(s * s * g.area(d), rel=1e-12)
