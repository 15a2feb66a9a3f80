import math

import numpy as np
import pytest

from specpart import nodal, rect


@pytest.fixture(scope="module")
def mask():
    return nodal.square_mask(95)


def test_product_counts(mask):
    for m in range(1, 5):
        for n in range(1, 5):
            v = nodal.rect_eigenfunction(m, n, 1, 1, mask.coords())
            assert nodal.nodal_domains(v, mask).count == m * n


def test_zero_tolerance_splits_nothing(mask):
    nd = nodal.nodal_domains(np.zeros(mask.n), mask)
    assert nd.count == 0 and nd.degenerate


def test_diagonal_combination_four_domains(mask):
    v = nodal.combine_square_eigenfunctions(1, 3, 3 * math.pi / 4, mask)
    assert nodal.nodal_domains(v, mask).count == 4


def test_sweep_table_sorted():
    res = nodal.theta_sweep_max_domains(1, 2, theta_count=64)
    thetas = [t for t, _ in res.table]
    assert thetas == sorted(thetas)
    assert res.max_mu == 2


def test_quadrisection_critical_point(mask):
    v = nodal.rect_eigenfunction(2, 2, 1, 1, mask.coords())
    nd = nodal.nodal_domains(v, mask)
    pts = nodal.critical_points(nodal.boundary_set(nd))
    assert len(pts) == 1
    assert pts[0].valence == 4 and not pts[0].odd
    assert pts[0].position == pytest.approx((math.pi / 2, math.pi / 2), abs=0.05)


def test_bipartite_nodal(mask):
    v = nodal.rect_eigenfunction(3, 2, 1, 1, mask.coords())
    res = nodal.is_bipartite(nodal.nodal_domains(v, mask))
    assert res.bipartite and res.odd_cycle is None


def test_boundary_polylines_cover_segments(mask):
    v = nodal.rect_eigenfunction(1, 2, 1, 1, mask.coords())
    bs = nodal.boundary_set(nodal.nodal_domains(v, mask))
    lines = bs.polylines()
    assert sum(len(l) - 1 for l in lines) == len(bs)


def test_courant_sharp_small_ranks():
    rows = rect.courant_sharp_scan(1, 1, 10)
    sharp = {r.rank for r in rows if r.courant_sharp}
    assert sharp == {1, 2, 4}


def test_scaled_family_counts():
    for k in range(3):
        fam = nodal.scaled_family_quotient(k, verify_grid=True)
        assert fam.mu == 4 ** (k + 1)
        assert fam.grid_mu == fam.mu
    assert nodal.scaled_family_quotient(0).eigenvalue == 10
