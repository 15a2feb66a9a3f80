import math

import numpy as np
import pytest

from specpart import eigen, geometry, magnetic
from specpart.errors import ConfigError, ResolutionError


@pytest.fixture(scope="module")
def disk_mask(unit_disk):
    return geometry.rasterize(unit_disk, 1 / 20)


@pytest.fixture(scope="module")
def center(disk_mask):
    return magnetic.PoleConfig((magnetic.snap_to_plaquette(disk_mask, (0.0, 0.0)),))


def test_vector_potential_value():
    ax, ay = magnetic.vector_potential([(0, 0)], (1, 0))
    assert (ax, ay) == pytest.approx((0.0, 0.5))


def test_vector_potential_singular():
    with pytest.raises(magnetic.SingularityError):
        magnetic.vector_potential([(0, 0)], (0, 0))


def test_circulation_counts_enclosed_poles():
    one = magnetic.circulation([(0.1, -0.2)], magnetic.circle((0, 0), 1))
    two = magnetic.circulation([(0.1, -0.2), (-0.3, 0.3)], magnetic.circle((0, 0), 1))
    outside = magnetic.circulation([(3, 0)], magnetic.circle((0, 0), 1))
    assert one == pytest.approx(math.pi, abs=1e-9)
    assert two == pytest.approx(2 * math.pi, abs=1e-9)
    assert outside == pytest.approx(0, abs=1e-9)


def test_pole_config_validation():
    with pytest.raises(ConfigError):
        magnetic.PoleConfig(((0, 0), (0, 0)))
    with pytest.raises(ConfigError):
        magnetic.PoleConfig(((0, 0),), ("sideways",))
    cfg = magnetic.PoleConfig(((0.5, 0.25),), ("left",))
    assert magnetic.PoleConfig.from_dict(cfg.to_dict()) == cfg


def test_off_plaquette_pole_rejected(disk_mask):
    with pytest.raises(ConfigError):
        magnetic.assemble_ab_laplacian(disk_mask, ((0.013, 0.0),))


def test_pole_near_boundary_rejected(disk_mask):
    p = magnetic.snap_to_plaquette(disk_mask, (0.97, 0.0))
    with pytest.raises(ResolutionError):
        magnetic.assemble_ab_laplacian(disk_mask, (p,))


@pytest.mark.parametrize("gauge", ["cut", "peierls"])
def test_holonomy_exact(disk_mask, gauge):
    p2 = magnetic.snap_to_plaquette(disk_mask, (0.3, -0.2))
    cfg = magnetic.PoleConfig((p2, magnetic.snap_to_plaquette(disk_mask, (-0.4, 0.1))))
    mop = magnetic.assemble_ab_laplacian(disk_mask, cfg, gauge)
    assert magnetic.check_holonomy(mop) < 1e-12


def test_no_poles_matches_laplacian(disk_mask):
    sp = magnetic.ab_spectrum(disk_mask, magnetic.PoleConfig(), 4)
    op = eigen.assemble_dirichlet_laplacian(disk_mask, "linear")
    ref = [p.value for p in eigen.lowest_eigenpairs(op, 4)]
    assert sp.values == pytest.approx(ref, rel=1e-12)


def test_gauge_invariance(disk_mask, center):
    a = magnetic.ab_spectrum(disk_mask, center, 6).values
    b = magnetic.ab_spectrum(disk_mask, center.with_cuts(("left",)), 6).values
    c = magnetic.ab_spectrum(disk_mask, center, 6, gauge="peierls").values
    assert b == pytest.approx(a, rel=1e-10)
    assert c == pytest.approx(a, rel=1e-10)


def test_diamagnetic_inequality(disk_mask, center):
    ab = magnetic.ab_spectrum(disk_mask, center, 1).values[0]
    op = eigen.assemble_dirichlet_laplacian(disk_mask, "linear")
    assert ab > eigen.lowest_eigenpairs(op, 1)[0].value


def test_ground_state_one_domain_one_line(disk_mask, center):
    sp = magnetic.ab_spectrum(disk_mask, center, 2)
    assert sp.nodal(1).count == 1
    assert magnetic.pole_valence(sp, sp.vectors[:, 0], center.poles[0]) == 1


def test_valence_parity(disk_mask, center):
    sp = magnetic.ab_spectrum(disk_mask, center, 6)
    for n in range(6):
        assert magnetic.pole_valence(sp, sp.vectors[:, n], center.poles[0]) % 2 == 1


def test_peierls_vectors_real(disk_mask, center):
    sp = magnetic.ab_spectrum(disk_mask, center, 4, gauge="peierls")
    assert np.isrealobj(sp.vectors)
    G = sp.vectors.T @ sp.vectors
    assert np.allclose(G, np.eye(4), atol=1e-8)
    cut = magnetic.ab_spectrum(disk_mask, center, 4)
    assert [sp.nodal(n).count for n in (1, 3)] == [cut.nodal(n).count for n in (1, 3)]


def test_overlap_matching():
    a = np.array([1, 1, 2, 2, 3])
    b = np.array([2, 2, 3, 3, 1])
    assert magnetic.partition_overlap(a, b) == 1.0
    assert magnetic.partition_overlap(a, np.array([1, 2, 2, 2, 3])) == pytest.approx(0.8)


def test_characterization_of_quadrants(quadrants):
    rep = magnetic.verify_magnetic_characterization(quadrants)
    assert rep.inputs["poles"] == []
    assert rep.left < 1e-10
    assert rep.inputs["overlap"] == pytest.approx(1.0)


def test_pleijel_scan_tail_max(disk_mask, center):
    rows = magnetic.ab_pleijel_scan(disk_mask, center, 4)
    assert rows[0].mu == 1
    tails = [r.running_max for r in rows]
    assert tails == sorted(tails, reverse=True)
