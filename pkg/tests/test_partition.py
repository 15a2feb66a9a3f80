import math

import numpy as np
import pytest

from specpart import eigen, geometry, partition
from specpart.errors import ConfigError, InvariantError, ResolutionError


@pytest.fixture(scope="module")
def small_opt():
    dom = geometry.DomainSpec.rectangle(2, 1)
    cfg = partition.OptimizerConfig(restarts=1, max_iter=30, h=math.pi / 14, seed=3)
    return partition.optimize_minimal_partition(dom, 2, cfg)


def test_power_mean_monotone_in_p(quadrants):
    e = np.array([3.0, 4.0, 4.5, 7.0])
    vals = [partition.power_mean(e, p) for p in (1, 2, 8, 64, math.inf)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[0] == pytest.approx(e.mean())
    assert vals[-1] == 7.0


def test_energy_rejects_small_p(quadrants):
    with pytest.raises(ConfigError):
        partition.energy(quadrants, 0.5)


def test_quadrants_equal_energies(quadrants):
    Lam, L1 = partition.energy(quadrants, 1)
    assert Lam == pytest.approx(L1, rel=1e-10)
    ok, spread = partition.equipartition_check(quadrants)
    assert ok and spread < 1e-10


def test_partition_energy_dominates_kth_eigenvalue(quadrants):
    op = eigen.assemble_dirichlet_laplacian(quadrants.mask, "linear")
    lam4 = eigen.lowest_eigenpairs(op, 4)[-1].value
    assert quadrants.Lambda >= lam4 * (1 - 1e-12)


def test_validate_rejects_disconnected_cell(square):
    mask = geometry.rasterize(square, math.pi / 12)
    x = mask.coords()[:, 0]
    labels = np.where((x < 1) | (x > 2), 1, 2)
    with pytest.raises(InvariantError):
        partition.from_labels(mask, labels)


def test_validate_rejects_missing_label(square):
    mask = geometry.rasterize(square, math.pi / 12)
    labels = np.full(mask.n, 2)
    with pytest.raises(InvariantError):
        partition.from_labels(mask, labels)


def test_strip_partition_counts(square):
    mask = geometry.rasterize(square, math.pi / 12)
    part = partition.strip_partition(mask, [1.0, 2.0])
    assert part.k == 3
    assert part.areas().sum() == pytest.approx(mask.n * mask.h ** 2)


def test_optimizer_small_run(small_opt):
    part = small_opt
    assert part.k == 2
    assert partition.history_monotone(part)
    # two near-equal squares of side pi
    assert part.Lambda == pytest.approx(2.0, rel=0.08)
    ok, spread = partition.equipartition_check(part, tol=0.05)
    assert ok, spread


def test_optimizer_deterministic(small_opt):
    dom = geometry.DomainSpec.rectangle(2, 1)
    cfg = partition.OptimizerConfig(restarts=1, max_iter=30, h=math.pi / 14, seed=3)
    again = partition.optimize_minimal_partition(dom, 2, cfg)
    assert np.array_equal(again.labels, small_opt.labels)


def test_history_monotone_detects_increase():
    part = partition.Partition(None, np.zeros(1), 1, history=[(1, 0, 5.0, 5.0), (1, 1, 5.5, 5.5)])
    assert not partition.history_monotone(part)


def test_checkpoint_roundtrip(tmp_path, quadrants, square):
    quadrants.energies = partition.cell_energies(quadrants)
    path = tmp_path / "q.part"
    partition.save_checkpoint(quadrants, path, square, p=8, seed=11)
    back, header = partition.load_checkpoint(path)
    assert np.array_equal(back.labels, quadrants.labels)
    assert back.mask.h == quadrants.mask.h
    assert header["seed"] == 11 and header["p"] == 8.0
    assert header["energies"] == pytest.approx(list(quadrants.energies))


def test_bipartite_approximation_of_quadrants(quadrants):
    h = quadrants.mask.h
    bp = partition.bipartite_approximation(quadrants, 3 * h)
    assert bp.k == 4
    assert bp.Lambda >= quadrants.Lambda


def test_bipartite_eps_limits(quadrants):
    h = quadrants.mask.h
    with pytest.raises(ConfigError):
        partition.bipartite_approximation(quadrants, h)
    with pytest.raises(ResolutionError):
        partition.bipartite_approximation(quadrants, 2.0)


def test_square_tiling_bound_exact(square):
    tb = partition.tiling_upper_bound(square, 4, "square")
    assert tb.Lambda == pytest.approx(8.0, rel=1e-12)
    assert tb.normalized == pytest.approx(2 * math.pi ** 2, rel=1e-12)


def test_tiling_partition_grid(square):
    tb = partition.tiling_upper_bound(square, 4, "square")
    part = partition.tiling_partition(square, tb.tiling, math.pi / 25)
    assert part.k == 4
    ok, _ = partition.equipartition_check(part)
    assert ok


def test_equipartition_rejects_spread():
    ok, spread = partition.equipartition_check([10.0, 9.0])
    assert not ok and spread == pytest.approx(0.1)
