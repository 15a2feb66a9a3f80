import math

import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from specpart import eigen, geometry as g
from specpart.errors import ConfigError


def square_mask(n):
    return g.rasterize(g.DomainSpec.rectangle(1, 1), math.pi / (n + 1))


def test_square_grid_eigenvalues_exact():
    # the five-point eigenvalues of the square grid are known in closed form
    n = 15
    h = math.pi / (n + 1)
    op = eigen.assemble_dirichlet_laplacian(square_mask(n))
    vals = [p.value for p in eigen.lowest_eigenpairs(op, 4)]
    disc = sorted((4 / h ** 2) * (math.sin(p * h / 2) ** 2 + math.sin(q * h / 2) ** 2)
                  for p in range(1, 5) for q in range(1, 5))[:4]
    assert np.allclose(vals, disc, rtol=1e-10)


def test_operator_symmetric_positive():
    m = g.rasterize(g.HEXA1, 0.03)
    A = eigen.assemble_dirichlet_laplacian(m, boundary="linear").matrix
    assert abs(A - A.T).max() == 0
    assert eigen.lowest_eigenpairs(A, 1)[0].value > 0


def test_dense_and_sparse_paths_agree():
    m = square_mask(30)  # 900 nodes: sparse path
    op = eigen.assemble_dirichlet_laplacian(m)
    sparse = [p.value for p in eigen.lowest_eigenpairs(op, 3)]
    dense = np.linalg.eigvalsh(op.matrix.toarray())[:3]
    assert np.allclose(sparse, dense, rtol=1e-10)


def test_eigenvector_normalization():
    op = eigen.assemble_dirichlet_laplacian(square_mask(12))
    p = eigen.lowest_eigenpairs(op, 1)[0]
    assert np.linalg.norm(p.vector) == pytest.approx(1.0)
    assert p.vector.max() > 0 and (p.vector > 0).all()


def test_bad_j():
    op = eigen.assemble_dirichlet_laplacian(square_mask(4))
    with pytest.raises(ConfigError):
        eigen.lowest_eigenpairs(op, 0)


def test_bessel_zeros_against_scipy():
    for nu in (0, 1, 2, 5):
        ref = scipy.special.jn_zeros(nu, 3)
        for k in range(3):
            assert eigen.bessel_zero(nu, k + 1) == pytest.approx(ref[k], abs=1e-11)
    assert eigen.bessel_zero(0.5) == pytest.approx(math.pi, abs=1e-12)


def test_linear_wall_converges_second_order():
    lam = eigen.lambda_disk1()
    errs = []
    for h in (0.02, 0.01):
        m = g.rasterize(g.DISK1, h)
        errs.append(abs(eigen.smallest_eigenvalue(m, boundary="linear").value - lam))
    assert errs[1] < errs[0] / 3


def test_groundstate_hexagon():
    r = eigen.groundstate_energy(g.HEXA1, 1e-4)
    assert r.converged
    assert r.value == pytest.approx(18.5901, rel=1e-4)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.25, 4.0))
def test_scaling_law_on_masks(s):
    m = g.rasterize(g.T1, 0.05)
    base = eigen.smallest_eigenvalue(m).value
    scaled = eigen.smallest_eigenvalue(m.scaled(s)).value
    assert scaled == pytest.approx(base / s ** 2, rel=1e-10)
