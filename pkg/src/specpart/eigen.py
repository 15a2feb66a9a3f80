"""Five-point Dirichlet Laplacian on grid masks and its lowest eigenpairs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import geometry
from .errors import ConfigError, ConvergenceError, ResolutionError

SEED = 20240601
DENSE_LIMIT = 600
THETA_MIN = 1e-3

_DIRS = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass
class SparseOperator:
    """Hermitian operator on the interior nodes of ``mask``."""

    matrix: sp.csr_matrix
    mask: geometry.GridMask
    info: dict = field(default_factory=dict)

    @property
    def dimension(self):
        return self.matrix.shape[0]

    @property
    def is_complex(self):
        return np.iscomplexobj(self.matrix.data)

    def entries(self):
        """(row, col, value) triplets."""
        c = self.matrix.tocoo()
        return list(zip(c.row.tolist(), c.col.tolist(), c.data.tolist()))


@dataclass
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float


def neighbor_table(mask):
    """Per node and direction: neighbor index or -1, plus the neighbor's grid position."""
    nodes = mask.nodes
    nb = np.full((len(nodes), 4), -1, dtype=np.int64)
    for d, (di, dj) in enumerate(_DIRS):
        i = nodes[:, 0] + di
        j = nodes[:, 1] + dj
        ok = (i >= 0) & (i < mask.nx) & (j >= 0) & (j < mask.ny)
        nb[ok, d] = mask.index[i[ok], j[ok]]
    return nb


def wall_weights(mask, boundary="omit", interface="omit"):
    """Extra diagonal weight (units of 1/h^2) per node from missing neighbors.

    ``boundary="linear"`` places the Dirichlet condition at the true boundary
    crossing along the grid line (symmetric linear-extrapolation scheme);
    ``interface="midpoint"`` places it halfway to a missing neighbor that lies
    inside the domain (a neighboring partition cell). ``"omit"`` adds nothing,
    i.e. the condition sits on the missing node itself.
    """
    if boundary not in ("omit", "linear") or interface not in ("omit", "midpoint"):
        raise ConfigError("boundary must be omit|linear and interface omit|midpoint")
    w = np.zeros(mask.n)
    if boundary == "omit" and interface == "omit":
        return w
    domain = mask.domain
    if domain is None:
        return w
    nb = neighbor_table(mask)
    xy = mask.coords()
    h = mask.h
    for d, (di, dj) in enumerate(_DIRS):
        miss = np.flatnonzero(nb[:, d] < 0)
        if len(miss) == 0:
            continue
        px, py = xy[miss, 0], xy[miss, 1]
        qin = geometry.contains(domain, px + di * h, py + dj * h, tol=1e-9 * h)
        if interface == "midpoint":
            w[miss[qin]] += 1.0
        if boundary == "linear":
            out = miss[~qin]
            if len(out):
                t = geometry.axis_boundary_distance(domain, xy[out, 0], xy[out, 1], (di, dj)) / h
                t = np.clip(t, THETA_MIN, 1.0)
                w[out] += 1.0 / t - 1.0
    return w


def assemble_dirichlet_laplacian(mask, boundary="omit", interface="omit", wall=None, edge_phase=None):
    """Five-point ``-Laplacian`` with Dirichlet conditions on ``mask``.

    Missing neighbors contribute to the diagonal only. ``edge_phase`` (used by
    the magnetic operator) maps the (N, 4) neighbor table to unit-modulus
    link factors; the off-diagonal entry is ``-phase / h^2``.
    """
    if mask.n == 0:
        raise ConfigError("empty mask")
    h2 = mask.h ** 2
    nb = neighbor_table(mask)
    if wall is None:
        wall = wall_weights(mask, boundary, interface)
    rows, cols, vals = [], [], []
    n = mask.n
    idx = np.arange(n)
    for d in range(4):
        ok = nb[:, d] >= 0
        rows.append(idx[ok])
        cols.append(nb[ok, d])
        if edge_phase is None:
            vals.append(np.full(ok.sum(), -1.0 / h2))
        else:
            vals.append(-edge_phase[ok, d] / h2)
    rows.append(idx)
    cols.append(idx)
    vals.append((4.0 + wall) / h2)
    data = np.concatenate(vals)
    A = sp.csr_matrix((data, (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    A.sum_duplicates()
    return SparseOperator(A, mask, {"boundary": boundary, "interface": interface})


def _normalize_sign(v):
    k = int(np.argmax(np.abs(v)))
    ph = v[k] / abs(v[k])
    v = v / ph
    if not np.iscomplexobj(v) or np.abs(v.imag).max() == 0:
        v = v.real if np.iscomplexobj(v) else v
    return v / np.linalg.norm(v)


def lowest_eigenpairs(op, j, tol=1e-10, seed=SEED, maxiter=None, check=1e-6):
    """The ``j`` smallest eigenpairs, ascending.

    Small operators are diagonalized densely; larger ones use shift-invert
    Lanczos (ARPACK) about zero with a seeded starting vector.

    Raises
    ------
    ConvergenceError
        If ARPACK fails or a residual exceeds ``check * |value|``.
    """
    A = op.matrix if isinstance(op, SparseOperator) else sp.csr_matrix(op)
    N = A.shape[0]
    if not 1 <= j <= N:
        raise ConfigError(f"need 1 <= j <= N = {N}, got j = {j}")
    if N <= DENSE_LIMIT or j >= N - 1:
        w, V = scipy.linalg.eigh(A.toarray())
        w, V = w[:j], V[:, :j]
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(N)
        if np.iscomplexobj(A.data):
            v0 = v0 + 1j * rng.standard_normal(N)
        try:
            w, V = spla.eigsh(A.tocsc(), k=j, sigma=0.0, which="LM", v0=v0, tol=tol,
                              maxiter=maxiter)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError("ARPACK did not converge",
                                   residuals=None, best=(exc.eigenvalues, exc.eigenvectors)) from exc
        order = np.argsort(w)
        w, V = w[order], V[:, order]
    pairs = []
    for k in range(j):
        v = _normalize_sign(V[:, k])
        lam = float(np.real(w[k]))
        r = float(np.linalg.norm(A @ v - lam * v))
        pairs.append(EigenPair(lam, v, r))
    bad = [p.residual for p in pairs if p.residual > check * max(abs(p.value), 1.0)]
    if bad:
        raise ConvergenceError("eigen-residual above tolerance", residuals=[p.residual for p in pairs],
                               best=pairs)
    return pairs


def smallest_eigenvalue(mask, boundary="omit", interface="omit", wall=None):
    op = assemble_dirichlet_laplacian(mask, boundary, interface, wall)
    return lowest_eigenpairs(op, 1)[0]


# ---------------------------------------------------------------------------


@dataclass
class GroundState:
    value: float
    error: float
    h: float
    history: list  # (h, lambda_h) pairs
    converged: bool


def default_spacing(domain, nodes=4000):
    return math.sqrt(geometry.area(domain) / nodes)


def groundstate_energy(domain, target_accuracy=1e-3, h0=None, boundary="linear", max_nodes=300_000):
    """Ground energy with Richardson extrapolation in ``h``.

    Solves at ``h`` and ``h/2``, extrapolates assuming an ``O(h^2)`` error and
    halves ``h`` until ``|extrapolated - finest| < target_accuracy * value``
    or the node budget is exhausted (then ``converged`` is False and the
    error bar is the last honest estimate).
    """
    if domain.kind == "rectangle":
        a, b = domain.params
        if h0 is None:
            # nodes on a common lattice of both sides keeps corners exact
            h0 = min(a, b) * math.pi / 24
    elif h0 is None:
        h0 = default_spacing(domain)
    history = []

    def solve(h):
        mask = geometry.rasterize(domain, h)
        return smallest_eigenvalue(mask, boundary=boundary).value, mask.n

    h = h0
    lam_c, _ = solve(h)
    history.append((h, lam_c))
    while True:
        h_f = h / 2
        if geometry.area(domain) / h_f ** 2 > max_nodes:
            best = history[-1][1]
            err = abs(history[-1][1] - history[-2][1]) if len(history) > 1 else float("inf")
            return GroundState(best, err, history[-1][0], history, False)
        lam_f, _ = solve(h_f)
        history.append((h_f, lam_f))
        extrap = (4 * lam_f - lam_c) / 3
        err = abs(extrap - lam_f)
        if err < target_accuracy * extrap:
            return GroundState(extrap, err, h_f, history, True)
        h, lam_c = h_f, lam_f


# ---------------------------------------------------------------------------
# Bessel zeros (independent oracle for disk energies)


def bessel_j(nu, x, terms=80):
    """Power series for ``J_nu(x)``; accurate for moderate ``x`` (< 30)."""
    half = x / 2.0
    total = 0.0
    term = half ** nu / math.gamma(nu + 1)
    for m in range(terms):
        total += term
        term *= -half * half / ((m + 1) * (m + 1 + nu))
        if abs(term) < 1e-18 * abs(total) and m > 5:
            break
    return total


def bessel_zero(nu, k=1, tol=1e-13):
    """k-th positive zero of ``J_nu`` by sign-change scan and bisection."""
    if k < 1:
        raise ConfigError("k must be >= 1")
    step = 0.05
    x = max(nu, 0.0) + step
    found = 0
    fa = bessel_j(nu, x)
    while True:
        xb = x + step
        fb = bessel_j(nu, xb)
        if fa == 0 or fa * fb < 0:
            found += 1
            if found == k:
                a, b = x, xb
                break
        x, fa = xb, fb
        if x > 60:
            raise ResolutionError("zero search left the series' accurate range")
    fa = bessel_j(nu, a)
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = bessel_j(nu, m)
        if fa * fm <= 0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def disk_energy(area=1.0, nu=0, k=1):
    """``j_{nu,k}^2 * pi / area``: Dirichlet energy of the disk with that area."""
    return math.pi * bessel_zero(nu, k) ** 2 / area


def lambda_disk1():
    """Ground energy of the unit-area disk."""
    return disk_energy(1.0, 0, 1)
