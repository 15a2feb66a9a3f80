"""Aharonov-Bohm operators with flux pi at finitely many poles.

Poles sit at plaquette centers. Two lattice gauges are available:

* ``"cut"``: every link crossing an axis-aligned ray from a pole to infinity
  carries the factor -1, so the operator is real symmetric and its
  eigenvectors are directly the K-real representatives (functions that
  change sign across each cut);
* ``"peierls"``: link factor ``exp(-i * integral of A along the link)``, with
  the line integral of the half-winding field evaluated exactly as half the
  subtended angle.

Both have plaquette holonomy -1 around a plaquette holding one pole and are
unitarily equivalent; the K-real representative of a Peierls eigenvector
``u`` is ``exp(-i theta/2) u`` with ``theta`` the total polar angle branched
along the cuts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import eigen, geometry, nodal
from .errors import ConfigError, InvariantError, ResolutionError
from .report import BoundReport

CUT_DIRECTIONS = {"up": (0, 1), "down": (0, -1), "right": (1, 0), "left": (-1, 0)}
REALITY_TOL = 1e-6
CLUSTER_TOL = 1e-3


class SingularityError(ConfigError):
    """Vector potential evaluated at a pole."""


# ---------------------------------------------------------------------------
# continuum potential


def vector_potential(poles, point):
    """Sum over poles of ``(1/2) (-(y - y0), x - x0) / r^2``."""
    x, y = map(float, point)
    ax = ay = 0.0
    for x0, y0 in poles:
        dx, dy = x - x0, y - y0
        r2 = dx * dx + dy * dy
        if r2 == 0.0:
            raise SingularityError(f"point {point} is a pole")
        ax += -0.5 * dy / r2
        ay += 0.5 * dx / r2
    return ax, ay


def circulation(poles, curve, samples=4096):
    """Line integral of the potential along a closed curve.

    ``curve(t)`` maps ``t in [0, 1)`` to points; the periodic trapezoid rule
    converges geometrically for smooth closed curves.
    """
    t = np.arange(samples) / samples
    pts = np.array([curve(s) for s in t])
    # exact derivative of the trigonometric interpolant, times dt
    coef = np.fft.fft(pts, axis=0)
    k = np.fft.fftfreq(samples, d=1.0 / samples)
    tangent = np.real(np.fft.ifft(2j * math.pi * k[:, None] * coef, axis=0)) / samples
    return float(sum(np.dot(vector_potential(poles, p), d) for p, d in zip(pts, tangent)))


def circle(center, radius):
    cx, cy = center
    return lambda t: (cx + radius * math.cos(2 * math.pi * t), cy + radius * math.sin(2 * math.pi * t))


# ---------------------------------------------------------------------------
# pole configurations


@dataclass(frozen=True)
class PoleConfig:
    poles: tuple = ()
    cuts: tuple = ()  # one direction name per pole; default "up"

    def __post_init__(self):
        poles = tuple((float(x), float(y)) for x, y in self.poles)
        object.__setattr__(self, "poles", poles)
        cuts = tuple(self.cuts) if self.cuts else ("up",) * len(poles)
        if len(cuts) != len(poles):
            raise ConfigError("one cut direction per pole")
        for c in cuts:
            if c not in CUT_DIRECTIONS:
                raise ConfigError(f"cut direction must be one of {sorted(CUT_DIRECTIONS)}")
        object.__setattr__(self, "cuts", cuts)
        if len(set(poles)) != len(poles):
            raise ConfigError("poles must be distinct")

    def __len__(self):
        return len(self.poles)

    def with_cuts(self, cuts):
        return PoleConfig(self.poles, tuple(cuts))

    def to_dict(self):
        return {"poles": [list(p) for p in self.poles], "cuts": list(self.cuts)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(tuple(p) for p in d.get("poles", [])), tuple(d.get("cuts", [])))


def plaquette_of(mask, point, tol=1e-6):
    """Grid index ``(i0, j0)`` of the lower-left node of the plaquette centered at ``point``."""
    fx = (point[0] - mask.origin[0]) / mask.h - 1.5
    fy = (point[1] - mask.origin[1]) / mask.h - 1.5
    i0, j0 = round(fx), round(fy)
    if abs(fx - i0) > tol or abs(fy - j0) > tol:
        raise ConfigError(f"pole {point} is not at a plaquette center")
    return int(i0), int(j0)


def snap_to_plaquette(mask, point):
    i0 = math.floor((point[0] - mask.origin[0]) / mask.h - 1.0)
    j0 = math.floor((point[1] - mask.origin[1]) / mask.h - 1.0)
    return (mask.origin[0] + (i0 + 1.5) * mask.h, mask.origin[1] + (j0 + 1.5) * mask.h)


def validate_poles(mask, config):
    h = mask.h
    for p in config.poles:
        i0, j0 = plaquette_of(mask, p)
        if mask.domain is not None:
            if not geometry.contains(mask.domain, p[0], p[1]):
                raise ConfigError(f"pole {p} outside the domain")
            if geometry.distance_to_boundary(mask.domain, p[0], p[1]) <= 2 * h:
                raise ResolutionError(f"pole {p} within 2h of the boundary")
        if not (0 <= i0 < mask.nx - 1 and 0 <= j0 < mask.ny - 1):
            raise ConfigError(f"pole {p} outside the grid")
    P = np.array(config.poles).reshape(-1, 2)
    for a in range(len(P)):
        for b in range(a + 1, len(P)):
            if np.hypot(*(P[a] - P[b])) <= 2 * h:
                raise ResolutionError("poles closer than 2h")


# ---------------------------------------------------------------------------
# lattice gauges


def cut_flips(mask, config):
    """Edge signs ``(flip_x, flip_y)`` of the branch-cut gauge.

    ``flip_x[i, j]`` belongs to the edge (i, j)-(i+1, j), ``flip_y[i, j]`` to
    (i, j)-(i, j+1).
    """
    fx = np.ones((max(mask.nx - 1, 1), mask.ny), dtype=np.int8)
    fy = np.ones((mask.nx, max(mask.ny - 1, 1)), dtype=np.int8)
    for p, c in zip(config.poles, config.cuts):
        i0, j0 = plaquette_of(mask, p)
        if c == "up":
            fx[i0, j0 + 1:] *= -1
        elif c == "down":
            fx[i0, :j0 + 1] *= -1
        elif c == "right":
            fy[i0 + 1:, j0] *= -1
        else:
            fy[:i0 + 1, j0] *= -1
    return fx, fy


def _edge_table_from_flips(mask, fx, fy):
    nodes = mask.nodes
    i, j = nodes[:, 0], nodes[:, 1]
    ph = np.ones((mask.n, 4))
    ok = i + 1 < mask.nx
    ph[ok, 0] = fx[i[ok], j[ok]]
    ok = i >= 1
    ph[ok, 1] = fx[i[ok] - 1, j[ok]]
    ok = j + 1 < mask.ny
    ph[ok, 2] = fy[i[ok], j[ok]]
    ok = j >= 1
    ph[ok, 3] = fy[i[ok], j[ok] - 1]
    return ph


def branched_angle(config, x, y):
    """Total polar angle ``sum theta_j`` with each branch along its cut ray."""
    total = np.zeros(np.broadcast(x, y).shape)
    for (x0, y0), c in zip(config.poles, config.cuts):
        dx, dy = CUT_DIRECTIONS[c]
        alpha = math.atan2(dy, dx)
        th = np.arctan2(y - y0, x - x0)
        total += alpha + np.mod(th - alpha, 2 * math.pi)
    return total


def peierls_phases(mask, config):
    """(N, 4) link factors ``exp(-i * (1/2) * sum of subtended angles)``."""
    xy = mask.coords()
    h = mask.h
    ph = np.ones((mask.n, 4), dtype=complex)
    for d, (di, dj) in enumerate(eigen._DIRS):
        qx, qy = xy[:, 0] + di * h, xy[:, 1] + dj * h
        ang = np.zeros(mask.n)
        for x0, y0 in config.poles:
            a = np.arctan2(qy - y0, qx - x0) - np.arctan2(xy[:, 1] - y0, xy[:, 0] - x0)
            ang += np.mod(a + math.pi, 2 * math.pi) - math.pi
        ph[:, d] = np.exp(-0.5j * ang)
    return ph


@dataclass
class MagneticOperator:
    operator: eigen.SparseOperator
    config: PoleConfig
    gauge: str
    edge_phase: np.ndarray  # (N, 4)
    flips: tuple  # (flip_x, flip_y) of the cut gauge

    @property
    def matrix(self):
        return self.operator.matrix

    @property
    def mask(self):
        return self.operator.mask


def assemble_ab_laplacian(mask, config, gauge="cut", boundary="linear"):
    """Five-point magnetic Dirichlet Laplacian with flux pi at each pole."""
    if not isinstance(config, PoleConfig):
        config = PoleConfig(tuple(config))
    validate_poles(mask, config)
    fx, fy = cut_flips(mask, config)
    if gauge == "cut":
        ph = _edge_table_from_flips(mask, fx, fy)
    elif gauge == "peierls":
        ph = peierls_phases(mask, config)
    else:
        raise ConfigError("gauge must be 'cut' or 'peierls'")
    op = eigen.assemble_dirichlet_laplacian(mask, boundary=boundary, edge_phase=ph)
    op.info.update(gauge=gauge, poles=config.to_dict())
    return MagneticOperator(op, config, gauge, ph, (fx, fy))


def plaquette_holonomies(mop):
    """Counter-clockwise phase product around every plaquette with four interior corners.

    Returns ``(holonomy grid, plaquette mask)`` of shape ``(nx-1, ny-1)``.
    """
    mask = mop.mask
    idx = mask.index
    ph = mop.edge_phase
    a, b, c, d = idx[:-1, :-1], idx[1:, :-1], idx[1:, 1:], idx[:-1, 1:]
    ok = (a >= 0) & (b >= 0) & (c >= 0) & (d >= 0)
    hol = np.ones(a.shape, dtype=complex)
    A, B, C, D = a[ok], b[ok], c[ok], d[ok]
    # a -> b (+x), b -> c (+y), c -> d (-x), d -> a (-y)
    hol[ok] = ph[A, 0] * ph[B, 2] * ph[C, 1] * ph[D, 3]
    return hol, ok


def expected_holonomies(mask, config):
    """+1 / -1 per plaquette from the parity of enclosed poles."""
    par = np.zeros((mask.nx - 1, mask.ny - 1), dtype=int)
    for p in config.poles:
        i0, j0 = plaquette_of(mask, p)
        par[i0, j0] += 1
    return np.where(par % 2 == 1, -1.0, 1.0)


def check_holonomy(mop, tol=1e-12):
    hol, ok = plaquette_holonomies(mop)
    exp = expected_holonomies(mop.mask, mop.config)
    err = float(np.abs(hol[ok] - exp[ok]).max()) if ok.any() else 0.0
    if err > tol:
        raise InvariantError(f"plaquette holonomy off by {err:g}")
    return err


# ---------------------------------------------------------------------------
# spectrum and K-real eigenfunctions


@dataclass
class ABSpectrum:
    values: np.ndarray
    vectors: np.ndarray  # (N, j) real K-real representatives, unit norm
    mop: MagneticOperator
    reality: np.ndarray  # per-vector max |Im| / max |w| before realification
    flagged: list = field(default_factory=list)  # indices whose raw vector was not K-real

    @property
    def mask(self):
        return self.mop.mask

    def nodal(self, n, vector=None):
        """Nodal partition of the ``n``-th (1-based) K-real eigenfunction."""
        v = self.vectors[:, n - 1] if vector is None else vector
        fx, fy = self.mop.flips
        return nodal.nodal_domains(v, self.mask, flip_x=fx, flip_y=fy, source=f"ab:{n}")


def _realify(w):
    """Rotate by a global phase to make ``w`` as real as possible."""
    s = np.sum(w * w)
    if abs(s) > 0:
        w = w * np.exp(-0.5j * np.angle(s))
    k = int(np.argmax(np.abs(w.real)))
    if w.real[k] < 0:
        w = -w
    res = float(np.abs(w.imag).max() / np.abs(w).max())
    return w, res


def ab_spectrum(mask, config, j, gauge="cut", boundary="linear"):
    """Lowest ``j`` eigenpairs with K-real eigenvectors.

    In the Peierls gauge each eigenvector is rotated by ``exp(-i theta/2)``
    and a global phase; vectors whose imaginary part stays above
    ``REALITY_TOL`` (mixing inside a degenerate eigenspace) are flagged and
    their eigenspace is replaced by a real orthonormal basis of the same span.
    """
    if not isinstance(config, PoleConfig):
        config = PoleConfig(tuple(config))
    mop = assemble_ab_laplacian(mask, config, gauge, boundary)
    pairs = eigen.lowest_eigenpairs(mop.operator, j)
    vals = np.array([p.value for p in pairs])
    V = np.column_stack([p.vector for p in pairs])
    reality = np.zeros(j)
    flagged = []
    if gauge == "peierls":
        xy = mask.coords()
        rot = np.exp(-0.5j * branched_angle(config, xy[:, 0], xy[:, 1]))
        W = V * rot[:, None]
        out = np.empty((mask.n, j))
        for c in range(j):
            w, res = _realify(W[:, c])
            reality[c] = res
            out[:, c] = w.real / np.linalg.norm(w.real)
            if res > REALITY_TOL:
                flagged.append(c)
        for cluster in _clusters(vals):
            if any(c in flagged for c in cluster):
                span = np.column_stack([W[:, cluster].real, W[:, cluster].imag])
                U, s, _ = np.linalg.svd(span, full_matrices=False)
                out[:, cluster] = U[:, :len(cluster)]
        V = out
    else:
        V = np.real(V)
    return ABSpectrum(vals, V, mop, reality, flagged)


def _clusters(vals, rel=CLUSTER_TOL):
    out, cur = [], [0]
    for i in range(1, len(vals)):
        if abs(vals[i] - vals[cur[0]]) <= rel * abs(vals[cur[0]]):
            cur.append(i)
        else:
            out.append(cur)
            cur = [i]
    out.append(cur)
    return out


@dataclass
class ABGroundState:
    value: float
    error: float
    history: list


def ab_groundstate_energy(domain, poles, h0=None, levels=3, boundary="linear", cuts=None):
    """Ground energy with Richardson extrapolation over ``levels`` halvings.

    Poles are snapped to the nearest plaquette center at every level. The
    singular behavior at a pole limits the convergence order, so the
    extrapolation assumes a first-order term once the observed ratio says so.
    """
    h = h0 or eigen.default_spacing(domain, 3000)
    hist = []
    for _ in range(levels):
        mask = geometry.rasterize(domain, h)
        snapped = tuple(snap_to_plaquette(mask, p) for p in poles)
        cfg = PoleConfig(snapped, tuple(cuts) if cuts else ())
        sp = ab_spectrum(mask, cfg, 1, boundary=boundary)
        hist.append((h, float(sp.values[0])))
        h /= 2
    l = [v for _, v in hist]
    if len(l) >= 3:
        d1, d2 = l[-2] - l[-3], l[-1] - l[-2]
        ratio = d1 / d2 if d2 != 0 else 4.0
        order = math.log2(abs(ratio)) if ratio > 1 else 2.0
        order = min(max(order, 0.5), 2.0)
    else:
        order = 2.0
    f = 2.0 ** order
    ext = (f * l[-1] - l[-2]) / (f - 1)
    return ABGroundState(ext, abs(ext - l[-1]), hist)


# ---------------------------------------------------------------------------
# valence at poles


def _ring_nodes(i0, j0, r):
    """Grid indices of the square ring at Chebyshev radius ``r`` around plaquette (i0, j0), CCW."""
    lo_i, hi_i, lo_j, hi_j = i0 - r, i0 + 1 + r, j0 - r, j0 + 1 + r
    ring = [(i, lo_j) for i in range(lo_i, hi_i)]
    ring += [(hi_i, j) for j in range(lo_j, hi_j)]
    ring += [(i, hi_j) for i in range(hi_i, lo_i, -1)]
    ring += [(lo_i, j) for j in range(hi_j, lo_j, -1)]
    return ring


def _edge_sign(fx, fy, a, b):
    (i1, j1), (i2, j2) = a, b
    if j1 == j2:
        return int(fx[min(i1, i2), j1])
    return int(fy[i1, min(j1, j2)])


def pole_valence(spec, vector, pole, radius=2, zero_tol=1e-6):
    """Number of nodal half-lines at a pole: sign changes of the lifted function on a ring."""
    mask = spec.mask
    fx, fy = spec.mop.flips
    i0, j0 = plaquette_of(mask, pole)
    ring = _ring_nodes(i0, j0, radius)
    vals = []
    s = 1
    for t, node in enumerate(ring):
        i, j = node
        if not (0 <= i < mask.nx and 0 <= j < mask.ny) or mask.index[i, j] < 0:
            raise ResolutionError("ring around the pole leaves the mask")
        vals.append(s * vector[mask.index[i, j]])
        s *= _edge_sign(fx, fy, node, ring[(t + 1) % len(ring)])
    vals = np.array(vals)
    scale = np.abs(vector).max()
    signs = np.sign(vals)
    signs[np.abs(vals) <= zero_tol * scale] = 0
    seq = [x for x in signs if x != 0]
    if not seq:
        return 0
    # closing the loop applies the accumulated sign s
    changes = sum(1 for a, b in zip(seq, seq[1:]) if a != b)
    changes += int(seq[-1] != s * seq[0])
    return changes


# ---------------------------------------------------------------------------
# characterization of minimal partitions and Pleijel scan


def partition_overlap(labels_a, labels_b):
    """Fraction of nodes on which two labelings agree after the best label matching."""
    la = np.asarray(labels_a)
    lb = np.asarray(labels_b)
    ka, kb = int(la.max()) + 1, int(lb.max()) + 1
    table = np.zeros((ka, kb))
    np.add.at(table, (la, lb), 1)
    table[0, :] = 0
    table[:, 0] = 0
    r, c = linear_sum_assignment(-table)
    return float(table[r, c].sum() / len(la))


def odd_poles(partition, ring_radius=3.0):
    """Plaquette-snapped positions of the odd critical points of a partition."""
    bs = nodal.boundary_set(partition)
    pts = nodal.critical_points(bs, ring_radius=ring_radius)
    return tuple(snap_to_plaquette(partition.mask, p.position) for p in pts if p.odd)


def verify_magnetic_characterization(partition, poles=None, samples=180, seed=0):
    """Compare a partition with the nodal partition of the k-th AB eigenfunction.

    Poles go to the odd critical points of the partition (or ``poles`` if
    given). Inside a degenerate k-th eigenspace the combination whose nodal
    partition best overlaps the input is used. ``left`` is the relative gap
    ``|lambda_k^AB - Lambda| / Lambda`` and ``right`` the 3% allowance.
    """
    k = partition.k if hasattr(partition, "k") else partition.count
    mask = partition.mask
    if poles is None:
        poles = odd_poles(partition)
    cfg = PoleConfig(tuple(poles))
    Lam = float(partition.Lambda)
    spec = ab_spectrum(mask, cfg, min(k + 2, mask.n - 2))
    lam_k = float(spec.values[k - 1])
    cluster = next(c for c in _clusters(spec.values) if k - 1 in c)
    basis = spec.vectors[:, cluster]
    best = (-1.0, None, None)
    if len(cluster) == 1:
        trials = [basis[:, 0]]
    else:
        rng = np.random.default_rng(seed)
        trials = list(basis.T)
        if len(cluster) == 2:
            for t in np.linspace(0, math.pi, samples, endpoint=False):
                trials.append(math.cos(t) * basis[:, 0] + math.sin(t) * basis[:, 1])
        else:
            for _ in range(samples):
                c = rng.standard_normal(len(cluster))
                trials.append(basis @ (c / np.linalg.norm(c)))
    for v in trials:
        nd = spec.nodal(k, v)
        ov = partition_overlap(nd.labels, partition.labels)
        if ov > best[0]:
            best = (ov, nd, v)
    overlap, nd, v = best
    valences = [pole_valence(spec, v, p) for p in cfg.poles]
    gap = abs(lam_k - Lam) / Lam
    applicable = len(cfg) > 0 or (nd.count == k and gap < 0.03)
    return BoundReport(
        name="magnetic characterization",
        left=gap,
        right=0.03,
        inputs={"k": k, "poles": [list(p) for p in cfg.poles], "lambda_ab": lam_k, "Lambda": Lam,
                "mu": nd.count, "overlap": overlap, "cluster_size": len(cluster),
                "pole_valences": valences, "applicable": bool(applicable)},
        provenance="magnetic characterization of minimal partitions",
        notes="" if applicable else "no odd critical points and partition not nodal",
    )


@dataclass
class PleijelRow:
    n: int
    value: float
    mu: int
    ratio: float
    running_max: float
    valences: tuple


def ab_pleijel_scan(mask, config, n_max):
    """Nodal counts of the first ``n_max`` K-real eigenfunctions.

    ``running_max`` is the maximum of ``mu/n`` over ranks ``>= n`` (the tail
    maximum), which is what an asymptotic upper bound constrains.
    """
    if not isinstance(config, PoleConfig):
        config = PoleConfig(tuple(config))
    spec = ab_spectrum(mask, config, n_max)
    mus, vals, vals_nu = [], [], []
    for n in range(1, n_max + 1):
        nd = spec.nodal(n)
        v = spec.vectors[:, n - 1]
        mus.append(nd.count)
        vals.append(float(spec.values[n - 1]))
        vals_nu.append(tuple(pole_valence(spec, v, p) for p in config.poles))
    ratios = [m / n for n, m in enumerate(mus, start=1)]
    tail = np.maximum.accumulate(ratios[::-1])[::-1]
    return [PleijelRow(n, vals[n - 1], mus[n - 1], ratios[n - 1], float(tail[n - 1]), vals_nu[n - 1])
            for n in range(1, n_max + 1)]
