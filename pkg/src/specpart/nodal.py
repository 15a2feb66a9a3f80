"""Nodal domains, boundary sets, critical points and bipartiteness on grids."""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from . import geometry, kernels, rect
from .errors import ConfigError, ResolutionError

ZERO_TOL = 1e-10


@dataclass
class NodalPartition:
    """Labels per interior node (0 = zero set / unassigned) on ``mask``.

    ``flip_x`` / ``flip_y`` (optional) carry the branch-cut edge signs used
    when the labels come from a magnetic (K-real) eigenfunction.
    """

    mask: geometry.GridMask
    labels: np.ndarray
    count: int
    source: str = ""
    degenerate: bool = False
    flip_x: np.ndarray | None = field(default=None, repr=False)
    flip_y: np.ndarray | None = field(default=None, repr=False)

    def label_grid(self, outside=-1):
        g = np.full(self.mask.inside.shape, outside, dtype=np.int64)
        g[self.mask.inside] = self.labels
        return g


def sign_keys(values, zero_tol=ZERO_TOL):
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ConfigError("values must be finite")
    scale = np.abs(values).max() if values.size else 0.0
    keys = np.sign(values).astype(np.int32)
    keys[np.abs(values) <= zero_tol * scale] = 0
    return keys


def nodal_domains(values, mask, zero_tol=ZERO_TOL, flip_x=None, flip_y=None, source=""):
    """Components of ``{v > 0}`` and ``{v < 0}`` under 4-connectivity.

    Values with ``|v| <= zero_tol * max|v|`` belong to the zero set and join
    no domain. With edge signs ``flip_x`` / ``flip_y`` two neighbors are in
    the same domain when ``sign(v_p) == s * sign(v_q)``.
    """
    keys = sign_keys(values, zero_tol)
    grid = np.zeros(mask.inside.shape, dtype=np.int32)
    grid[mask.inside] = keys
    lab, count = kernels.label_components(grid, flip_x, flip_y)
    labels = lab[mask.inside].astype(np.int64)
    return NodalPartition(mask, labels, int(count), source, degenerate=(count == 0),
                          flip_x=flip_x, flip_y=flip_y)


def relabel_components(mask, labels):
    """Split each label into its 4-connected components; returns ``(labels, count)``."""
    grid = np.zeros(mask.inside.shape, dtype=np.int32)
    grid[mask.inside] = labels
    lab, count = kernels.label_components(grid)
    return lab[mask.inside].astype(np.int64), int(count)


# ---------------------------------------------------------------------------
# rectangle / square eigenfunctions


def rect_eigenfunction(m, n, a, b, xy):
    return np.sin(m * xy[:, 0] / a) * np.sin(n * xy[:, 1] / b)


def combine_rect_eigenfunctions(p1, p2, theta, a, b, mask):
    """``cos(theta) phi_p1 + sin(theta) phi_p2`` sampled at the interior nodes."""
    xy = mask.coords()
    c, s = math.cos(theta), math.sin(theta)
    out = np.zeros(len(xy))
    if c != 0.0:
        out += c * rect_eigenfunction(p1[0], p1[1], a, b, xy)
    if s != 0.0:
        out += s * rect_eigenfunction(p2[0], p2[1], a, b, xy)
    return out


def combine_square_eigenfunctions(m, n, theta, mask):
    """``cos(theta) sin(mx) sin(ny) + sin(theta) sin(nx) sin(my)`` on (0, pi)^2."""
    return combine_rect_eigenfunctions((m, n), (n, m), theta, 1.0, 1.0, mask)


def square_mask(nodes_per_side):
    """Mask of the square (0, pi)^2 with ``nodes_per_side`` interior nodes per row."""
    return geometry.rasterize(geometry.DomainSpec.rectangle(1, 1), math.pi / (nodes_per_side + 1))


@dataclass
class SweepResult:
    max_mu: int
    argmax_theta: float
    table: list  # (theta, mu), sorted by theta


def _sweep(fn, theta_count, refine=16):
    if theta_count < 64:
        raise ConfigError("theta_count must be >= 64")
    thetas = np.arange(theta_count) * math.pi / theta_count
    table = {float(t): fn(t) for t in thetas}
    step = math.pi / theta_count
    mus = [table[float(t)] for t in thetas]
    top = max(mus)
    # refine around the maxima and around every jump of mu
    centers = set()
    for i, t in enumerate(thetas):
        nxt = mus[(i + 1) % theta_count]
        if mus[i] == top or mus[i] != nxt:
            centers.add(float(t))
    for t0 in sorted(centers):
        for u in np.linspace(-step, step, 2 * refine + 1)[1:-1]:
            t = (t0 + u) % math.pi
            if float(t) not in table:
                table[float(t)] = fn(t)
    items = sorted(table.items())
    best = max(mu for _, mu in items)
    arg = min(t for t, mu in items if mu == best)
    return SweepResult(int(best), arg, items)


def theta_sweep_max_domains(m, n, theta_count=256, mask=None, refine=16):
    """Maximum nodal count of ``Phi_{m,n,theta}`` over theta in [0, pi)."""
    if mask is None:
        mask = square_mask(_sweep_nodes(max(m, n)))
    fm = combine_square_eigenfunctions(m, n, 0.0, mask)
    fn_ = combine_square_eigenfunctions(m, n, math.pi / 2, mask)

    def count(t):
        return nodal_domains(math.cos(t) * fm + math.sin(t) * fn_, mask).count

    return _sweep(count, theta_count, refine)


def _sweep_nodes(q):
    # about 24 nodes per half-wavelength; odd so the symmetry lines carry nodes
    return 24 * q - 1 if (24 * q) % 2 == 0 else 24 * q


def rect_theta_sweep(p1, p2, a, b, theta_count=256, h=None, refine=16):
    """Sweep for a two-dimensional eigenspace of the rectangle R(a, b)."""
    q = max(p1[0] / a, p1[1] / b, p2[0] / a, p2[1] / b)
    if h is None:
        h = min(math.pi / (24 * q), a * math.pi / 8, b * math.pi / 8)
        if abs(a - b) < 1e-15:
            h = math.pi * a / (_sweep_nodes(int(round(q * a))) + 1)
    mask = geometry.rasterize(geometry.DomainSpec.rectangle(a, b), h)
    f1 = combine_rect_eigenfunctions(p1, p2, 0.0, a, b, mask)
    f2 = combine_rect_eigenfunctions(p1, p2, math.pi / 2, a, b, mask)
    return _sweep(lambda t: nodal_domains(math.cos(t) * f1 + math.sin(t) * f2, mask).count,
                  theta_count, refine)


@dataclass
class ScaledFamily:
    k: int
    mu: int
    eigenvalue: int
    rank: int
    quotient: float
    grid_mu: int | None


def scaled_family_quotient(k, position=1, verify_grid=None, nodes_per_cell=16):
    """``mu(u_k) / rank(u_k)`` for ``u_k = Phi_{1,3,3pi/4}(2^k x, 2^k y)``.

    ``mu = 4^(k+1)``; the rank is the exact lattice count of eigenvalues below
    ``10 * 4^k`` plus ``position`` (1 = first slot of the eigenspace). The
    nodal count is confirmed on a grid when ``verify_grid`` (default: k <= 2).
    """
    if k < 0:
        raise ConfigError("k must be >= 0")
    lam = 10 * 4 ** k
    mult = len([1 for r, v, pairs in rect.eigenspaces(1, 1, lam) if v == lam for _ in pairs])
    if not 1 <= position <= mult:
        raise ConfigError(f"position must be in 1..{mult}")
    rank = rect.counting_function(1, 1, lam) + position
    mu = 4 ** (k + 1)
    if verify_grid is None:
        verify_grid = k <= 2
    grid_mu = None
    if verify_grid:
        N = 2 ** k * nodes_per_cell
        if N > 2048:
            raise ResolutionError("grid too large to resolve the oscillations of u_k")
        mask = square_mask(N - 1)
        xy = mask.coords() * 2 ** k
        t = 3 * math.pi / 4
        vals = (math.cos(t) * rect_eigenfunction(1, 3, 1, 1, xy)
                + math.sin(t) * rect_eigenfunction(3, 1, 1, 1, xy))
        grid_mu = nodal_domains(vals, mask).count
    return ScaledFamily(k, mu, lam, rank, mu / rank, grid_mu)


# ---------------------------------------------------------------------------
# boundary sets


@dataclass
class BoundarySet:
    """Dual-grid edges separating different labels (or a label and the zero set)."""

    partition: object
    pairs: np.ndarray  # (M, 2) node indices
    segments: np.ndarray  # (M, 2, 2) endpoints on the dual grid

    def __len__(self):
        return len(self.pairs)

    def midpoints(self):
        return self.segments.mean(axis=1)

    def polylines(self):
        """Chain segments into polylines (lists of points)."""
        from collections import defaultdict

        key = lambda p: (round(p[0], 9), round(p[1], 9))  # noqa: E731
        adj = defaultdict(list)
        for s_idx, seg in enumerate(self.segments):
            adj[key(seg[0])].append(s_idx)
            adj[key(seg[1])].append(s_idx)
        used = np.zeros(len(self.segments), dtype=bool)
        lines = []
        # start from endpoints / junctions, then close loops
        starts = [v for v, e in adj.items() if len(e) != 2] + list(adj)
        for v in starts:
            for s_idx in adj[v]:
                if used[s_idx]:
                    continue
                line = [v]
                cur, e = v, s_idx
                while True:
                    used[e] = True
                    a, b = key(self.segments[e][0]), key(self.segments[e][1])
                    cur = b if a == cur else a
                    line.append(cur)
                    nxt = [f for f in adj[cur] if not used[f]]
                    if len(adj[cur]) != 2 or not nxt:
                        break
                    e = nxt[0]
                lines.append(np.array(line))
        return lines


def _edge_pairs(mask):
    """Interior 4-neighbor pairs (p, q) with q to the right or above p."""
    idx = mask.index
    out = []
    for di, dj in ((1, 0), (0, 1)):
        a = idx[: idx.shape[0] - di, : idx.shape[1] - dj]
        b = idx[di:, dj:]
        ok = (a >= 0) & (b >= 0)
        out.append(np.column_stack([a[ok], b[ok]]))
    return np.concatenate(out)


def boundary_set(partition):
    """Dual edges between adjacent nodes with different labels (zero counts as a label here)."""
    mask = partition.mask
    lab = np.asarray(partition.labels)
    if partition_count(partition) <= 1 and not np.any(lab == 0):
        return BoundarySet(partition, np.zeros((0, 2), int), np.zeros((0, 2, 2)))
    pairs = _edge_pairs(mask)
    la, lb = lab[pairs[:, 0]], lab[pairs[:, 1]]
    diff = (la != lb) & ((la != 0) | (lb != 0))
    pairs = pairs[diff]
    xy = mask.coords()
    pa, pb = xy[pairs[:, 0]], xy[pairs[:, 1]]
    mid = (pa + pb) / 2
    d = pb - pa
    perp = np.column_stack([-d[:, 1], d[:, 0]]) / 2
    seg = np.stack([mid - perp, mid + perp], axis=1)
    return BoundarySet(partition, pairs, seg)


def partition_count(partition):
    lab = np.asarray(partition.labels)
    return len(np.unique(lab[lab > 0]))


# ---------------------------------------------------------------------------
# critical points


@dataclass
class CriticalPoint:
    position: tuple
    valence: int

    @property
    def odd(self):
        return self.valence % 2 == 1


def _ring_runs(label_grid, mask, centers, radius, min_run=2):
    """Number of label arcs met on a circle around each center (-1: leaves the mask)."""
    h = mask.h
    M = max(24, int(math.ceil(2 * math.pi * radius * 3)))
    ang = 2 * math.pi * (np.arange(M) + 0.5) / M
    px = centers[:, 0:1] + radius * h * np.cos(ang)[None, :]
    py = centers[:, 1:2] + radius * h * np.sin(ang)[None, :]
    i = np.rint((px - mask.origin[0]) / h - 1).astype(int)
    j = np.rint((py - mask.origin[1]) / h - 1).astype(int)
    ok = (i >= 0) & (i < mask.nx) & (j >= 0) & (j < mask.ny)
    vals = np.full(i.shape, -1, dtype=np.int64)
    vals[ok] = label_grid[i[ok], j[ok]]
    out = np.empty(len(centers), dtype=int)
    for r, row in enumerate(vals):
        if (row < 0).any():
            out[r] = -1
            continue
        seq = row[row > 0]
        out[r] = _count_arcs(seq, min_run)
    return out


def _count_arcs(seq, min_run):
    if len(seq) == 0:
        return 0
    # cyclic run-length encoding
    runs = []
    for v in seq:
        if runs and runs[-1][0] == v:
            runs[-1][1] += 1
        else:
            runs.append([v, 1])
    if len(runs) > 1 and runs[0][0] == runs[-1][0]:
        runs[0][1] += runs.pop()[1]
    changed = True
    while changed and len(runs) > 1:
        changed = False
        k = min(range(len(runs)), key=lambda t: runs[t][1])
        if runs[k][1] < min_run:
            runs.pop(k)
            merged = []
            for v, c in runs:
                if merged and merged[-1][0] == v:
                    merged[-1][1] += c
                else:
                    merged.append([v, c])
            if len(merged) > 1 and merged[0][0] == merged[-1][0]:
                merged[0][1] += merged.pop()[1]
            runs = merged
            changed = True
    return len(runs) if len(runs) > 1 else 0


def critical_points(boundary, merge_radius=3.0, ring_radius=3.0):
    """Interior points where three or more boundary curves meet.

    Candidates are plaquette centers whose surrounding circle (radius
    ``ring_radius * h``) crosses at least three label arcs; candidates closer
    than ``merge_radius * h`` are merged and the valence is re-read on a
    circle enclosing the whole cluster. Points whose circle leaves the mask
    lie on the outer boundary and are skipped.
    """
    part = boundary.partition
    mask = part.mask
    if len(boundary) == 0:
        return []
    G = part.label_grid(outside=-1)
    ins = mask.inside
    # plaquettes with all corners inside and not all corners carrying the same label
    c00, c10, c01, c11 = G[:-1, :-1], G[1:, :-1], G[:-1, 1:], G[1:, 1:]
    allin = ins[:-1, :-1] & ins[1:, :-1] & ins[:-1, 1:] & ins[1:, 1:]
    mixed = ~((c00 == c10) & (c00 == c01) & (c00 == c11) & (c00 > 0))
    # dilate the mixed set so junction centers slightly off the boundary are seen
    from scipy.ndimage import binary_dilation

    cand = binary_dilation(mixed & allin, iterations=1) & allin
    ci, cj = np.nonzero(cand)
    centers = np.column_stack([mask.origin[0] + (ci + 1.5) * mask.h, mask.origin[1] + (cj + 1.5) * mask.h])
    if len(centers) == 0:
        return []
    runs = _ring_runs(G, mask, centers, ring_radius)
    sel = runs >= 3
    pts = centers[sel]
    if len(pts) == 0:
        return []
    # cluster within merge radius
    parent = list(range(len(pts)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    from scipy.spatial import cKDTree

    for a, b in cKDTree(pts).query_pairs(merge_radius * mask.h + 1e-12):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for a in range(len(pts)):
        groups.setdefault(find(a), []).append(a)
    out = []
    for members in groups.values():
        P = pts[members]
        c = P.mean(axis=0)
        extent = np.hypot(*(P - c).T).max() / mask.h
        nu = _ring_runs(G, mask, c[None, :], ring_radius + extent + 0.5)[0]
        if nu < 0:
            continue
        if nu >= 3:
            out.append(CriticalPoint((float(c[0]), float(c[1])), int(nu)))
    out.sort(key=lambda p: (p.position[0], p.position[1]))
    return out


def odd_count(points):
    return sum(1 for p in points if p.odd)


# ---------------------------------------------------------------------------
# neighbor graph


def neighbor_counts(partition):
    """Shared-boundary edge counts between labels.

    Two labels share an edge when they are 4-neighbors, or when both appear
    around a zero-set node (nodal lines that pass through grid nodes).
    """
    mask = partition.mask
    lab = np.asarray(partition.labels)
    counts = Counter()
    pairs = _edge_pairs(mask)
    la, lb = lab[pairs[:, 0]], lab[pairs[:, 1]]
    ok = (la > 0) & (lb > 0) & (la != lb)
    for a, b in zip(la[ok], lb[ok]):
        counts[(min(a, b), max(a, b))] += 1
    zeros = np.flatnonzero(lab == 0)
    if len(zeros):
        from .eigen import neighbor_table

        nb = neighbor_table(mask)[zeros]
        for row in nb:
            ls = sorted({int(lab[q]) for q in row if q >= 0 and lab[q] > 0})
            for x in range(len(ls)):
                for y in range(x + 1, len(ls)):
                    counts[(ls[x], ls[y])] += 1
    return counts


@dataclass
class BipartiteResult:
    bipartite: bool
    coloring: dict
    odd_cycle: list | None


def is_bipartite(partition, min_shared=3):
    """Two-color the neighbor graph (labels sharing at least ``min_shared`` boundary edges)."""
    lab = np.asarray(partition.labels)
    verts = sorted(int(v) for v in np.unique(lab[lab > 0]))
    adj = {v: [] for v in verts}
    for (a, b), c in neighbor_counts(partition).items():
        if c >= min_shared:
            adj[int(a)].append(int(b))
            adj[int(b)].append(int(a))
    color, parent = {}, {}
    for s in verts:
        if s in color:
            continue
        color[s], parent[s] = 0, None
        q = deque([s])
        while q:
            u = q.popleft()
            for v in sorted(adj[u]):
                if v not in color:
                    color[v], parent[v] = 1 - color[u], u
                    q.append(v)
                elif color[v] == color[u]:
                    return BipartiteResult(False, color, _odd_cycle(parent, u, v))
    return BipartiteResult(True, color, None)


def _odd_cycle(parent, u, v):
    pu, pv = [u], [v]
    while parent[pu[-1]] is not None:
        pu.append(parent[pu[-1]])
    while parent[pv[-1]] is not None:
        pv.append(parent[pv[-1]])
    su = set(pu)
    lca = next(x for x in pv if x in su)
    return pu[: pu.index(lca) + 1] + pv[: pv.index(lca)][::-1]
