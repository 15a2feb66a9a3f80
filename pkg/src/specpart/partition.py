"""k-partitions on grid masks: energies, minimal-partition search and constructions.

Cell energies are Dirichlet ground energies of the cell submask. The outer
boundary uses the linear-extrapolation wall of :mod:`specpart.eigen`; an
interface between two cells sits halfway between their nodes, so that the
cells' effective domains are disjoint and ``max_i lambda(D_i) >= lambda_k``
holds exactly at the discrete level.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import distance_transform_cdt

from . import eigen, geometry, kernels, nodal
from .errors import ConfigError, ConvergenceError, InvariantError, ResolutionError

DEFAULT_P_SCHEDULE = (1, 8, 64)


@dataclass
class Partition:
    mask: geometry.GridMask
    labels: np.ndarray
    k: int
    energies: np.ndarray | None = None
    history: list = field(default_factory=list)
    boundary: str = "linear"
    interface: str = "midpoint"
    meta: dict = field(default_factory=dict)

    @property
    def count(self):
        return self.k

    @property
    def Lambda(self):
        if self.energies is None:
            self.energies = cell_energies(self)
        return float(np.max(self.energies))

    def label_grid(self, outside=-1):
        g = np.full(self.mask.inside.shape, outside, dtype=np.int64)
        g[self.mask.inside] = self.labels
        return g

    def cell_mask(self, i):
        return self.mask.submask(self.labels == i)

    def areas(self):
        return np.bincount(self.labels, minlength=self.k + 1)[1:] * self.mask.h ** 2

    def copy(self):
        return Partition(self.mask, self.labels.copy(), self.k,
                         None if self.energies is None else self.energies.copy(),
                         list(self.history), self.boundary, self.interface, dict(self.meta))


def from_labels(mask, labels, boundary="linear", interface="midpoint", validate=True):
    labels = np.asarray(labels, dtype=np.int64)
    k = int(labels.max())
    part = Partition(mask, labels, k, boundary=boundary, interface=interface)
    if validate:
        validate_partition(part)
    return part


def validate_partition(part):
    """Every cell nonempty and 4-connected; labels in 1..k."""
    lab = part.labels
    if lab.min() < 1 or lab.max() != part.k:
        raise InvariantError("labels must cover 1..k")
    sizes = np.bincount(lab, minlength=part.k + 1)[1:]
    if (sizes == 0).any():
        raise InvariantError(f"empty cells: {np.flatnonzero(sizes == 0) + 1}")
    _, count = nodal.relabel_components(part.mask, lab)
    if count != part.k:
        raise InvariantError(f"{count} components for {part.k} cells")


def cell_energy(mask, labels, i, boundary="linear", interface="midpoint", vector=False):
    sub = mask.submask(labels == i)
    if sub.n == 0:
        raise InvariantError(f"cell {i} is empty")
    op = eigen.assemble_dirichlet_laplacian(sub, boundary, interface)
    pair = eigen.lowest_eigenpairs(op, 1)[0]
    if vector:
        return pair.value, sub, pair.vector
    return pair.value


def cell_energies(part):
    return np.array([cell_energy(part.mask, part.labels, i, part.boundary, part.interface)
                     for i in range(1, part.k + 1)])


def power_mean(values, p):
    values = np.asarray(values, dtype=float)
    if math.isinf(p):
        return float(values.max())
    top = values.max()
    return float(top * np.mean((values / top) ** p) ** (1.0 / p))


def energy(part, p=math.inf):
    """``(Lambda, Lambda^p)`` with ``Lambda^p = (sum lambda_i^p / k)^(1/p)``."""
    if not (p >= 1):
        raise ConfigError("p must be in [1, inf]")
    if part.energies is None:
        part.energies = cell_energies(part)
    return float(part.energies.max()), power_mean(part.energies, p)


# ---------------------------------------------------------------------------
# optimizer


@dataclass
class OptimizerConfig:
    p_schedule: tuple = DEFAULT_P_SCHEDULE
    restarts: int = 4
    max_iter: int = 150
    seed: int = 0
    h: float | None = None
    boundary: str = "linear"
    interface: str = "midpoint"


def _pairs_by_label(mask):
    return nodal._edge_pairs(mask)


def _voronoi_init(mask, k, rng):
    xy = mask.coords()
    seeds = xy[rng.choice(len(xy), size=k, replace=False)]
    d = ((xy[:, None, :] - seeds[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d, axis=1).astype(np.int64) + 1


def _repair(mask, labels, k, pairs):
    """Keep the largest component of each label; hand strays to the best-connected neighbor."""
    labels = labels.copy()
    for _ in range(4 * k + 4):
        comp, count = nodal.relabel_components(mask, labels)
        if count == k:
            return labels
        sizes = np.bincount(comp, minlength=count + 1)
        owner = np.zeros(count + 1, dtype=np.int64)
        owner[comp] = labels
        keep = np.zeros(count + 1, dtype=bool)
        for lab in range(1, k + 1):
            cs = np.flatnonzero(owner == lab)
            cs = cs[cs > 0]
            if len(cs) == 0:
                return None
            keep[cs[np.argmax(sizes[cs])]] = True
        strays = [c for c in range(1, count + 1) if not keep[c]]
        ca, cb = comp[pairs[:, 0]], comp[pairs[:, 1]]
        for c in sorted(strays, key=lambda c: sizes[c]):
            sel_a = (ca == c) & (cb != c)
            sel_b = (cb == c) & (ca != c)
            nb = np.concatenate([labels[pairs[sel_a, 1]], labels[pairs[sel_b, 0]]])
            nb = nb[nb != owner[c]]
            if len(nb) == 0:
                continue
            labels[comp == c] = np.bincount(nb).argmax()
    comp, count = nodal.relabel_components(mask, labels)
    return labels if count == k else None


class _Solver:
    """Cell ground states with a cache keyed by the cell's node set."""

    def __init__(self, mask, boundary, interface):
        self.mask = mask
        self.boundary = boundary
        self.interface = interface
        self.cache = {}

    def solve(self, labels, i):
        sel = labels == i
        key = hashlib.sha1(np.packbits(sel).tobytes()).hexdigest()
        hit = self.cache.get(key)
        if hit is None:
            val, sub, vec = cell_energy(self.mask, labels, i, self.boundary, self.interface, vector=True)
            full = np.zeros(self.mask.n)
            full[sel] = np.abs(vec)
            hit = (val, full)
            if len(self.cache) > 4096:
                self.cache.clear()
            self.cache[key] = hit
        return hit

    def all(self, labels, k):
        vals = np.empty(k)
        vecs = np.zeros((k, self.mask.n))
        for i in range(1, k + 1):
            vals[i - 1], vecs[i - 1] = self.solve(labels, i)
        return vals, vecs


def _proposals(labels, lam, vecs, P, pairs, Lam):
    """Interface moves that lower ``sum lambda_i^P`` to first order.

    Across an interface edge (p in i, q in j) the shape derivative of
    ``lambda_i`` is proportional to ``u_i(p)^2``; the side with the larger
    ``lambda^(P-1) u^2`` advances by one node.
    """
    a, b = pairs[:, 0], pairs[:, 1]
    la, lb = labels[a], labels[b]
    cross = la != lb
    a, b, la, lb = a[cross], b[cross], la[cross], lb[cross]
    wa = (lam[la - 1] / Lam) ** (P - 1) * vecs[la - 1, a] ** 2
    wb = (lam[lb - 1] / Lam) ** (P - 1) * vecs[lb - 1, b] ** 2
    tiny = 1e-300
    # node, new label, strength
    move_b = wa > wb * (1 + 1e-9)
    move_a = wb > wa * (1 + 1e-9)
    nodes = np.concatenate([b[move_b], a[move_a]])
    new = np.concatenate([la[move_b], lb[move_a]])
    strength = np.concatenate([wa[move_b] / (wb[move_b] + tiny), wb[move_a] / (wa[move_a] + tiny)])
    if len(nodes) == 0:
        return nodes, new, strength
    order = np.argsort(-strength, kind="stable")
    nodes, new, strength = nodes[order], new[order], strength[order]
    _, first = np.unique(nodes, return_index=True)
    first = np.sort(first)
    return nodes[first], new[first], strength[first]


def _run(mask, k, cfg, rng, log):
    pairs = _pairs_by_label(mask)
    solver = _Solver(mask, cfg.boundary, cfg.interface)
    labels = _repair(mask, _voronoi_init(mask, k, rng), k, pairs)
    if labels is None:
        return None
    lam, vecs = solver.all(labels, k)
    for P in cfg.p_schedule:
        cur = power_mean(lam, P)
        log.append((P, 0, cur, float(lam.max())))
        for it in range(1, cfg.max_iter + 1):
            nodes, new, strength = _proposals(labels, lam, vecs, P, pairs, lam.max())
            if len(nodes) == 0:
                break
            accepted = False
            frac = 1.0
            while frac * len(nodes) >= 1:
                m = max(1, int(frac * len(nodes)))
                cand = labels.copy()
                cand[nodes[:m]] = new[:m]
                cand = _repair(mask, cand, k, pairs)
                if cand is not None and not np.array_equal(cand, labels):
                    lam_c, vecs_c = solver.all(cand, k)
                    val = power_mean(lam_c, P)
                    if val < cur * (1 - 1e-12):
                        labels, lam, vecs, cur = cand, lam_c, vecs_c, val
                        accepted = True
                        break
                frac /= 2
            log.append((P, it, cur, float(lam.max())))
            if not accepted:
                break
    return labels, lam


def optimize_minimal_partition(domain, k, config=None, mask=None):
    """Heuristic search for a minimal k-partition (upper bound for the optimal energy).

    Each run starts from a seeded random Voronoi partition and descends
    ``Lambda^p`` for every ``p`` in the schedule by one-node interface moves
    (step halving, accept only on strict decrease). The run with the lowest
    ``Lambda`` over ``restarts`` independent seeds is returned.
    """
    cfg = config or OptimizerConfig()
    if k < 1:
        raise ConfigError("k must be >= 1")
    if mask is None:
        h = cfg.h or default_partition_spacing(domain, k)
        mask = geometry.rasterize(domain, h)
    if mask.n < k:
        raise ResolutionError("fewer nodes than cells")
    best = None
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        log = []
        out = None
        for _attempt in range(5):
            out = _run(mask, k, cfg, rng, log)
            if out is not None:
                break
        if out is None:
            continue
        labels, lam = out
        cand = Partition(mask, labels, k, lam, log, cfg.boundary, cfg.interface,
                         {"seed": cfg.seed, "restart": r, "p_schedule": list(cfg.p_schedule)})
        if best is None or cand.Lambda < best.Lambda:
            best = cand
    if best is None:
        raise ConvergenceError("every restart collapsed to an empty cell")
    validate_partition(best)
    return best


def default_partition_spacing(domain, k, nodes_per_cell=900):
    return math.sqrt(geometry.area(domain) / (k * nodes_per_cell))


def history_monotone(part):
    """True when ``Lambda^p`` never increases within a p-stage of the log."""
    last = {}
    for P, it, val, _ in part.history:
        if it == 0:
            last[P] = val
            continue
        if val > last[P] * (1 + 1e-12):
            return False
        last[P] = val
    return True


# ---------------------------------------------------------------------------
# bipartite approximation


def _boundary_distance_steps(mask, labels):
    """Taxicab steps from each node to the nearest node touching another label or the outside."""
    G = np.full(mask.inside.shape, -1, dtype=np.int64)
    G[mask.inside] = labels
    P = np.pad(G, 1, constant_values=-1)
    c = P[1:-1, 1:-1]
    touch = np.zeros_like(c, dtype=bool)
    for sl in ((slice(2, None), slice(1, -1)), (slice(None, -2), slice(1, -1)),
               (slice(1, -1), slice(2, None)), (slice(1, -1), slice(None, -2))):
        touch |= P[sl] != c
    touch &= mask.inside
    d = distance_transform_cdt(~touch, metric="taxicab")
    return d[mask.inside], touch[mask.inside]


def _outside_touch(mask):
    P = np.pad(mask.inside, 1, constant_values=False)
    out = np.zeros_like(mask.inside)
    for sl in ((slice(2, None), slice(1, -1)), (slice(None, -2), slice(1, -1)),
               (slice(1, -1), slice(2, None)), (slice(1, -1), slice(None, -2))):
        out |= ~P[sl]
    return (out & mask.inside)[mask.inside]


def _components(mask, sel):
    lab, count = nodal.relabel_components(mask, sel.astype(np.int64))
    return lab, count


def _adjacent_labels(pairs, sel, labels):
    a, b = pairs[:, 0], pairs[:, 1]
    m1 = sel[a] & ~sel[b]
    m2 = sel[b] & ~sel[a]
    return np.concatenate([labels[b[m1]], labels[a[m2]]])


def bipartite_approximation(part, eps, first=None):
    """Bipartite k-partition close to ``part`` by shrinking cells and growing one.

    Cells other than the first are shrunk to the nodes farther than ``eps``
    from their boundary; the first cell absorbs the tube of width ``eps``
    around the boundary set. Regions that still hold several shrunken cells
    are handled recursively with the cell touching the grown one as their
    first cell. The neighbor graph of the result is a tree, hence bipartite.
    """
    mask = part.mask
    h = mask.h
    if eps < 2 * h * (1 - 1e-12):
        raise ConfigError("eps must be at least 2h")
    labels = np.asarray(part.labels, dtype=np.int64)
    k = part.k
    steps, _ = _boundary_distance_steps(mask, labels)
    dist = (steps + 0.5) * h
    tube = dist < eps
    pairs = nodal._edge_pairs(mask)
    out_touch = _outside_touch(mask)
    for i in range(1, k + 1):
        if not ((labels == i) & ~tube).any():
            raise ResolutionError(f"eps = {eps:g} empties cell {i}")
    if first is None:
        # a cell meeting the outer boundary (case where N meets it, or the unique one otherwise)
        first = int(min(np.unique(labels[out_touch])))
    result = np.zeros_like(labels)
    region = np.ones(mask.n, dtype=bool)
    _bp_region(mask, labels, tube, pairs, region, first, result)
    part_out = Partition(mask, result, k, None, [], part.boundary, part.interface,
                         {"eps": eps, "first": first, "source": "bipartite_approximation"})
    validate_partition(part_out)
    return part_out


def _bp_region(mask, labels, tube, pairs, region, first, result):
    cell_f = region & (labels == first)
    # tube components inside the region that touch the first cell
    t_lab, t_count = _components(mask, tube & region)
    touching = np.unique(_adjacent_labels(pairs, cell_f, t_lab))
    touching = np.union1d(touching, np.unique(t_lab[cell_f]))
    touching = touching[touching > 0]
    grown = cell_f | np.isin(t_lab, touching)
    result[grown] = first
    rest = region & ~grown
    if not rest.any():
        return
    c_lab, c_count = _components(mask, rest)
    sizes = np.bincount(c_lab, minlength=c_count + 1)
    assigned = set()
    for c in sorted(range(1, c_count + 1), key=lambda c: -sizes[c]):
        comp = c_lab == c
        core = comp & ~tube
        labs = np.unique(labels[core])
        labs = labs[labs != first]
        if len(labs) == 1 and int(labs[0]) not in assigned:
            result[comp] = int(labs[0])
            assigned.add(int(labs[0]))
        elif len(labs) <= 1:
            # stray piece: join the neighbor sharing most edges (already assigned)
            nb = _adjacent_labels(pairs, comp, result)
            nb = nb[nb > 0]
            result[comp] = np.bincount(nb).argmax() if len(nb) else first
        else:
            nb = _adjacent_labels(pairs, grown, labels)
            nb = nb[np.isin(nb, labs)]
            inner_first = int(np.bincount(nb).argmax()) if len(nb) else int(labs[0])
            _bp_region(mask, labels, tube, pairs, comp, inner_first, result)
            assigned.update(int(v) for v in labs)


# ---------------------------------------------------------------------------
# tilings and equipartitions


@dataclass
class TilingBound:
    k: int
    cell_kind: str
    Lambda: float
    normalized: float  # A(Omega) * Lambda / k
    cell_area: float
    cell_energy: float
    tiling: geometry.Tiling


def tiling_upper_bound(domain, k, cell_kind="hexagon", target_accuracy=2e-4):
    """Energy of the k-partition made of a k-cell tiling with the leftover merged in.

    Cells left untouched by the merge keep the tile energy and merged cells
    only gain area, so for ``k >= 2`` the partition energy equals the tile
    energy; for ``k = 1`` the single merged cell is the whole domain.
    """
    til = geometry.build_tiling(domain, k, cell_kind)
    A = geometry.area(domain)
    if cell_kind == "square":
        lam_cell = 2 * math.pi ** 2 / til.scale ** 2
    else:
        lam_cell = eigen.groundstate_energy(til.cell_domain(), target_accuracy).value
    if k == 1:
        lam = eigen.groundstate_energy(domain, target_accuracy).value
    else:
        lam = lam_cell
    return TilingBound(k, cell_kind, lam, A * lam / k, til.cell_area, lam_cell, til)


def tiling_partition(domain, tiling, h):
    """Grid k-partition from a tiling: nodes in tile i get label i, leftovers join adjacent tiles."""
    mask = geometry.rasterize(domain, h)
    xy = mask.coords()
    labels = np.zeros(mask.n, dtype=np.int64)
    for i, cell in enumerate(tiling.cells, start=1):
        inside = kernels.points_in_polygon(xy[:, 0], xy[:, 1], cell, eps=1e-9 * h)
        labels[inside & (labels == 0)] = i
    pairs = nodal._edge_pairs(mask)
    k = len(tiling.cells)
    for _ in range(mask.nx + mask.ny):
        zero = labels == 0
        if not zero.any():
            break
        a, b = pairs[:, 0], pairs[:, 1]
        m1 = zero[a] & ~zero[b]
        m2 = zero[b] & ~zero[a]
        labels[a[m1]] = labels[b[m1]]
        labels[b[m2]] = labels[a[m2]]
    labels = _repair(mask, labels, k, pairs)
    if labels is None:
        raise ResolutionError("grid too coarse for the tiling")
    return from_labels(mask, labels)


def equipartition_check(part_or_energies, tol=0.02):
    """``(spread < tol, spread)`` with ``spread = (max - min) / max`` of the cell energies."""
    if isinstance(part_or_energies, Partition):
        if part_or_energies.energies is None:
            part_or_energies.energies = cell_energies(part_or_energies)
        e = part_or_energies.energies
    else:
        e = np.asarray(part_or_energies, dtype=float)
    spread = float((e.max() - e.min()) / e.max())
    return spread < tol, spread


def strip_partition(mask, x_cuts):
    """Vertical strips cut at the given x positions (labels 1..len(x_cuts)+1)."""
    x = mask.coords()[:, 0]
    return from_labels(mask, np.searchsorted(np.sort(x_cuts), x) + 1)


# ---------------------------------------------------------------------------
# checkpoints


def save_checkpoint(part, path, domain=None, p=math.inf, seed=None, iteration=None, extra=None):
    """Text checkpoint: ``# key = value`` header lines, then one row of labels per x-index."""
    domain = domain or part.mask.domain
    header = {
        "domain": json.dumps(domain.to_dict()) if domain is not None else "null",
        "h": repr(part.mask.h),
        "origin": json.dumps(list(part.mask.origin)),
        "shape": json.dumps([part.mask.nx, part.mask.ny]),
        "k": str(part.k),
        "p": repr(float(p)),
        "seed": json.dumps(seed if seed is not None else part.meta.get("seed")),
        "iteration": json.dumps(iteration if iteration is not None else len(part.history)),
        "boundary": part.boundary,
        "interface": part.interface,
    }
    if part.energies is not None:
        header["energies"] = json.dumps([float(e) for e in part.energies])
    for key, val in (extra or {}).items():
        header[key] = json.dumps(val)
    grid = part.label_grid(outside=-1)
    with open(path, "w") as f:
        for key, val in header.items():
            f.write(f"# {key} = {val}\n")
        for row in grid:
            f.write(" ".join(str(int(v)) for v in row) + "\n")


def load_checkpoint(path):
    """Inverse of :func:`save_checkpoint`; returns ``(Partition, header dict)``."""
    header, rows = {}, []
    with open(path) as f:
        for line in f:
            if line.startswith("#"):
                key, _, val = line[1:].partition("=")
                header[key.strip()] = val.strip()
            elif line.strip():
                rows.append([int(v) for v in line.split()])
    grid = np.array(rows, dtype=np.int64)
    d = json.loads(header["domain"])
    domain = geometry.DomainSpec.from_dict(d) if d else None
    origin = tuple(json.loads(header["origin"]))
    mask = geometry.GridMask(float(header["h"]), origin, grid.shape[0], grid.shape[1], grid >= 0, domain)
    part = from_labels(mask, grid[grid >= 0], header.get("boundary", "linear"),
                       header.get("interface", "midpoint"))
    return part, {k: _maybe_json(v) for k, v in header.items()}


def _maybe_json(v):
    try:
        return json.loads(v)
    except (ValueError, TypeError):
        return v
