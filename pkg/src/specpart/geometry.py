"""Planar domains, grid masks and geometric functionals.

Domains are kept in their natural units. A rectangle ``rectangle(a, b)`` is
the box (0, a*pi) x (0, b*pi); the unit-area shapes used throughout
(``SQ1``, ``HEXA1``, ``T1``, ``DISK1``) are provided as module constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigError, ResolutionError

__all__ = [
    "DomainSpec", "GridMask", "Tiling",
    "area", "inradius", "equivalent_radius", "centroid", "bbox", "contains",
    "axis_boundary_distance", "rasterize", "fraenkel_asymmetry", "build_tiling",
    "write_pgm", "SQ1", "HEXA1", "T1", "DISK1",
]


@dataclass(frozen=True)
class DomainSpec:
    """A planar domain.

    ``kind`` is one of ``rectangle``, ``disk``, ``regular_polygon``, ``polygon``.
    Use the classmethod constructors; they validate the parameters.
    """

    kind: str
    params: tuple
    center: tuple = (0.0, 0.0)

    @classmethod
    def rectangle(cls, a, b):
        if not (a > 0 and b > 0):
            raise ConfigError(f"rectangle needs a, b > 0, got {a}, {b}")
        return cls("rectangle", (float(a), float(b)))

    @classmethod
    def disk(cls, radius, center=(0.0, 0.0)):
        if not radius > 0:
            raise ConfigError(f"disk needs radius > 0, got {radius}")
        return cls("disk", (float(radius),), tuple(map(float, center)))

    @classmethod
    def regular_polygon(cls, sides, area, center=(0.0, 0.0)):
        if int(sides) != sides or sides < 3:
            raise ConfigError(f"regular polygon needs an integer number of sides >= 3, got {sides}")
        if not area > 0:
            raise ConfigError(f"regular polygon needs area > 0, got {area}")
        return cls("regular_polygon", (int(sides), float(area)), tuple(map(float, center)))

    @classmethod
    def polygon(cls, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ConfigError("polygon needs at least 3 planar vertices")
        if abs(_shoelace(v)) <= 1e-14 * max(1.0, np.ptp(v) ** 2):
            raise ConfigError("degenerate polygon (zero area)")
        if not _is_simple(v):
            raise ConfigError("polygon is self-intersecting")
        if _shoelace(v) < 0:
            v = v[::-1]
        return cls("polygon", tuple(map(tuple, v.tolist())))

    # -- serialization -------------------------------------------------
    def to_dict(self):
        if self.kind == "rectangle":
            a, b = self.params
            return {"kind": "rectangle", "a": a, "b": b}
        if self.kind == "disk":
            return {"kind": "disk", "radius": self.params[0], "center": list(self.center)}
        if self.kind == "regular_polygon":
            return {"kind": "regular_polygon", "sides": self.params[0],
                    "area": self.params[1], "center": list(self.center)}
        return {"kind": "polygon", "vertices": [list(p) for p in self.params]}

    @classmethod
    def from_dict(cls, d):
        kind = d.get("kind")
        if kind == "rectangle":
            return cls.rectangle(d["a"], d["b"])
        if kind == "disk":
            return cls.disk(d["radius"], d.get("center", (0.0, 0.0)))
        if kind == "regular_polygon":
            return cls.regular_polygon(d["sides"], d["area"], d.get("center", (0.0, 0.0)))
        if kind == "polygon":
            return cls.polygon(d["vertices"])
        raise ConfigError(f"unknown domain kind {kind!r}")

    def to_text(self):
        """One ``key = value`` line per field."""
        lines = []
        for key, val in self.to_dict().items():
            if isinstance(val, list):
                val = " ".join(_fmt(x) for x in np.ravel(val))
            elif not isinstance(val, str):
                val = _fmt(val)
            lines.append(f"{key} = {val}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        d = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            d[key.strip()] = val.strip()
        kind = d.get("kind")
        if kind == "rectangle":
            return cls.rectangle(float(d["a"]), float(d["b"]))
        if kind == "disk":
            c = [float(x) for x in d.get("center", "0 0").split()]
            return cls.disk(float(d["radius"]), c)
        if kind == "regular_polygon":
            c = [float(x) for x in d.get("center", "0 0").split()]
            return cls.regular_polygon(int(d["sides"]), float(d["area"]), c)
        if kind == "polygon":
            xs = [float(x) for x in d["vertices"].split()]
            return cls.polygon(np.reshape(xs, (-1, 2)))
        raise ConfigError(f"unknown domain kind {kind!r}")

    def scaled(self, s):
        """The image under x -> s*x."""
        if self.kind == "rectangle":
            return DomainSpec.rectangle(self.params[0] * s, self.params[1] * s)
        if self.kind == "disk":
            return DomainSpec.disk(self.params[0] * s, tuple(s * c for c in self.center))
        if self.kind == "regular_polygon":
            return DomainSpec.regular_polygon(self.params[0], self.params[1] * s * s,
                                              tuple(s * c for c in self.center))
        return DomainSpec.polygon(np.asarray(self.params) * s)

    def vertices(self):
        """Vertex array (counter-clockwise) for polygonal kinds; ``None`` for the disk."""
        if self.kind == "rectangle":
            a, b = self.params
            A, B = a * math.pi, b * math.pi
            return np.array([(0.0, 0.0), (A, 0.0), (A, B), (0.0, B)])
        if self.kind == "regular_polygon":
            n, ar = self.params
            R = _circumradius(n, ar)
            # one edge horizontal at the bottom
            t0 = -math.pi / 2 - math.pi / n
            t = t0 + 2 * math.pi * np.arange(n) / n
            return np.column_stack([self.center[0] + R * np.cos(t), self.center[1] + R * np.sin(t)])
        if self.kind == "polygon":
            return np.asarray(self.params, dtype=float)
        return None


def _fmt(x):
    return repr(float(x)) if not isinstance(x, (int, np.integer)) else str(int(x))


def _circumradius(n, ar):
    return math.sqrt(2 * ar / (n * math.sin(2 * math.pi / n)))


def _shoelace(v):
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _segments_cross(p1, p2, q1, q2):
    def orient(a, b, c):
        return np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    return (orient(p1, p2, q1) * orient(p1, p2, q2) < 0) and (orient(q1, q2, p1) * orient(q1, q2, p2) < 0)


def _is_simple(v):
    n = len(v)
    for i in range(n):
        for j in range(i + 1, n):
            if j == i + 1 or (i == 0 and j == n - 1):
                continue
            if _segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]):
                return False
    return True


SQ1 = DomainSpec.rectangle(1 / math.pi, 1 / math.pi)
HEXA1 = DomainSpec.regular_polygon(6, 1.0)
T1 = DomainSpec.regular_polygon(3, 1.0)
DISK1 = DomainSpec.disk(1 / math.sqrt(math.pi))


def area(domain):
    """Exact area (closed form, or shoelace for a general polygon)."""
    if domain.kind == "rectangle":
        a, b = domain.params
        return a * b * math.pi ** 2
    if domain.kind == "disk":
        return math.pi * domain.params[0] ** 2
    if domain.kind == "regular_polygon":
        return domain.params[1]
    return _shoelace(domain.vertices())


def centroid(domain):
    if domain.kind == "rectangle":
        a, b = domain.params
        return (a * math.pi / 2, b * math.pi / 2)
    if domain.kind in ("disk", "regular_polygon"):
        return domain.center
    v = domain.vertices()
    x, y = v[:, 0], v[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cr = x * yn - xn * y
    A = cr.sum() / 2
    return (float(((x + xn) * cr).sum() / (6 * A)), float(((y + yn) * cr).sum() / (6 * A)))


def bbox(domain):
    """(xmin, ymin, xmax, ymax)."""
    if domain.kind == "disk":
        r = domain.params[0]
        cx, cy = domain.center
        return (cx - r, cy - r, cx + r, cy + r)
    v = domain.vertices()
    return (v[:, 0].min(), v[:, 1].min(), v[:, 0].max(), v[:, 1].max())


def contains(domain, x, y, closed=False, tol=None):
    """Vectorized membership test.

    Strict interior by default. With ``closed=True`` points within ``tol`` of
    the boundary count as inside.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast(x, y).shape
    x, y = np.broadcast_to(x, shape).ravel(), np.broadcast_to(y, shape).ravel()
    scale = math.sqrt(area(domain))
    if tol is None:
        tol = 1e-12 * scale
    if domain.kind == "disk":
        r = domain.params[0]
        d = np.hypot(x - domain.center[0], y - domain.center[1])
        res = d <= r + tol if closed else d < r - tol
        return res.reshape(shape)
    v = domain.vertices()
    if domain.kind == "rectangle" or (domain.kind == "regular_polygon"):
        # convex: half-plane tests
        e = np.roll(v, -1, axis=0) - v
        nrm = np.column_stack([e[:, 1], -e[:, 0]]) / np.hypot(e[:, 0], e[:, 1])[:, None]
        s = (x[:, None] - v[None, :, 0]) * nrm[None, :, 0] + (y[:, None] - v[None, :, 1]) * nrm[None, :, 1]
        res = (s <= tol).all(axis=1) if closed else (s < -tol).all(axis=1)
        return res.reshape(shape)
    strict = kernels.points_in_polygon(x, y, v, eps=tol)
    if not closed:
        return strict.reshape(shape)
    return (strict | (_polygon_edge_distance(v, x, y) <= tol)).reshape(shape)


def _polygon_edge_distance(v, x, y):
    p1 = v
    p2 = np.roll(v, -1, axis=0)
    d = p2 - p1
    L2 = (d ** 2).sum(axis=1)
    t = ((x[:, None] - p1[None, :, 0]) * d[None, :, 0] + (y[:, None] - p1[None, :, 1]) * d[None, :, 1]) / L2
    t = np.clip(t, 0, 1)
    qx = p1[None, :, 0] + t * d[None, :, 0] - x[:, None]
    qy = p1[None, :, 1] + t * d[None, :, 1] - y[:, None]
    return np.sqrt(qx ** 2 + qy ** 2).min(axis=1)


def distance_to_boundary(domain, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if domain.kind == "disk":
        return np.abs(domain.params[0] - np.hypot(x - domain.center[0], y - domain.center[1]))
    shape = np.broadcast(x, y).shape
    d = _polygon_edge_distance(domain.vertices(), np.broadcast_to(x, shape).ravel(),
                               np.broadcast_to(y, shape).ravel())
    return d.reshape(shape)


def axis_boundary_distance(domain, x, y, direction):
    """Distance from interior points to the boundary along an axis ray.

    ``direction`` is one of ``(1, 0), (-1, 0), (0, 1), (0, -1)``. Returns the
    smallest positive ray parameter hitting the boundary (``inf`` if none).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    dx, dy = direction
    if domain.kind == "disk":
        r = domain.params[0]
        px, py = x - domain.center[0], y - domain.center[1]
        # |p + t d|^2 = r^2 with |d| = 1
        b = px * dx + py * dy
        c = px * px + py * py - r * r
        return -b + np.sqrt(np.maximum(b * b - c, 0.0))
    v = domain.vertices()
    p1 = v
    p2 = np.roll(v, -1, axis=0)
    ex = p2[:, 0] - p1[:, 0]
    ey = p2[:, 1] - p1[:, 1]
    den = dx * ey - dy * ex
    best = np.full(x.shape, np.inf)
    for k in range(len(v)):
        if abs(den[k]) < 1e-300:
            continue
        wx = p1[k, 0] - x
        wy = p1[k, 1] - y
        t = (wx * ey[k] - wy * ex[k]) / den[k]
        s = (wx * dy - wy * dx) / den[k]
        ok = (t > 0) & (s >= -1e-12) & (s <= 1 + 1e-12)
        best = np.where(ok & (t < best), t, best)
    return best


def inradius(domain, h=None):
    """Radius of the largest inscribed disk.

    Closed form except for general polygons, where the distance to the boundary
    is maximized on a grid (spacing ``h``) and then refined by a local search.
    """
    if domain.kind == "rectangle":
        a, b = domain.params
        return min(a, b) * math.pi / 2
    if domain.kind == "disk":
        return domain.params[0]
    if domain.kind == "regular_polygon":
        n, ar = domain.params
        return _circumradius(n, ar) * math.cos(math.pi / n)
    xmin, ymin, xmax, ymax = bbox(domain)
    if h is None:
        h = max(xmax - xmin, ymax - ymin) / 200
    xs = np.arange(xmin + h / 2, xmax, h)
    ys = np.arange(ymin + h / 2, ymax, h)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    ins = contains(domain, X, Y)
    if not ins.any():
        return 0.0
    d = np.where(ins, distance_to_boundary(domain, X, Y), -1.0)
    i, j = np.unravel_index(np.argmax(d), d.shape)
    cx, cy, best, step = X[i, j], Y[i, j], d[i, j], h
    while step > h * 1e-4:
        moved = False
        for ddx, ddy in ((step, 0), (-step, 0), (0, step), (0, -step)):
            nx_, ny_ = cx + ddx, cy + ddy
            if contains(domain, nx_, ny_):
                val = float(distance_to_boundary(domain, nx_, ny_))
                if val > best:
                    cx, cy, best, moved = nx_, ny_, val, True
        if not moved:
            step /= 2
    return float(best)


def equivalent_radius(domain):
    """Radius of the disk with the same area."""
    return math.sqrt(area(domain) / math.pi)


# ---------------------------------------------------------------------------
# grid masks


@dataclass
class GridMask:
    """Uniform-grid discretization of a domain.

    Node ``(i, j)`` sits at ``origin + ((i + 1) h, (j + 1) h)``; ``inside`` has
    shape ``(nx, ny)``. Interior nodes are numbered in raster order
    (``i`` major) by ``index``, with -1 outside.
    """

    h: float
    origin: tuple
    nx: int
    ny: int
    inside: np.ndarray
    domain: DomainSpec | None = None
    index: np.ndarray = field(init=False, repr=False)
    nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.inside = np.asarray(self.inside, dtype=bool)
        self.index = np.full(self.inside.shape, -1, dtype=np.int64)
        self.nodes = np.argwhere(self.inside)
        self.index[self.inside] = np.arange(len(self.nodes))

    @property
    def n(self):
        return len(self.nodes)

    def coords(self):
        """(N, 2) array of interior node coordinates in index order."""
        return np.column_stack([self.origin[0] + (self.nodes[:, 0] + 1) * self.h,
                                self.origin[1] + (self.nodes[:, 1] + 1) * self.h])

    def grid_coords(self):
        xs = self.origin[0] + (np.arange(self.nx) + 1) * self.h
        ys = self.origin[1] + (np.arange(self.ny) + 1) * self.h
        return np.meshgrid(xs, ys, indexing="ij")

    def to_grid(self, values, fill=0.0):
        """Scatter a per-node vector onto the ``(nx, ny)`` grid."""
        values = np.asarray(values)
        out = np.full(self.inside.shape, fill, dtype=values.dtype)
        out[self.inside] = values
        return out

    def submask(self, keep):
        """Mask restricted to the interior nodes where ``keep`` (per node) is true."""
        grid = self.to_grid(np.asarray(keep, dtype=bool), False)
        return GridMask(self.h, self.origin, self.nx, self.ny, grid, self.domain)

    def scaled(self, s):
        return GridMask(self.h * s, (self.origin[0] * s, self.origin[1] * s), self.nx, self.ny,
                        self.inside.copy(), None if self.domain is None else self.domain.scaled(s))


def _default_origin(domain, h):
    if domain.kind == "rectangle":
        return (0.0, 0.0)
    # put the domain center on a plaquette center
    cx, cy = centroid(domain)
    xmin, ymin, _, _ = bbox(domain)
    mx = math.ceil((cx - xmin) / h) + 1
    my = math.ceil((cy - ymin) / h) + 1
    return (cx - h / 2 - mx * h, cy - h / 2 - my * h)


def rasterize(domain, h, origin=None, check_connected=True):
    """Mask of grid nodes strictly inside ``domain``.

    Raises
    ------
    ResolutionError
        If ``h`` exceeds the inradius or the mask is empty or disconnected.
    """
    if not h > 0:
        raise ConfigError("grid spacing must be positive")
    if h > inradius(domain):
        raise ResolutionError(f"h = {h:g} exceeds the inradius {inradius(domain):g}")
    if origin is None:
        origin = _default_origin(domain, h)
    _, _, xmax, ymax = bbox(domain)
    nx = max(int(math.ceil((xmax - origin[0]) / h)), 1)
    ny = max(int(math.ceil((ymax - origin[1]) / h)), 1)
    xs = origin[0] + (np.arange(nx) + 1) * h
    ys = origin[1] + (np.arange(ny) + 1) * h
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    inside = contains(domain, X, Y, tol=1e-9 * h)
    if not inside.any():
        raise ResolutionError("empty mask")
    if check_connected:
        _, count = kernels.label_components(inside.astype(np.int32))
        if count != 1:
            raise ResolutionError(f"mask has {count} connected components")
    return GridMask(h, tuple(map(float, origin)), nx, ny, inside, domain)


def write_pgm(mask_or_grid, path, scale=255):
    """Write a boolean mask or a small-integer grid as an ASCII portable graymap."""
    grid = mask_or_grid.inside if isinstance(mask_or_grid, GridMask) else np.asarray(mask_or_grid)
    img = np.asarray(grid, dtype=float).T[::-1]  # y up
    top = img.max() if img.max() > 0 else 1
    img = np.rint(img / top * scale).astype(int)
    with open(path, "w") as f:
        f.write(f"P2\n{img.shape[1]} {img.shape[0]}\n{scale}\n")
        for row in img:
            f.write(" ".join(map(str, row)) + "\n")


# ---------------------------------------------------------------------------
# Fraenkel asymmetry


def fraenkel_asymmetry(domain, resolution):
    """Normalized distance ``inf_B |D sym-diff B| / |D|`` over disks of equal area.

    Areas come from pixel counting at ``resolution`` with antialiased disk
    coverage. Centers are searched on a 33 x 33 grid over the bounding box and
    then refined by golden-section search along each axis.
    """
    if domain.kind == "disk":
        return 0.0
    r_in = inradius(domain)
    if not resolution < r_in / 8:
        raise ResolutionError("resolution must be below inradius / 8")
    A = area(domain)
    xmin, ymin, xmax, ymax = bbox(domain)
    xs = np.arange(xmin + resolution / 2, xmax, resolution)
    ys = np.arange(ymin + resolution / 2, ymax, resolution)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    ins = contains(domain, X, Y)
    return pixel_asymmetry(X[ins], Y[ins], A, resolution)


def pixel_asymmetry(px, py, A, resolution):
    """Fraenkel asymmetry of a union of square pixels centered at ``(px, py)``.

    ``A`` is the area the pixel set represents (pixel counts are rescaled to
    it). Used directly for grid partition cells.
    """
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    r0 = math.sqrt(A / math.pi)
    xmin, xmax = px.min() - resolution / 2, px.max() + resolution / 2
    ymin, ymax = py.min() - resolution / 2, py.max() + resolution / 2

    def objective(c, stride=1):
        qx, qy = px[::stride], py[::stride]
        d = np.hypot(qx - c[0], qy - c[1])
        cover = np.clip((r0 - d) / resolution + 0.5, 0.0, 1.0)
        inter = cover.sum() * A / len(qx)
        return 2.0 * (A - inter) / A

    gx = np.linspace(xmin, xmax, 33)
    gy = np.linspace(ymin, ymax, 33)
    stride = max(1, len(px) // 20000)
    best = (np.inf, None)
    for cx in gx:
        for cy in gy:
            val = objective((cx, cy), stride)
            if val < best[0]:
                best = (val, (cx, cy))
    c = best[1]
    val = objective(c)
    c = list(c)
    step = max((xmax - xmin), (ymax - ymin)) / 32
    for _ in range(3):
        for axis in (0, 1):
            def f(t, axis=axis):
                cc = list(c)
                cc[axis] = t
                return objective(cc)
            t, v = _golden(f, c[axis] - step, c[axis] + step)
            if v < val:
                val, c[axis] = v, t
        step /= 4
    return float(min(max(val, 0.0), 2.0))


def _golden(f, a, b, tol=1e-10, maxit=80):
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxit):
        if abs(b - a) < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


# ---------------------------------------------------------------------------
# tilings


@dataclass
class Tiling:
    cell_kind: str
    cells: list
    cell_area: float
    scale: float = 0.0
    flat_top: bool = True

    def cell_domain(self):
        """The common cell shape as a DomainSpec (translated to the origin)."""
        v = np.asarray(self.cells[0])
        return DomainSpec.polygon(v - v.mean(axis=0))


def _cell_template(kind, s, flat_top=True):
    if kind == "square":
        return np.array([(-s / 2, -s / 2), (s / 2, -s / 2), (s / 2, s / 2), (-s / 2, s / 2)])
    t = np.arange(6) * math.pi / 3 + (0.0 if flat_top else math.pi / 6)
    return np.column_stack([s * np.cos(t), s * np.sin(t)])


def _lattice_centers(kind, s, anchor, box, flat_top=True):
    xmin, ymin, xmax, ymax = box
    if kind == "square":
        e1, e2 = np.array([s, 0.0]), np.array([0.0, s])
    elif flat_top:
        e1, e2 = np.array([1.5 * s, math.sqrt(3) / 2 * s]), np.array([0.0, math.sqrt(3) * s])
    else:
        e1, e2 = np.array([math.sqrt(3) * s, 0.0]), np.array([math.sqrt(3) / 2 * s, 1.5 * s])
    span = max(xmax - xmin, ymax - ymin)
    m = int(math.ceil(2 * span / min(np.linalg.norm(e1), np.linalg.norm(e2)))) + 2
    I, J = np.meshgrid(np.arange(-m, m + 1), np.arange(-m, m + 1), indexing="ij")
    C = anchor[None, :] + I.ravel()[:, None] * e1 + J.ravel()[:, None] * e2
    keep = ((C[:, 0] > xmin - s) & (C[:, 0] < xmax + s) & (C[:, 1] > ymin - s) & (C[:, 1] < ymax + s))
    return C[keep]


def _fitting_cells(domain, kind, s, anchor, flat_top):
    tmpl = _cell_template(kind, s, flat_top)
    centers = _lattice_centers(kind, s, anchor, bbox(domain), flat_top)
    if len(centers) == 0:
        return centers, tmpl
    V = centers[:, None, :] + tmpl[None, :, :]
    tol = 1e-9 * s
    ok = contains(domain, V[..., 0], V[..., 1], closed=True, tol=tol).all(axis=1)
    if domain.kind == "polygon":
        dv = domain.vertices()
        for idx in np.flatnonzero(ok):
            if kernels.points_in_polygon(dv[:, 0], dv[:, 1], V[idx], eps=tol).any():
                ok[idx] = False
    return centers[ok], tmpl


def _anchor_offsets(kind, s, flat_top):
    """Candidate positions of the centroid relative to a cell center."""
    if kind == "square":
        return [np.zeros(2), np.array([s / 2, s / 2]), np.array([s / 2, 0.0]), np.array([0.0, s / 2])]
    tmpl = _cell_template(kind, s, flat_top)
    mid = (tmpl[0] + tmpl[1]) / 2
    return [np.zeros(2), tmpl[0], mid]


def build_tiling(domain, k, cell_kind="hexagon"):
    """``k`` congruent cells on a lattice inside ``domain``, as large as possible.

    The lattice is anchored at the centroid; several anchor offsets (and both
    hexagon orientations) are tried and the largest admissible cell scale is
    kept. Excess cells are dropped farthest-from-centroid first.
    """
    if k < 1:
        raise ConfigError("k must be >= 1")
    if cell_kind not in ("hexagon", "square"):
        raise ConfigError(f"unknown cell kind {cell_kind!r}")
    A = area(domain)
    c = np.asarray(centroid(domain), dtype=float)
    unit_area = 1.0 if cell_kind == "square" else 1.5 * math.sqrt(3)
    s_hi = math.sqrt(A / k / unit_area)
    orientations = [True] if cell_kind == "square" else [True, False]
    best = None
    for flat_top in orientations:
        for off in range(len(_anchor_offsets(cell_kind, 1.0, flat_top))):
            def count(s):
                anchor = c - _anchor_offsets(cell_kind, s, flat_top)[off]
                return len(_fitting_cells(domain, cell_kind, s, anchor, flat_top)[0])
            s = s_hi
            found = None
            for _ in range(400):
                if count(s) >= k:
                    found = s
                    break
                s *= 0.995
            if found is None:
                continue
            lo, hi = found, min(found / 0.995, s_hi)
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if count(mid) >= k:
                    lo = mid
                else:
                    hi = mid
            if best is None or lo > best[0] * (1 + 1e-12):
                best = (lo, flat_top, off)
    if best is None:
        raise ResolutionError(f"{k} cells do not fit at any tested scale")
    s, flat_top, off = best
    anchor = c - _anchor_offsets(cell_kind, s, flat_top)[off]
    centers, tmpl = _fitting_cells(domain, cell_kind, s, anchor, flat_top)
    order = np.lexsort((centers[:, 1], centers[:, 0], np.round(np.hypot(*(centers - c).T) / s, 9)))
    centers = centers[order[:k]]
    cells = [ctr + tmpl for ctr in centers]
    cell_area = unit_area * s * s
    return Tiling(cell_kind, cells, cell_area, s, flat_top)
