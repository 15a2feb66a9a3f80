"""Pure-Python twins of the compiled kernels in ``_ccl.pyx``.

Same signatures, same outputs (labels are numbered in raster order of first
appearance), so either backend can be swapped in at import time.
"""

import numpy as np


def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def label_components(keys, flip_x, flip_y):
    keys = np.asarray(keys)
    nx, ny = keys.shape
    flat = keys.ravel().tolist()
    fx = np.asarray(flip_x).ravel().tolist()
    fy = np.asarray(flip_y).ravel().tolist()
    parent = list(range(nx * ny))

    def union(a, b):
        a = _find(parent, a)
        b = _find(parent, b)
        if a < b:
            parent[b] = a
        elif b < a:
            parent[a] = b

    for i in range(nx):
        for j in range(ny):
            p = i * ny + j
            k = flat[p]
            if k == 0:
                continue
            if i + 1 < nx:
                q = flat[p + ny]
                if q != 0 and k == q * fx[p]:
                    union(p, p + ny)
            if j + 1 < ny:
                q = flat[p + 1]
                if q != 0 and k == q * fy[i * (ny - 1) + j]:
                    union(p, p + 1)
    out = [0] * (nx * ny)
    relabel = {}
    for p in range(nx * ny):
        if flat[p] == 0:
            continue
        r = _find(parent, p)
        if r not in relabel:
            relabel[r] = len(relabel) + 1
        out[p] = relabel[r]
    return np.array(out, dtype=np.int32).reshape(nx, ny), len(relabel)


def points_in_polygon(px, py, vx, vy, eps):
    vx = list(vx)
    vy = list(vy)
    m = len(vx)
    out = np.zeros(len(px), dtype=bool)
    for a, (x, y) in enumerate(zip(px, py)):
        inside = False
        f = m - 1
        for e in range(m):
            x1, y1, x2, y2 = vx[f], vy[f], vx[e], vy[e]
            dx, dy = x2 - x1, y2 - y1
            t = ((x - x1) * dx + (y - y1) * dy) / (dx * dx + dy * dy)
            t = min(max(t, 0.0), 1.0)
            qx, qy = x1 + t * dx - x, y1 + t * dy - y
            if qx * qx + qy * qy <= eps * eps:
                inside = False
                break
            if (y1 > y) != (y2 > y) and x < x1 + (y - y1) * dx / dy:
                inside = not inside
            f = e
        out[a] = inside
    return out
