# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels: connected-component labeling and point-in-polygon."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _find(Py_ssize_t[::1] parent, Py_ssize_t x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef inline void _union(Py_ssize_t[::1] parent, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    a = _find(parent, a)
    b = _find(parent, b)
    if a == b:
        return
    if a < b:
        parent[b] = a
    else:
        parent[a] = b


def label_components(const int[:, ::1] keys, const signed char[:, ::1] flip_x,
                     const signed char[:, ::1] flip_y):
    cdef Py_ssize_t nx = keys.shape[0], ny = keys.shape[1]
    cdef Py_ssize_t i, j, p, r
    cdef Py_ssize_t[::1] parent = np.arange(nx * ny, dtype=np.intp)
    cdef int[:, ::1] out = np.zeros((nx, ny), dtype=np.int32)
    cdef int[::1] relabel = np.zeros(nx * ny, dtype=np.int32)
    cdef int count = 0
    cdef int k
    with nogil:
        for i in range(nx):
            for j in range(ny):
                k = keys[i, j]
                if k == 0:
                    continue
                p = i * ny + j
                if i + 1 < nx and keys[i + 1, j] != 0 and k == keys[i + 1, j] * flip_x[i, j]:
                    _union(parent, p, p + ny)
                if j + 1 < ny and keys[i, j + 1] != 0 and k == keys[i, j + 1] * flip_y[i, j]:
                    _union(parent, p, p + 1)
        for i in range(nx):
            for j in range(ny):
                if keys[i, j] == 0:
                    continue
                r = _find(parent, i * ny + j)
                if relabel[r] == 0:
                    count += 1
                    relabel[r] = count
                out[i, j] = relabel[r]
    return np.asarray(out), count


def points_in_polygon(const double[::1] px, const double[::1] py,
                      const double[::1] vx, const double[::1] vy, double eps):
    cdef Py_ssize_t n = px.shape[0], m = vx.shape[0]
    cdef Py_ssize_t a, e, f
    cdef double x, y, x1, y1, x2, y2, dx, dy, t, qx, qy, L2
    cdef bint inside, on_edge
    cdef cnp.uint8_t[::1] out = np.zeros(n, dtype=np.uint8)
    with nogil:
        for a in range(n):
            x = px[a]
            y = py[a]
            inside = False
            on_edge = False
            f = m - 1
            for e in range(m):
                x1 = vx[f]
                y1 = vy[f]
                x2 = vx[e]
                y2 = vy[e]
                dx = x2 - x1
                dy = y2 - y1
                L2 = dx * dx + dy * dy
                t = ((x - x1) * dx + (y - y1) * dy) / L2
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
                qx = x1 + t * dx - x
                qy = y1 + t * dy - y
                if qx * qx + qy * qy <= eps * eps:
                    on_edge = True
                    break
                if (y1 > y) != (y2 > y):
                    if x < x1 + (y - y1) * dx / dy:
                        inside = not inside
                f = e
            out[a] = 1 if (inside and not on_edge) else 0
    return np.asarray(out).astype(bool)
