"""Backend selection for the grid kernels.

The compiled extension ``specpart._ccl`` is used when it was built; otherwise
the pure-Python module ``specpart._ccl_py`` is loaded. Setting the environment
variable ``SPECPART_PURE_PYTHON=1`` forces the fallback.
"""

import os

import numpy as np

from . import _ccl_py

if os.environ.get("SPECPART_PURE_PYTHON", "") not in ("", "0"):
    _impl = _ccl_py
else:
    try:
        from . import _ccl as _impl
    except ImportError:  # extension not built
        _impl = _ccl_py

BACKEND = "compiled" if _impl is not _ccl_py else "python"


def label_components(keys, flip_x=None, flip_y=None, impl=None):
    """Label 4-connected components of nonzero ``keys``.

    Neighbors ``p`` and ``q`` are joined when ``keys[p] == keys[q] * s`` with
    ``s`` the edge sign from ``flip_x`` / ``flip_y`` (default +1). Signs of -1
    mark edges crossing a magnetic branch cut.

    Returns
    -------
    labels : (nx, ny) int32 array, 0 where ``keys == 0``
    count : int
    """
    impl = impl or _impl
    keys = np.ascontiguousarray(keys, dtype=np.int32)
    nx, ny = keys.shape
    if flip_x is None:
        flip_x = np.ones((max(nx - 1, 0), ny), dtype=np.int8)
    if flip_y is None:
        flip_y = np.ones((nx, max(ny - 1, 0)), dtype=np.int8)
    flip_x = np.ascontiguousarray(flip_x, dtype=np.int8)
    flip_y = np.ascontiguousarray(flip_y, dtype=np.int8)
    if nx < 2:
        flip_x = np.ones((1, ny), dtype=np.int8)
    if ny < 2:
        flip_y = np.ones((nx, 1), dtype=np.int8)
    return impl.label_components(keys, flip_x, flip_y)


def points_in_polygon(px, py, vertices, eps=1e-12, impl=None):
    """Strict interior test for a simple polygon; points within ``eps`` of an edge are outside."""
    impl = impl or _impl
    v = np.asarray(vertices, dtype=float)
    px = np.ascontiguousarray(np.ravel(px), dtype=float)
    py = np.ascontiguousarray(np.ravel(py), dtype=float)
    return impl.points_in_polygon(px, py, np.ascontiguousarray(v[:, 0]),
                                  np.ascontiguousarray(v[:, 1]), float(eps))
