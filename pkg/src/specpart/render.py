"""Scalable-vector images of grid partitions, boundary sets and critical points."""

from __future__ import annotations

import numpy as np

PALETTE = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1",
           "#ff9da7", "#9c755f", "#bab0ac"]
SIGNED = {1: "#d6604d", -1: "#4393c3"}


def partition_svg(mask, labels, boundary=None, points=(), poles=(), cuts=(), signed=None, size=480):
    """SVG text: one square per node colored by label (or by sign), overlays on top.

    ``boundary`` is a :class:`specpart.nodal.BoundarySet`; ``points`` are
    critical points, ``poles`` pole positions, ``cuts`` line segments.
    """
    h = mask.h
    xy = mask.coords()
    x0, y0 = xy.min(axis=0) - h
    x1, y1 = xy.max(axis=0) + h
    scale = size / max(x1 - x0, y1 - y0)
    W, H = (x1 - x0) * scale, (y1 - y0) * scale

    def tx(x):
        return (x - x0) * scale

    def ty(y):
        return H - (y - y0) * scale

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W:.1f}" height="{H:.1f}" '
           f'viewBox="0 0 {W:.1f} {H:.1f}">']
    s = h * scale
    labels = np.asarray(labels)
    for (x, y), lab in zip(xy, labels):
        if signed is not None:
            color = SIGNED.get(int(np.sign(lab)), "#ffffff")
        else:
            color = "#ffffff" if lab <= 0 else PALETTE[(int(lab) - 1) % len(PALETTE)]
        out.append(f'<rect x="{tx(x) - s / 2:.2f}" y="{ty(y) - s / 2:.2f}" width="{s:.2f}" '
                   f'height="{s:.2f}" fill="{color}"/>')
    if boundary is not None and len(boundary):
        for seg in boundary.segments:
            out.append(f'<line x1="{tx(seg[0, 0]):.2f}" y1="{ty(seg[0, 1]):.2f}" '
                       f'x2="{tx(seg[1, 0]):.2f}" y2="{ty(seg[1, 1]):.2f}" stroke="black" stroke-width="1"/>')
    for a, b in cuts:
        out.append(f'<line x1="{tx(a[0]):.2f}" y1="{ty(a[1]):.2f}" x2="{tx(b[0]):.2f}" y2="{ty(b[1]):.2f}" '
                   f'stroke="#333" stroke-width="1" stroke-dasharray="4,3"/>')
    for p in points:
        pos = p.position if hasattr(p, "position") else p
        nu = getattr(p, "valence", None)
        fill = "#000" if nu is None or nu % 2 == 0 else "#d62728"
        out.append(f'<circle cx="{tx(pos[0]):.2f}" cy="{ty(pos[1]):.2f}" r="4" fill="{fill}"/>')
    for p in poles:
        out.append(f'<circle cx="{tx(p[0]):.2f}" cy="{ty(p[1]):.2f}" r="5" fill="none" '
                   f'stroke="#d62728" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
