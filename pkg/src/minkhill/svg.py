"""Deterministic SVG emission (path, line, circle elements only).

Coordinates are rounded to 1e-6 and elements are written in insertion
order, so output bytes are stable across runs at fixed resolution.
"""

from __future__ import annotations

import numpy as np

_HEADER = ('<?xml version="1.0" encoding="UTF-8"?>\n'
           '<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vb}" '
           'width="{w}" height="{h}">\n')


def _fmt(x):
    v = round(float(x), 6)
    if v == 0:
        v = 0.0
    return f"{v:.6f}".rstrip("0").rstrip(".") or "0"


class SvgCanvas:
    """Fixed-viewBox canvas in mathematical (y-up) coordinates."""

    def __init__(self, xmin=-1.6, xmax=1.6, ymin=-1.6, ymax=1.6, size=640):
        self.xmin, self.xmax, self.ymin, self.ymax = xmin, xmax, ymin, ymax
        self.size = size
        self.elements = []

    def _map(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        sx = self.size / (self.xmax - self.xmin)
        sy = self.size / (self.ymax - self.ymin)
        x = (pts[:, 0] - self.xmin) * sx
        y = (self.ymax - pts[:, 1]) * sy
        return np.stack([x, y], axis=-1)

    def path(self, pts, color="#000000", width=1.5, closed=True):
        mapped = self._map(pts)
        cmds = [f"M {_fmt(mapped[0, 0])} {_fmt(mapped[0, 1])}"]
        cmds += [f"L {_fmt(p[0])} {_fmt(p[1])}" for p in mapped[1:]]
        if closed:
            cmds.append("Z")
        self.elements.append(
            f'<path d="{" ".join(cmds)}" fill="none" stroke="{color}" '
            f'stroke-width="{_fmt(width)}"/>')

    def line(self, p0, p1, color="#888888", width=0.75):
        a, b = self._map([p0, p1])
        self.elements.append(
            f'<line x1="{_fmt(a[0])}" y1="{_fmt(a[1])}" x2="{_fmt(b[0])}" '
            f'y2="{_fmt(b[1])}" stroke="{color}" stroke-width="{_fmt(width)}"/>')

    def circle(self, center, radius, color="#000000", width=1.0):
        c = self._map([center])[0]
        r = radius * self.size / (self.xmax - self.xmin)
        self.elements.append(
            f'<circle cx="{_fmt(c[0])}" cy="{_fmt(c[1])}" r="{_fmt(r)}" '
            f'fill="none" stroke="{color}" stroke-width="{_fmt(width)}"/>')

    def axes(self):
        self.line((self.xmin, 0.0), (self.xmax, 0.0))
        self.line((0.0, self.ymin), (0.0, self.ymax))

    def render(self):
        vb = f"0 0 {self.size} {self.size}"
        body = "\n".join(self.elements)
        return _HEADER.format(vb=vb, w=self.size, h=self.size) + body + "\n</svg>\n"

    def write(self, path):
        with open(path, "w") as fh:
            fh.write(self.render())
