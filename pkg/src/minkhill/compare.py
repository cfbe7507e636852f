"""Affine-invariant comparison of closed convex curves.

Reconstruction recovers geometry only up to a unimodular linear map, so
curves are compared after moment normalization: translate the area
centroid to the origin and apply the symmetric positive unimodular map
taking the second area moment to a multiple of the identity.  The leftover
rotation is minimized explicitly.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import cKDTree


def area_moments(points):
    """(area, centroid, second moment about the centroid) of the polygon."""
    x, y = points[:, 0], points[:, 1]
    x1, y1 = np.roll(x, -1), np.roll(y, -1)
    cross = x * y1 - x1 * y
    area = cross.sum() / 2.0
    cx = (cross * (x + x1)).sum() / (6.0 * area)
    cy = (cross * (y + y1)).sum() / (6.0 * area)
    x0, y0 = x - cx, y - cy
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    cross = x0 * y1 - x1 * y0
    sxx = (cross * (x0 * x0 + x0 * x1 + x1 * x1)).sum() / 12.0
    syy = (cross * (y0 * y0 + y0 * y1 + y1 * y1)).sum() / 12.0
    sxy = (cross * (2 * x0 * y0 + x0 * y1 + x1 * y0 + 2 * x1 * y1)).sum() / 24.0
    return area, np.array([cx, cy]), np.array([[sxx, sxy], [sxy, syy]]) / area


def moment_normalize(points):
    """Centered curve mapped by the unique symmetric positive unimodular
    transform whose image has isotropic second moment."""
    _, centroid, S = area_moments(points)
    w, V = np.linalg.eigh(S)
    T = (V @ np.diag(w**-0.5) @ V.T) * np.linalg.det(S) ** 0.25
    return (points - centroid) @ T.T


def _point_polyline(query, poly):
    """Distance from each query point to a closed polyline (exact segment
    distances near the KD-nearest vertex)."""
    tree = cKDTree(poly)
    _, idx = tree.query(query)
    n = len(poly)
    best = np.full(len(query), np.inf)
    for off in (-1, 0):
        j = (idx + off) % n
        a = poly[j]
        b = poly[(j + 1) % n]
        ab = b - a
        denom = (ab * ab).sum(axis=1)
        denom = np.where(denom == 0, 1.0, denom)
        s = np.clip(((query - a) * ab).sum(axis=1) / denom, 0.0, 1.0)
        proj = a + s[:, None] * ab
        best = np.minimum(best, np.hypot(*(query - proj).T))
    return best


def hausdorff_distance(a, b):
    """Symmetric Hausdorff distance between closed polylines (point-to-
    segment, so it tolerates uneven sampling densities)."""
    d1 = _point_polyline(a, b).max()
    d2 = _point_polyline(b, a).max()
    return float(max(d1, d2))


def normalized_hausdorff(a, b, rotations=720):
    """Hausdorff distance after moment normalization, minimized over the
    leftover rotation (coarse scan plus golden refinement)."""
    an = moment_normalize(np.asarray(a, dtype=float))
    bn = moment_normalize(np.asarray(b, dtype=float))
    tree = cKDTree(bn)
    sub = an[:: max(1, len(an) // 512)]

    def cost(ang):
        c, s = math.cos(ang), math.sin(ang)
        rot = sub @ np.array([[c, s], [-s, c]])
        return tree.query(rot)[0].max()

    angles = np.linspace(0.0, 2 * math.pi, rotations, endpoint=False)
    costs = [cost(a_) for a_ in angles]
    k = int(np.argmin(costs))
    lo = angles[k] - 2 * math.pi / rotations
    hi = angles[k] + 2 * math.pi / rotations
    g = (math.sqrt(5.0) - 1.0) / 2.0
    for _ in range(60):
        c1 = hi - g * (hi - lo)
        c2 = lo + g * (hi - lo)
        if cost(c1) < cost(c2):
            hi = c2
        else:
            lo = c1
    ang = 0.5 * (lo + hi)
    c, s = math.cos(ang), math.sin(ang)
    rot = an @ np.array([[c, s], [-s, c]])
    return hausdorff_distance(rot, bn)
