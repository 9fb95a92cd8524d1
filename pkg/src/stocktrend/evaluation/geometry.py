"""Convex-hull overlap of the two classes in their top-2 principal plane."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import TooFewPoints


def jacobi_eigh(matrix, tol: float = 1e-12, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps until the off-diagonal Frobenius norm is below ``tol`` (scaled by
    the matrix norm when that exceeds 1). Returns eigenvalues in descending
    order and the matching unit eigenvectors as columns.
    """
    A = np.array(matrix, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T, rtol=0, atol=1e-12 * max(1.0, np.abs(A).max())):
        raise ValueError("jacobi_eigh needs a square symmetric matrix")
    A = 0.5 * (A + A.T)
    V = np.eye(n)
    limit = tol * max(1.0, np.linalg.norm(A))

    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, (A ** 2).sum() - (np.diag(A) ** 2).sum()))
        if off < limit:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300 or abs(apq) < 1e-18 * (abs(A[p, p]) + abs(A[q, q])):
                    A[p, q] = A[q, p] = 0.0
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p, row_q = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq

    values = np.diag(A).copy()
    order = np.argsort(-values, kind="mergesort")
    return values[order], V[:, order]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list:
    """Andrew's monotone chain; counter-clockwise, collinear points dropped."""
    pts = sorted(set(map(tuple, np.asarray(points, dtype=np.float64).tolist())))
    if len(pts) <= 2:
        return pts

    lower = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def polygon_area(poly) -> float:
    if len(poly) < 3:
        return 0.0
    s = 0.0
    for (x0, y0), (x1, y1) in zip(poly, poly[1:] + poly[:1]):
        s += x0 * y1 - x1 * y0
    return abs(s) * 0.5


def _line_intersection(p, q, a, b):
    # intersection of segment p-q with the infinite line a-b
    d1 = _cross(a, b, p)
    d2 = _cross(a, b, q)
    t = d1 / (d1 - d2)
    return (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))


def clip_convex(subject, clip) -> list:
    """Sutherland-Hodgman intersection of two counter-clockwise convex polygons."""
    out = list(subject)
    for a, b in zip(clip, clip[1:] + clip[:1]):
        if not out:
            break
        src, out = out, []
        for p, q in zip(src, src[1:] + src[:1]):
            p_in = _cross(a, b, p) >= 0
            q_in = _cross(a, b, q) >= 0
            if p_in:
                out.append(p)
                if not q_in:
                    out.append(_line_intersection(p, q, a, b))
            elif q_in:
                out.append(_line_intersection(p, q, a, b))
    return out


def intersection_area(hull_a, hull_b) -> float:
    if len(hull_a) < 3 or len(hull_b) < 3:
        return 0.0
    return polygon_area(clip_convex(hull_a, hull_b))


def _share_segment(hull_a, hull_b) -> bool:
    # both hulls are collinear segments lying on one line with overlap of positive length
    if len(hull_a) != 2 or len(hull_b) != 2:
        return False
    a0, a1 = hull_a
    if abs(_cross(a0, a1, hull_b[0])) > 1e-12 or abs(_cross(a0, a1, hull_b[1])) > 1e-12:
        return False
    d = (a1[0] - a0[0], a1[1] - a0[1])

    def proj(p):
        return (p[0] - a0[0]) * d[0] + (p[1] - a0[1]) * d[1]

    lo = max(min(proj(a0), proj(a1)), min(proj(hull_b[0]), proj(hull_b[1])))
    hi = min(max(proj(a0), proj(a1)), max(proj(hull_b[0]), proj(hull_b[1])))
    return hi > lo


@dataclass(frozen=True)
class SeparabilityReport:
    basis: np.ndarray  # shape (2, n_features), orthonormal rows
    eigenvalues: np.ndarray
    hulls: tuple
    hull_areas: tuple
    intersection_area: float
    hull_overlap_ratio: float

    @property
    def verdict(self) -> str:
        return "overlapping" if self.hull_overlap_ratio > 0 else "separable-in-projection"


def overlap_ratio(hull_a, hull_b) -> float:
    """Intersection area over the smaller hull's area, in [0, 1]."""
    smaller = min(polygon_area(hull_a), polygon_area(hull_b))
    if smaller == 0.0:
        return 1.0 if _share_segment(hull_a, hull_b) else 0.0
    return min(1.0, intersection_area(hull_a, hull_b) / smaller)


def linear_separability_test(data, labels=None) -> SeparabilityReport:
    """Project z-scored features onto the top two principal axes and compare class hulls."""
    if labels is None:
        X, y = data.features, data.labels
    else:
        X, y = data, labels
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or X.shape[1] < 2:
        raise TooFewPoints("need at least two feature columns")
    counts = np.bincount(y, minlength=2)
    if counts.min() < 3:
        raise TooFewPoints(f"need >= 3 rows per class, got {counts.tolist()}")

    scale = X.std(axis=0)
    Z = (X - X.mean(axis=0)) / np.where(scale > 0, scale, 1.0)
    cov = Z.T @ Z / (Z.shape[0] - 1)
    values, vectors = jacobi_eigh(cov)
    basis = vectors[:, :2].T.copy()
    P = Z @ basis.T

    hulls = tuple(convex_hull(P[y == k]) for k in (0, 1))
    areas = tuple(polygon_area(h) for h in hulls)
    return SeparabilityReport(
        basis=basis,
        eigenvalues=values,
        hulls=hulls,
        hull_areas=areas,
        intersection_area=intersection_area(*hulls),
        hull_overlap_ratio=overlap_ratio(*hulls),
    )
