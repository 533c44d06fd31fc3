"""Point-to-set and Hausdorff distances over base or derived metrics.

Public functions return ``None`` when the answer involves a pair that is
unreachable under the view; they never substitute a large number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .derived import DerivedMetric
from .errors import InputError
from .metric import FiniteMetricSpace


@dataclass(frozen=True, eq=False)
class MetricView:
    """A distance lookup table; ``inf`` entries are unreachable pairs."""

    dist: np.ndarray
    labels: tuple[str, ...]
    name: str = "base"

    def lookup(self, i: int, j: int) -> float | None:
        v = self.dist[i, j]
        return float(v) if math.isfinite(v) else None

    def __len__(self) -> int:
        return len(self.labels)


def as_view(m) -> MetricView:
    if isinstance(m, MetricView):
        return m
    if isinstance(m, DerivedMetric):
        return MetricView(m.dist, m.labels, f"{m.kind}:{m.scale!r}")
    if isinstance(m, FiniteMetricSpace):
        return MetricView(m.dist, m.labels, "base")
    raise TypeError(f"cannot view {type(m).__name__} as a metric")


def _members(view: MetricView, s: Iterable[int]) -> np.ndarray:
    idx = np.fromiter(sorted(set(int(i) for i in s)), dtype=int)
    if idx.size == 0:
        raise InputError("point sets must be nonempty")
    if idx[0] < 0 or idx[-1] >= len(view):
        raise InputError("point index out of range")
    return idx


def _finite_or_none(v: float) -> float | None:
    return float(v) if math.isfinite(v) else None


def set_distance(y: int, A: Iterable[int], m) -> float | None:
    """``min_{x in A} m(y, x)``; ``None`` if no member of A is reachable from y."""
    view = as_view(m)
    a = _members(view, A)
    if not 0 <= y < len(view):
        raise InputError("point index out of range")
    return _finite_or_none(view.dist[y, a].min())


def directed_hausdorff(A: Iterable[int], B: Iterable[int], m) -> float:
    """``sup_{a in A} d(a, B)`` as a float (``inf`` when unreachable)."""
    view = as_view(m)
    a, b = _members(view, A), _members(view, B)
    return float(view.dist[np.ix_(a, b)].min(axis=1).max())


def _hausdorff_raw(view: MetricView, a: np.ndarray, b: np.ndarray) -> float:
    sub = view.dist[np.ix_(a, b)]
    # Rows are measured from A's side, columns from B's side.
    back = view.dist[np.ix_(b, a)]
    return float(max(sub.min(axis=1).max(), back.min(axis=1).max()))


def hausdorff_distance(A: Iterable[int], B: Iterable[int], m) -> float | None:
    """Larger of the two directed sup-inf distances between A and B."""
    view = as_view(m)
    return _finite_or_none(_hausdorff_raw(view, _members(view, A), _members(view, B)))


def hausdorff_via_expansion(A: Iterable[int], B: Iterable[int], m) -> float | None:
    """Smallest r with A inside the closed r-expansion of B and vice versa.

    With closed balls the infimum is attained at one of the pairwise
    distances between A and B (or 0), so we scan those candidates in
    increasing order instead of bisecting.
    """
    view = as_view(m)
    a, b = _members(view, A), _members(view, B)
    ab = view.dist[np.ix_(a, b)]
    ba = view.dist[np.ix_(b, a)]
    candidates = np.unique(np.concatenate(([0.0], ab[np.isfinite(ab)], ba[np.isfinite(ba)])))
    for r in candidates:
        a_covered = (ab <= r).any(axis=1).all()
        b_covered = (ba <= r).any(axis=1).all()
        if a_covered and b_covered:
            return float(r)
    return None


def image_distance_matrix(images, m) -> np.ndarray:
    """``H[x, y] = H(images[x], images[y])`` for every pair, ``inf`` if unreachable.

    Uses the point-to-set table ``P[x, z] = d(z, images[x])`` so each entry is
    assembled from exact min/max reductions, matching :func:`hausdorff_distance`.
    """
    view = as_view(m)
    d = view.dist
    images = [_members(view, im) for im in images]
    n = len(images)
    if all(im.size == 1 for im in images):
        f = np.array([im[0] for im in images])
        return np.maximum(d[np.ix_(f, f)], d[np.ix_(f, f)].T)
    # to_set[x, z] = min over a in images[x] of d(z, a)
    to_set = np.vstack([d[:, im].min(axis=1) for im in images])
    # directed[x, y] = sup over b in images[y] of d(b, images[x])
    directed = np.empty((n, n))
    for y, im in enumerate(images):
        directed[:, y] = to_set[:, im].max(axis=1)
    return np.maximum(directed, directed.T)
