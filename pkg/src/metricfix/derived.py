"""Chain and intrinsic (path) metrics over a threshold graph, plus discrete paths.

Both derived metrics are shortest-path closures of the graph that joins two
points whenever their base distance is strictly below the scale. The chain
metric goes through scipy's Dijkstra; the path metric uses the dense
Dijkstra below, which also records enough structure to recover geodesics.
The two routes accumulate lengths in the same order (source outward), so
their tables agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import InputError, NoPathError
from .metric import FiniteMetricSpace, threshold_adjacency


@dataclass(frozen=True, eq=False)
class DerivedMetric:
    """Distance table derived from ``base`` at ``scale``; ``inf`` marks unreachable pairs.

    Row ``i`` holds distances accumulated outward from source ``i``.
    """

    base: FiniteMetricSpace
    kind: str
    scale: float
    dist: np.ndarray

    @property
    def labels(self) -> tuple[str, ...]:
        return self.base.labels

    @property
    def reachable(self) -> np.ndarray:
        return np.isfinite(self.dist)

    def lookup(self, i: int, j: int) -> float | None:
        v = self.dist[i, j]
        return float(v) if math.isfinite(v) else None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "scale": self.scale,
            "points": list(self.labels),
            "distances": [[float(v) if math.isfinite(v) else None for v in row] for row in self.dist],
        }


def _check_scale(scale: float, name: str) -> None:
    if not (isinstance(scale, (int, float)) and scale > 0 and math.isfinite(scale)):
        raise InputError(f"{name} must be a positive finite number, got {scale!r}")


def chain_metric(space: FiniteMetricSpace, r: float) -> DerivedMetric:
    """Infimal r-chain length between every pair.

    A chain may only step between points at base distance strictly below
    ``r``; the cheapest chain is a shortest path in that threshold graph.
    """
    _check_scale(r, "chain scale r")
    adj = threshold_adjacency(space, r)
    weights = np.where(adj, space.dist, 0.0)
    table = shortest_path(csr_matrix(weights), method="D", directed=True)
    table.flags.writeable = False
    return DerivedMetric(space, "chain", float(r), table)


def _dijkstra(weights: np.ndarray, source: int) -> np.ndarray:
    """Dense O(n^2) Dijkstra. ``weights`` holds inf where there is no edge."""
    n = weights.shape[0]
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    done = np.zeros(n, dtype=bool)
    frontier = dist.copy()
    for _ in range(n):
        u = int(np.argmin(frontier))
        if not math.isfinite(frontier[u]):
            break
        done[u] = True
        frontier[u] = np.inf
        cand = dist[u] + weights[u]
        better = (cand < dist) & ~done
        dist[better] = cand[better]
        frontier[better] = cand[better]
    return dist


def _edge_weights(space: FiniteMetricSpace, eps: float) -> np.ndarray:
    adj = threshold_adjacency(space, eps)
    return np.where(adj, space.dist, np.inf)


def path_metric(space: FiniteMetricSpace, eps: float) -> DerivedMetric:
    """Intrinsic metric of the eps-neighbourhood graph (lengths of polygonal paths)."""
    _check_scale(eps, "path scale eps")
    w = _edge_weights(space, eps)
    table = np.vstack([_dijkstra(w, s) for s in range(len(space))])
    table.flags.writeable = False
    return DerivedMetric(space, "path", float(eps), table)


@dataclass(frozen=True)
class DiscretePath:
    """Waypoint indices with parameter values ``0 = t_0 < ... < t_last = 1``.

    When ``params`` is omitted the waypoints are spread uniformly on [0, 1].
    """

    waypoints: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        wp = tuple(int(w) for w in self.waypoints)
        if not wp:
            raise InputError("a path needs at least one waypoint")
        for a, b in zip(wp, wp[1:]):
            if a == b:
                raise InputError("consecutive waypoints must be distinct")
        ts = tuple(float(t) for t in self.params)
        if not ts:
            k = len(wp) - 1
            ts = (0.0,) if k == 0 else tuple(i / k for i in range(k + 1))
        if len(ts) != len(wp):
            raise InputError("need exactly one parameter value per waypoint")
        if ts[0] != 0.0 or (len(ts) > 1 and ts[-1] != 1.0):
            raise InputError("path parameters must start at 0 and end at 1")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise InputError("path parameters must be strictly increasing")
        object.__setattr__(self, "waypoints", wp)
        object.__setattr__(self, "params", ts)

    def __len__(self) -> int:
        return len(self.waypoints)

    def restrict(self, a: float, b: float) -> tuple[int, ...]:
        """Waypoints with parameter in ``[a, b]``; both ends must be waypoint parameters."""
        if not a < b:
            raise InputError(f"sub-range needs a < b, got [{a}, {b}]")
        try:
            lo = self.params.index(a)
            hi = self.params.index(b)
        except ValueError:
            raise InputError(f"sub-range [{a}, {b}] is not aligned to waypoint parameters") from None
        return self.waypoints[lo : hi + 1]


def _polyline_length(d: np.ndarray, pts: Sequence[int]) -> float:
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        total += float(d[a, b])
    return total


def path_length(space, p: DiscretePath, sub: tuple[float, float] | None = None) -> float:
    """Length of a polygonal path: the sum of consecutive base distances.

    For waypoint paths the supremum over partitions is attained at the
    waypoint partition itself, so no refinement is needed.
    """
    pts = p.waypoints if sub is None else p.restrict(*sub)
    return _polyline_length(np.asarray(space.dist), pts)


def reparametrize(space, p: DiscretePath) -> DiscretePath:
    """Reassign parameters so that length accrues in proportion to the parameter."""
    d = np.asarray(space.dist)
    total = _polyline_length(d, p.waypoints)
    if total <= 0:
        raise InputError("cannot reparametrize a path of zero length")
    ts = [0.0]
    acc = 0.0
    for a, b in zip(p.waypoints, p.waypoints[1:]):
        acc += float(d[a, b])
        ts.append(acc / total)
    ts[-1] = 1.0
    return DiscretePath(p.waypoints, tuple(ts))


def geodesic(space: FiniteMetricSpace, eps: float, x: int, y: int) -> DiscretePath:
    """Shortest polygonal path from ``x`` to ``y`` in the eps-graph.

    Among all shortest paths the one with fewest hops is returned, ties going
    to the lexicographically smallest index sequence. Its :func:`path_length` equals ``path_metric(space, eps)`` at
    ``[x, y]`` exactly.
    """
    _check_scale(eps, "path scale eps")
    n = len(space)
    if not (0 <= x < n and 0 <= y < n):
        raise InputError("geodesic endpoints out of range")
    if x == y:
        return DiscretePath((x,))
    w = _edge_weights(space, eps)
    dist = _dijkstra(w, x)
    if not math.isfinite(dist[y]):
        raise NoPathError(f"{space.labels[x]!r} and {space.labels[y]!r} are not connected at eps={eps}")

    # tight[u, v]: edge u->v lies on some shortest path out of x
    tight = np.isfinite(w) & (dist[:, None] + w == dist[None, :])
    # hops[u]: fewest tight edges from u to y (-1 if y is not reachable)
    hops = np.full(n, -1)
    hops[y] = 0
    frontier = [y]
    while frontier:
        nxt_frontier = []
        for v in frontier:
            for u in np.flatnonzero(tight[:, v] & (hops < 0)):
                hops[u] = hops[v] + 1
                nxt_frontier.append(int(u))
        frontier = nxt_frontier

    route = [x]
    while route[-1] != y:
        cur = route[-1]
        nxt = np.flatnonzero(tight[cur] & (hops == hops[cur] - 1))
        route.append(int(nxt[0]))
    return DiscretePath(tuple(route))
