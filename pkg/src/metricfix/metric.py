"""Finite metric spaces: validation, balls, chainability, products."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import config
from .errors import CapacityError, InputError

COMBINERS = ("max", "sum", "euclidean")


class FiniteMetricSpace:
    """Labeled points together with a full pairwise distance table.

    Construction only checks that the table is well formed (square, finite,
    one row per label). Whether the table is actually a metric is the job of
    :func:`validate_metric`, so that broken inputs can still be reported on.
    """

    __slots__ = ("labels", "dist", "_index")

    def __init__(self, labels: Sequence[str], dist, *, cap: int | None = None):
        labels = tuple(labels)
        if not labels:
            raise InputError("a metric space needs at least one point")
        for lab in labels:
            if not isinstance(lab, str):
                raise InputError(f"point labels must be strings, got {lab!r}")
        if len(set(labels)) != len(labels):
            dupes = sorted({x for x in labels if labels.count(x) > 1})
            raise InputError(f"duplicate point labels: {dupes}")
        limit = config.space_cap() if cap is None else cap
        if len(labels) > limit:
            raise CapacityError(f"space has {len(labels)} points, cap is {limit}")
        table = _as_table(dist)
        if table.shape != (len(labels), len(labels)):
            raise InputError(
                f"distance table is {table.shape[0]}x{table.shape[1]} "
                f"but there are {len(labels)} labels"
            )
        table.flags.writeable = False
        self.labels = labels
        self.dist = table
        self._index = {lab: i for i, lab in enumerate(labels)}

    @classmethod
    def from_coords(cls, labels: Sequence[str], coords, metric: str = "euclidean", **kw):
        from scipy.spatial.distance import cdist

        names = {"euclidean": "euclidean", "manhattan": "cityblock", "chebyshev": "chebyshev"}
        if metric not in names:
            raise InputError(f"unknown embedding metric {metric!r}; expected one of {sorted(names)}")
        pts = np.asarray(coords, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] != len(labels):
            raise InputError("embedding coordinates must be one row per point")
        return cls(labels, cdist(pts, pts, metric=names[metric]), **kw)

    @classmethod
    def on_line(cls, values: Sequence[float], labels: Sequence[str] | None = None):
        """Points on the real line with |a - b| distances; labels default to the values."""
        vals = np.asarray(values, dtype=float)
        if labels is None:
            labels = [_fmt(v) for v in vals]
        return cls(labels, np.abs(vals[:, None] - vals[None, :]))

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteMetricSpace):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.dist, other.dist)

    def __hash__(self):
        return hash((self.labels, self.dist.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteMetricSpace(n={len(self)}, labels={list(self.labels[:4])}{'...' if len(self) > 4 else ''})"

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InputError(f"unknown point label {label!r}") from None

    def diameter(self) -> float:
        return float(self.dist.max())

    def subspace(self, members: Iterable[int]) -> FiniteMetricSpace:
        idx = sorted(set(members))
        return FiniteMetricSpace([self.labels[i] for i in idx], self.dist[np.ix_(idx, idx)])


def _fmt(v: float) -> str:
    v = float(v)
    return str(int(v)) if v.is_integer() else repr(v)


def _as_table(dist) -> np.ndarray:
    try:
        table = np.array(dist, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"distance table is not a numeric array: {exc}") from None
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise InputError(f"distance table must be square, got shape {table.shape}")
    if not np.all(np.isfinite(table)):
        raise InputError("distance table contains missing or non-finite entries")
    return table


def point_set(space: FiniteMetricSpace, members: Iterable[int]) -> frozenset[int]:
    """Validate a nonempty set of point indices."""
    out = frozenset(int(i) for i in members)
    if not out:
        raise InputError("point sets must be nonempty")
    bad = [i for i in out if not 0 <= i < len(space)]
    if bad:
        raise InputError(f"point indices out of range: {sorted(bad)}")
    return out


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple[int, ...]
    magnitude: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()
    tol: float = config.TRIANGLE_TOL

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self, labels: Sequence[str] | None = None) -> dict:
        def name(i):
            return labels[i] if labels is not None else i

        return {
            "passed": self.passed,
            "tol": self.tol,
            "violations": [
                {"axiom": v.axiom, "witness": [name(i) for i in v.witness], "magnitude": v.magnitude}
                for v in self.violations
            ],
        }


def validate_metric(space: FiniteMetricSpace | Sequence[Sequence[float]], tol: float = config.TRIANGLE_TOL) -> ValidationReport:
    """Check the metric axioms and report every violation with a witness.

    Triangle violations are reported for ordered triples ``(i, j, k)`` of
    distinct points with ``d[i,k] > d[i,j] + d[j,k] + tol``; the magnitude is
    the excess ``d[i,k] - d[i,j] - d[j,k]``. Symmetry is checked to within
    ``tol``.
    """
    d = space.dist if isinstance(space, FiniteMetricSpace) else _as_table(space)
    n = d.shape[0]
    found: list[Violation] = []

    for i in range(n):
        if d[i, i] != 0:
            found.append(Violation("identity", (i,), float(abs(d[i, i]))))
    off = ~np.eye(n, dtype=bool)
    for i, j in np.argwhere(off & (d < 0)):
        found.append(Violation("nonnegativity", (int(i), int(j)), float(-d[i, j])))
    for i, j in np.argwhere(off & (d == 0)):
        found.append(Violation("positivity", (int(i), int(j)), 0.0))
    asym = np.abs(d - d.T)
    for i, j in np.argwhere(np.triu(asym > tol, 1)):
        found.append(Violation("symmetry", (int(i), int(j)), float(asym[i, j])))

    # excess[j, k] = d[i,k] - (d[i,j] + d[j,k]) for a fixed i
    for i in range(n):
        excess = d[i][None, :] - (d[i][:, None] + d)
        bad = excess > tol
        bad[i, :] = False
        bad[:, i] = False
        np.fill_diagonal(bad, False)
        for j, k in np.argwhere(bad):
            found.append(Violation("triangle", (i, int(j), int(k)), float(excess[j, k])))

    return ValidationReport(tuple(found), tol)


def ball(space, around: Iterable[int], radius: float) -> frozenset[int]:
    """Closed ball ``{z : d(x, z) <= radius for some x in around}``."""
    if radius < 0:
        raise InputError("ball radius must be nonnegative")
    d = _table(space)
    idx = np.fromiter(sorted(set(around)), dtype=int)
    if idx.size == 0:
        raise InputError("ball centre set must be nonempty")
    if idx.min() < 0 or idx.max() >= d.shape[0]:
        raise InputError("ball centre index out of range")
    hit = (d[idx] <= radius).any(axis=0)
    hit[idx] = True
    return frozenset(np.flatnonzero(hit).tolist())


def _table(space) -> np.ndarray:
    return space.dist if hasattr(space, "dist") else np.asarray(space, dtype=float)


def threshold_adjacency(space, scale: float) -> np.ndarray:
    """Boolean adjacency of the graph with an edge wherever ``0 < d < scale``."""
    d = _table(space)
    adj = d < scale
    np.fill_diagonal(adj, False)
    return adj


def components_at_scale(space: FiniteMetricSpace, r: float) -> tuple[tuple[int, ...], ...]:
    """Partition the points into maximal r-chainable classes.

    Classes are sorted by their smallest member; members ascend within a class.
    """
    if not r > 0:
        raise InputError(f"chain scale must be positive, got {r}")
    adj = threshold_adjacency(space, r)
    _, lab = connected_components(csr_matrix(adj), directed=False)
    classes: dict[int, list[int]] = {}
    for i, c in enumerate(lab):
        classes.setdefault(int(c), []).append(i)
    return tuple(sorted((tuple(v) for v in classes.values()), key=lambda c: c[0]))


def is_r_chainable(space: FiniteMetricSpace, r: float) -> tuple[bool, tuple[tuple[int, ...], ...]]:
    """Every pair joined by a chain with gaps strictly below ``r``?

    Returns the verdict and the r-components as witness.
    """
    comps = components_at_scale(space, r)
    return len(comps) == 1, comps


@dataclass(frozen=True)
class ConvexityReport:
    witnesses: dict[tuple[int, int], int | None] = field(default_factory=dict)
    tol: float = 0.0

    @property
    def convex(self) -> bool:
        return bool(self.witnesses) and all(w is not None for w in self.witnesses.values())

    def failing_pairs(self) -> list[tuple[int, int]]:
        return [p for p, w in self.witnesses.items() if w is None]

    def to_dict(self, labels: Sequence[str]) -> dict:
        return {
            "convex": self.convex,
            "tol": self.tol,
            "pairs": [
                {"pair": [labels[i], labels[j]], "midpoint": None if w is None else labels[w]}
                for (i, j), w in self.witnesses.items()
            ],
        }


def check_metric_convexity(space: FiniteMetricSpace, tol: float = config.TRIANGLE_TOL) -> ConvexityReport:
    """For each pair ``i < j``, look for an intermediate point ``z`` with
    ``d(i,z) + d(z,j) == d(i,j)`` up to ``tol``. The most central witness
    (smallest ``|d(i,z) - d(z,j)|``) is reported, lowest index on ties.

    Finite spaces essentially never pass; the report is diagnostic only.
    """
    d = space.dist
    n = len(space)
    out: dict[tuple[int, int], int | None] = {}
    for i, j in itertools.combinations(range(n), 2):
        if d[i, j] <= 0:
            continue
        gap = np.abs(d[i] + d[:, j] - d[i, j])
        gap[[i, j]] = np.inf
        hits = np.flatnonzero(gap <= tol)
        if not hits.size:
            out[(i, j)] = None
            continue
        skew = np.abs(d[i, hits] - d[hits, j])
        out[(i, j)] = int(hits[np.argmin(skew)])
    return ConvexityReport(out, tol)


def product_labels(factors: Sequence[FiniteMetricSpace]) -> list[str]:
    return [",".join(combo) for combo in itertools.product(*(f.labels for f in factors))]


def product_space(
    factors: Sequence[FiniteMetricSpace], combiner: str = "max", *, cap: int | None = None
) -> FiniteMetricSpace:
    """Cartesian product with distances combined by max, sum or euclidean.

    Points are enumerated row-major (first factor varies slowest), which
    matches ``numpy.ravel_multi_index`` over the factor sizes. Labels join
    factor labels with commas.
    """
    if not factors:
        raise InputError("product_space needs at least one factor")
    if combiner not in COMBINERS:
        raise InputError(f"unknown product combiner {combiner!r}; expected one of {COMBINERS}")
    limit = config.profile_cap() if cap is None else cap
    size = int(np.prod([len(f) for f in factors]))
    if size > limit:
        raise CapacityError(f"product space has {size} points, cap is {limit}")

    acc = np.zeros((1, 1))
    for f in factors:
        part = f.dist**2 if combiner == "euclidean" else f.dist
        m, k = acc.shape[0], part.shape[0]
        a = acc[:, None, :, None]
        b = part[None, :, None, :]
        acc = (np.maximum(a, b) if combiner == "max" else a + b).reshape(m * k, m * k)
    if combiner == "euclidean":
        acc = np.sqrt(acc)
    labels = product_labels(factors)
    if len(set(labels)) != len(labels):
        raise InputError("product labels collide; factor labels must not contain commas")
    return FiniteMetricSpace(labels, acc, cap=limit)
