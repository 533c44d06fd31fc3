"""Set-valued maps on finite metric spaces: composition, contraction
certificates, fixed and periodic points.

Every ratio scanned here is ``H(F(x), F(y)) / m(x, y)`` for distinct points.
Pairs that are unreachable under the metric view have no ratio; they are
left out of every modulus and listed on the certificate instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import config
from .derived import DiscretePath
from .errors import InputError
from .hausdorff import MetricView, as_view, image_distance_matrix
from .metric import FiniteMetricSpace


@dataclass(frozen=True, eq=False)
class SetValuedMap:
    space: FiniteMetricSpace
    images: tuple[frozenset[int], ...]

    def __post_init__(self):
        imgs = tuple(frozenset(int(i) for i in im) for im in self.images)
        n = len(self.space)
        if len(imgs) != n:
            raise InputError(f"map has {len(imgs)} images for a space of {n} points")
        for x, im in enumerate(imgs):
            if not im:
                raise InputError(f"image of {self.space.labels[x]!r} is empty")
            if min(im) < 0 or max(im) >= n:
                raise InputError(f"image of {self.space.labels[x]!r} has an out-of-range index")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def from_function(cls, space: FiniteMetricSpace, fn) -> SetValuedMap:
        """Build from ``fn(index) -> iterable of indices``."""
        return cls(space, tuple(frozenset(fn(i)) for i in range(len(space))))

    @classmethod
    def from_labels(cls, space: FiniteMetricSpace, images: Mapping[str, Iterable[str]]) -> SetValuedMap:
        missing = [lab for lab in space.labels if lab not in images]
        if missing:
            raise InputError(f"no image given for {missing}")
        extra = sorted(set(images) - set(space.labels))
        if extra:
            raise InputError(f"images given for unknown points {extra}")
        return cls(space, tuple(frozenset(space.index(v) for v in images[lab]) for lab in space.labels))

    @classmethod
    def identity(cls, space: FiniteMetricSpace) -> SetValuedMap:
        return cls(space, tuple(frozenset([i]) for i in range(len(space))))

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> frozenset[int]:
        return self.images[x]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetValuedMap):
            return NotImplemented
        return self.space == other.space and self.images == other.images

    @cached_property
    def image_arrays(self) -> list[np.ndarray]:
        return [np.array(sorted(im), dtype=int) for im in self.images]

    @property
    def singleton_valued(self) -> bool:
        return all(len(im) == 1 for im in self.images)

    def label_images(self) -> dict[str, list[str]]:
        labs = self.space.labels
        return {labs[x]: [labs[i] for i in sorted(im)] for x, im in enumerate(self.images)}


def compose(F1: SetValuedMap, F2: SetValuedMap) -> SetValuedMap:
    """``(F2 . F1)(x)``: union of ``F2(y)`` over ``y in F1(x)``."""
    if F1.space != F2.space:
        raise InputError("cannot compose maps over different spaces")
    return SetValuedMap(
        F1.space,
        tuple(frozenset().union(*(F2.images[y] for y in im)) for im in F1.images),
    )


def iterate(F: SetValuedMap, n: int) -> SetValuedMap:
    if n < 1:
        raise InputError("iterate needs n >= 1")
    out = F
    for _ in range(n - 1):
        out = compose(out, F)
    return out


@dataclass(frozen=True)
class ContractionCertificate:
    """Outcome of a contraction scan.

    ``modulus`` is the largest ratio found (the uniform beta). ``per_point``
    carries beta_x for the pointwise and local kinds. ``holds`` requires
    ``modulus < 1 - strict_tol``; ``boundary`` flags moduli within
    ``strict_tol`` of 1.
    """

    kind: str
    modulus: float
    holds: bool
    worst_pair: tuple[int, int, float] | None
    per_point: tuple[float, ...] | None = None
    radius: float | None = None
    neighborhood: str | None = None
    boundary: bool = False
    unevaluable: tuple[tuple[int, int], ...] = ()
    isolated: tuple[int, ...] = ()
    strict_tol: float = config.STRICT_TOL

    @property
    def uniform(self) -> bool:
        """On a finite space a pointwise contraction is automatically uniform."""
        return self.holds

    def to_dict(self, labels: Sequence[str]) -> dict:
        out = {
            "kind": self.kind,
            "holds": self.holds,
            "modulus": _num(self.modulus),
            "boundary": self.boundary,
            "strict_tol": self.strict_tol,
            "worst_pair": None
            if self.worst_pair is None
            else {"x": labels[self.worst_pair[0]], "y": labels[self.worst_pair[1]], "ratio": _num(self.worst_pair[2])},
            "unevaluable_pairs": [[labels[i], labels[j]] for i, j in self.unevaluable],
        }
        if self.per_point is not None:
            out["per_point"] = {labels[i]: _num(b) for i, b in enumerate(self.per_point)}
        if self.radius is not None:
            out["radius"] = self.radius
        if self.neighborhood is not None:
            out["neighborhood"] = self.neighborhood
        if self.kind == "pointwise":
            out["uniform"] = self.uniform
            out["isolated"] = [labels[i] for i in self.isolated]
        return out


def _num(v: float):
    return float(v) if math.isfinite(v) else "inf"


def _verdict(modulus: float, strict_tol: float) -> tuple[bool, bool]:
    return modulus < 1 - strict_tol, abs(modulus - 1) <= strict_tol


def ratio_table(F: SetValuedMap, m) -> tuple[np.ndarray, np.ndarray]:
    """Ratios ``H(F(x),F(y)) / m(x,y)`` with NaN on the diagonal and on
    unreachable pairs, plus the mask of unreachable off-diagonal pairs."""
    view = as_view(m)
    if len(view) != len(F):
        raise InputError("metric view and map have different sizes")
    H = image_distance_matrix(F.image_arrays, view)
    d = view.dist
    n = len(F)
    off = ~np.eye(n, dtype=bool)
    unreachable = off & ~np.isfinite(d)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(off & ~unreachable, H / d, np.nan)
    return ratios, unreachable


def _worst(ratios: np.ndarray, mask: np.ndarray | None = None) -> tuple[int, int, float] | None:
    r = ratios if mask is None else np.where(mask, ratios, np.nan)
    if np.all(np.isnan(r)):
        return None
    flat = int(np.nanargmax(r))
    x, y = divmod(flat, r.shape[1])
    return x, y, float(r[x, y])


def _pairs(mask: np.ndarray) -> tuple[tuple[int, int], ...]:
    return tuple((int(i), int(j)) for i, j in np.argwhere(np.triu(mask | mask.T, 1)))


def global_modulus(F: SetValuedMap, m, strict_tol: float = config.STRICT_TOL) -> ContractionCertificate:
    ratios, unreachable = ratio_table(F, m)
    worst = _worst(ratios)
    beta = 0.0 if worst is None else worst[2]
    holds, boundary = _verdict(beta, strict_tol)
    return ContractionCertificate(
        "global", beta, holds, worst, boundary=boundary, unevaluable=_pairs(unreachable), strict_tol=strict_tol
    )


def is_shrinking(F: SetValuedMap, m, strict_tol: float = config.STRICT_TOL) -> ContractionCertificate:
    """``H(F(x),F(y)) < m(x,y)`` for every distinct reachable pair; no common modulus needed."""
    cert = global_modulus(F, m, strict_tol)
    return ContractionCertificate(
        "shrinking", cert.modulus, cert.holds, cert.worst_pair,
        boundary=cert.boundary, unevaluable=cert.unevaluable, strict_tol=strict_tol,
    )


def parse_neighborhood(spec) -> tuple[str, float]:
    """Accept ``("knn", k)``, ``("radius", rho)`` or the CLI form ``"knn:3"`` / ``"radius:0.5"``."""
    if isinstance(spec, str):
        kind, _, value = spec.partition(":")
        try:
            spec = (kind, float(value))
        except ValueError:
            raise InputError(f"bad neighborhood {spec!r}; use knn:k or radius:x") from None
    kind, value = spec
    if kind == "knn":
        if value < 1 or int(value) != value:
            raise InputError("knn neighborhood needs a positive integer k")
        return kind, int(value)
    if kind == "radius":
        if not value > 0:
            raise InputError("radius neighborhood needs a positive radius")
        return kind, float(value)
    raise InputError(f"unknown neighborhood kind {kind!r}; use knn or radius")


def neighborhood_mask(view: MetricView, spec) -> np.ndarray:
    """``mask[x, y]``: y is in the neighbourhood N(x) (never x itself).

    ``radius`` is an open ball ``0 < m(x,y) < rho``. ``knn`` takes the k
    nearest reachable points, lowest index first among equal distances.
    """
    kind, value = parse_neighborhood(spec)
    d = view.dist
    n = d.shape[0]
    off = ~np.eye(n, dtype=bool)
    if kind == "radius":
        return off & (d < value)
    mask = np.zeros((n, n), dtype=bool)
    for x in range(n):
        row = np.where(off[x] & np.isfinite(d[x]), d[x], np.inf)
        order = np.argsort(row, kind="stable")[: int(value)]
        order = order[np.isfinite(row[order])]
        mask[x, order] = True
    return mask


def _format_neighborhood(spec) -> str:
    kind, value = parse_neighborhood(spec)
    return f"{kind}:{value!r}" if kind == "radius" else f"knn:{value}"


def pointwise_certificate(
    F: SetValuedMap, m, neighborhood, strict_tol: float = config.STRICT_TOL
) -> ContractionCertificate:
    """beta_x = largest ratio against the neighbours of x.

    A point with no neighbours gets beta_x = 0 and is listed as isolated.
    """
    view = as_view(m)
    ratios, unreachable = ratio_table(F, view)
    nbr = neighborhood_mask(view, neighborhood) & ~unreachable
    masked = np.where(nbr, ratios, -np.inf)
    per_point = masked.max(axis=1) if len(F) else np.zeros(0)
    isolated = tuple(int(x) for x in np.flatnonzero(~nbr.any(axis=1)))
    per_point = np.where(np.isneginf(per_point), 0.0, per_point)
    worst = _worst(ratios, nbr)
    beta = float(per_point.max())
    holds, boundary = _verdict(beta, strict_tol)
    return ContractionCertificate(
        "pointwise", beta, holds, worst,
        per_point=tuple(float(b) for b in per_point),
        neighborhood=_format_neighborhood(neighborhood),
        boundary=boundary, unevaluable=_pairs(unreachable), isolated=isolated, strict_tol=strict_tol,
    )


def local_certificate(F: SetValuedMap, m, r: float, strict_tol: float = config.STRICT_TOL) -> ContractionCertificate:
    """beta_x = modulus of F restricted to the closed ball of radius r about x.

    The uniform certificate takes beta = max beta_x over the (finite) cover
    by these balls, with the common radius r.
    """
    if not r > 0:
        raise InputError("local certificate needs r > 0")
    view = as_view(m)
    ratios, unreachable = ratio_table(F, view)
    d = view.dist
    n = len(F)
    per_point = np.zeros(n)
    worst = None
    for x in range(n):
        inside = np.flatnonzero(d[x] <= r)
        if inside.size < 2:
            continue
        sub = ratios[np.ix_(inside, inside)]
        if np.all(np.isnan(sub)):
            continue
        per_point[x] = np.nanmax(sub)
        cand = _worst(sub)
        if worst is None or cand[2] > worst[2]:
            worst = (int(inside[cand[0]]), int(inside[cand[1]]), cand[2])
    beta = float(per_point.max()) if n else 0.0
    holds, boundary = _verdict(beta, strict_tol)
    return ContractionCertificate(
        "uniform-local", beta, holds, worst,
        per_point=tuple(float(b) for b in per_point), radius=float(r),
        boundary=boundary, unevaluable=_pairs(unreachable), strict_tol=strict_tol,
    )


def discrete_slope(F: SetValuedMap, m, h: float) -> np.ndarray:
    """Scale-h stand-in for the lim sup slope: the largest ratio over
    ``0 < m(x, y) <= h``, and 0 for points with no such neighbour.

    Finite spaces have no limit points, so this is never extrapolated to h -> 0.
    """
    if not h > 0:
        raise InputError("slope scale h must be positive")
    view = as_view(m)
    ratios, _ = ratio_table(F, view)
    near = (view.dist <= h) & ~np.isnan(ratios)
    out = np.where(near, ratios, -np.inf).max(axis=1)
    return np.where(np.isneginf(out), 0.0, out)


def image_path_length(F: SetValuedMap, p: DiscretePath, m) -> float | None:
    """Sum of Hausdorff distances between images of consecutive waypoints."""
    view = as_view(m)
    d = view.dist
    arrs = F.image_arrays
    total = 0.0
    for a, b in zip(p.waypoints, p.waypoints[1:]):
        ia, ib = arrs[a], arrs[b]
        h = max(d[np.ix_(ia, ib)].min(axis=1).max(), d[np.ix_(ib, ia)].min(axis=1).max())
        total += float(h)
    return total if math.isfinite(total) else None


def fixed_points_exhaustive(F: SetValuedMap) -> tuple[int, ...]:
    """All x with x in F(x), ascending. An empty tuple means none exist."""
    return tuple(x for x, im in enumerate(F.images) if x in im)


@dataclass(frozen=True)
class SolveTrace:
    """Iterates x_0..x_k with the gap m(x_n, F(x_n)) at each.

    ``outcome`` is ``"fixed-point"``, ``"cycle"`` or ``"max-iter"``; for a
    cycle, ``cycle`` lists the repeating states starting at the revisited one.
    """

    iterates: tuple[int, ...]
    gaps: tuple[float | None, ...]
    outcome: str
    fixed_point: int | None = None
    cycle: tuple[int, ...] = ()
    metric: str = "base"

    @property
    def steps(self) -> int:
        return len(self.iterates) - 1

    def to_dict(self, labels: Sequence[str]) -> dict:
        return {
            "outcome": self.outcome,
            "steps": self.steps,
            "metric": self.metric,
            "fixed_point": None if self.fixed_point is None else labels[self.fixed_point],
            "iterates": [labels[i] for i in self.iterates],
            "gaps": list(self.gaps),
            "cycle": [labels[i] for i in self.cycle],
        }


def solve_fixed_point(F: SetValuedMap, m, x0: int, max_iter: int) -> SolveTrace:
    """Greedy minimizing sequence: step to the point of F(x_n) nearest x_n.

    The nearest image point realizes m(x_n, F(x_n)), so each step satisfies
    ``m(x_n, x_{n+1}) <= H(x_n, F(x_n))``. Ties go to the lowest index.
    Stops on exact membership x_n in F(x_n), on revisiting a state, or after
    ``max_iter`` steps.
    """
    if max_iter < 1:
        raise InputError("max_iter must be >= 1")
    view = as_view(m)
    if not 0 <= x0 < len(F):
        raise InputError("start point out of range")
    d = view.dist
    arrs = F.image_arrays
    iterates = [int(x0)]
    gaps: list[float | None] = []
    seen = {int(x0): 0}
    x = int(x0)
    while True:
        row = d[x, arrs[x]]
        gap = float(row.min())
        gaps.append(gap if math.isfinite(gap) else None)
        if x in F.images[x]:
            return SolveTrace(tuple(iterates), tuple(gaps), "fixed-point", fixed_point=x, metric=view.name)
        if len(iterates) - 1 >= max_iter:
            return SolveTrace(tuple(iterates), tuple(gaps), "max-iter", metric=view.name)
        x = int(arrs[x][int(np.argmin(row))])
        iterates.append(x)
        if x in seen:
            start = seen[x]
            gaps.append(_gap(d, arrs, x))
            return SolveTrace(
                tuple(iterates), tuple(gaps), "cycle",
                cycle=tuple(iterates[start:-1]), metric=view.name,
            )
        seen[x] = len(iterates) - 1


def _gap(d: np.ndarray, arrs: list[np.ndarray], x: int) -> float | None:
    g = float(d[x, arrs[x]].min())
    return g if math.isfinite(g) else None


def periodic_point_search(F: SetValuedMap, max_period: int) -> tuple[int, int] | None:
    """Smallest period l <= max_period with some x in F^(l)(x); returns (x, l).

    The lowest such index is reported. Period 1 agrees with
    :func:`fixed_points_exhaustive`.
    """
    if max_period < 1:
        raise InputError("max_period must be >= 1")
    G = F
    for period in range(1, max_period + 1):
        fixed = fixed_points_exhaustive(G)
        if fixed:
            return fixed[0], period
        G = compose(G, F)
    return None
