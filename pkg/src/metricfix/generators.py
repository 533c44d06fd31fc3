"""Seeded instance generators for property tests and the ``gen`` CLI verb.

Every generator takes a ``numpy.random.Generator`` so runs are reproducible
from a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree

from .games import Game
from .metric import FiniteMetricSpace
from .setvalued import SetValuedMap, local_certificate, pointwise_certificate


def _labels(n: int, prefix: str = "p") -> list[str]:
    return [f"{prefix}{i}" for i in range(n)]


def random_space(rng: np.random.Generator, n: int, dim: int = 2, prefix: str = "p") -> FiniteMetricSpace:
    """``n`` uniform points in the unit cube with Euclidean distances."""
    return FiniteMetricSpace.from_coords(_labels(n, prefix), rng.random((n, dim)))


def random_table_space(rng: np.random.Generator, n: int) -> FiniteMetricSpace:
    """Random symmetric table with entries in (0, 1]; usually not a metric."""
    d = 1.0 - rng.random((n, n))
    d = np.triu(d, 1)
    return FiniteMetricSpace(_labels(n), d + d.T)


def connectivity_scale(space: FiniteMetricSpace) -> float:
    """Longest edge of a minimum spanning tree: the space is r-chainable iff r exceeds it."""
    if len(space) == 1:
        return 0.0
    mst = minimum_spanning_tree(space.dist)
    return float(mst.max())


def chain_scale(space: FiniteMetricSpace, margin: float = 0.05) -> float:
    """A scale strictly above the connectivity threshold."""
    base = connectivity_scale(space)
    return base * (1 + margin) if base > 0 else 1.0


@dataclass(frozen=True)
class CurveInstance:
    """Points sampled along a planar polyline, with a map built in arc length."""

    space: FiniteMetricSpace
    arclength: np.ndarray
    F: SetValuedMap
    scale: float


def curve_space(rng: np.random.Generator, n: int, max_turn: float = math.pi / 4, segments: int = 3):
    """``n`` points along a random polyline; returns the space and arc-length positions."""
    gaps = rng.uniform(0.2, 1.0, size=n - 1)
    s = np.concatenate(([0.0], np.cumsum(gaps)))
    total = s[-1] if n > 1 else 1.0
    knots = np.sort(rng.uniform(0, total, size=segments - 1))
    turns = rng.uniform(-max_turn, max_turn, size=segments - 1)
    heading = rng.uniform(0, 2 * math.pi)
    coords = np.zeros((n, 2))
    pos = np.zeros(2)
    last = 0.0
    k = 0
    for i, si in enumerate(s):
        while k < len(knots) and knots[k] <= si:
            pos = pos + (knots[k] - last) * np.array([math.cos(heading), math.sin(heading)])
            last = knots[k]
            heading += turns[k]
            k += 1
        coords[i] = pos + (si - last) * np.array([math.cos(heading), math.sin(heading)])
    return FiniteMetricSpace.from_coords(_labels(n), coords), s


def monotone_lipschitz(rng: np.random.Generator, s: np.ndarray, beta: float) -> np.ndarray:
    """Random index map f with s[f] monotone and |s[f(i)] - s[f(i-1)]| <= beta * (s[i] - s[i-1])."""
    n = len(s)
    decreasing = rng.random() < 0.5
    f = np.empty(n, dtype=int)
    f[0] = rng.integers(n)
    for i in range(1, n):
        budget = beta * (s[i] - s[i - 1])
        prev = f[i - 1]
        step = s - s[prev]
        ok = (-budget <= step) & (step <= 0) if decreasing else (0 <= step) & (step <= budget)
        cands = np.flatnonzero(ok)
        f[i] = rng.choice(cands)
    return f


def curve_contraction(
    rng: np.random.Generator,
    n: int,
    beta: float = 0.7,
    *,
    kind: str = "local",
    beta_cap: float = 0.9,
    set_valued: bool = True,
    attempts: int = 200,
) -> CurveInstance:
    """A chainable space with an interval-valued map contracting along the curve.

    The map is Lipschitz with constant ``beta`` in arc length. Corners of the
    polyline can push the ratio in the ambient metric up, so candidates are
    certified (``kind`` = ``"local"`` or ``"pointwise"`` at the chain scale)
    and resampled until the certified modulus is at most ``beta_cap``.
    Folded curves make many of these contract locally but not globally.
    """
    for _ in range(attempts):
        space, s = curve_space(rng, n)
        lo = monotone_lipschitz(rng, s, beta)
        hi = monotone_lipschitz(rng, s, beta) if set_valued else lo
        if set_valued and (np.diff(lo) * np.diff(hi) < 0).any():
            hi = lo
        a, b = np.minimum(lo, hi), np.maximum(lo, hi)
        F = SetValuedMap(space, tuple(frozenset(range(x, y + 1)) for x, y in zip(a, b)))
        r = chain_scale(space)
        if kind == "local":
            cert = local_certificate(F, space, r)
        else:
            cert = pointwise_certificate(F, space, ("radius", r))
        if cert.holds and cert.modulus <= beta_cap:
            return CurveInstance(space, s, F, r)
    raise RuntimeError("could not generate a certified contraction; loosen beta or beta_cap")


def random_contraction(rng: np.random.Generator, space: FiniteMetricSpace, beta: float, attempts: int = 50) -> SetValuedMap:
    """Singleton-valued map with global modulus at most ``beta``.

    Points are assigned in random order, each to a random target that keeps
    every ratio so far within ``beta``. A dead end restarts; the constant map
    is the fallback.
    """
    d = space.dist
    n = len(space)
    for _ in range(attempts):
        order = rng.permutation(n)
        f = np.full(n, -1)
        for pos, x in enumerate(order):
            done = order[:pos]
            if pos == 0:
                f[x] = rng.integers(n)
                continue
            ok = np.all(d[:, f[done]] <= beta * d[x, done][None, :], axis=1)
            cands = np.flatnonzero(ok)
            if cands.size == 0:
                break
            f[x] = rng.choice(cands)
        else:
            return SetValuedMap(space, tuple(frozenset([int(v)]) for v in f))
    c = int(rng.integers(n))
    return SetValuedMap(space, tuple(frozenset([c]) for _ in range(n)))


def random_set_valued_map(rng: np.random.Generator, space: FiniteMetricSpace, max_size: int = 3) -> SetValuedMap:
    n = len(space)
    return SetValuedMap(
        space,
        tuple(frozenset(rng.choice(n, size=rng.integers(1, min(max_size, n) + 1), replace=False).tolist()) for _ in range(n)),
    )


def random_walk_path(rng: np.random.Generator, space: FiniteMetricSpace, scale: float, length: int) -> tuple[int, ...]:
    """Waypoints of a random walk whose steps have base distance below ``scale``."""
    d = space.dist
    x = int(rng.integers(len(space)))
    out = [x]
    for _ in range(length - 1):
        nbrs = np.flatnonzero((d[x] < scale) & (np.arange(len(space)) != x))
        if nbrs.size == 0:
            break
        x = int(rng.choice(nbrs))
        out.append(x)
    return tuple(out)


def random_table_game(rng: np.random.Generator, sizes: tuple[int, ...], payoff_levels: int = 5) -> Game:
    """Integer payoffs in ``[0, payoff_levels)`` so that ties are common."""
    spaces = [random_space(rng, k, dim=1, prefix=f"s{i + 1}_") for i, k in enumerate(sizes)]
    tables = [rng.integers(0, payoff_levels, size=sizes).astype(float) for _ in sizes]
    return Game(spaces, tables=tables)


def grid_space(step: float, lo: float = 0.0, hi: float = 1.0) -> FiniteMetricSpace:
    """Evenly spaced points on [lo, hi]; labels are the rounded values (``0.05``, ``0.5`` ...)."""
    k = int(round((hi - lo) / step))
    digits = max(0, -int(math.floor(math.log10(step))) + 1)
    values = [float(f"{lo + i * step:.{digits}f}") for i in range(k + 1)]
    return FiniteMetricSpace.on_line(values, [f"{v:.{digits}f}".rstrip("0").rstrip(".") or "0" for v in values])


def quadratic_game(a: float = 0.25, b: float = 0.5, step: float = 0.05, combiner: str = "max") -> Game:
    """Two players with u_i = -(x_i - a - b x_{-i})^2 on a uniform grid of [0, 1]."""
    grid = grid_space(step)
    return Game(
        [grid, grid],
        formulas=[f"-(x1 - {a!r} - {b!r}*x2)^2", f"-(x2 - {a!r} - {b!r}*x1)^2"],
        combiner=combiner,
    )


def discoordination_game() -> Game:
    """Player 1 wants to match, player 2 wants to mismatch; no pure equilibrium."""
    two = FiniteMetricSpace(["0", "1"], [[0.0, 1.0], [1.0, 0.0]])
    match = [[1.0, 0.0], [0.0, 1.0]]
    mismatch = [[0.0, 1.0], [1.0, 0.0]]
    return Game([two, two], tables=[match, mismatch])


def two_cluster_swap(separation: float = 10.0) -> SetValuedMap:
    """Two three-point clusters; F contracts within clusters and swaps them.

    Positions 0, 1, 3 in each cluster; the in-cluster rule 3 -> 1 -> 0 -> 0
    has modulus 1/2. F itself has no fixed point, F∘F fixes the cluster origins.
    """
    offsets = [0.0, 1.0, 3.0]
    values = offsets + [separation + o for o in offsets]
    labels = ["a0", "a1", "a3", "b0", "b1", "b3"]
    space = FiniteMetricSpace.on_line(values, labels)
    inner = {0: 0, 1: 0, 2: 1}
    images = [frozenset([3 + inner[i]]) for i in range(3)] + [frozenset([inner[i]]) for i in range(3)]
    return SetValuedMap(space, tuple(images))
