"""Strategic-form games on finite metric strategy spaces.

The best-response correspondence is built as a :class:`SetValuedMap` on the
product of the strategy spaces, so equilibria, dynamics and contraction
certificates all reuse the set-valued machinery.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import config
from .derived import path_metric
from .errors import CapacityError, EvaluationError, InputError
from .expr import Expression
from .metric import COMBINERS, FiniteMetricSpace, components_at_scale, is_r_chainable, product_space
from .setvalued import (
    ContractionCertificate,
    SetValuedMap,
    SolveTrace,
    fixed_points_exhaustive,
    is_shrinking,
    local_certificate,
    pointwise_certificate,
    solve_fixed_point,
)

Profile = tuple[int, ...]


class Game:
    """Players, their strategy spaces and a payoff source.

    Payoffs come either from per-player tables indexed by profile (one axis
    per player) or from formulas over ``x1 .. xn``, in which case strategy
    labels must parse as real numbers.
    """

    def __init__(
        self,
        strategy_spaces: Sequence[FiniteMetricSpace],
        *,
        tables: Sequence | None = None,
        formulas: Sequence[str] | None = None,
        combiner: str = "max",
    ):
        self.strategy_spaces = tuple(strategy_spaces)
        if not self.strategy_spaces:
            raise InputError("a game needs at least one player")
        if combiner not in COMBINERS:
            raise InputError(f"unknown product combiner {combiner!r}; expected one of {COMBINERS}")
        self.combiner = combiner
        if (tables is None) == (formulas is None):
            raise InputError("give exactly one of payoff tables or payoff formulas")
        n = self.n_players
        self.shape = tuple(len(s) for s in self.strategy_spaces)
        size = int(np.prod(self.shape))
        if size > config.profile_cap():
            raise CapacityError(f"game has {size} profiles, cap is {config.profile_cap()}")
        if tables is not None:
            self.mode = "table"
            if len(tables) != n:
                raise InputError(f"need {n} payoff tables, got {len(tables)}")
            arrs = []
            for i, t in enumerate(tables):
                try:
                    a = np.array(t, dtype=float)
                except (TypeError, ValueError):
                    raise InputError(f"payoff table of player {i + 1} is not numeric") from None
                if a.shape != self.shape:
                    raise InputError(f"payoff table of player {i + 1} has shape {a.shape}, expected {self.shape}")
                if not np.all(np.isfinite(a)):
                    raise InputError(f"payoff table of player {i + 1} has non-finite entries")
                a.flags.writeable = False
                arrs.append(a)
            self.tables = tuple(arrs)
            self.formulas = None
        else:
            self.mode = "expression"
            if len(formulas) != n:
                raise InputError(f"need {n} payoff formulas, got {len(formulas)}")
            self.formulas = tuple(Expression(f, n) for f in formulas)
            self.tables = None
            self._values = []
            for i, s in enumerate(self.strategy_spaces):
                try:
                    self._values.append(np.array([float(lab) for lab in s.labels]))
                except ValueError:
                    raise InputError(
                        f"player {i + 1} has non-numeric strategy labels; formulas need numeric labels"
                    ) from None

    @property
    def n_players(self) -> int:
        return len(self.strategy_spaces)

    @cached_property
    def profile_space(self) -> FiniteMetricSpace:
        return product_space(self.strategy_spaces, self.combiner)

    def profile_index(self, profile: Profile) -> int:
        return int(np.ravel_multi_index(tuple(profile), self.shape))

    def profile_at(self, index: int) -> Profile:
        return tuple(int(v) for v in np.unravel_index(index, self.shape))

    def profile_labels(self, profile: Profile) -> list[str]:
        return [s.labels[k] for s, k in zip(self.strategy_spaces, profile)]

    def parse_profile(self, labels: Sequence[str]) -> Profile:
        if len(labels) != self.n_players:
            raise InputError(f"profile needs {self.n_players} strategies, got {len(labels)}")
        return tuple(s.index(lab) for s, lab in zip(self.strategy_spaces, labels))

    def check_profile(self, profile: Profile) -> Profile:
        profile = tuple(int(k) for k in profile)
        if len(profile) != self.n_players or any(not 0 <= k < m for k, m in zip(profile, self.shape)):
            raise InputError(f"invalid profile {profile} for strategy counts {self.shape}")
        return profile

    def payoff_tensor(self, i: int) -> np.ndarray:
        """Payoffs of player ``i`` (0-based) over the whole profile grid."""
        if self.mode == "table":
            return self.tables[i]
        return self._tensors[i]

    @cached_property
    def _tensors(self) -> tuple[np.ndarray, ...]:
        grids = np.meshgrid(*self._values, indexing="ij")
        out = []
        for i, f in enumerate(self.formulas):
            try:
                vals = np.broadcast_to(np.asarray(f(*grids), dtype=float), self.shape).copy()
            except EvaluationError:
                for prof in np.ndindex(*self.shape):
                    evaluate_payoff(self, i, prof)
                raise
            vals.flags.writeable = False
            out.append(vals)
        return tuple(out)


def evaluate_payoff(game: Game, i: int, profile: Profile) -> float:
    """Payoff of player ``i`` (0-based) at ``profile``."""
    profile = game.check_profile(profile)
    if not 0 <= i < game.n_players:
        raise InputError(f"no player {i}")
    if game.mode == "table":
        return float(game.tables[i][profile])
    values = [game._values[j][k] for j, k in enumerate(profile)]
    try:
        return float(game.formulas[i](*values))
    except EvaluationError as exc:
        raise EvaluationError(f"player {i + 1} payoff at {game.profile_labels(profile)}: {exc}") from None


def best_response_i(game: Game, i: int, profile: Profile, tie_tol: float = config.TIE_TOL) -> frozenset[int]:
    """Strategies of player ``i`` within ``tie_tol`` of the best payoff against ``profile``'s opponents."""
    if tie_tol < 0:
        raise InputError("tie_tol must be nonnegative")
    profile = game.check_profile(profile)
    idx = list(profile)
    idx[i] = slice(None)
    u = game.payoff_tensor(i)[tuple(idx)]
    return frozenset(np.flatnonzero(u >= u.max() - tie_tol).tolist())


def best_response_map(game: Game, tie_tol: float = config.TIE_TOL) -> SetValuedMap:
    """BR(x) = BR_1(x) x ... x BR_n(x) as a set-valued map on the profile space."""
    if tie_tol < 0:
        raise InputError("tie_tol must be nonnegative")
    space = game.profile_space
    # best[i][profile] is True when profile's own strategy is a best response for i
    best = []
    for i in range(game.n_players):
        u = game.payoff_tensor(i)
        best.append(u >= u.max(axis=i, keepdims=True) - tie_tol)
    images = []
    for prof in np.ndindex(*game.shape):
        per_player = []
        for i in range(game.n_players):
            idx = list(prof)
            idx[i] = slice(None)
            per_player.append(np.flatnonzero(best[i][tuple(idx)]))
        combos = np.array(list(itertools.product(*per_player))).T
        images.append(frozenset(np.ravel_multi_index(tuple(combos), game.shape).tolist()))
    return SetValuedMap(space, tuple(images))


def is_nash(game: Game, profile: Profile, tie_tol: float = config.TIE_TOL) -> bool:
    """Unilateral-deviation check: no player gains more than ``tie_tol`` by switching."""
    profile = game.check_profile(profile)
    for i in range(game.n_players):
        here = evaluate_payoff(game, i, profile)
        for alt in range(game.shape[i]):
            dev = profile[:i] + (alt,) + profile[i + 1 :]
            if evaluate_payoff(game, i, dev) > here + tie_tol:
                return False
    return True


def nash_by_deviation(game: Game, tie_tol: float = config.TIE_TOL) -> list[Profile]:
    return [p for p in itertools.product(*(range(k) for k in game.shape)) if is_nash(game, p, tie_tol)]


def nash_enumerate(game: Game, tie_tol: float = config.TIE_TOL) -> list[Profile]:
    """Pure equilibria as fixed points of the best-response map, in profile order."""
    br = best_response_map(game, tie_tol)
    return [game.profile_at(x) for x in fixed_points_exhaustive(br)]


def profile_view(game: Game, metric: str | tuple = "base"):
    """Metric view on the profile space: ``"base"`` or ``("path", eps)`` / ``"path:eps"``."""
    if isinstance(metric, str) and metric != "base":
        kind, _, val = metric.partition(":")
        metric = (kind, float(val))
    if metric == "base":
        return game.profile_space
    kind, eps = metric
    if kind != "path":
        raise InputError(f"dynamics metric must be base or path:eps, got {kind!r}")
    return path_metric(game.profile_space, eps)


def nash_via_dynamics(
    game: Game,
    x0: Profile,
    tie_tol: float = config.TIE_TOL,
    max_iter: int = 1000,
    metric: str | tuple = "base",
    br: SetValuedMap | None = None,
) -> SolveTrace:
    """Best-response dynamics: the greedy minimizing sequence on BR.

    A fixed-point outcome is re-checked by the deviation scan before it is
    returned.
    """
    x0 = game.check_profile(x0)
    br = best_response_map(game, tie_tol) if br is None else br
    trace = solve_fixed_point(br, profile_view(game, metric), game.profile_index(x0), max_iter)
    if trace.fixed_point is not None and not is_nash(game, game.profile_at(trace.fixed_point), tie_tol):
        raise RuntimeError("dynamics stopped at a profile that fails the deviation check")
    return trace


FINITE_NOTE = "satisfied (finite)"


@dataclass(frozen=True)
class CorollaryReport:
    condition: str
    space_checks: dict
    certificate: ContractionCertificate
    verdict: bool
    notes: tuple[str, ...] = ()
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self, labels: Sequence[str]) -> dict:
        return {
            "condition": self.condition,
            "verdict": "holds" if self.verdict else "fails",
            "space_checks": self.space_checks,
            "br_certificate": self.certificate.to_dict(labels),
            "notes": list(self.notes),
            "diagnostics": {k: (v.to_dict(labels) if hasattr(v, "to_dict") else v) for k, v in self.diagnostics.items()},
        }


def certify_contractive(
    game: Game,
    condition: str,
    *,
    r: float | None = None,
    eps: float | None = None,
    neighborhood=None,
    tie_tol: float = config.TIE_TOL,
    br: SetValuedMap | None = None,
) -> CorollaryReport:
    """Check one of the three contractive-game conditions on the discretized game.

    (a) profile space r-chainable and BR a uniform local contraction at radius r;
    (b) profile space connected at scale eps and BR a uniform pointwise contraction;
    (c) as (b) with a pointwise contraction; on finite spaces (b) and (c)
        coincide, and the report also records whether BR is shrinking
        under the eps path metric.

    The pointwise neighbourhood defaults to the open ball of radius eps.
    """
    if condition not in ("a", "b", "c"):
        raise InputError(f"condition must be a, b or c, got {condition!r}")
    space = game.profile_space
    br = best_response_map(game, tie_tol) if br is None else br
    notes = []
    diagnostics = {}
    if condition == "a":
        if r is None:
            raise InputError("condition (a) needs the chain scale r")
        chainable, comps = is_r_chainable(space, r)
        checks = {"compact": FINITE_NOTE, "r_chainable": chainable, "r": float(r), "components": len(comps)}
        cert = local_certificate(br, space, r)
        verdict = chainable and cert.holds
    else:
        if eps is None:
            raise InputError(f"condition ({condition}) needs the path scale eps")
        comps = components_at_scale(space, eps)
        connected = len(comps) == 1
        checks = {
            "complete" if condition == "b" else "compact": FINITE_NOTE,
            "rectifiably_path_connected": connected,
            "eps": float(eps),
            "components": len(comps),
        }
        nbhd = ("radius", float(eps)) if neighborhood is None else neighborhood
        cert = pointwise_certificate(br, space, nbhd)
        verdict = connected and cert.holds
        if condition == "c":
            notes.append("on a finite space compactness under d and under d_r coincide, so (b) and (c) check the same thing")
            if connected:
                diagnostics["shrinking_path_view"] = is_shrinking(br, path_metric(space, eps))
        else:
            notes.append("a pointwise contraction on a finite space is uniform; beta = max beta_x")
    return CorollaryReport(condition, checks, cert, verdict, tuple(notes), diagnostics)
