"""Acceptance gate: thirteen criteria, each at its stated tolerance and time budget.

Run with ``pytest tests/test_acceptance.py -v`` (a PASS/FAIL line per criterion
is printed in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import time

import numpy as np
import pytest

from metricfix import (
    DiscretePath,
    certify_contractive,
    chain_metric,
    compose,
    fixed_points_exhaustive,
    global_modulus,
    hausdorff_distance,
    hausdorff_via_expansion,
    image_distance_matrix,
    image_path_length,
    is_shrinking,
    local_certificate,
    nash_by_deviation,
    nash_enumerate,
    nash_via_dynamics,
    path_length,
    path_metric,
    periodic_point_search,
    pointwise_certificate,
    reparametrize,
    solve_fixed_point,
    validate_metric,
)
from metricfix.games import best_response_map
from metricfix.generators import (
    chain_scale,
    curve_contraction,
    discoordination_game,
    quadratic_game,
    random_contraction,
    random_space,
    random_table_game,
    random_walk_path,
    two_cluster_swap,
)

RESULTS: dict[int, tuple[bool, str]] = {}


def _subsets(n: int) -> list[tuple[int, ...]]:
    return [c for k in range(1, n + 1) for c in itertools.combinations(range(n), k)]


def c1_hausdorff_duality():
    checked = mismatches = 0
    for n in range(1, 7):
        space = random_space(np.random.default_rng(100 + n), n)
        subs = _subsets(n)
        for A in subs:
            for B in subs:
                checked += 1
                if hausdorff_distance(A, B, space) != hausdorff_via_expansion(A, B, space):
                    mismatches += 1
    rng = np.random.default_rng(1)
    for k in range(1000):
        if k % 100 == 0:
            space = random_space(rng, 30)
        A = rng.choice(30, size=rng.integers(1, 31), replace=False)
        B = rng.choice(30, size=rng.integers(1, 31), replace=False)
        checked += 1
        if hausdorff_distance(A, B, space) != hausdorff_via_expansion(A, B, space):
            mismatches += 1
    return mismatches == 0, f"{checked} pairs, {mismatches} mismatches"


def c2_hausdorff_axioms():
    tol = 1e-12
    triples = violations = 0
    subs = _subsets(5)
    for seed in range(10):
        space = random_space(np.random.default_rng(200 + seed), 5)
        H = image_distance_matrix([frozenset(s) for s in subs], space)
        m = len(subs)
        violations += int(np.count_nonzero(np.abs(np.diag(H)) > tol))
        violations += int(np.count_nonzero(np.abs(H - H.T) > tol))
        off = ~np.eye(m, dtype=bool)
        violations += int(np.count_nonzero(H[off] <= tol))
        # H[a, c] <= H[a, b] + H[b, c] over all ordered triples (a, b, c)
        excess = H[:, None, :] - (H[:, :, None] + H[None, :, :])
        violations += int(np.count_nonzero(excess > tol))
        triples += m**3
    return violations == 0, f"{triples} ordered triples over 10 spaces, {violations} violations"


def c3_chain_metric_bounds():
    bad = []
    for seed in range(100):
        rng = np.random.default_rng(300 + seed)
        n = int(rng.integers(5, 101))
        space = random_space(rng, n)
        r = chain_scale(space) * rng.uniform(0.5, 1.2)
        dc = chain_metric(space, r)
        d = space.dist
        reach = dc.reachable
        if np.any(d[reach] > dc.dist[reach]):
            bad.append((seed, "d > d_c"))
        close = d < r
        if not np.array_equal(dc.dist[close], d[close]):
            bad.append((seed, "d_c != d below r"))
        comp_of = np.full(n, -1)
        for label, row in enumerate(reach):
            if comp_of[label] < 0:
                comp_of[row] = label
        for c in np.unique(comp_of):
            idx = np.flatnonzero(comp_of == c)
            if not validate_metric(dc.dist[np.ix_(idx, idx)]).passed:
                bad.append((seed, "component fails validation"))
    return not bad, f"100 spaces, failures: {bad[:3]}"


def c4_chain_path_coincide():
    diff = 0
    for seed in range(100):
        rng = np.random.default_rng(400 + seed)
        space = random_space(rng, int(rng.integers(5, 61)))
        r = chain_scale(space) * rng.uniform(0.5, 1.5)
        if not np.array_equal(chain_metric(space, r).dist, path_metric(space, r).dist):
            diff += 1
    return diff == 0, f"100 spaces, {diff} differing tables"


def c5_composition_modulus():
    worst = -np.inf
    fails = 0
    for seed in range(200):
        rng = np.random.default_rng(500 + seed)
        space = random_space(rng, int(rng.integers(4, 16)))
        F1 = random_contraction(rng, space, rng.uniform(0.3, 0.9))
        F2 = random_contraction(rng, space, rng.uniform(0.3, 0.9))
        b1 = global_modulus(F1, space).modulus
        b2 = global_modulus(F2, space).modulus
        b = global_modulus(compose(F1, F2), space).modulus
        worst = max(worst, b - b1 * b2)
        fails += b > b1 * b2 + 1e-9
    return fails == 0, f"200 pairs, {fails} violations, max excess {worst:.3g}"


def c6_local_existence():
    empty = slow = gap_bad = 0
    for seed in range(100):
        rng = np.random.default_rng(600 + seed)
        inst = curve_contraction(rng, int(rng.integers(5, 31)), rng.uniform(0.3, 0.8), kind="local")
        F, space, r = inst.F, inst.space, inst.scale
        beta = local_certificate(F, space, r).modulus
        if not fixed_points_exhaustive(F):
            empty += 1
        dc = chain_metric(space, r)
        for x0 in range(len(space)):
            t = solve_fixed_point(F, dc, x0, len(space))
            if t.outcome != "fixed-point":
                slow += 1
                continue
            for n in range(t.steps):
                step = dc.dist[t.iterates[n], t.iterates[n + 1]]
                if t.gaps[n + 1] > beta * step + 1e-12:
                    gap_bad += 1
    ok = empty == 0 and slow == 0 and gap_bad == 0
    return ok, f"100 instances: {empty} without fixed point, {slow} unsolved starts, {gap_bad} gap violations"


def c7_periodic():
    F = two_cluster_swap()
    fixed = fixed_points_exhaustive(F)
    found = periodic_point_search(F, 4)
    ok = fixed == () and found is not None and found[1] == 2
    return ok, f"Fix(F)={fixed}, periodic search -> {found}"


def c8_length_bound():
    fails = 0
    worst = -np.inf
    for seed in range(200):
        rng = np.random.default_rng(800 + seed)
        inst = curve_contraction(rng, int(rng.integers(5, 31)), rng.uniform(0.3, 0.8), kind="pointwise")
        cert = pointwise_certificate(inst.F, inst.space, ("radius", inst.scale))
        wp = random_walk_path(rng, inst.space, inst.scale, int(rng.integers(2, 12)))
        p = DiscretePath(wp)
        lhs = image_path_length(inst.F, p, inst.space)
        rhs = cert.modulus * path_length(inst.space, p)
        worst = max(worst, lhs - rhs)
        fails += not (cert.holds and lhs <= rhs + 1e-9)
    return fails == 0, f"200 pairs, {fails} failures, max excess {worst:.3g}"


def c9_shrinking():
    held = 0
    for seed in range(100):
        rng = np.random.default_rng(900 + seed)
        inst = curve_contraction(rng, int(rng.integers(5, 31)), rng.uniform(0.3, 0.8), kind="pointwise")
        held += is_shrinking(inst.F, path_metric(inst.space, inst.scale)).holds
    return held == 100, f"shrinking under d_eps in {held}/100"


def c10_quadratic_game():
    game = quadratic_game(0.25, 0.5, 0.05)
    eq = [game.profile_labels(p) for p in nash_enumerate(game)]
    unique = eq == [["0.5", "0.5"]]
    analytic = 0.25 / (1 - 0.5)
    br = best_response_map(game)
    n = len(game.profile_space)
    converged = long = 0
    for x in range(n):
        t = nash_via_dynamics(game, game.profile_at(x), br=br)
        converged += t.outcome == "fixed-point"
        long += t.steps > 25
    rep = certify_contractive(game, "a", r=0.06)
    beta = rep.certificate.modulus
    ok = unique and analytic == 0.5 and converged == n and long == 0 and rep.verdict and beta <= 0.5 + 1e-9
    detail = (
        f"equilibria {eq} (analytic {analytic}); {converged}/{n} starts converge, {long} over 25 steps; "
        f"condition (a) {'holds' if rep.verdict else 'fails'} with modulus {beta:.6g}"
    )
    return ok, detail


def c11_discoordination():
    game = discoordination_game()
    eq = nash_enumerate(game)
    beta = global_modulus(best_response_map(game), game.profile_space).modulus
    verdicts = [
        certify_contractive(game, "a", r=1.5).verdict,
        certify_contractive(game, "b", eps=1.5).verdict,
        certify_contractive(game, "c", eps=1.5).verdict,
    ]
    t = nash_via_dynamics(game, (0, 0))
    ok = eq == [] and beta >= 1 and not any(verdicts) and t.outcome == "cycle"
    return ok, f"equilibria {eq}, BR modulus {beta}, verdicts {verdicts}, dynamics {t.outcome} {t.cycle}"


def c12_nash_oracle():
    diff = 0
    for seed in range(50):
        rng = np.random.default_rng(1200 + seed)
        sizes = tuple(int(k) for k in rng.integers(1, 21, size=2))
        game = random_table_game(rng, sizes)
        if [tuple(p) for p in nash_enumerate(game)] != [tuple(p) for p in nash_by_deviation(game)]:
            diff += 1
    return diff == 0, f"50 games, {diff} disagreements"


def c13_reparametrization():
    rel_bad = total_bad = 0
    for seed in range(200):
        rng = np.random.default_rng(1300 + seed)
        space = random_space(rng, 20)
        wp = random_walk_path(rng, space, 2.0, int(rng.integers(2, 15)))
        p = DiscretePath(wp)
        q = reparametrize(space, p)
        total = path_length(space, q)
        total_bad += total != path_length(space, p)
        for t in q.params[1:]:
            sub = path_length(space, q, sub=(0.0, t))
            if abs(sub - t * total) > 1e-12 * total:
                rel_bad += 1
    return rel_bad == 0 and total_bad == 0, f"200 paths, {rel_bad} waypoint misses, {total_bad} total-length changes"


CRITERIA = [
    (1, "Hausdorff dual formulations agree exactly", c1_hausdorff_duality, 10),
    (2, "Hausdorff distance is a metric on subsets", c2_hausdorff_axioms, 60),
    (3, "chain metric dominates d and agrees below r", c3_chain_metric_bounds, 30),
    (4, "chain and path metrics coincide", c4_chain_path_coincide, 30),
    (5, "composition modulus <= product of moduli", c5_composition_modulus, 30),
    (6, "local contractions on chainable spaces have fixed points", c6_local_existence, 60),
    (7, "two-cluster swap has a period-2 point only", c7_periodic, 1),
    (8, "image path length <= beta * path length", c8_length_bound, 30),
    (9, "pointwise contraction is shrinking under d_eps", c9_shrinking, 60),
    (10, "quadratic game regression", c10_quadratic_game, 30),
    (11, "discoordination negative control", c11_discoordination, 1),
    (12, "BR fixed points equal deviation scan", c12_nash_oracle, 30),
    (13, "reparametrization is proportional to length", c13_reparametrization, 5),
]


def run_criterion(number, name, fn, budget):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    in_time = elapsed < budget
    passed = bool(ok) and in_time
    line = f"{detail}; {elapsed:.2f}s (budget {budget}s)"
    RESULTS[number] = (passed, f"[{number:2d}] {'PASS' if passed else 'FAIL'} {name}: {line}")
    return passed, line


@pytest.mark.parametrize("number,name,fn,budget", CRITERIA, ids=[f"criterion_{c[0]:02d}" for c in CRITERIA])
def test_criterion(number, name, fn, budget):
    passed, line = run_criterion(number, name, fn, budget)
    print(RESULTS[number][1])
    assert passed, line


if __name__ == "__main__":
    for c in CRITERIA:
        run_criterion(*c)
        print(RESULTS[c[0]][1], flush=True)
