import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metricfix import (
    FiniteMetricSpace,
    as_view,
    chain_metric,
    directed_hausdorff,
    hausdorff_distance,
    hausdorff_via_expansion,
    image_distance_matrix,
    set_distance,
)
from metricfix.errors import InputError
from metricfix.generators import random_space

LINE = FiniteMetricSpace.on_line([0, 1, 2, 3])


def naive_hausdorff(A, B, d):
    ab = max(min(d[a][b] for b in B) for a in A)
    ba = max(min(d[b][a] for a in A) for b in B)
    return max(ab, ba)


def test_set_distance_examples():
    assert set_distance(1, {1, 2}, LINE) == 0
    assert set_distance(3, {0, 2}, LINE) == 1
    assert set_distance(0, range(4), LINE) == 0


def test_hausdorff_examples():
    assert hausdorff_distance({1, 3}, {1, 3}, LINE) == 0
    assert hausdorff_distance({0, 1}, {2}, LINE) == 2
    assert directed_hausdorff({0, 1}, {2}, LINE) == 2
    assert directed_hausdorff({2}, {0, 1}, LINE) == 1
    assert hausdorff_distance({0}, {0, 3}, LINE) == 3


def test_expansion_examples():
    assert hausdorff_via_expansion({2}, {2}, LINE) == 0
    assert hausdorff_via_expansion({0, 1}, {2}, LINE) == 2


def test_empty_set_rejected():
    with pytest.raises(InputError):
        hausdorff_distance(set(), {1}, LINE)
    with pytest.raises(InputError):
        set_distance(9, {1}, LINE)


def test_unreachable_under_chain_view():
    space = FiniteMetricSpace.on_line([0, 0.1, 5, 5.1])
    view = chain_metric(space, 0.5)
    assert hausdorff_distance({0}, {2}, view) is None
    assert hausdorff_via_expansion({0}, {2}, view) is None
    assert hausdorff_distance({0}, {1}, view) == pytest.approx(0.1)
    assert as_view(view).name == "chain:0.5"


@pytest.mark.parametrize("seed", range(5))
def test_expansion_equals_minmax_on_random_subsets(seed):
    rng = np.random.default_rng(seed)
    space = random_space(rng, 30)
    for _ in range(20):
        A = rng.choice(30, size=rng.integers(1, 10), replace=False)
        B = rng.choice(30, size=rng.integers(1, 10), replace=False)
        assert hausdorff_distance(A, B, space) == hausdorff_via_expansion(A, B, space)
        assert hausdorff_distance(A, B, space) == naive_hausdorff(A, B, space.dist)


def test_image_matrix_matches_pairwise():
    rng = np.random.default_rng(4)
    space = random_space(rng, 12)
    images = [frozenset(rng.choice(12, size=rng.integers(1, 4), replace=False).tolist()) for _ in range(12)]
    H = image_distance_matrix(images, space)
    for i, j in itertools.product(range(12), repeat=2):
        assert H[i, j] == hausdorff_distance(images[i], images[j], space)
    singles = [frozenset([i]) for i in rng.integers(0, 12, size=8)]
    H1 = image_distance_matrix(singles, space)
    for i, j in itertools.product(range(8), repeat=2):
        assert H1[i, j] == hausdorff_distance(singles[i], singles[j], space)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(0, 10**6), st.data())
def test_hausdorff_metric_properties(n, seed, data):
    space = random_space(np.random.default_rng(seed), n)
    subset = st.sets(st.integers(0, n - 1), min_size=1)
    A, B, C = data.draw(subset), data.draw(subset), data.draw(subset)
    hab = hausdorff_distance(A, B, space)
    assert hab == hausdorff_distance(B, A, space)
    assert (hab == 0) == (A == B)
    assert hausdorff_distance(A, C, space) <= hab + hausdorff_distance(B, C, space) + 1e-12
    # on singletons H reduces to the base metric
    a, b = min(A), min(B)
    assert hausdorff_distance({a}, {b}, space) == space.dist[a, b]
