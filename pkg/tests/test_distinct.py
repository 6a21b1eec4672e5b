import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minkramsey.distinct import (
    ContractingSequence,
    accumulation_point,
    all_distances_distinct,
    brute_force_distinct_subset,
    distance_classes,
    red_blue_filter,
    select_contracting,
)
from minkramsey.errors import NoAccumulation, TooLarge
from minkramsey.norms import LpNorm, builtin_norm

L2 = LpNorm(2)


def random_contracting(rng, norm, size, ratio=(0.2, 1 / 3)):
    # start far out so the deepest of ~12 points stays well above the tolerance
    y = rng.uniform(-100, 100, 2)
    r = 100.0
    pts = []
    for _ in range(size):
        d = rng.normal(size=2)
        d /= norm.norm(d)
        pts.append(y + r * d)
        r *= rng.uniform(*ratio)
    return ContractingSequence(y, np.array(pts))


def test_geometric_axis_points_qualify():
    pts = np.array([[3.0**-i, 0.0] for i in range(8)])
    cs = select_contracting(pts, L2, limit=(0, 0))
    assert len(cs.pts) == 8 and cs.check(L2)


def test_greedy_on_slow_sequence():
    pts = np.array([[1 - 0.1 * i, 0.0] for i in range(10)])
    cs = select_contracting(pts, L2, limit=(0, 0))
    np.testing.assert_allclose(cs.pts[:, 0], [1.0, 0.3, 0.1])
    assert cs.check(L2)


def test_three_equally_spaced_points():
    with pytest.raises(NoAccumulation):
        select_contracting(np.array([[0, 0], [1, 0], [2, 0]], float), L2)
    with pytest.raises(NoAccumulation):
        select_contracting(np.array([[1, 0], [2, 0], [3, 0], [4, 0]], float), L2)


def test_accumulation_heuristic_finds_cluster():
    pts = np.array([[5, 5], [-4, 2]] + [[1 + 4.0**-i, 1] for i in range(1, 8)])
    y = accumulation_point(pts, L2)
    assert np.hypot(*(y - [1, 1])) < 0.01


def test_distance_classes_chain():
    assert distance_classes(np.array([1.0, 2.0, 1.0 + 5e-10, 3.0]), 1e-9) == [[0, 2], [1], [3]]


def test_generic_set_is_unchanged():
    cs = random_contracting(np.random.default_rng(2), L2, 10)
    res = red_blue_filter(cs, L2)
    assert res.kept_index == list(range(10))
    assert res.blue_count == 0


def test_constructed_tie_drops_one():
    y = np.zeros(2)
    p1 = np.array([1.0, 0.0])
    p2 = np.array([0.2, 0.1])
    r = np.hypot(*(p2 - p1))
    ang = np.arctan2(*(p2 - p1)[::-1])
    p3 = p1 + r * np.array([np.cos(ang + 0.05), np.sin(ang + 0.05)])
    p4 = np.array([0.01, -0.005])
    cs = ContractingSequence(y, np.array([p1, p2, p3, p4]))
    res = red_blue_filter(cs, L2)
    assert res.colours[0] == "blue"
    assert len(res.kept) == 2  # p1 itself and one of p2, p3 leave
    assert all_distances_distinct(res.kept, L2)


def test_single_point():
    cs = ContractingSequence((0, 0), [[1, 0]])
    assert red_blue_filter(cs, L2).kept.tolist() == [[1.0, 0.0]]


def test_brute_force_examples():
    square = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], float)
    assert len(brute_force_distinct_subset(square, L2)) == 2
    line = np.array([[0, 0], [1, 0], [3, 0]], float)
    assert brute_force_distinct_subset(line, L2) == [0, 1, 2]
    tri = np.array([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]])
    assert len(brute_force_distinct_subset(tri, L2)) == 2
    with pytest.raises(TooLarge):
        brute_force_distinct_subset(np.zeros((21, 2)) + np.arange(21)[:, None], L2)


@pytest.mark.parametrize("name", ["square", "hexagon", "l2"])
@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), size=st.integers(1, 9))
def test_filter_output_distinct_and_bounded(name, seed, size):
    norm = L2 if name == "l2" else builtin_norm(name)
    cs = random_contracting(np.random.default_rng(seed), norm, size)
    res = red_blue_filter(cs, norm)
    assert all_distances_distinct(res.kept, norm)
    assert len(res.kept) <= len(brute_force_distinct_subset(cs.pts, norm))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_equal_distance_pairs_share_smaller_index(seed):
    rng = np.random.default_rng(seed)
    norm = builtin_norm("square")
    cs = random_contracting(rng, norm, 10)
    d = norm.norm(cs.pts[:, None] - cs.pts[None, :])
    n = len(cs.pts)
    pairs = [(i, k) for i in range(n) for k in range(i + 1, n)]
    for a, (i, k1) in enumerate(pairs):
        for j, k2 in pairs[a + 1:]:
            if abs(d[i, k1] - d[j, k2]) <= 1e-9:
                assert i == j
