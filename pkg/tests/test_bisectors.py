import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minkramsey.bisectors import (
    BisectorSpec,
    bisector_residual,
    count_intersections,
    linearity_test,
    trace_bisector,
)
from minkramsey.errors import MalformedInput, TooFewPoints


def perpendicular_distance(pts, y1, y2):
    """Euclidean distance of each point from the perpendicular bisector line."""
    d = (y2 - y1) / np.hypot(*(y2 - y1))
    return np.abs((pts - (y1 + y2) / 2) @ d)


def test_residual_examples():
    assert bisector_residual(BisectorSpec(2, (-1, 0), (1, 0)), (0, 5)) == pytest.approx(0)
    b3 = BisectorSpec(3, (0, 0), (2, 0))
    for t in (-7.0, 0.0, 3.3):
        assert bisector_residual(b3, (1, t)) == pytest.approx(0, abs=1e-12)
    b = BisectorSpec(2, (0, 0), (3, 4))
    assert bisector_residual(b, (0, 0)) == pytest.approx(-5)


def test_spec_validation():
    with pytest.raises(MalformedInput):
        BisectorSpec(1, (0, 0), (1, 0))
    with pytest.raises(MalformedInput):
        BisectorSpec(np.inf, (0, 0), (1, 0))
    with pytest.raises(MalformedInput):
        BisectorSpec(2, (1, 1), (1, 1))


@settings(max_examples=30, deadline=None)
@given(a=st.tuples(st.floats(-8, 8), st.floats(-8, 8)), b=st.tuples(st.floats(-8, 8), st.floats(-8, 8)))
def test_l2_trace_matches_closed_form(a, b):
    y1, y2 = np.array(a), np.array(b)
    if np.hypot(*(y2 - y1)) < 0.1:
        return
    tr = trace_bisector(BisectorSpec(2, y1, y2))
    if len(tr.points):
        assert perpendicular_distance(tr.points, y1, y2).max() <= 1e-6


def test_l4_diagonal_pair_is_the_antidiagonal_line():
    # swapping coordinates is an l_p isometry exchanging the two sites
    tr = trace_bisector(BisectorSpec(4, (0, 0), (1, 1)))
    assert len(tr.points) > 100
    res = np.abs(tr.spec.residual(tr.points))
    assert res.max() <= 1e-9
    assert np.abs(tr.points.sum(axis=1) - 1).max() <= 1e-9
    assert linearity_test(tr.points).linear


def test_window_missing_bisector():
    tr = trace_bisector(BisectorSpec(3, (0, 0), (2, 0)), window=(5, 6, -1, 1))
    assert len(tr.points) == 0 and tr.pieces() == []


def test_swap_symmetry():
    a = trace_bisector(BisectorSpec(3, (0.3, -1), (2, 1.7)))
    b = trace_bisector(BisectorSpec(3, (2, 1.7), (0.3, -1)))
    assert len(a.points) == len(b.points)
    ka = sorted(map(tuple, np.round(a.points, 8)))
    kb = sorted(map(tuple, np.round(b.points, 8)))
    assert np.allclose(ka, kb, atol=1e-9)


def test_linearity_examples():
    tr2 = trace_bisector(BisectorSpec(2, (0.3, -1), (2, 1.7)))
    assert linearity_test(tr2.points).linear
    tr3 = trace_bisector(BisectorSpec(3, (0.3, -1), (2, 1.7)))
    v = linearity_test(tr3.points)
    assert not v.linear and v.max_deviation > 1e-3
    refl = trace_bisector(BisectorSpec(3, (-1, 0.4), (3, 0.4)))
    assert linearity_test(refl.points).linear
    with pytest.raises(TooFewPoints):
        linearity_test([[0, 0], [1, 1]])


def test_intersection_examples():
    perp = count_intersections(BisectorSpec(2, (-1, 0), (1, 0)), BisectorSpec(2, (0, -1), (0, 1)))
    assert perp.count == 1
    np.testing.assert_allclose(perp.points[0], [0, 0], atol=1e-9)
    par = count_intersections(BisectorSpec(2, (-1, 0), (1, 0)), BisectorSpec(2, (2, 0), (4, 0)))
    assert par.count == 0
    same = count_intersections(BisectorSpec(3, (0, 0), (1, 2)), BisectorSpec(3, (1, 2), (0, 0)))
    assert same.coincident


def test_generic_l3_intersections_are_verified():
    rng = np.random.default_rng(5)
    for _ in range(5):
        y = rng.uniform(-5, 5, (4, 2))
        b1, b2 = BisectorSpec(3, y[0], y[1]), BisectorSpec(3, y[2], y[3])
        res = count_intersections(b1, b2)
        for x in res.points:
            assert abs(b1.residual(x)) <= 1e-9 and abs(b2.residual(x)) <= 1e-9
