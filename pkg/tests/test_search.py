import json

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from minkramsey.errors import Inconclusive, IterationLimit, PreconditionViolated, SegmentTooShort
from minkramsey.norms import builtin_norm, min_side_length
from minkramsey.oracles import Oracle, parse_oracle
from minkramsey.progressions import CopyCertificate, PlaneSequence, extension_segments, verify_copy
from minkramsey.search import (
    MonoSearch,
    SearchConfig,
    SegmentRecord,
    alternation_loop,
    find_copy,
    inscribe_copy,
    ordered_endpoints,
    scale_handling,
    step1_find_mono_segment,
    target_scale,
)
from oracles import ray_gauge, verify_certificate

SQUARE = builtin_norm("square")


def bound(norm):
    lam = min_side_length(norm)
    return lam / (1 + lam)


@pytest.mark.parametrize("q", [2 / 3, 0.9, 0.0, -0.1])
def test_precondition_guard(q):
    with pytest.raises(PreconditionViolated):
        find_copy(SQUARE, parse_oracle("half-plane"), SearchConfig(q=q))


def test_step1_constant_gives_certificate():
    res = step1_find_mono_segment(SQUARE, parse_oracle("constant"), SearchConfig(q=0.3))
    assert isinstance(res, CopyCertificate)
    assert verify_certificate(res.to_json())[0]


def test_step1_fine_stripes_gives_certificate():
    # bands much narrower than the shortest J_i (N-length q^7 ~ 2e-4)
    o = parse_oracle("stripes:width=1e-5,angle=90")
    res = step1_find_mono_segment(SQUARE, o, SearchConfig(q=0.3))
    assert isinstance(res, CopyCertificate)
    ok, dev, _ = verify_certificate(res.to_json())
    assert ok and dev <= 1e-9


def test_step1_half_plane_gives_segment():
    o = parse_oracle("half-plane:a=1,b=0,c=-1.2")
    res = step1_find_mono_segment(SQUARE, o, SearchConfig(q=0.3))
    assert isinstance(res, SegmentRecord)
    assert res.provenance == "step1:J0" and res.facet == 0 and res.colour == 0
    d = res.b - res.a
    assert abs(d @ SQUARE.facets[0].v) < 1e-12  # parallel to w^0
    assert res.length == pytest.approx(ray_gauge(SQUARE.vertices.tolist(), d))
    assert np.all(o(np.linspace(res.a, res.b, 65)) == res.colour)


def test_inscribe_copy_closed_form():
    seg = SegmentRecord(np.array([0.0, 0.0]), np.array([2.0, 0.0]), 0, 0, 2.0, "test")
    q = 0.3
    seq = inscribe_copy(SQUARE, seg, q, 6)
    assert verify_copy(SQUARE, seq).accepted
    start = seq.points[0]
    for i, z in zip(seq.indices, seq.points):
        assert np.hypot(*(z - start)) == pytest.approx((q - q**i) / (1 - q))
    # limit point at the greater endpoint (2, 0)
    assert np.hypot(*(seq.points[-1] - [2, 0])) == pytest.approx(q**6 / (1 - q))


def test_inscribe_copy_small_q_and_errors():
    seg = SegmentRecord(np.array([0.0, 0.0]), np.array([0.0, 2.0]), 0, 0, 2.0, "test")
    seq = inscribe_copy(SQUARE, seg, 1e-3, 5)
    span = ray_gauge(SQUARE.vertices.tolist(), seq.points[0] - [0, 2])
    assert span == pytest.approx(1e-3 / (1 - 1e-3))
    with pytest.raises(SegmentTooShort):
        inscribe_copy(SQUARE, seg, 0.5, 5, scale=3.0)


def test_lexicographic_tie_breaks_on_y():
    a, b = np.array([1.0, 3.0]), np.array([1.0, -1.0])
    lo, hi = ordered_endpoints(a, b)
    assert hi[1] == 3.0
    lo, hi = ordered_endpoints(np.array([2.0, 0.0]), np.array([1.0, 5.0]))
    assert hi[0] == 2.0


def test_alternation_half_plane():
    o = parse_oracle("half-plane")
    seed = SegmentRecord(np.array([-1.0, 0.5]), np.array([1.0, 0.5]), 1, 1, 2.0, "given")
    cert = alternation_loop(SQUARE, o, SearchConfig(q=0.3), seed)
    ok, dev, _ = verify_certificate(cert.to_json())
    assert ok and cert.colour == 1


def test_checkerboard_hexagon_example():
    h = builtin_norm("hexagon")
    res = find_copy(h, parse_oracle("checkerboard:cell=10"), SearchConfig(q=0.2))
    assert verify_certificate(res.certificate.to_json())[0]


def test_scale_handling():
    cfg = SearchConfig(q=0.5)
    assert scale_handling(cfg, 1) == cfg
    cfg2 = scale_handling(cfg, 2)
    assert target_scale(cfg2) == 0.5
    res = find_copy(SQUARE, parse_oracle("checkerboard:cell=0.7"), cfg2)
    cert = res.certificate.to_json()
    assert cert["scale"] == 0.5
    assert verify_certificate(cert)[0]
    # inverse dilation gives a unit-scale copy
    unit = PlaneSequence(np.array(cert["points"]) / 0.5, 0.5, True, 1.0)
    assert verify_copy(SQUARE, unit).accepted


def test_iteration_limit():
    o = parse_oracle("half-plane:a=1,b=0,c=-1.2")
    with pytest.raises(IterationLimit):
        find_copy(SQUARE, o, SearchConfig(q=0.3, max_iterations=0))


def _planted(base: Oracle, point, radius=1e-12) -> Oracle:
    point = np.asarray(point, float)

    def fn(p):
        near = np.hypot(*(p - point).T) < radius
        return np.where(near, 1 - base(p), base(p))

    return Oracle(base.name + "+planted", fn)


def test_seed_refutation_doubles_density():
    base = parse_oracle("half-plane:a=1,b=0,c=-1.2")
    first = MonoSearch(SQUARE, base, SearchConfig(q=0.3))
    first.run()
    seed = first.segments[0]
    sigma = next(e["scale"] for e in first.events if e["event"] == "level")
    trap = inscribe_copy(SQUARE, seed, 0.3, 7, sigma).points[2]
    o = _planted(base, trap)
    res = find_copy(SQUARE, o, SearchConfig(q=0.3))
    kinds = [e["event"] for e in res.trace["events"]]
    assert "density" in kinds
    assert res.trace["stats"]["final_density"] == 128
    assert verify_certificate(res.certificate.to_json(), colour_of=lambda p: int(o(p)))[0]
    with pytest.raises(Inconclusive) as info:
        find_copy(SQUARE, o, SearchConfig(q=0.3, density_cap=64))
    assert np.allclose(info.value.point, trap)


def _chain(norm, host, q, n):
    facets, seg = [host.facet], host
    while True:
        cp = inscribe_copy(norm, seg, q, n - 1)
        e = extension_segments(norm, cp)[0]
        k = e.witness.k
        if k in facets:
            return len(facets) - facets.index(k), SegmentRecord(e.a, e.b, 0, k, norm.facets[k].lam, "chain")
        facets.append(k)
        seg = SegmentRecord(e.a, e.b, 0, k, norm.facets[k].lam, "chain")


@pytest.mark.parametrize("name", ["square", "hexagon", "octagon", "decagon"])
def test_slide_growth_law(name):
    n = builtin_norm(name)
    q = 0.6 * bound(n)
    a, b = n.side(0, 1)
    host = SegmentRecord(3 * a, 3 * a + 1.5 * (b - a), 0, 0, 1.5 * n.facets[0].lam, "host")
    steps, produced = _chain(n, host, q, 8)
    s = MonoSearch(n, parse_oracle("constant"), SearchConfig(q=q))
    union = s.slide(1.0, host, steps, produced)
    ev = next(e for e in s.events if e["event"] == "slide")
    lam = n.facets[produced.facet].lam
    assert union.length == pytest.approx(lam + host.length - q / (1 - q), abs=1e-9)
    assert ev["growth"] == pytest.approx(lam - q / (1 - q), abs=1e-9)
    # a second slide on the union grows by the same amount
    union2 = s.slide(1.0, union, steps, _chain(n, union, q, 8)[1])
    assert union2.length - union.length == pytest.approx(lam - q / (1 - q), abs=1e-9)


@pytest.mark.parametrize("name", ["square", "hexagon", "octagon"])
@pytest.mark.parametrize("where", [0.0, 0.3, 0.5, 1.0])
def test_union_refutation_certifies(name, where):
    n = builtin_norm(name)
    q = 0.6 * bound(n)
    a, b = n.side(0, 1)
    host = SegmentRecord(3 * a, 3 * a + 1.5 * (b - a), 0, 0, 1.5 * n.facets[0].lam, "host")
    steps, produced = _chain(n, host, q, 8)
    probe = MonoSearch(n, parse_oracle("constant"), SearchConfig(q=q))
    union = probe.slide(1.0, host, steps, produced)
    p = union.a + where * (union.b - union.a)
    o = _planted(parse_oracle("constant"), p, radius=1e-9)
    s = MonoSearch(n, o, SearchConfig(q=q))
    found = s.slide(1.0, host, steps, produced)
    if isinstance(found, SegmentRecord):  # the planted point fell between samples
        found = found.refute(p)
    seq = found.seq
    cert = CopyCertificate(seq, n, o.name, found.colour, 0.0).to_json()
    assert verify_certificate(cert, colour_of=lambda x: int(o(x)))[0]


ORACLE_FAMILIES = st.one_of(
    st.builds(lambda w, a: f"stripes:width={w:.5g},angle={a:.4g}", st.floats(1e-4, 3), st.floats(0, 180)),
    st.builds(lambda c: f"checkerboard:cell={c:.5g}", st.floats(1e-4, 3)),
    st.builds(lambda a, b, c: f"half-plane:a={a:.3g},b={b:.3g},c={c:.3g}",
              st.floats(-1, 1), st.floats(-1, 1), st.floats(-0.5, 0.5)),
)


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(
    name=st.sampled_from(["square", "hexagon", "octagon", "decagon", "rectangle"]),
    frac=st.floats(0.05, 0.95),
    spec=ORACLE_FAMILIES,
    prefix=st.integers(2, 10),
)
def test_soundness_and_segment_validity(name, frac, spec, prefix):
    n = builtin_norm(name)
    o = parse_oracle(spec, n)
    cfg = SearchConfig(q=frac * bound(n), prefix=prefix)
    try:
        res = find_copy(n, o, cfg)
    except Inconclusive:
        return
    ok, dev, why = verify_certificate(res.certificate.to_json())
    assert ok, why
    assert len(res.certificate.sequence.points) == prefix
    density = res.trace["stats"]["final_density"]
    for seg in res.segments:
        if seg.provenance.startswith("step1") and density != cfg.density:
            continue
        cols = o(np.linspace(seg.a, seg.b, density + 1))
        assert np.all(cols == seg.colour)


def test_direction_sum_checks_run():
    res = find_copy(builtin_norm("octagon"), parse_oracle("stripes:width=1"), SearchConfig(q=0.3))
    assert res.trace["stats"]["direction_sum_checks"] > 0


def test_trace_is_deterministic():
    def run():
        res = find_copy(builtin_norm("hexagon"), parse_oracle("checkerboard:cell=0.5"), SearchConfig(q=0.3, seed=4))
        return json.dumps(res.trace, sort_keys=True), json.dumps(res.certificate.to_json(), sort_keys=True)

    assert run() == run()
