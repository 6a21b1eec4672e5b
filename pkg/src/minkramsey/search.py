"""Search for a monochromatic copy of a G(q) prefix in a polygonal plane.

The search is a semi-decision procedure driven by sampling:

1. Short segments ``J_i`` along the facet-0 direction either all carry a
   common colour (which already yields a copy) or one of them looks
   monochromatic and seeds the rest.
2. A copy of ``G(q) minus 0`` is inscribed into the current monochromatic
   segment with its limit at the lexicographically greater endpoint.  Either
   a point of its extension segments has the copy's colour (a complete copy)
   or an extension segment looks monochromatic in the other colour and
   becomes the next segment.
3. When the facet of a new segment repeats, the inscribed copy is slid
   along the earlier host segment.  The produced segments sweep one longer
   segment, so segment lengths grow by a fixed amount per cycle until a
   whole copy of ``G(q)`` fits.

A seed that is too short for the target scale is handled by working at the
smallest scale ``q**j`` that fits and climbing: a copy of ``q**j G(q)`` is a
copy of ``q**(j-1) (G(q) minus 0)``.

"Looks monochromatic" is never trusted.  Any sampled point that contradicts
a segment's colour is fed back.  For every segment except the first seed,
the contradiction itself completes a copy.  A refuted seed restarts the
search at doubled density, with the refuting point kept as a probe.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import Inconclusive, IterationLimit, MalformedInput, PreconditionViolated, SegmentTooShort
from .norms import DEFAULT_TOL, Norm, PolygonalNorm, as_polygonal, min_side_length, sum_direction_check
from .oracles import Oracle, dilated
from .progressions import (
    CopyCertificate,
    PlaneSequence,
    extension_segments,
    gp_point,
    verify_copy,
)


@dataclass(frozen=True)
class SearchConfig:
    q: float
    prefix: int = 8
    density: int = 64  # sampled intervals per segment
    density_cap: int = 4096
    tol: float = DEFAULT_TOL
    max_iterations: int = 10_000
    scale: int = 1
    seed: int = 0

    def validate(self, norm: PolygonalNorm) -> None:
        lam = min_side_length(norm)
        bound = lam / (1 + lam)
        if not 0 < self.q < bound:
            raise PreconditionViolated(
                f"q = {self.q!r} is outside (0, lambda/(1+lambda)) = (0, {bound!r}) for this norm"
            )
        if self.prefix < 2:
            raise MalformedInput("prefix length must be at least 2")
        if self.density < 1 or self.density_cap < self.density:
            raise MalformedInput("need 1 <= density <= density_cap")
        if self.scale < 1:
            raise MalformedInput("scale index s must be at least 1")

    def to_json(self) -> dict:
        return asdict(self)


def scale_handling(cfg: SearchConfig, s: int) -> SearchConfig:
    """Config targeting ``q**(s-1) G(q)``; s = 1 is the identity."""
    if s < 1:
        raise MalformedInput("scale index s must be at least 1")
    return replace(cfg, scale=int(s))


def target_scale(cfg: SearchConfig) -> float:
    return cfg.q ** (cfg.scale - 1)


@dataclass(eq=False)
class SegmentRecord:
    a: np.ndarray
    b: np.ndarray
    colour: int
    facet: int
    length: float
    provenance: str
    refute: Callable | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "a": self.a.tolist(),
            "b": self.b.tolist(),
            "colour": int(self.colour),
            "facet": int(self.facet),
            "length": float(self.length),
            "provenance": self.provenance,
        }


@dataclass
class _Copy:
    seq: PlaneSequence
    colour: int


@dataclass
class _Found:
    seq: PlaneSequence
    colour: int
    deviation: float


class _SeedRefuted(Exception):
    def __init__(self, point):
        super().__init__("seed segment refuted")
        self.point = np.asarray(point, dtype=float)


def ordered_endpoints(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """``(lesser, greater)`` in the order (x, then y).

    Coordinates closer than ``tol`` times the Euclidean length count as
    equal, so a vertical segment is ordered by y.
    """
    d = b - a
    eps = tol * float(np.hypot(*d))
    if abs(d[0]) > eps:
        return (a, b) if d[0] > 0 else (b, a)
    return (a, b) if d[1] > 0 else (b, a)


def inscribe_copy(
    norm: Norm,
    seg,
    q: float,
    n: int,
    scale: float = 1.0,
    include_zero: bool = False,
    tol: float = DEFAULT_TOL,
) -> PlaneSequence:
    """Collinear copy of ``scale * G(q)`` (minus 0 unless ``include_zero``).

    Point i sits at N-distance ``scale q^i / (1 - q)`` from the greater
    endpoint of ``seg``, i.e. the copy accumulates there.
    """
    lo, hi = ordered_endpoints(np.asarray(seg.a, float), np.asarray(seg.b, float), tol)
    length = float(norm.norm(hi - lo))
    first = 0 if include_zero else 1
    need = scale * q**first / (1 - q)
    if length < need - tol:
        raise SegmentTooShort(f"segment of N-length {length:g} cannot hold a copy needing {need:g}")
    u = (lo - hi) / length
    idx = np.arange(first, first + n)
    pts = hi[None, :] + (scale * q**idx / (1 - q))[:, None] * u[None, :]
    return PlaneSequence(pts, q, include_zero, scale)


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def trace_digest(events: list) -> str:
    blob = json.dumps(events, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


class MonoSearch:
    """One search run; holds the sampling density, probes and trace."""

    def __init__(self, norm: Norm, oracle: Oracle, cfg: SearchConfig):
        self.norm = as_polygonal(norm)
        cfg.validate(self.norm)
        self.oracle = oracle
        self.cfg = cfg
        self.density = cfg.density
        self.probes: list[np.ndarray] = []
        self.events: list[dict] = []
        self.segments: list[SegmentRecord] = []
        self.iterations = 0
        self.queries = 0
        self.sum_checks = 0

    # -- plumbing -----------------------------------------------------------

    def log(self, kind: str, **data) -> None:
        self.events.append(_plain({"event": kind, **data}))

    def colours(self, pts) -> np.ndarray:
        pts = np.asarray(pts, float).reshape(-1, 2)
        self.queries += len(pts)
        return self.oracle(pts)

    def tick(self) -> None:
        self.iterations += 1
        if self.iterations > self.cfg.max_iterations:
            raise IterationLimit(f"no certificate within {self.cfg.max_iterations} iterations")

    def _on_segment(self, p, a, b) -> bool:
        d = b - a
        L2 = float(d @ d)
        t = float((p - a) @ d) / L2
        if not -1e-12 <= t <= 1 + 1e-12:
            return False
        return float(np.hypot(*(a + t * d - p))) <= self.cfg.tol * max(1.0, math.sqrt(L2))

    def sample_segment(self, a, b, extra=()) -> tuple[np.ndarray, np.ndarray]:
        t = np.linspace(0.0, 1.0, self.density + 1)
        pts = a[None, :] + t[:, None] * (b - a)[None, :]
        probes = [p for p in [*self.probes, *extra] if self._on_segment(p, a, b)]
        if probes:
            pts = np.vstack([pts, np.array(probes)])
        return pts, self.colours(pts)

    def certify(self, pts, scale: float, colour: int, how: str) -> _Found:
        seq = PlaneSequence(np.asarray(pts, float), self.cfg.q, True, scale)
        verdict = verify_copy(self.norm, seq, self.cfg.tol)
        cols = self.colours(seq.points)
        if not verdict.accepted or np.any(cols != colour):
            raise AssertionError(f"internal error: {how} produced an invalid copy")
        self.log("certificate", how=how, scale=scale, colour=colour, points=seq.points,
                 max_deviation=verdict.max_deviation)
        return _Found(seq, int(colour), verdict.max_deviation)

    def record(self, seg: SegmentRecord) -> SegmentRecord:
        self.segments.append(seg)
        self.log("segment", **seg.to_json())
        return seg

    def check_direction_sums(self, copy: PlaneSequence, segs) -> None:
        z = copy.points
        for s in segs:
            k, sg = s.witness.k, s.witness.sigma
            for e in (s.a, s.b, (s.a + s.b) / 2):
                ok = sum_direction_check(self.norm, k, sg * (e - z[0]), sg * (z[0] - z[-1]), self.cfg.tol)
                self.sum_checks += 1
                if not ok:
                    raise AssertionError("internal error: extension point breaks the direction sum check")

    # -- step 1 ---------------------------------------------------------------

    def _refute_seed(self, p):
        raise _SeedRefuted(p)

    def step1(self) -> SegmentRecord | _Found:
        q, n = self.cfg.q, self.cfg.prefix
        a, b = self.norm.side(0, 1)
        x = (a + b) / 2
        f = self.norm.facets[0]
        w = f.w
        tau = min(abs(float((b - x) @ w)), abs(float((a - x) @ w))) / float(w @ w)
        segs, samples = [], []
        for i in range(n):
            c = gp_point(q, i) * x
            h = tau * q**i / 2
            segs.append((c - h * w, c + h * w, 2 * h * f.lam))
            samples.append(self.sample_segment(c - h * w, c + h * w))
        self.log("step1", x=x, tau=tau, density=self.density, segments=[[s[0], s[1]] for s in segs])
        for colour in (0, 1):
            if all(np.any(cols == colour) for _, cols in samples):
                pts = [p[int(np.flatnonzero(cols == colour)[0])] for p, cols in samples]
                return self.certify(pts, 1.0, colour, "step1 common colour")
        for i, (_, cols) in enumerate(samples):
            if np.all(cols == cols[0]):
                lo, hi, length = segs[i]
                return self.record(SegmentRecord(lo, hi, int(cols[0]), 0, length, f"step1:J{i}", self._refute_seed))
        raise AssertionError("unreachable: a binary colouring misses a colour on some J_i only if it is constant there")

    # -- alternation ------------------------------------------------------------

    def extend(self, copy: PlaneSequence, colour: int, probe=None, provenance: str = "extension"):
        """Complete ``copy`` or return the monochromatic extension segment."""
        segs = extension_segments(self.norm, copy, self.cfg.tol)
        self.check_direction_sums(copy, segs)
        for idx, s in enumerate(segs):
            extra = [probe] if probe is not None and idx == 0 else ()
            pts, cols = self.sample_segment(s.a, s.b, extra)
            hit = np.flatnonzero(cols == colour)
            if len(hit):
                return self.certify(np.vstack([pts[hit[0]], copy.points]), copy.scale, colour, "extension point")
        s = segs[0]
        k = s.witness.k
        if len(segs) > 1:
            self.log("vertex-direction", facets=[t.witness.k for t in segs], chosen=k)

        def refute(p, copy=copy, colour=colour):
            return self.certify(np.vstack([p, copy.points]), copy.scale, colour, "refuted extension")

        return self.record(SegmentRecord(s.a, s.b, 1 - colour, k, copy.scale * self.norm.facets[k].lam,
                                         provenance, refute))

    def _inscribe_checked(self, seg: SegmentRecord, n: int, scale: float, include_zero: bool = False):
        seq = inscribe_copy(self.norm, seg, self.cfg.q, n, scale, include_zero, self.cfg.tol)
        cols = self.colours(seq.points)
        bad = np.flatnonzero(cols != seg.colour)
        if len(bad):
            self.log("refuted", provenance=seg.provenance, point=seq.points[bad[0]])
            return seg.refute(seq.points[bad[0]])
        return seq

    def level(self, sigma: float, start) -> _Found:
        q, n = self.cfg.q, self.cfg.prefix
        self.log("level", scale=sigma)
        history: list[SegmentRecord] = []
        current = start
        while True:
            self.tick()
            if isinstance(current, SegmentRecord):
                seg = current
                if seg.length > sigma / (1 - q) + self.cfg.tol:
                    res = self._inscribe_checked(seg, n, sigma, include_zero=True)
                    if isinstance(res, _Found):
                        return res
                    return self.certify(res.points, sigma, seg.colour, "long segment")
                res = self._inscribe_checked(seg, n - 1, sigma)
                if isinstance(res, _Found):
                    return res
                history.append(seg)
                current = _Copy(res, seg.colour)
            res = self.extend(current.seq, current.colour)
            if isinstance(res, _Found):
                return res
            j1 = next((i for i, h in enumerate(history) if h.facet == res.facet), None)
            if j1 is not None:
                res = self.slide(sigma, history[j1], len(history) - j1, res)
                history = []
                if isinstance(res, _Found):
                    return res
            current = res

    # -- sliding ---------------------------------------------------------------

    def _shifted_copy(self, host: SegmentRecord, sigma: float, t: float) -> PlaneSequence:
        base = inscribe_copy(self.norm, host, self.cfg.q, self.cfg.prefix - 1, sigma, tol=self.cfg.tol)
        lo, hi = ordered_endpoints(host.a, host.b, self.cfg.tol)
        u = (hi - lo) / self.norm.norm(hi - lo)
        return PlaneSequence(base.points - t * u, base.q, False, sigma)

    def _chain_geometry(self, host: SegmentRecord, steps: int, sigma: float, t: float):
        copy = self._shifted_copy(host, sigma, t)
        for step in range(steps):
            s = extension_segments(self.norm, copy, self.cfg.tol)[0]
            if step == steps - 1:
                return s
            copy = inscribe_copy(self.norm, s, self.cfg.q, self.cfg.prefix - 1, sigma, tol=self.cfg.tol)

    def _chain_checked(self, host: SegmentRecord, steps: int, sigma: float, t: float, probe) -> _Found:
        copy = self._shifted_copy(host, sigma, t)
        cols = self.colours(copy.points)
        bad = np.flatnonzero(cols != host.colour)
        if len(bad):
            return host.refute(copy.points[bad[0]])
        colour = host.colour
        for step in range(steps):
            last = step == steps - 1
            res = self.extend(copy, colour, probe if last else None, provenance="replay")
            if isinstance(res, _Found):
                return res
            if last:
                break
            res2 = self._inscribe_checked(res, self.cfg.prefix - 1, sigma)
            if isinstance(res2, _Found):
                return res2
            copy, colour = res2, res.colour
        raise AssertionError("internal error: replayed chain did not meet the refuting point")

    def slide(self, sigma: float, host: SegmentRecord, steps: int, produced: SegmentRecord):
        q = self.cfg.q
        t_max = host.length - sigma * q / (1 - q)
        e0 = self._chain_geometry(host, steps, sigma, 0.0)
        e1 = self._chain_geometry(host, steps, sigma, t_max)
        ends = np.array([e0.a, e0.b, e1.a, e1.b])
        d = e0.b - e0.a
        proj = (ends - e0.a) @ d
        a, b = ends[int(np.argmin(proj))], ends[int(np.argmax(proj))]
        k = produced.facet
        mid = (e0.a + e0.b) / 2
        lo, hi = ordered_endpoints(host.a, host.b, self.cfg.tol)
        back = -(hi - lo) / self.norm.norm(hi - lo)

        def refute(p, host=host, steps=steps, sigma=sigma):
            t = float(np.clip(((p - mid) @ back) / (back @ back), 0.0, t_max))
            self.log("replay", host=host.provenance, slide=t, point=p)
            return self._chain_checked(host, steps, sigma, t, np.asarray(p, float))

        union = SegmentRecord(a, b, produced.colour, k, float(self.norm.norm(b - a)), "slide", refute)
        self.log(
            "slide",
            facet=k,
            chain=steps,
            host_length=host.length,
            union_length=union.length,
            expected_length=sigma * self.norm.facets[k].lam + t_max,
            growth=union.length - host.length,
            expected_growth=sigma * (self.norm.facets[k].lam - q / (1 - q)),
        )
        self.record(union)
        pts, cols = self.sample_segment(a, b)
        bad = np.flatnonzero(cols != union.colour)
        if len(bad):
            self.log("refuted", provenance="slide", point=pts[bad[0]])
            return refute(pts[bad[0]])
        return union

    # -- driver ------------------------------------------------------------------

    def climb(self, seed: SegmentRecord) -> _Found:
        q = self.cfg.q
        j = 0
        while q**j * q / (1 - q) >= seed.length - self.cfg.tol * q**j:
            j += 1
        found = self.level(q**j, seed)
        for lvl in range(j - 1, -1, -1):
            copy = PlaneSequence(found.seq.points[:-1], q, False, q**lvl)
            found = self.level(q**lvl, _Copy(copy, found.colour))
        return found

    def run(self) -> _Found:
        while True:
            try:
                res = self.step1()
                return res if isinstance(res, _Found) else self.climb(res)
            except _SeedRefuted as exc:
                self.probes.append(exc.point)
                if 2 * self.density > self.cfg.density_cap:
                    self.log("inconclusive", density=self.density, point=exc.point)
                    raise Inconclusive(
                        f"seed segment refuted at the density cap {self.cfg.density_cap}",
                        point=exc.point.tolist(),
                    ) from None
                self.density *= 2
                self.log("density", density=self.density, point=exc.point)

    def trace(self) -> dict:
        return {
            "config": self.cfg.to_json(),
            "norm": self.norm.to_json(),
            "oracle": self.oracle.name,
            "events": self.events,
            "stats": {
                "iterations": self.iterations,
                "oracle_queries": self.queries,
                "final_density": self.density,
                "direction_sum_checks": self.sum_checks,
            },
        }


@dataclass
class SearchResult:
    certificate: CopyCertificate
    trace: dict
    segments: list[SegmentRecord]


def find_copy(norm: Norm, oracle: Oracle, cfg: SearchConfig) -> SearchResult:
    """Monochromatic copy of ``q**(s-1) * G(q)`` (prefix ``cfg.prefix``).

    A target scale ``s > 1`` is reduced to ``s = 1`` by searching the
    colouring dilated by ``q**(s-1)`` and mapping the copy back.
    """
    poly = as_polygonal(norm)
    factor = target_scale(cfg)
    inner_oracle = oracle if cfg.scale == 1 else dilated(oracle, factor)
    search = MonoSearch(poly, inner_oracle, replace(cfg, scale=1))
    found = search.run()
    trace = search.trace()
    trace["config"] = cfg.to_json()
    trace["oracle"] = oracle.name
    trace_id = trace_digest(trace)
    trace["trace_id"] = trace_id
    seq = PlaneSequence(found.seq.points * factor, cfg.q, True, factor)
    verdict = verify_copy(poly, seq, cfg.tol)
    cert = CopyCertificate(seq, poly, oracle.name, found.colour, verdict.max_deviation, trace_id)
    return SearchResult(cert, trace, search.segments)


def step1_find_mono_segment(norm: Norm, oracle: Oracle, cfg: SearchConfig) -> SegmentRecord | CopyCertificate:
    search = MonoSearch(norm, oracle, cfg)
    res = search.step1()
    if isinstance(res, _Found):
        return CopyCertificate(res.seq, search.norm, oracle.name, res.colour, res.deviation,
                               trace_digest(search.events))
    return res


def alternation_loop(norm: Norm, oracle: Oracle, cfg: SearchConfig, seed: SegmentRecord) -> CopyCertificate:
    """Run the alternation from a given monochromatic segment at unit target scale."""
    search = MonoSearch(norm, oracle, cfg)
    if seed.refute is None:
        seed.refute = search._refute_seed
    try:
        found = search.climb(seed)
    except _SeedRefuted as exc:
        raise Inconclusive("the seed segment is not monochromatic", point=exc.point.tolist()) from None
    return CopyCertificate(found.seq, search.norm, oracle.name, found.colour, found.deviation,
                           trace_digest(search.events))
