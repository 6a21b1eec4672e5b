"""Colouring the plane by nested N-balls around the origin.

Radii start at 1 and grow by the N-distance of an anchor point of the
(unbounded) set M that is more than twice the current radius away from the
first anchor.  Ring ``i`` (between radii ``r_{i-1}`` and ``r_i``) gets colour
``psi(i)``, a schedule that takes every value infinitely often.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator

import numpy as np

from .errors import CorrespondenceMismatch, OutOfRange, SamplerExhausted
from .norms import DEFAULT_TOL, Norm, as_points


def psi(j: int) -> int:
    """Triangular schedule 1, 1,2, 1,2,3, 1,2,3,4, ..."""
    if j < 1:
        raise ValueError("psi is defined on positive integers")
    k = (math.isqrt(8 * j - 7) + 1) // 2  # largest k with k(k-1)/2 < j
    return j - k * (k - 1) // 2


class PointSampler:
    """Lazily enumerates a point set and answers "a point farther than R".

    ``points`` may be an infinite iterator; at most ``max_scan`` points are
    ever looked at, after which the set counts as bounded.
    """

    def __init__(self, points: Iterable, name: str = "custom", max_scan: int = 10_000):
        self.name = name
        self.max_scan = max_scan
        self._source: Iterator = iter(points)
        self._seen: list[np.ndarray] = []

    def _get(self, i: int) -> np.ndarray | None:
        while len(self._seen) <= i and len(self._seen) < self.max_scan:
            try:
                self._seen.append(as_points(next(self._source)))
            except StopIteration:
                self.max_scan = len(self._seen)
        return self._seen[i] if i < len(self._seen) else None

    def first(self) -> np.ndarray:
        p = self._get(0)
        if p is None:
            raise SamplerExhausted("empty point set")
        return p

    def beyond(self, norm: Norm, centre, radius: float) -> np.ndarray:
        """First enumerated point at N-distance > radius from centre."""
        for i in itertools.count():
            p = self._get(i)
            if p is None:
                raise SamplerExhausted(f"no point of {self.name} found beyond N-radius {radius:g}")
            if norm.norm(p - centre) > radius:
                return p


def powers_of_two() -> PointSampler:
    """M = {0, 1, 2, 4, 8, ...} on the x-axis."""
    pts = itertools.chain([(0.0, 0.0)], ((float(2**i), 0.0) for i in itertools.count()))
    return PointSampler(pts, name="powers-of-two")


def geometric_set(q: float) -> PointSampler:
    """The bounded set G(q) on the x-axis (first 10^4 terms)."""
    pts = (((1 - q**i) / (1 - q), 0.0) for i in itertools.count())
    return PointSampler(pts, name=f"geometric({q:g})")


SAMPLERS: dict[str, Callable[..., PointSampler]] = {
    "powers-of-two": powers_of_two,
    "geometric": geometric_set,
}


@dataclass(frozen=True, eq=False)
class RingColouring:
    norm: Norm
    radii: tuple[float, ...]
    anchors: tuple[np.ndarray, ...]
    sampler: PointSampler = field(repr=False)

    def extend(self, rings: int = 1) -> "RingColouring":
        radii, anchors = list(self.radii), list(self.anchors)
        x0 = anchors[0]
        for _ in range(rings):
            r = radii[-1]
            x = self.sampler.beyond(self.norm, x0, 2 * r)
            anchors.append(x)
            radii.append(r + self.norm.norm(x - x0))
        return replace(self, radii=tuple(radii), anchors=tuple(anchors))

    def covering(self, radius: float) -> "RingColouring":
        rc = self
        while rc.radii[-1] < radius:
            rc = rc.extend()
        return rc

    def ring_of(self, p) -> int:
        r = self.norm.norm(as_points(p))
        if r > self.radii[-1]:
            raise OutOfRange(f"N-norm {r:g} exceeds the last radius {self.radii[-1]:g}")
        return bisect.bisect_left(self.radii, r) + 1

    def colour(self, p) -> int:
        return psi(self.ring_of(p))

    def to_json(self) -> dict:
        return {
            "norm": self.norm.to_json(),
            "set": self.sampler.name,
            "radii": list(self.radii),
            "anchors": [a.tolist() for a in self.anchors],
            "colours": [psi(i) for i in range(1, len(self.radii) + 1)],
        }


def build_ring_colouring(norm: Norm, sampler: PointSampler, rings: int) -> RingColouring:
    base = RingColouring(norm=norm, radii=(1.0,), anchors=(sampler.first(),), sampler=sampler)
    return base.extend(rings - 1) if rings > 1 else base


def colour(rc: RingColouring, p) -> int:
    return rc.colour(p)


class RingParity:
    """2-colouring by the parity of the ring colour; grows rings on demand."""

    def __init__(self, norm: Norm, sampler: PointSampler | None = None):
        self._rc = build_ring_colouring(norm, sampler or powers_of_two(), 1)

    def __call__(self, pts) -> np.ndarray:
        pts = as_points(pts)
        r = np.atleast_1d(self._rc.norm.norm(pts))
        self._rc = self._rc.covering(float(r.max()))
        radii = np.asarray(self._rc.radii)
        ring = np.searchsorted(radii, r, side="left") + 1
        out = np.array([psi(int(i)) % 2 for i in ring], dtype=int)
        return out.reshape(pts.shape[:-1])


@dataclass
class RingReport:
    start_ring: int
    rings: list[int]
    predicted: dict[int, int]
    violations: list[int]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "start_ring": self.start_ring,
            "rings": self.rings,
            "predicted": {str(k): v for k, v in self.predicted.items()},
            "violations": self.violations,
            "rings_met": sorted(set(self.rings)),
        }


def check_copy_meets_rings(rc: RingColouring, copy, tol: float = DEFAULT_TOL) -> RingReport:
    """Locate each point of a copy of the anchors in the rings.

    With ``y_0`` in ball ``i``, every ``y_{i+j}`` must land in ring
    ``i + j + 1``; indices whose point lands elsewhere are reported as
    violations.
    """
    ys = as_points(copy).reshape(-1, 2)
    xs = np.array(rc.anchors)
    if len(ys) != len(xs):
        raise CorrespondenceMismatch(f"{len(ys)} copy points for {len(xs)} anchors")
    n = rc.norm
    want = n.norm(xs - xs[0])
    got = n.norm(ys - ys[0])
    if np.max(np.abs(want - got)) > tol * max(1.0, float(want.max())):
        raise CorrespondenceMismatch("copy does not preserve distances to the first anchor")
    rings = [rc.ring_of(y) if n.norm(y) <= rc.radii[-1] else len(rc.radii) + 1 for y in ys]
    i = rings[0]
    predicted, violations = {}, []
    for idx in range(i, len(ys)):
        predicted[idx] = idx + 1
        if rings[idx] != idx + 1:
            violations.append(idx)
    return RingReport(start_ring=i, rings=rings, predicted=predicted, violations=violations)
