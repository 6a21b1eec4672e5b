"""Finite prefixes of G(q) = {0, 1, 1 + q, 1 + q + q^2, ...} and their copies.

Index ``i`` of G(q) sits at ``(1 - q**i) / (1 - q)``; index 0 is the origin.
A copy of G(q) minus 0 of length n uses indices 1..n, and with
``include_zero`` the sequence starts at index 0 instead.  Every routine
accepts a ``scale`` so that copies of ``scale * G(q)`` go through the
same code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LengthMismatch, MalformedInput, NoWitness
from .norms import DEFAULT_TOL, Norm, PolygonalNorm, as_points, norm_from_json


def gp_point(q: float, i: int) -> float:
    return (1.0 - q**i) / (1.0 - q)


def gp_distance(q: float, i: int, j: int, scale: float = 1.0) -> float:
    """Distance between indices i and j of ``scale * G(q)``."""
    if i == j:
        return 0.0
    i, j = min(i, j), max(i, j)
    return scale * (q**i - q**j) / (1.0 - q)


@dataclass(frozen=True)
class GeoProgression:
    q: float
    n: int

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise MalformedInput(f"q must lie in (0, 1), got {self.q}")
        if self.n < 2:
            raise MalformedInput("prefix length must be at least 2")

    @property
    def points(self) -> np.ndarray:
        return np.array([gp_point(self.q, i) for i in range(self.n)])


@dataclass(frozen=True, eq=False)
class PlaneSequence:
    points: np.ndarray
    q: float
    include_zero: bool = True
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "points", as_points(self.points).reshape(-1, 2))

    @property
    def indices(self) -> range:
        start = 0 if self.include_zero else 1
        return range(start, start + len(self.points))

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "include_zero": self.include_zero,
            "scale": self.scale,
            "points": self.points.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PlaneSequence":
        try:
            return cls(
                points=np.array(obj["points"], dtype=float),
                q=float(obj["q"]),
                include_zero=bool(obj.get("include_zero", True)),
                scale=float(obj.get("scale", 1.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad point sequence: {exc}") from exc


@dataclass(frozen=True)
class CopyVerdict:
    accepted: bool
    max_deviation: float


def target_distances(q: float, indices, scale: float = 1.0) -> np.ndarray:
    idx = np.asarray(list(indices))
    qi = q ** idx.astype(float)
    return scale * np.abs(qi[:, None] - qi[None, :]) / (1.0 - q)


def distance_matrix(norm: Norm, pts) -> np.ndarray:
    pts = as_points(pts).reshape(-1, 2)
    return np.asarray(norm.norm(pts[:, None, :] - pts[None, :, :]))


def verify_copy(norm: Norm, seq: PlaneSequence, tol: float = DEFAULT_TOL, n: int | None = None) -> CopyVerdict:
    """Compare every pairwise N-distance with the progression's."""
    if n is not None and len(seq.points) != n:
        raise LengthMismatch(f"expected {n} points, got {len(seq.points)}")
    if len(seq.points) < 2:
        raise LengthMismatch("a copy needs at least two points")
    dev = np.abs(distance_matrix(norm, seq.points) - target_distances(seq.q, seq.indices, seq.scale))
    worst = float(dev.max())
    return CopyVerdict(worst <= tol, worst)


@dataclass(frozen=True)
class DirectionWitness:
    k: int
    sigma: int


def _pair_diffs(pts: np.ndarray) -> np.ndarray:
    i, j = np.triu_indices(len(pts), k=1)
    return pts[i] - pts[j]


def find_directions(
    norm: PolygonalNorm, seq: PlaneSequence, tol: float = DEFAULT_TOL
) -> list[DirectionWitness]:
    """Every (k, sigma) with ``||z_i - z_j|| = sigma <z_i - z_j, v_k>`` for i < j.

    The sequence must be a copy of ``scale * (G(q) minus 0)``; m and the
    prefix are small, so all facets and signs are simply tried.
    """
    if seq.include_zero:
        raise MalformedInput("direction witnesses are defined for copies without 0")
    if len(seq.points) < 2:
        raise NoWitness("need at least two points to fix a direction")
    if not verify_copy(norm, seq, tol).accepted:
        raise NoWitness("sequence is not a copy of G(q) minus 0 within tolerance")
    d = _pair_diffs(seq.points)
    nd = norm.norm(d)
    dots = d @ norm.V.T
    found = []
    for k in range(norm.m):
        for sigma in (1, -1):
            if np.all(np.abs(nd - sigma * dots[:, k]) <= tol):
                found.append(DirectionWitness(k, sigma))
    if not found:
        raise NoWitness("no facet functional measures every pair of the copy")
    return found


def find_direction(norm: PolygonalNorm, seq: PlaneSequence, tol: float = DEFAULT_TOL) -> DirectionWitness:
    return find_directions(norm, seq, tol)[0]


def limit_point(seq: PlaneSequence) -> np.ndarray:
    """Where the infinite copy would accumulate.

    Continues the last step geometrically: ``z_n + (z_n - z_{n-1}) q / (1 - q)``,
    which lies at N-distance ``scale q^i / (1 - q)`` from every ``z_i`` once a
    direction witness exists.
    """
    z = seq.points
    return z[-1] + (z[-1] - z[-2]) * seq.q / (1.0 - seq.q)


@dataclass(frozen=True, eq=False)
class Segment:
    a: np.ndarray
    b: np.ndarray
    witness: DirectionWitness | None = field(default=None, compare=False)

    def point(self, t: float) -> np.ndarray:
        return self.a + t * (self.b - self.a)

    def sample(self, count: int) -> np.ndarray:
        t = np.linspace(0.0, 1.0, count)
        return self.a[None, :] + t[:, None] * (self.b - self.a)[None, :]

    def to_json(self) -> list:
        return [self.a.tolist(), self.b.tolist()]


def extension_segments(norm: PolygonalNorm, seq: PlaneSequence, tol: float = DEFAULT_TOL) -> list[Segment]:
    """Segments ``z_1 + scale * I`` whose points prepend index 0 to the copy.

    ``I`` is the side of the unit disc, in the witnessed facet pair, that
    holds ``u = (z_1 - z_2) / (scale q)``.  A vertex-direction copy has two
    witnesses and therefore two segments; all are returned.
    """
    z = seq.points
    s = seq.scale
    u = (z[0] - z[1]) / (s * seq.q)
    out = []
    for wit in find_directions(norm, seq, tol):
        a, b = norm.side(wit.k, wit.sigma)
        if abs(wit.sigma * float(np.dot(u, norm.facets[wit.k].v)) - 1.0) > 2 * tol / (s * seq.q):
            raise NoWitness("unit step is not on the witnessed side")
        seg = Segment(z[0] + s * a, z[0] + s * b, wit)
        for t in (0.0, 0.5, 1.0):
            full = PlaneSequence(np.vstack([seg.point(t), z]), seq.q, True, s)
            if not verify_copy(norm, full, tol).accepted:
                raise NoWitness("extension self-check failed")
        out.append(seg)
    return out


def extension_segment(norm: PolygonalNorm, seq: PlaneSequence, tol: float = DEFAULT_TOL) -> Segment:
    return extension_segments(norm, seq, tol)[0]


@dataclass(frozen=True, eq=False)
class CopyCertificate:
    """A monochromatic copy of a G(q) prefix under a named colouring."""

    sequence: PlaneSequence
    norm: Norm
    oracle: str
    colour: int
    max_deviation: float
    trace_id: str = ""

    def to_json(self) -> dict:
        out = self.sequence.to_json()
        out.update(
            norm=self.norm.to_json(),
            oracle=self.oracle,
            colour=int(self.colour),
            max_deviation=self.max_deviation,
            trace_id=self.trace_id,
        )
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "CopyCertificate":
        try:
            return cls(
                sequence=PlaneSequence.from_json(obj),
                norm=norm_from_json(obj["norm"]),
                oracle=str(obj["oracle"]),
                colour=int(obj["colour"]),
                max_deviation=float(obj["max_deviation"]),
                trace_id=str(obj.get("trace_id", "")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad certificate: {exc}") from exc
