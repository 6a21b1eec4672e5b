"""Numerical l_p bisectors in the plane.

The bisector of ``y1, y2`` is traced on scanlines parallel to ``y2 - y1``:
along such a line the residual ``||x - y1||_p - ||x - y2||_p`` increases, so
a sign change brackets exactly one root.  All scanlines are bisected at
once with numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedInput, TooFewPoints
from .norms import DEFAULT_TOL, LpNorm, as_points

DEFAULT_WINDOW = (-10.0, 10.0, -10.0, 10.0)
DEFAULT_STEP = 0.05


@dataclass(frozen=True, eq=False)
class BisectorSpec:
    p: float
    y1: np.ndarray
    y2: np.ndarray

    def __post_init__(self):
        if not 1 < float(self.p) < math.inf:
            raise MalformedInput(f"bisectors are traced for 1 < p < inf, got {self.p}")
        y1, y2 = as_points(self.y1), as_points(self.y2)
        if np.hypot(*(y2 - y1)) <= DEFAULT_TOL:
            raise MalformedInput("bisector needs two distinct points")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "y1", y1)
        object.__setattr__(self, "y2", y2)

    @property
    def norm(self) -> LpNorm:
        return LpNorm(self.p)

    def residual(self, x):
        n = self.norm
        x = as_points(x)
        return n.norm(x - self.y1) - n.norm(x - self.y2)

    def gradient(self, x) -> np.ndarray:
        return _lp_grad(x - self.y1, self.p) - _lp_grad(x - self.y2, self.p)

    def to_json(self) -> dict:
        return {"p": self.p, "y1": self.y1.tolist(), "y2": self.y2.tolist()}


def _lp_grad(d: np.ndarray, p: float) -> np.ndarray:
    r = LpNorm(p).norm(d)
    if r == 0:
        return np.zeros(2)
    return np.sign(d) * (np.abs(d) / r) ** (p - 1)


def bisector_residual(b: BisectorSpec, x):
    return b.residual(x)


@dataclass
class Trace:
    spec: BisectorSpec
    points: np.ndarray
    offsets: np.ndarray  # integer scanline index of each point
    missing: list[int] = field(default_factory=list)  # scanlines crossing the window without a root
    step: float = DEFAULT_STEP

    def pieces(self) -> list[np.ndarray]:
        """Polyline split wherever consecutive scanlines are not adjacent."""
        if len(self.points) == 0:
            return []
        cuts = np.flatnonzero(np.diff(self.offsets) != 1) + 1
        return [p for p in np.split(self.points, cuts) if len(p)]

    def to_json(self) -> dict:
        return {
            "bisector": self.spec.to_json(),
            "step": self.step,
            "points": self.points.tolist(),
            "no_root_scanlines": list(self.missing),
        }


def _clip(base: np.ndarray, d: np.ndarray, window) -> tuple[np.ndarray, np.ndarray]:
    """Parameter range of ``base + t d`` inside the box (Liang-Barsky)."""
    xmin, xmax, ymin, ymax = window
    lo = np.full(len(base), -np.inf)
    hi = np.full(len(base), np.inf)
    for axis, (a, b) in enumerate(((xmin, xmax), (ymin, ymax))):
        if abs(d[axis]) < 1e-300:
            inside = (base[:, axis] >= a) & (base[:, axis] <= b)
            lo = np.where(inside, lo, np.inf)
            hi = np.where(inside, hi, -np.inf)
        else:
            t1 = (a - base[:, axis]) / d[axis]
            t2 = (b - base[:, axis]) / d[axis]
            lo = np.maximum(lo, np.minimum(t1, t2))
            hi = np.minimum(hi, np.maximum(t1, t2))
    return lo, hi


def trace_bisector(
    b: BisectorSpec,
    window=DEFAULT_WINDOW,
    step: float = DEFAULT_STEP,
    tol: float = DEFAULT_TOL,
    iterations: int = 200,
) -> Trace:
    xmin, xmax, ymin, ymax = (float(v) for v in window)
    if not (xmax > xmin and ymax > ymin) or step <= 0:
        raise MalformedInput("window must be nondegenerate and step positive")
    chord = b.y2 - b.y1
    d = chord / np.hypot(*chord)
    nrm = np.array([-d[1], d[0]])
    mid = (b.y1 + b.y2) / 2
    corners = np.array([[xmin, ymin], [xmax, ymin], [xmin, ymax], [xmax, ymax]])
    proj = (corners - mid) @ nrm
    ks = np.arange(math.ceil(proj.min() / step), math.floor(proj.max() / step) + 1)
    base = mid[None, :] + (ks * step)[:, None] * nrm[None, :]
    lo, hi = _clip(base, d, (xmin, xmax, ymin, ymax))
    crosses = lo < hi
    ks, base, lo, hi = ks[crosses], base[crosses], lo[crosses], hi[crosses]

    def f(t):
        return b.residual(base + t[:, None] * d[None, :])

    flo, fhi = f(lo), f(hi)
    has_root = (flo <= 0) & (fhi >= 0)
    missing = [int(k) for k in ks[~has_root]]
    ks, base, lo, hi = ks[has_root], base[has_root], lo[has_root], hi[has_root]
    for _ in range(iterations):
        mid_t = 0.5 * (lo + hi)
        if np.all((mid_t == lo) | (mid_t == hi)):
            break
        fm = f(mid_t)
        lo = np.where(fm < 0, mid_t, lo)
        hi = np.where(fm < 0, hi, mid_t)
    # keep whichever bracket end has the smaller residual
    r_lo, r_hi = np.abs(f(lo)), np.abs(f(hi))
    t = np.where(r_lo <= r_hi, lo, hi)
    pts = base + t[:, None] * d[None, :]
    res = np.abs(b.residual(pts)) if len(pts) else np.zeros(0)
    good = res <= tol
    missing.extend(int(k) for k in ks[~good])
    return Trace(spec=b, points=pts[good], offsets=ks[good], missing=sorted(missing), step=step)


@dataclass(frozen=True)
class LinearityVerdict:
    linear: bool
    max_deviation: float


def linearity_test(points, scale: float | None = None, tol: float = DEFAULT_TOL) -> LinearityVerdict:
    """Fit a total-least-squares line; linear iff every point is within tol * scale.

    ``scale`` defaults to the diagonal of the points' bounding box.
    """
    pts = as_points(points).reshape(-1, 2)
    if len(pts) < 3:
        raise TooFewPoints("need at least 3 points to test linearity")
    if scale is None:
        scale = float(np.hypot(*(pts.max(axis=0) - pts.min(axis=0))))
    c = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - c)
    dev = float(np.max(np.abs((pts - c) @ vt[-1])))
    return LinearityVerdict(dev <= tol * scale, dev)


@dataclass
class IntersectionResult:
    points: np.ndarray
    residuals: np.ndarray
    coincident: bool = False

    @property
    def count(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "coincident": self.coincident,
            "points": self.points.tolist(),
            "residuals": self.residuals.tolist(),
        }


def _segment_crossings(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Intersection points of every segment of polyline P with every one of Q."""
    a, b = P[:-1], P[1:]
    c, e = Q[:-1], Q[1:]
    r = (b - a)[:, None, :]
    s = (e - c)[None, :, :]
    qp = c[None, :, :] - a[:, None, :]
    den = r[..., 0] * s[..., 1] - r[..., 1] * s[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (qp[..., 0] * s[..., 1] - qp[..., 1] * s[..., 0]) / den
        u = (qp[..., 0] * r[..., 1] - qp[..., 1] * r[..., 0]) / den
    hit = (den != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
    i, _ = np.nonzero(hit)
    return a[i] + t[hit][:, None] * (b - a)[i]


def _polish(b1: BisectorSpec, b2: BisectorSpec, x: np.ndarray, iterations: int = 50) -> np.ndarray:
    for _ in range(iterations):
        F = np.array([b1.residual(x), b2.residual(x)])
        J = np.array([b1.gradient(x), b2.gradient(x)])
        try:
            dx = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
        x = x - dx
        if np.hypot(*dx) < 1e-15 * max(1.0, np.hypot(*x)):
            break
    return x


def count_intersections(
    b1: BisectorSpec,
    b2: BisectorSpec,
    window=DEFAULT_WINDOW,
    step: float = DEFAULT_STEP,
    tol: float = DEFAULT_TOL,
) -> IntersectionResult:
    """Common points of two traced bisectors inside the window.

    Polyline crossings are polished by Newton's method on the residual pair
    and merged when closer than ``2 * step``.
    """
    t1 = trace_bisector(b1, window, step, tol)
    t2 = trace_bisector(b2, window, step, tol)
    if len(t1.points) >= 2 and np.max(np.abs(b2.residual(t1.points))) <= tol:
        return IntersectionResult(np.zeros((0, 2)), np.zeros((0, 2)), coincident=True)
    xmin, xmax, ymin, ymax = window
    found: list[np.ndarray] = []
    for P in t1.pieces():
        for Q in t2.pieces():
            if len(P) < 2 or len(Q) < 2:
                continue
            for x0 in _segment_crossings(P, Q):
                x = _polish(b1, b2, x0)
                if np.hypot(*(x - x0)) > 2 * step:
                    continue
                if not (xmin <= x[0] <= xmax and ymin <= x[1] <= ymax):
                    continue
                if abs(b1.residual(x)) > tol or abs(b2.residual(x)) > tol:
                    continue
                if any(np.hypot(*(x - y)) < 2 * step for y in found):
                    continue
                found.append(x)
    found.sort(key=lambda v: (v[0], v[1]))
    pts = np.array(found).reshape(-1, 2)
    res = np.array([[b1.residual(x), b2.residual(x)] for x in pts]).reshape(-1, 2)
    return IntersectionResult(pts, res)
