"""Norms of the plane: l_p norms and polygonal (Minkowski) norms.

A polygonal norm is stored through its unit disc, a centrally symmetric
convex 2m-gon given counter-clockwise.  Side ``k`` (0-based, ``k < m``)
runs from ``vertices[k]`` to ``vertices[k + 1]``; its facet functional
``v`` satisfies ``<p, v> = 1`` on that side and ``-1`` on the opposite one,
so that ``||x|| = max_k |<x, v_k>|``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSide,
    InvalidNorm,
    MalformedInput,
    NotCentrallySymmetric,
    NotConvex,
    PreconditionViolated,
    ZeroVector,
)

DEFAULT_TOL = float(os.environ.get("MINKRAMSEY_TOL", "1e-9"))


def as_points(x) -> np.ndarray:
    """Coerce to a float array whose last axis has length 2."""
    a = np.asarray(x, dtype=float)
    if a.shape[-1:] != (2,):
        raise MalformedInput(f"expected planar coordinates, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise MalformedInput("coordinates must be finite")
    return a


@dataclass(frozen=True)
class LpNorm:
    p: float

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1:
            raise InvalidNorm(f"l_p norm needs p >= 1, got {self.p}")
        object.__setattr__(self, "p", p)

    def norm(self, x) -> np.ndarray | float:
        a = np.abs(as_points(x))
        p = self.p
        if p == 1:
            out = a.sum(axis=-1)
        elif math.isinf(p):
            out = a.max(axis=-1)
        elif p == 2:
            out = np.hypot(a[..., 0], a[..., 1])
        else:
            big = a.max(axis=-1)
            safe = np.where(big > 0, big, 1.0)
            r = a / safe[..., None]
            out = big * np.sum(r**p, axis=-1) ** (1.0 / p)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def is_polygonal(self) -> bool:
        return self.p == 1 or math.isinf(self.p)

    def to_polygonal(self) -> "PolygonalNorm":
        if math.isinf(self.p):
            return build_polygonal([(1, -1), (1, 1), (-1, 1), (-1, -1)])
        if self.p == 1:
            return build_polygonal([(1, 0), (0, 1), (-1, 0), (0, -1)])
        raise InvalidNorm(f"l_{self.p} is strictly convex, not polygonal")

    def to_json(self) -> dict:
        p = "inf" if math.isinf(self.p) else self.p
        return {"type": "lp", "p": p}


@dataclass(frozen=True)
class FacetData:
    v: np.ndarray
    w: np.ndarray
    lam: float


@dataclass(frozen=True, eq=False)
class PolygonalNorm:
    vertices: np.ndarray
    facets: tuple[FacetData, ...]
    tol: float = DEFAULT_TOL
    V: np.ndarray = field(repr=False, default=None)

    @property
    def m(self) -> int:
        return len(self.facets)

    def norm(self, x):
        out = np.max(np.abs(as_points(x) @ self.V.T), axis=-1)
        return float(out) if np.ndim(out) == 0 else out

    def side(self, k: int, sign: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Endpoints of the side where ``sign * <x, v_k> = 1``."""
        a, b = self.vertices[k], self.vertices[(k + 1) % len(self.vertices)]
        return (a.copy(), b.copy()) if sign > 0 else (-a, -b)

    def to_json(self) -> dict:
        return {"type": "polygon", "vertices": self.vertices.tolist()}


Norm = LpNorm | PolygonalNorm


def build_polygonal(vertices, tol: float = DEFAULT_TOL) -> PolygonalNorm:
    """Validate a counter-clockwise vertex list and derive the facet data."""
    P = as_points(vertices)
    if P.ndim != 2 or len(P) < 4 or len(P) % 2:
        raise InvalidNorm("need an even number (>= 4) of vertices")
    n = len(P)
    m = n // 2
    scale = float(np.max(np.abs(P)))
    if scale == 0:
        raise DegenerateSide("all vertices are at the origin")

    if np.max(np.abs(P[m:] + P[:m])) > tol * scale:
        raise NotCentrallySymmetric("vertex[i + m] must equal -vertex[i]")

    sides = np.roll(P, -1, axis=0) - P
    if np.min(np.hypot(sides[:, 0], sides[:, 1])) <= tol * scale:
        raise DegenerateSide("zero-length side")

    turns = sides[:, 0] * np.roll(sides, -1, axis=0)[:, 1] - sides[:, 1] * np.roll(sides, -1, axis=0)[:, 0]
    if np.min(turns) <= tol * scale**2:
        raise NotConvex("vertices are not in strictly convex counter-clockwise position")
    ang = np.arctan2(P[:, 1], P[:, 0])
    steps = np.mod(np.roll(ang, -1) - ang, 2 * np.pi)
    if not math.isclose(float(steps.sum()), 2 * np.pi, rel_tol=1e-9):
        raise NotConvex("vertex list winds around the origin more than once")

    facets = []
    for k in range(m):
        a, b = P[k], P[k + 1]
        v = np.linalg.solve(np.array([a, b]), np.ones(2))
        # sign fixed so the side midpoint has <c, v> = +1 > 0
        if np.dot((a + b) / 2, v) < 0:
            v = -v
        facets.append((v, b - a))
    Vm = np.array([f[0] for f in facets])
    out = []
    for v, w in facets:
        lam = float(np.max(np.abs(Vm @ w)))
        out.append(FacetData(v=v, w=w, lam=lam))
    return PolygonalNorm(vertices=P.copy(), facets=tuple(out), tol=tol, V=Vm)


def as_polygonal(n: Norm) -> PolygonalNorm:
    if isinstance(n, PolygonalNorm):
        return n
    return n.to_polygonal()


def norm_eval(n: Norm, x):
    return n.norm(x)


def facet_index(n: PolygonalNorm, x, tol: float | None = None) -> tuple[int, ...]:
    """All k attaining ``||x|| = |<x, v_k>|`` (two of them on vertex rays)."""
    tol = n.tol if tol is None else tol
    x = as_points(x)
    d = np.abs(n.V @ x)
    top = float(d.max())
    if top == 0:
        raise ZeroVector("k(x) is undefined at the origin")
    return tuple(int(k) for k in np.flatnonzero(top - d <= tol * top))


def min_side_length(n: PolygonalNorm) -> float:
    return min(f.lam for f in n.facets)


def sum_direction_check(n: PolygonalNorm, k: int, x1, x2, tol: float | None = None) -> bool:
    """Check that two vectors normed by the same functional add along it.

    Raises :class:`PreconditionViolated` unless ``||x_i|| = <x_i, v_k>``
    for both inputs.
    """
    tol = n.tol if tol is None else tol
    v = n.facets[k].v
    for x in (x1, x2):
        x = as_points(x)
        nx = n.norm(x)
        if abs(nx - float(np.dot(x, v))) > tol * max(1.0, nx):
            raise PreconditionViolated(f"||x|| != <x, v_{k}> for x = {x.tolist()}")
    s = as_points(x1) + as_points(x2)
    ns = n.norm(s)
    return abs(ns - float(np.dot(s, v))) <= tol * max(1.0, ns)


def regular_polygon(sides: int, phase: float = 0.0, tol: float = DEFAULT_TOL) -> PolygonalNorm:
    """Unit disc = regular polygon with vertices on the Euclidean unit circle."""
    if sides % 2:
        raise InvalidNorm("a norm's unit disc has an even number of vertices")
    t = phase + 2 * np.pi * np.arange(sides) / sides
    pts = np.column_stack([np.cos(t), np.sin(t)])
    half = sides // 2
    pts[half:] = -pts[:half]
    return build_polygonal(pts, tol=tol)


def builtin_norm(name: str) -> Norm:
    """A few norms used throughout the tests and the CLI."""
    name = name.lower()
    if name in ("square", "linf", "l_inf"):
        return build_polygonal([(1, -1), (1, 1), (-1, 1), (-1, -1)])
    if name in ("diamond", "l1"):
        return build_polygonal([(1, 0), (0, 1), (-1, 0), (0, -1)])
    if name == "rectangle":
        return build_polygonal([(2, -1), (2, 1), (-2, 1), (-2, -1)])
    if name == "hexagon":
        return regular_polygon(6)
    if name == "octagon":
        return regular_polygon(8)
    if name == "decagon":
        # irregular centrally symmetric 10-gon
        half = [(1.0, -0.2), (0.9, 0.5), (0.4, 0.95), (-0.3, 1.0), (-0.8, 0.7)]
        return build_polygonal(half + [(-x, -y) for x, y in half])
    if name.startswith("l") and name[1:].replace(".", "", 1).isdigit():
        return LpNorm(float(name[1:]))
    raise MalformedInput(f"unknown built-in norm {name!r}")


def norm_from_json(obj: dict, tol: float = DEFAULT_TOL) -> Norm:
    """Parse ``{"type": "lp", "p": ...}`` or ``{"type": "polygon", ...}``.

    l_1 and l_inf come back in polygonal form.
    """
    try:
        kind = obj["type"]
        if kind == "lp":
            raw = obj["p"]
            p = math.inf if str(raw).lower() in ("inf", "infinity") else float(raw)
            norm = LpNorm(p)
            return norm.to_polygonal() if norm.is_polygonal else norm
        if kind == "polygon":
            verts = [[float(c) for c in v] for v in obj["vertices"]]
            return build_polygonal(verts, tol=tol)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"bad norm definition: {exc}") from exc
    raise MalformedInput(f"unknown norm type {obj.get('type')!r}")
