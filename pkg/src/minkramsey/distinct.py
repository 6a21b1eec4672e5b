"""Subsets with pairwise distinct N-distances.

``select_contracting`` extracts a sequence converging to an accumulation
point at least three times faster per step; ``red_blue_filter`` then thins it
so that no point sees two later points on one N-sphere around it.  Pairs at
equal distance in a contracting sequence always share their smaller index,
so what remains has all distances distinct.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MalformedInput, NoAccumulation, TooLarge
from .norms import DEFAULT_TOL, Norm, as_points

BRUTE_FORCE_LIMIT = 20


@dataclass(frozen=True, eq=False)
class ContractingSequence:
    y: np.ndarray
    pts: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "y", as_points(self.y))
        object.__setattr__(self, "pts", as_points(self.pts).reshape(-1, 2))

    def check(self, norm: Norm, tol: float = DEFAULT_TOL) -> bool:
        d = norm.norm(self.pts - self.y)
        if np.any(d <= tol):
            return False
        return bool(np.all(d[1:] <= d[:-1] / 3 + tol))


def accumulation_point(points, norm: Norm, neighbours: int = 3) -> np.ndarray:
    """The input point whose 3rd-nearest neighbour is closest (a heuristic)."""
    pts = as_points(points).reshape(-1, 2)
    if len(pts) <= neighbours:
        raise NoAccumulation(f"need more than {neighbours} points to locate an accumulation point")
    D = norm.norm(pts[:, None, :] - pts[None, :, :])
    kth = np.sort(D, axis=1)[:, neighbours]
    return pts[int(np.argmin(kth))]


def select_contracting(points, norm: Norm, limit=None, tol: float = DEFAULT_TOL) -> ContractingSequence:
    """Longest sequence with ``||x_{i+1} - y|| <= ||x_i - y|| / 3``.

    Greedy from the farthest point, always taking the farthest point still
    allowed; that keeps the admissible radius as large as possible and so
    yields a maximum-length chain.  Points equal to ``y`` are skipped.
    """
    pts = as_points(points).reshape(-1, 2)
    y = accumulation_point(pts, norm) if limit is None else as_points(limit)
    d = norm.norm(pts - y)
    order = [int(i) for i in np.argsort(-d, kind="stable") if d[i] > tol]
    chosen = []
    for i in order:
        if not chosen or d[i] <= d[chosen[-1]] / 3 + tol:
            chosen.append(i)
    if len(chosen) < 2:
        raise NoAccumulation("points are too spread to contract by 1/3 at this scale")
    return ContractingSequence(y=y, pts=pts[chosen])


def distance_classes(dists: np.ndarray, tol: float = DEFAULT_TOL) -> list[list[int]]:
    """Group indices whose distances chain together within ``tol``."""
    order = np.argsort(dists, kind="stable")
    classes: list[list[int]] = []
    prev = None
    for i in order:
        if prev is not None and dists[i] - prev <= tol:
            classes[-1].append(int(i))
        else:
            classes.append([int(i)])
        prev = dists[i]
    return [sorted(c) for c in classes]


@dataclass
class FilterResult:
    kept: np.ndarray
    kept_index: list[int]
    colours: dict[int, str]
    removed: list[int]

    @property
    def blue_count(self) -> int:
        return sum(1 for c in self.colours.values() if c == "blue")


def red_blue_filter(cs: ContractingSequence, norm: Norm, tol: float = DEFAULT_TOL) -> FilterResult:
    """Run the sphere procedure on a finite contracting sequence.

    Each surviving point in turn groups the later survivors into classes of
    equal N-distance to it and keeps one point (the earliest) per class.  The
    point is red when every class was a singleton, blue otherwise; only red
    points are returned.  A class of two or more stands in for a sphere
    holding infinitely many points.
    """
    pts = cs.pts
    alive = list(range(len(pts)))
    colours: dict[int, str] = {}
    pos = 0
    while pos < len(alive):
        i = alive[pos]
        later = alive[pos + 1:]
        if later:
            dists = np.atleast_1d(norm.norm(pts[later] - pts[i]))
            classes = distance_classes(dists, tol)
            colours[i] = "red" if all(len(c) == 1 for c in classes) else "blue"
            drop = {later[j] for c in classes for j in c[1:]}
            alive = [a for a in alive if a not in drop]
        else:
            colours[i] = "red"
        pos += 1
    kept = [i for i in alive if colours[i] == "red"]
    removed = [i for i in range(len(pts)) if i not in kept]
    return FilterResult(kept=pts[kept], kept_index=kept, colours=colours, removed=removed)


def all_distances_distinct(points, norm: Norm, tol: float = DEFAULT_TOL) -> bool:
    """Pair-of-pairs scan: no two distinct pairs at equal distance."""
    pts = as_points(points).reshape(-1, 2)
    i, j = np.triu_indices(len(pts), k=1)
    d = np.atleast_1d(norm.norm(pts[i] - pts[j]))
    for a in range(len(d)):
        for b in range(a + 1, len(d)):
            if abs(d[a] - d[b]) <= tol:
                return False
    return True


def brute_force_distinct_subset(points, norm: Norm, tol: float = DEFAULT_TOL) -> list[int]:
    """Indices of a maximum subset with pairwise distinct distances.

    Depth-first search with a size bound; exponential, so inputs are capped
    at 20 points.
    """
    pts = as_points(points).reshape(-1, 2)
    n = len(pts)
    if n > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"exhaustive search is limited to {BRUTE_FORCE_LIMIT} points, got {n}")
    if n == 0:
        raise MalformedInput("empty point set")
    D = np.asarray(norm.norm(pts[:, None, :] - pts[None, :, :]))
    best: list[int] = []

    def clashes(dist_list, d):
        return any(abs(d - e) <= tol for e in dist_list)

    def grow(start, chosen, dists):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        if len(chosen) + (n - start) <= len(best):
            return
        for c in range(start, n):
            if len(chosen) + (n - c) <= len(best):
                return
            new = [D[c, j] for j in chosen]
            ok = all(not clashes(dists, d) for d in new)
            if ok:
                for a in range(len(new)):
                    for b in range(a + 1, len(new)):
                        if abs(new[a] - new[b]) <= tol:
                            ok = False
                            break
                    if not ok:
                        break
            if ok:
                chosen.append(c)
                grow(c + 1, chosen, dists + new)
                chosen.pop()

    grow(0, [], [])
    return best
