"""Finite hypergraphs: edge cores and polychromatic colourings by peeling.

The core of an edge ``e`` is ``e`` intersected with every edge sharing at
least ``k`` vertices with it.  Distinct cores share fewer than ``k``
vertices, so colouring the core hypergraph is enough: peel off ``t``
disjoint transversals of the cores and give the i-th one colour i.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import InfeasibleCore, MalformedInput


@dataclass(frozen=True)
class FiniteHypergraph:
    V: int
    edges: tuple[frozenset[int], ...]

    def __post_init__(self):
        edges = tuple(frozenset(int(v) for v in e) for e in self.edges)
        for e in edges:
            if not e:
                raise MalformedInput("edges must be nonempty")
            if min(e) < 0 or max(e) >= self.V:
                raise MalformedInput(f"edge {sorted(e)} has a vertex outside 0..{self.V - 1}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteHypergraph":
        try:
            return cls(V=int(obj["V"]), edges=tuple(obj["edges"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad hypergraph: {exc}") from exc

    def to_json(self) -> dict:
        return {"V": self.V, "edges": [sorted(e) for e in self.edges]}


def edge_core(h: FiniteHypergraph, e: int, k: int) -> frozenset[int]:
    if k < 1:
        raise MalformedInput("k must be at least 1")
    base = h.edges[e]
    core = set(base)
    for f in h.edges:
        if len(base & f) >= k:
            core &= f
    return frozenset(core)


def all_cores(h: FiniteHypergraph, k: int) -> list[frozenset[int]]:
    return [edge_core(h, i, k) for i in range(len(h.edges))]


def core_disjointness_check(h: FiniteHypergraph, k: int) -> tuple[bool, tuple[int, int] | None]:
    """Distinct cores must meet in fewer than k vertices.

    Returns ``(True, None)`` or ``(False, (i, j))`` for an offending pair.
    """
    cores = all_cores(h, k)
    for i, j in combinations(range(len(cores)), 2):
        if cores[i] != cores[j] and len(cores[i] & cores[j]) >= k:
            return False, (i, j)
    return True, None


@dataclass
class PeelResult:
    success: bool
    transversals: list[frozenset[int]]
    colouring: dict[int, int]
    redundant: frozenset[int]
    cores: list[frozenset[int]] = field(repr=False)
    failure: str = ""

    def to_json(self) -> dict:
        return {
            "success": self.success,
            "transversals": [sorted(t) for t in self.transversals],
            "colouring": {str(v): c for v, c in sorted(self.colouring.items())},
            "redundant": sorted(self.redundant),
            "failure": self.failure,
        }


def _transversal(cores: list[frozenset[int]], free: set[int]) -> set[int] | None:
    """Greedy: vertex hitting most unhit cores, then fewest already-hit ones."""
    unhit = set(range(len(cores)))
    member: dict[int, list[int]] = {}
    for ci, c in enumerate(cores):
        for v in c & free:
            member.setdefault(v, []).append(ci)
    chosen: set[int] = set()
    while unhit:
        # a core with a single free vertex left forces that vertex
        forced = None
        for ci in sorted(unhit):
            avail = cores[ci] & free - chosen
            if not avail:
                return None
            if len(avail) == 1:
                forced = next(iter(avail))
                break
        if forced is None:
            forced = min(
                (v for v in member if v not in chosen),
                key=lambda v: (
                    -sum(1 for ci in member[v] if ci in unhit),
                    sum(1 for ci in member[v] if ci not in unhit),
                    len(member[v]),
                    v,
                ),
            )
        chosen.add(forced)
        unhit -= set(member.get(forced, ()))
    return chosen


def peel_transversals(h: FiniteHypergraph, k: int, t: int) -> PeelResult:
    """Colour so that every edge sees all of 1..t.

    Raises :class:`InfeasibleCore` when some core has fewer than ``t``
    vertices.  The greedy peeling can still fail on awkward instances; that
    is reported through ``success=False`` rather than hidden.
    """
    if t < 1:
        raise MalformedInput("need at least one colour")
    cores = all_cores(h, k)
    small = [i for i, c in enumerate(cores) if len(c) < t]
    if small:
        raise InfeasibleCore(f"edge {small[0]} has a core of size {len(cores[small[0]])} < {t}")
    distinct = sorted(set(cores), key=lambda c: (len(c), sorted(c)))
    free = set(range(h.V))
    layers: list[frozenset[int]] = []
    failure = ""
    for colour in range(1, t + 1):
        layer = _transversal(distinct, free)
        if layer is None:
            failure = f"no transversal left for colour {colour}"
            break
        layers.append(frozenset(layer))
        free -= layer
    colouring = {v: 1 for v in range(h.V)}
    for colour, layer in enumerate(layers, start=1):
        for v in layer:
            colouring[v] = colour
    return PeelResult(
        success=not failure,
        transversals=layers,
        colouring=colouring,
        redundant=frozenset(free),
        cores=cores,
        failure=failure,
    )


def is_polychromatic(h: FiniteHypergraph, colouring: dict[int, int], t: int) -> bool:
    want = set(range(1, t + 1))
    return all(want <= {colouring[v] for v in e} for e in h.edges)
