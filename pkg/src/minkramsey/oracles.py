"""Two-colourings of the plane, addressed by name.

An oracle maps an array of points ``(..., 2)`` to an int array of colours in
{0, 1}.  Names look like ``stripes:width=0.05,angle=90``; parameters not
given take their defaults, and :attr:`Oracle.name` is always the canonical
spelling with every parameter listed.  ``package.module:function`` loads a
scalar plugin ``f(x, y) -> 0 | 1``.
"""

from __future__ import annotations

import importlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import MalformedInput, UnknownOracle
from .norms import Norm, as_points


@dataclass(frozen=True)
class Oracle:
    name: str
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, pts) -> np.ndarray:
        pts = as_points(pts)
        out = np.asarray(self.fn(pts)).astype(int)
        if out.shape != pts.shape[:-1]:
            out = np.broadcast_to(out, pts.shape[:-1])
        if np.any((out != 0) & (out != 1)):
            raise MalformedInput(f"oracle {self.name} returned a colour outside {{0, 1}}")
        return out


def constant(colour: float = 0) -> Callable:
    c = int(colour)
    return lambda p: np.full(p.shape[:-1], c)


def half_plane(a: float = 0.0, b: float = 1.0, c: float = 0.0) -> Callable:
    """Colour 1 where ``a x + b y + c > 0``."""
    return lambda p: (a * p[..., 0] + b * p[..., 1] + c > 0).astype(int)


def stripes(width: float = 1.0, angle: float = 0.0) -> Callable:
    """Parallel bands of the given width; angle (degrees) of the band normal."""
    if width <= 0:
        raise MalformedInput("stripe width must be positive")
    th = np.deg2rad(angle)
    c, s = np.cos(th), np.sin(th)
    return lambda p: np.floor((c * p[..., 0] + s * p[..., 1]) / width).astype(np.int64) % 2


def checkerboard(cell: float = 1.0) -> Callable:
    if cell <= 0:
        raise MalformedInput("cell size must be positive")
    return lambda p: (np.floor(p[..., 0] / cell) + np.floor(p[..., 1] / cell)).astype(np.int64) % 2


def random_cells(cell: float = 1.0, seed: float = 0) -> Callable:
    """Pseudo-random colour per square cell, a pure function of (cell, seed)."""
    key = np.uint64(int(seed) & 0xFFFFFFFF)

    def fn(p):
        i = np.floor(p[..., 0] / cell).astype(np.int64).astype(np.uint64)
        j = np.floor(p[..., 1] / cell).astype(np.int64).astype(np.uint64)
        with np.errstate(over="ignore"):
            h = i * np.uint64(0x9E3779B97F4A7C15) ^ j * np.uint64(0xC2B2AE3D27D4EB4F) ^ key
            h ^= h >> np.uint64(31)
            h *= np.uint64(0xBF58476D1CE4E5B9)
            h ^= h >> np.uint64(29)
        return (h & np.uint64(1)).astype(int)

    return fn


def ring_parity(norm: Norm) -> Callable:
    from .rings import RingParity

    return RingParity(norm)


BUILTINS: dict[str, tuple[Callable, dict[str, float]]] = {
    "constant": (constant, {"colour": 0}),
    "half-plane": (half_plane, {"a": 0.0, "b": 1.0, "c": 0.0}),
    "stripes": (stripes, {"width": 1.0, "angle": 0.0}),
    "checkerboard": (checkerboard, {"cell": 1.0}),
    "random-cells": (random_cells, {"cell": 1.0, "seed": 0}),
    "ring-parity": (ring_parity, {}),
}


def _fmt(v: float) -> str:
    return repr(int(v)) if float(v).is_integer() else repr(float(v))


def parse_oracle(spec: str, norm: Norm | None = None) -> Oracle:
    """Resolve an oracle name (see module docstring)."""
    spec = spec.strip()
    head, _, tail = spec.partition(":")
    if head in BUILTINS:
        factory, defaults = BUILTINS[head]
        params = dict(defaults)
        if tail:
            for item in tail.split(","):
                key, eq, val = item.partition("=")
                key = key.strip()
                if not eq or key not in defaults:
                    raise MalformedInput(f"bad parameter {item!r} for oracle {head}")
                try:
                    params[key] = float(val)
                except ValueError as exc:
                    raise MalformedInput(f"parameter {key} must be a number") from exc
        if head == "ring-parity":
            if norm is None:
                raise MalformedInput("ring-parity needs the norm it is built from")
            fn = ring_parity(norm)
        else:
            fn = factory(**params)
        name = head if not params else head + ":" + ",".join(f"{k}={_fmt(v)}" for k, v in sorted(params.items()))
        return Oracle(name, fn)
    if tail and all(part.isidentifier() for part in head.split(".")):
        try:
            func = getattr(importlib.import_module(head), tail)
        except (ImportError, AttributeError) as exc:
            raise UnknownOracle(f"cannot load plugin {spec!r}: {exc}") from exc
        vec = np.vectorize(lambda x, y: int(func(float(x), float(y))), otypes=[int])
        return Oracle(spec, lambda p: vec(p[..., 0], p[..., 1]))
    raise UnknownOracle(f"unknown oracle {spec!r}; built-ins: {', '.join(sorted(BUILTINS))}")


def dilated(oracle: Oracle, factor: float) -> Oracle:
    """``p -> oracle(factor * p)``: the colouring shrunk by ``factor``."""
    return Oracle(f"dilate({factor!r})|{oracle.name}", lambda p: oracle(factor * p))
