"""Ramsey-type colouring tools for Minkowski planes.

Polygonal and l_p norms, geometric-progression copies, ring colourings,
distinct-distance extraction, hypergraph peeling, l_p bisectors and a
certified search for monochromatic progression copies.
"""

__version__ = "0.1.0"

from .errors import DomainError  # noqa: F401
from .norms import (  # noqa: F401
    DEFAULT_TOL,
    FacetData,
    LpNorm,
    PolygonalNorm,
    build_polygonal,
    facet_index,
    min_side_length,
    norm_eval,
)
