"""Input generators shared by the test modules."""

from __future__ import annotations

import numpy as np

from minkramsey.progressions import PlaneSequence


def synthetic_copy(norm, k, sigma, q, n, rng, scale=1.0, origin=(0.0, 0.0), spread=1.0):
    """Copy of ``scale * (G(q) minus 0)`` whose steps all point through one side.

    Step i is ``-scale q^i u_i`` with ``u_i`` a random point of the side
    where ``sigma <u, v_k> = 1``, so every pair is measured by that
    functional.  ``spread`` < 1 keeps ``u_i`` near the side's midpoint.
    """
    a, b = norm.side(k, sigma)
    z = [np.asarray(origin, float)]
    for i in range(1, n):
        s = 0.5 + spread * (rng.uniform() - 0.5)
        u = a + s * (b - a)
        z.append(z[-1] - scale * q**i * u)
    return PlaneSequence(np.array(z), q, include_zero=False, scale=scale)
