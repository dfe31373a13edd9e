"""Seeded random streams.

Every run derives independent PCG64 generators from one integer seed, one
sub-stream per purpose, so that e.g. changing the perturbation size never
changes which frequencies were drawn.  The rule is::

    Generator(PCG64(SeedSequence(seed, spawn_key=(PURPOSES[purpose],))))
"""

from __future__ import annotations

import numpy as np

PURPOSES = {
    "freqs": 0,
    "phases": 1,
    "zeta": 2,
    "xi": 3,
    "noise": 4,
    "init": 5,
    "data": 6,
    "theory": 7,
}


def substream(seed: int, purpose: str) -> np.random.Generator:
    """Return the generator for ``purpose`` derived from ``seed``."""
    try:
        key = PURPOSES[purpose]
    except KeyError:
        raise ValueError(f"unknown RNG purpose {purpose!r}; expected one of {sorted(PURPOSES)}") from None
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(key,))))
