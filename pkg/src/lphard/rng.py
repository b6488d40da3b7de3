"""Seeded random streams keyed by ``(seed, index)``.

Each stream is numpy's PCG64 bit generator seeded through ``SeedSequence``
with the entropy pair ``(seed, index)``.  Both pieces are documented to give
identical draws on every platform for a fixed numpy major version.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, field

import numpy as np

ALGORITHM = "numpy.PCG64/SeedSequence"


def fresh_seed() -> int:
    return secrets.randbits(63)


@dataclass
class RandomStream:
    seed: int
    index: int = 0
    algorithm: str = field(default=ALGORITHM, init=False)

    def __post_init__(self):
        if self.seed < 0 or self.index < 0:
            raise ValueError("seed and index must be nonnegative")
        self._gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence([self.seed, self.index])))

    def child(self, index: int) -> "RandomStream":
        """Independent stream for trial ``index`` under the same seed."""
        return RandomStream(self.seed, index)

    def integers(self, low, high, size=None):
        """Uniform integers in ``[low, high)``, as Python ints."""
        out = self._gen.integers(low, high, size=size)
        if size is None:
            return int(out)
        return [int(v) for v in np.ravel(out)]

    def choice(self, items):
        return items[self.integers(0, len(items))]

    def normal(self, size):
        return self._gen.standard_normal(size)

    def uniform(self, size=None):
        return self._gen.random(size)
