"""Seeded random streams.

Every stream is a numpy ``Generator`` over ``PCG64`` seeded from a
``SeedSequence``. Independent streams are derived from ``(seed, group, stream_index)``
through the sequence's spawn key, so a batch of shots always sees the same
numbers no matter which worker runs it.
"""

from dataclasses import dataclass, field

import numpy as np

ALGORITHM = "numpy.PCG64/SeedSequence"


@dataclass
class RandomStream:
    """Mutable random source passed explicitly to sampling operations."""

    seed: int
    stream_index: int = 0
    group: int = 0
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        sequence = np.random.SeedSequence(
            entropy=self.seed & 0xFFFF_FFFF_FFFF_FFFF,
            spawn_key=(self.group, self.stream_index),
        )
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    @property
    def algorithm(self) -> str:
        return ALGORITHM

    def uniform(self, size: int | None = None):
        return self.generator.random(size)

    def multinomial(self, n: int, probabilities) -> np.ndarray:
        return self.generator.multinomial(n, probabilities)
