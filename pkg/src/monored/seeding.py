"""Per-trial random streams derived from a master seed.

Trial i always gets the stream of SeedSequence([master, i]), so adding trials
or running them in a different order never changes earlier ones.
"""
from __future__ import annotations

import numpy as np


def derive_seed(master: int, index: int) -> int:
    """Stable 64-bit seed for trial `index` of a run seeded with `master`."""
    words = np.random.SeedSequence([int(master), int(index)]).generate_state(2, np.uint32)
    return (int(words[0]) << 32) | int(words[1])


def derive_rng(master: int, index: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, index))
