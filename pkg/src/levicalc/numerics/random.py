"""Counter-based random streams keyed by (seed, index)."""

from __future__ import annotations

import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox generator for ``(seed, *key)``.

    The same key always yields the same stream, whatever order streams are
    created in, so parallel schedules do not change results.
    """
    if seed < 0 or any(k < 0 for k in key):
        msg = "Seeds and stream keys must be nonnegative"
        raise ValueError(msg)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *key])))
