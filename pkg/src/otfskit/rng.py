"""Counter-based child RNG streams for order-independent Monte-Carlo runs.

Every random draw comes from a Philox generator keyed by
(master seed, trial index, role), so results are identical no matter how
trials are scheduled or parallelized.
"""

from __future__ import annotations

import zlib

import numpy as np

ROLE_CHANNEL = "channel"
ROLE_NOISE = "noise"
ROLE_DATA = "data"
ROLE_DATASET = "dataset"
ROLE_PARITY = "parity"

_MASK64 = (1 << 64) - 1


def stream(seed: int, trial: int = 0, role: str = ROLE_CHANNEL) -> np.random.Generator:
    """Independent generator for one (seed, trial, role) cell."""
    if trial < 0:
        raise ValueError("trial index must be non-negative")
    role_id = zlib.crc32(role.encode("utf-8"))
    key = ((seed & _MASK64), ((trial << 32) ^ role_id) & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))
