"""Counter-based random streams for reproducible parallel Monte Carlo.

Every unit of work (a path replication, a limit-gap draw, a reference
draw) gets its own Philox generator keyed by ``(seed, index, purpose)``.
Because the key alone determines the stream, results are bit-identical
under any chunking of the work across workers.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

# Purpose tags keep deviate streams for different uses disjoint, so e.g.
# toggling rectification never perturbs path generation.
PATH = 0
V_DRAW = 1
V_REFERENCE = 2
STANDALONE = 3

_MASK64 = (1 << 64) - 1
_INDEX_BITS = 56


def substream(seed: int, index: int, purpose: int = STANDALONE) -> np.random.Generator:
    """Generator for work item `index` under `seed`, disjoint by purpose."""
    if not 0 <= index < (1 << _INDEX_BITS):
        raise ParameterError(f"stream index out of range: {index}")
    if not 0 <= purpose < (1 << (64 - _INDEX_BITS)):
        raise ParameterError(f"stream purpose out of range: {purpose}")
    key = np.array(
        [seed & _MASK64, (purpose << _INDEX_BITS) | index], dtype=np.uint64
    )
    return np.random.Generator(np.random.Philox(key=key))
