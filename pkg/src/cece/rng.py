"""Counter-based random number generation.

Every random draw in the simulator is a pure function of
``(seed, slot, subject_index)``, where the slot names the role of the draw
(treatment assignment, exposure, outcome, ...).  Draws for one subject are
therefore independent of the order in which subjects are generated, and
identical seeds reproduce bit-identical tables.

The generator is a splitmix64 stream: the per-subject state is
``stream_key + index * GAMMA`` and the output is the splitmix64 finalizer of
that state, where ``stream_key`` itself is derived by finalizing
``(seed, slot)``.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MULT_A = np.uint64(0xBF58476D1CE4E5B9)
_MULT_B = np.uint64(0x94D049BB133111EB)

# 2^-53; uniforms use the top 53 bits of the 64-bit output.
_INV_2_53 = float(np.ldexp(1.0, -53))


def _finalize(z: np.ndarray | np.uint64) -> np.ndarray | np.uint64:
    """splitmix64 output function (avalanching finalizer)."""
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _MULT_A
        z = (z ^ (z >> np.uint64(27))) * _MULT_B
        return z ^ (z >> np.uint64(31))


def stream_key(seed: int, slot: int) -> np.uint64:
    """Derive the key of the (seed, slot) stream."""
    with np.errstate(over="ignore"):
        k = _finalize(np.uint64(seed) + _GAMMA)
        return _finalize(k + _GAMMA * np.uint64(slot + 1))


def uniforms(seed: int, slot: int, n: int) -> np.ndarray:
    """n uniforms in [0, 1), one per subject index, for the given stream."""
    key = stream_key(seed, slot)
    idx = np.arange(n, dtype=np.uint64)
    with np.errstate(over="ignore"):
        bits = _finalize(key + idx * _GAMMA)
    return (bits >> np.uint64(11)).astype(np.float64) * _INV_2_53
