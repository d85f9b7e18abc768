"""Counter-based normal streams keyed by (seed, measurement index, trial index).

Each homodyne event in a simulation gets a measurement index. The standard
normal used by trial ``k`` of measurement ``j`` is a pure function of
``(seed, j, k)``, so trials can be split across workers in any order and still
reproduce the same outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

_TWO_M53 = 2.0**-53


def _bit_generator(seed: int, measurement: int) -> np.random.Philox:
    key = np.random.SeedSequence([int(seed), int(measurement)]).generate_state(2, np.uint64)
    return np.random.Philox(key=key)


def standard_normals(seed: int, measurement: int, start: int, stop: int) -> np.ndarray:
    """Normals for trials ``start..stop-1`` of one measurement.

    Args:
        seed: User seed of the simulation.
        measurement: Index of the homodyne event within a trial.
        start: First trial index (inclusive).
        stop: Last trial index (exclusive).

    Returns:
        Array of ``stop - start`` standard normal variates.
    """
    if start < 0 or stop < start:
        raise ValueError("need 0 <= start <= stop")
    raw = _bit_generator(seed, measurement).random_raw(stop)[start:]
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53
    return ndtri(u)


@dataclass(frozen=True)
class StreamKey:
    """Key of one trial's stream: outcomes depend only on these fields."""

    seed: int
    trial: int = 0

    def normal(self, measurement: int) -> float:
        return float(standard_normals(self.seed, measurement, self.trial, self.trial + 1)[0])
