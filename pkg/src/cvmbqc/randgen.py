"""Random symplectic transforms, pure states and gadget angles for checks."""

from __future__ import annotations

import numpy as np

from .gaussian import (
    GaussianState,
    SymplecticTransform,
    apply,
    beam_splitter,
    embed,
    phase_shift,
    squeezer,
    vacuum,
)


def random_symplectic(num_modes: int, rng: np.random.Generator, layers: int = 2, max_log_squeeze: float = 0.5) -> SymplecticTransform:
    """Product of random phases, squeezers and nearest-neighbour beam splitters."""
    total = SymplecticTransform.identity(num_modes)
    for _ in range(layers):
        for j in range(num_modes):
            s = np.exp(rng.uniform(-max_log_squeeze, max_log_squeeze))
            total = embed(phase_shift(rng.uniform(-np.pi, np.pi)), [j], num_modes) @ total
            total = embed(squeezer(s), [j], num_modes) @ total
        for j in range(num_modes - 1):
            total = embed(beam_splitter(rng.uniform(-np.pi, np.pi)), [j, j + 1], num_modes) @ total
    return total


def random_pure_state(num_modes: int, rng: np.random.Generator, mean_scale: float = 0.0, **kwargs) -> GaussianState:
    state = apply(vacuum(num_modes), random_symplectic(num_modes, rng, **kwargs))
    return GaussianState(mean_scale * rng.normal(size=2 * num_modes), state.cov)


def random_angle_pair(rng: np.random.Generator, min_sin: float = 0.2) -> tuple[float, float]:
    """``(theta1, theta3)`` with ``|sin(theta1 - theta3)| >= min_sin``."""
    while True:
        a, b = rng.uniform(-np.pi, np.pi, 2)
        if abs(np.sin(a - b)) >= min_sin:
            return float(a), float(b)


def random_angles(arity: int, rng: np.random.Generator, min_sin: float = 0.2) -> tuple:
    if arity == 1:
        return random_angle_pair(rng, min_sin)
    (a1, a3), (a2, a4) = random_angle_pair(rng, min_sin), random_angle_pair(rng, min_sin)
    return (a1, a2, a3, a4)


def random_moderate_angles(arity: int, rng: np.random.Generator, max_squeeze: float = 2.0) -> tuple:
    """Angles whose one-step gates have squeezing ``|tan(th-/2)|`` in ``[1/k, k]``.

    Uniform ``th+`` and ``|th-|`` uniform between ``2 atan(1/k)`` and
    ``2 atan(k)`` with a random sign.
    """
    lo, hi = 2 * np.arctan(1.0 / max_squeeze), 2 * np.arctan(max_squeeze)
    pairs = []
    for _ in range(arity):
        tp = rng.uniform(-np.pi, np.pi)
        tm = rng.choice([-1.0, 1.0]) * rng.uniform(lo, hi)
        pairs.append(((tp + tm) / 2, (tp - tm) / 2))
    if arity == 1:
        return pairs[0]
    (a1, a3), (a2, a4) = pairs
    return (a1, a2, a3, a4)
