"""Families of conditional Gaussian states produced by homodyne measurements.

After any sequence of Gaussian measurements the conditional covariance is the
same for every outcome record, and the conditional mean is affine in the
outcomes. An :class:`Ensemble` therefore stores one covariance and a stack of
mean rows:

* ``sampled``: one row per Monte Carlo trial, outcomes drawn from a stream.
* ``fixed``: one row driven by caller-supplied outcomes.
* ``exact``: row 0 is the constant part of the mean and each later row is the
  loading of one unit-variance innovation, so outcome averages come out in
  closed form.

Constant displacements are weighted by ``weights`` (1 for trial rows, and 1
for row 0 only in the exact representation).
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .gaussian import GaussianState, SymplecticTransform, quadrature_indices
from .homodyne import conditioning_terms
from .rng import standard_normals


class SampledOutcomes:
    """Outcome source drawing trials ``start..start+B-1`` from the keyed stream."""

    def __init__(self, seed: int, start: int = 0):
        self.seed = int(seed)
        self.start = int(start)
        self.counter = 0

    def draw(self, pred: np.ndarray, sd: float) -> np.ndarray:
        z = standard_normals(self.seed, self.counter, self.start, self.start + pred.size)
        self.counter += 1
        return pred + sd * z


class FixedOutcomes:
    """Outcome source replaying a given sequence of outcomes."""

    def __init__(self, outcomes: Sequence):
        self.outcomes = list(outcomes)
        self.counter = 0

    def draw(self, pred: np.ndarray, sd: float) -> np.ndarray:
        if self.counter >= len(self.outcomes):
            raise ValueError(f"only {len(self.outcomes)} fixed outcomes supplied")
        value = self.outcomes[self.counter]
        self.counter += 1
        return np.broadcast_to(np.asarray(value, dtype=float), pred.shape).copy()


class ExactOutcomes:
    """Marker source for the closed-form (innovation-loading) representation."""

    counter = 0


class Ensemble:
    """Mutable accumulator of an outcome-resolved Gaussian family."""

    def __init__(self, cov, means, weights, exact: bool = False):
        self.cov = np.array(cov, dtype=float)
        self.means = np.atleast_2d(np.array(means, dtype=float))
        self.weights = np.array(weights, dtype=float)
        self.exact = exact

    @classmethod
    def from_state(cls, state: GaussianState, trials: int = 1, exact: bool = False):
        if exact:
            return cls(state.cov, state.mean[None, :], [1.0], exact=True)
        if trials < 1:
            raise ValueError("trials must be >= 1")
        return cls(state.cov, np.tile(state.mean, (trials, 1)), np.ones(trials))

    @property
    def num_modes(self) -> int:
        return self.cov.shape[0] // 2

    @property
    def num_rows(self) -> int:
        return self.means.shape[0]

    def copy(self) -> Ensemble:
        return Ensemble(self.cov.copy(), self.means.copy(), self.weights.copy(), self.exact)

    def apply(self, t: SymplecticTransform) -> None:
        s = t.matrix
        cov = s @ self.cov @ s.T
        self.cov = 0.5 * (cov + cov.T)
        self.means = self.means @ s.T + np.outer(self.weights, t.displacement)

    def shift(self, rows: np.ndarray, modes: Sequence[int] | None = None) -> None:
        """Add per-row displacements, optionally only on ``modes``."""
        if modes is None:
            self.means = self.means + rows
        else:
            self.means[:, quadrature_indices(modes)] += rows

    def append(self, state: GaussianState) -> None:
        """Tensor on independent modes (placed after the existing ones)."""
        n = self.cov.shape[0]
        k = state.cov.shape[0]
        cov = np.zeros((n + k, n + k))
        cov[:n, :n] = self.cov
        cov[n:, n:] = state.cov
        self.cov = cov
        self.means = np.hstack([self.means, np.outer(self.weights, state.mean)])

    def permute(self, order: Sequence[int]) -> None:
        """Reorder modes so that new mode ``i`` is old mode ``order[i]``."""
        idx = quadrature_indices(order)
        self.cov = self.cov[np.ix_(idx, idx)]
        self.means = self.means[:, idx]

    def measure(self, mode: int, theta: float, source) -> tuple[np.ndarray, np.ndarray, float]:
        """Homodyne-measure ``mode`` and drop it from the ensemble.

        Returns:
            ``(outcomes, predicted, variance)`` per row. For exact ensembles
            the outcomes are the affine coefficients of the outcome.
        """
        u, var, gain, keep, post = conditioning_terms(self.cov, mode, theta)
        sd = np.sqrt(var)
        if self.exact:
            self.means = np.vstack([self.means, np.zeros(self.means.shape[1])])
            self.weights = np.append(self.weights, 0.0)
            pred = self.means @ u
            innov = np.zeros(self.num_rows)
            innov[-1] = sd
        else:
            pred = self.means @ u
            innov = source.draw(pred, sd) - pred
        self.means = self.means[:, keep] + np.outer(innov, gain)
        self.cov = post
        return pred + innov, pred, var

    def pad(self, rows: np.ndarray) -> np.ndarray:
        """Extend per-row data from an earlier time with zeros for newer rows."""
        rows = np.asarray(rows, dtype=float)
        extra = self.num_rows - rows.shape[0]
        if extra <= 0:
            return rows
        return np.concatenate([rows, np.zeros((extra,) + rows.shape[1:])])

    def moments(self) -> tuple[np.ndarray, np.ndarray]:
        """Outcome-averaged mean and covariance of the family."""
        if self.exact:
            load = self.means[1:]
            return self.means[0].copy(), self.cov + load.T @ load
        mean = self.means.mean(axis=0)
        dev = self.means - mean
        return mean, self.cov + dev.T @ dev / self.num_rows

    def averaged_state(self) -> GaussianState:
        mean, cov = self.moments()
        return GaussianState(mean, cov)

    def row_state(self, row: int = 0) -> GaussianState:
        return GaussianState(self.means[row], self.cov)
