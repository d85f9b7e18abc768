"""Ideal homodyne detection of Gaussian states by Gaussian conditioning.

Measuring ``b_theta = p cos(theta) + q sin(theta)`` on one mode projects onto
an outcome ``m`` and traces out the conjugate quadrature; for Gaussian states
this is the Schur-complement update implemented here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import GaussianState
from .rng import StreamKey

DEGENERACY_TOL = 1e-14


class DegenerateMeasurementError(ValueError):
    """Raised when the measured quadrature has (numerically) zero variance."""


@dataclass(frozen=True)
class MeasurementRecord:
    mode: int
    angle: float
    outcome: float
    density: float


def quadrature_row(num_modes: int, mode: int, theta: float) -> np.ndarray:
    """Row vector ``u`` with ``u @ xi = b_theta`` of the given mode."""
    if not 0 <= mode < num_modes:
        raise ValueError(f"mode {mode} out of range for {num_modes} modes")
    u = np.zeros(2 * num_modes)
    u[2 * mode] = np.sin(theta)
    u[2 * mode + 1] = np.cos(theta)
    return u


def marginal(state: GaussianState, mode: int, theta: float) -> tuple[float, float]:
    """Mean and variance of ``b_theta`` on ``mode``."""
    u = quadrature_row(state.num_modes, mode, theta)
    return float(u @ state.mean), float(u @ state.cov @ u)


def gaussian_pdf(x, mean, var):
    return np.exp(-0.5 * (x - mean) ** 2 / var) / np.sqrt(2.0 * np.pi * var)


def conditioning_terms(cov: np.ndarray, mode: int, theta: float):
    """Gain vector, measured variance and posterior covariance of a measurement.

    Args:
        cov: Full covariance matrix before the measurement.
        mode: Measured mode.
        theta: Homodyne angle.

    Returns:
        ``(u, var, gain, keep, post_cov)`` where ``u`` is the quadrature row,
        ``gain`` maps an innovation ``m - u @ mean`` to the shift of the
        remaining quadratures ``keep`` and ``post_cov`` is their covariance.
    """
    n = cov.shape[0] // 2
    u = quadrature_row(n, mode, theta)
    var = float(u @ cov @ u)
    if var < DEGENERACY_TOL:
        raise DegenerateMeasurementError(
            f"measured quadrature variance {var:.3e} below {DEGENERACY_TOL:g}"
        )
    keep = [k for k in range(2 * n) if k // 2 != mode]
    cross = cov[keep] @ u
    gain = cross / var
    post = cov[np.ix_(keep, keep)] - np.outer(cross, cross) / var
    return u, var, gain, keep, 0.5 * (post + post.T)


def condition(
    state: GaussianState, mode: int, theta: float, outcome: float
) -> tuple[GaussianState, float]:
    """Condition a state on homodyne outcome ``outcome`` of ``b_theta``.

    Args:
        state: State with at least two modes.
        mode: Index of the measured mode.
        theta: Homodyne angle.
        outcome: Observed value of ``b_theta``.

    Returns:
        The posterior state on the remaining modes (original order) and the
        marginal probability density of the outcome.
    """
    if state.num_modes < 2:
        raise ValueError("conditioning needs at least one unmeasured mode")
    u, var, gain, keep, post = conditioning_terms(state.cov, mode, theta)
    pred = float(u @ state.mean)
    mean = state.mean[keep] + gain * (outcome - pred)
    return GaussianState(mean, post), float(gaussian_pdf(outcome, pred, var))


def sample(
    state: GaussianState, mode: int, theta: float, key: StreamKey, measurement: int = 0
) -> tuple[MeasurementRecord, GaussianState]:
    """Draw a homodyne outcome and condition on it.

    The outcome is ``mean + sqrt(var) * z`` with ``z`` taken from the stream
    ``key`` at position ``measurement``.
    """
    mu, var = marginal(state, mode, theta)
    if var < DEGENERACY_TOL:
        raise DegenerateMeasurementError(f"measured quadrature variance {var:.3e}")
    outcome = mu + np.sqrt(var) * key.normal(measurement)
    post, density = condition(state, mode, theta, outcome)
    return MeasurementRecord(mode, float(theta), float(outcome), density), post
