"""Input-aware correction of finite-squeezing errors.

For a gadget step with target covariance ``sigma_t`` the conditional output
differs from the target in two ways: its mean depends on the outcomes through
a term ``D`` that standard feedforward leaves behind, and its covariance is a
pure state ``sigma`` slightly different from ``sigma_t``. Shifting by the
outcome-dependent ``D`` and applying the symplectic ``U_ec`` with
``U_ec sigma U_ec^T = sigma_t`` restores the target exactly.

``arity`` 1 refers to the single-mode gadget, ``arity`` 2 to the two-mode one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import SymplecticTransform, beam_splitter, quadrature_indices
from .gadgets import cluster_t, feedforward_single

PURITY_TOL = 1e-6
DB_PER_NEPER = 10.0 * np.log10(np.e**2)  # 10 log10(e^{2r}) = DB_PER_NEPER * r


class MixedStateError(ValueError):
    """Raised when a covariance expected to be pure is not."""


@dataclass(frozen=True)
class SigmaMatrices:
    sigma1: np.ndarray
    sigma2: np.ndarray
    sigma3: np.ndarray
    epsilon: float
    t: float


@dataclass(frozen=True)
class CorrectionOperators:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    target_cov: np.ndarray


def _block2(a: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(2), a)


def sigma_matrices(epsilon: float, arity: int = 1) -> SigmaMatrices:
    """Noise matrices of the cluster, single-mode or stacked for two modes."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    if arity not in (1, 2):
        raise ValueError("arity must be 1 or 2")
    t = cluster_t(epsilon)
    s1 = np.eye(2) / epsilon
    s2 = np.diag([0.0, epsilon])
    s3 = np.diag([epsilon / t**2, epsilon])
    if arity == 2:
        s1, s2, s3 = _block2(s1), _block2(s2), _block2(s3)
    return SigmaMatrices(s1, s2, s3, float(epsilon), t)


def s_t(t: float, arity: int = 1) -> np.ndarray:
    """``S(t)`` on each mode of the step."""
    return np.kron(np.eye(arity), np.diag([t, 1.0 / t]))


def _arity_of(sigma_t: np.ndarray) -> int:
    n = np.asarray(sigma_t).shape[0]
    if n not in (2, 4):
        raise ValueError("target covariance must be 2x2 or 4x4")
    return n // 2


def correction_operators(sigma_t, epsilon: float) -> CorrectionOperators:
    """The matrices A, B and C built from the target and the cluster noise."""
    sigma_t = np.asarray(sigma_t, dtype=float)
    sm = sigma_matrices(epsilon, _arity_of(sigma_t))
    lam = np.linalg.inv(sigma_t)
    k = np.linalg.inv(lam + 2 * sm.sigma1)
    l2 = lam + 2 * sm.sigma2
    a = (lam + 2 * sm.sigma3) - l2 @ k @ l2
    b = 2 * sm.sigma3 - l2 @ k @ (2 * sm.sigma2)
    c = 2 * sm.sigma3 - (2 * sm.sigma2) @ k @ (2 * sm.sigma2)
    return CorrectionOperators(0.5 * (a + a.T), b, 0.5 * (c + c.T), sigma_t)


def deviation(sigma_t, epsilon: float) -> np.ndarray:
    """Deviation ``Delta sigma`` with ``A = sigma_t^{-1} (I + Delta sigma)``."""
    sigma_t = np.asarray(sigma_t, dtype=float)
    sm = sigma_matrices(epsilon, _arity_of(sigma_t))
    eye = np.eye(sigma_t.shape[0])
    left = eye + 2 * sigma_t @ sm.sigma2
    mid = np.linalg.solve(eye + 2 * sm.sigma1 @ sigma_t, left)
    return 2 * sigma_t @ sm.sigma3 - left @ mid


def gamma_vector(feedforward, t: float) -> np.ndarray:
    """``gamma`` from feedforward amplitudes.

    Args:
        feedforward: ``(m_q, m_p)`` or ``(m_q, m_p, mbar_q, mbar_p)``.
        t: Cluster coupling.
    """
    ff = np.asarray(feedforward, dtype=float)
    arity = ff.shape[-1] // 2
    if arity == 1:
        return ff @ s_t(t).T
    return ff @ (s_t(t, 2) @ beam_splitter(-np.pi / 4).matrix).T


def correction_displacement(sigma_t, epsilon: float, outcomes, angles) -> np.ndarray:
    """Extra displacement ``D = -A^{-1} B gamma`` for given outcomes.

    Args:
        sigma_t: Target covariance of the step (2x2 or 4x4).
        epsilon: Cluster squeezing parameter.
        outcomes: ``(m1, m3)`` or ``(m1, m3, m2, m4)``.
        angles: ``(theta1, theta3)`` or ``(theta1, theta2, theta3, theta4)``.

    Returns:
        ``D`` in the ``X = S(t) xi`` coordinates of the output.
    """
    ops = correction_operators(sigma_t, epsilon)
    t = cluster_t(epsilon)
    m = np.asarray(outcomes, dtype=float)
    if len(angles) == 2:
        ff = feedforward_single(m[0], m[1], angles[0], angles[1], t)
    elif len(angles) == 4:
        th1, th2, th3, th4 = angles
        ff = np.concatenate(
            [feedforward_single(m[0], m[1], th1, th3, t), feedforward_single(m[2], m[3], th2, th4, t)]
        )
    else:
        raise ValueError("angles must have 2 or 4 entries")
    return -np.linalg.solve(ops.A, ops.B @ gamma_vector(ff, t))


def actual_output_cov(sigma_t, epsilon: float) -> np.ndarray:
    """Conditional output covariance ``S(1/t) A^{-1} S(1/t)^T`` of the gadget."""
    ops = correction_operators(sigma_t, epsilon)
    sinv = s_t(1.0 / cluster_t(epsilon), _arity_of(sigma_t))
    out = sinv @ np.linalg.inv(ops.A) @ sinv.T
    return 0.5 * (out + out.T)


def spd_sqrt(a: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (a + a.T))
    if np.any(w <= 0):
        raise ValueError("matrix is not positive definite")
    return (v * np.sqrt(w)) @ v.T


def _check_pure(cov: np.ndarray, name: str) -> None:
    d = np.linalg.det(2.0 * cov)
    if abs(d - 1.0) > PURITY_TOL:
        raise MixedStateError(f"{name} is not pure: det(2 sigma) = {d:.9g}")


def ec_unitary(sigma_actual, sigma_t) -> SymplecticTransform:
    """Symplectic ``U_ec`` with ``U_ec sigma_actual U_ec^T = sigma_t``.

    Uses the symmetric positive-definite square roots of ``2 sigma`` as the
    symplectic factors, so equal covariances give the identity.
    """
    sigma_actual = np.asarray(sigma_actual, dtype=float)
    sigma_t = np.asarray(sigma_t, dtype=float)
    _check_pure(sigma_actual, "sigma_actual")
    _check_pure(sigma_t, "sigma_t")
    u = spd_sqrt(2 * sigma_t) @ np.linalg.inv(spd_sqrt(2 * sigma_actual))
    return SymplecticTransform.from_matrix(u)


# -- Example 2: two-mode squeezed target --------------------------------------


def tmsv_cov(r: float) -> np.ndarray:
    """Two-mode squeezed vacuum with blocks ``cosh(2r) I / 2`` and ``sinh(2r) Z / 2``."""
    ch, sh = np.cosh(2 * r), np.sinh(2 * r)
    z = np.diag([1.0, -1.0])
    return 0.5 * np.block([[ch * np.eye(2), sh * z], [sh * z, ch * np.eye(2)]])


def j_k(r: float, epsilon: float) -> tuple[float, float]:
    """The two entries ``(J, K)`` for a two-mode squeezed target of parameter ``r``."""
    c2, c4, s2 = np.cosh(2 * r), np.cosh(4 * r), np.sinh(2 * r)
    den = 1 + epsilon**2 + 2 * epsilon * c2
    return (1 + 2 * epsilon * c2 + epsilon**2 * c4) / den, 2 * epsilon * s2 * (1 + epsilon * c2) / den


def tmss_alpha(r: float, epsilon: float) -> float:
    """Two-mode squeezing ``alpha`` of the correction, ``cosh(2 alpha) = J``."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    j, k = j_k(r, epsilon)
    if j < 1.0 - 1e-12:
        raise ArithmeticError(f"J = {j} < 1")
    # arccosh(J) loses precision near J = 1; with J^2 - K^2 = 1 and K >= 0 it
    # equals arcsinh(K), which is exact at r = 0 and stable for small K
    return 0.5 * float(np.arcsinh(k))


# -- dB conversions ----------------------------------------------------------


def db_to_r(db: float) -> float:
    """Squeezing parameter ``r`` with ``10 log10(e^{2r}) = db``."""
    if db < 0:
        raise ValueError(f"dB must be nonnegative, got {db}")
    return float(db / DB_PER_NEPER)


def db_to_epsilon(db: float) -> float:
    """Cluster ``epsilon`` whose momentum variance ``eps/2`` is ``db`` below vacuum."""
    if db < 0:
        raise ValueError(f"dB must be nonnegative, got {db}")
    return float(10.0 ** (-db / 10.0))


def db_to_params(db: float) -> tuple[float, float]:
    """Both readings of a squeezing level: ``(r, epsilon)``."""
    return db_to_r(db), db_to_epsilon(db)


def r_to_db(r: float) -> float:
    return float(DB_PER_NEPER * r)


# -- Correction of one step on the full tracked state --------------------------


@dataclass(frozen=True)
class StepCorrection:
    """Correction of one gadget step acting on ``modes`` of an M-mode state.

    The predicted conditional mean is ``gain @ gamma + offset * weight`` and
    the conditional covariance is ``actual_cov`` for every outcome. The
    correction shifts rows onto ``inv(unitary) @ target_mean`` and then
    applies ``unitary``.
    """

    modes: tuple
    gain: np.ndarray
    offset: np.ndarray
    actual_cov: np.ndarray
    unitary: SymplecticTransform
    target_mean: np.ndarray

    def predicted_means(self, gamma: np.ndarray, weights: np.ndarray) -> np.ndarray:
        return gamma @ self.gain.T + np.outer(weights, self.offset)

    def displacements(self, gamma: np.ndarray, weights: np.ndarray, use_displacement: bool = True) -> np.ndarray:
        """Rows to add to the ensemble means before ``unitary``.

        With ``use_displacement=False`` only the outcome-independent part is
        applied, as a plain finite-squeezing run with U_ec would do.
        """
        aim = np.linalg.solve(self.unitary.matrix, self.target_mean)
        if use_displacement:
            return np.outer(weights, aim) - self.predicted_means(gamma, weights)
        return np.outer(weights, aim - self.offset)


def step_correction(target_cov, target_mean, modes, epsilon: float) -> StepCorrection:
    """Correction data for a step whose ideal output is ``(target_mean, target_cov)``.

    The target is the full M-mode state after the step's ideal gate. Modes
    outside ``modes`` may be correlated with the acted ones; the conditional
    moments then involve the whole state, and so do ``D`` and ``U_ec``. For a
    target that factorizes across ``modes`` this reduces to the single-step
    formulas of :func:`correction_displacement` and :func:`actual_output_cov`.
    """
    target_cov = np.asarray(target_cov, dtype=float)
    target_mean = np.asarray(target_mean, dtype=float)
    modes = tuple(modes)
    arity = len(modes)
    dim = target_cov.shape[0]
    sm = sigma_matrices(epsilon, arity)
    idx = quadrature_indices(modes)
    p = np.zeros((2 * arity, dim))
    p[np.arange(2 * arity), idx] = 1.0
    lam = np.linalg.inv(target_cov)
    h_zz = lam + p.T @ (2 * sm.sigma3) @ p
    h_zx = lam @ p.T + p.T @ (2 * sm.sigma2)
    h_xx = p @ lam @ p.T + 2 * sm.sigma1
    proj = h_zx @ np.linalg.inv(h_xx)
    a = h_zz - proj @ h_zx.T
    a = 0.5 * (a + a.T)
    a_inv = np.linalg.inv(a)
    gain_z = a_inv @ (proj @ (2 * sm.sigma2) - p.T @ (2 * sm.sigma3))
    offset_z = a_inv @ (lam @ target_mean - proj @ (p @ lam @ target_mean))
    sinv = np.eye(dim)
    sinv[np.ix_(idx, idx)] = s_t(1.0 / sm.t, arity)
    actual = sinv @ a_inv @ sinv.T
    actual = 0.5 * (actual + actual.T)
    return StepCorrection(
        modes=modes,
        gain=sinv @ gain_z,
        offset=sinv @ offset_z,
        actual_cov=actual,
        unitary=ec_unitary(actual, target_cov),
        target_mean=target_mean,
    )
