"""Gaussian states, Gaussian unitaries and their symplectic algebra.

Conventions: quadratures are interleaved as ``(q1, p1, ..., qM, pM)``,
hbar = 1 so the vacuum covariance is ``I/2``, and the symplectic form is
``Omega = diag(J, ..., J)`` with ``J = [[0, 1], [-1, 0]]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

SYMPLECTIC_TOL = 1e-10


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def omega(num_modes: int) -> np.ndarray:
    """Symplectic form for ``num_modes`` modes in interleaved ordering."""
    return np.kron(np.eye(num_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def quadrature_indices(modes: Sequence[int]) -> list[int]:
    return [k for m in modes for k in (2 * m, 2 * m + 1)]


def symplectic_eigenvalues(cov: np.ndarray) -> np.ndarray:
    """Williamson symplectic spectrum of a covariance matrix, sorted ascending.

    The eigenvalues of ``i Omega cov`` come in pairs ``+-nu``; the ``nu`` are
    returned once each.
    """
    n = cov.shape[0] // 2
    ev = np.linalg.eigvals(1j * omega(n) @ cov)
    return np.sort(np.abs(ev.real))[::2]


def is_symplectic(matrix: np.ndarray, tol: float = SYMPLECTIC_TOL) -> bool:
    n = matrix.shape[0] // 2
    om = omega(n)
    return bool(np.max(np.abs(matrix @ om @ matrix.T - om)) <= tol)


@dataclass(frozen=True)
class GaussianState:
    """An M-mode Gaussian state given by its first and second moments."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if mean.size == 0 or mean.size % 2:
            raise ValueError("mean must have even, nonzero length 2M")
        if cov.shape != (mean.size, mean.size):
            raise ValueError(f"cov must be {mean.size}x{mean.size}, got {cov.shape}")
        if not np.all(np.isfinite(cov)) or not np.all(np.isfinite(mean)):
            raise ValueError("moments must be finite")
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen(symmetrize(cov)))

    @property
    def num_modes(self) -> int:
        return self.mean.size // 2

    def purity_det(self) -> float:
        """``det(2 cov)``; equals 1 exactly for pure states."""
        return float(np.linalg.det(2.0 * self.cov))

    def is_pure(self, tol: float = 1e-9) -> bool:
        return abs(self.purity_det() - 1.0) <= tol

    def symplectic_eigenvalues(self) -> np.ndarray:
        return symplectic_eigenvalues(self.cov)

    def satisfies_uncertainty(self, tol: float = 1e-9) -> bool:
        """Check ``cov + i Omega / 2 >= 0`` through the symplectic spectrum."""
        return bool(np.all(self.symplectic_eigenvalues() >= 0.5 - tol))

    def reduced(self, modes: Sequence[int]) -> GaussianState:
        idx = quadrature_indices(modes)
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)])


@dataclass(frozen=True)
class SymplecticTransform:
    """Gaussian unitary acting as ``xi -> matrix @ xi + displacement``."""

    matrix: np.ndarray
    displacement: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.matrix, dtype=float)
        d = np.asarray(self.displacement, dtype=float).reshape(-1)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise ValueError("matrix must be square with even dimension")
        if d.size != s.shape[0]:
            raise ValueError("displacement length must match matrix dimension")
        object.__setattr__(self, "matrix", _frozen(s))
        object.__setattr__(self, "displacement", _frozen(d))

    @classmethod
    def from_matrix(cls, matrix) -> SymplecticTransform:
        matrix = np.asarray(matrix, dtype=float)
        return cls(matrix, np.zeros(matrix.shape[0]))

    @classmethod
    def identity(cls, num_modes: int) -> SymplecticTransform:
        return cls.from_matrix(np.eye(2 * num_modes))

    @property
    def num_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def is_symplectic(self, tol: float = SYMPLECTIC_TOL) -> bool:
        return is_symplectic(self.matrix, tol)

    def __matmul__(self, other: SymplecticTransform) -> SymplecticTransform:
        # (self @ other) applies `other` first.
        return SymplecticTransform(
            self.matrix @ other.matrix,
            self.matrix @ other.displacement + self.displacement,
        )

    def inverse(self) -> SymplecticTransform:
        inv = np.linalg.inv(self.matrix)
        return SymplecticTransform(inv, -inv @ self.displacement)


def vacuum(num_modes: int) -> GaussianState:
    if num_modes < 1:
        raise ValueError("num_modes must be >= 1")
    return GaussianState(np.zeros(2 * num_modes), 0.5 * np.eye(2 * num_modes))


def momentum_squeezed_vacuum(epsilon: float) -> GaussianState:
    """Single-mode vacuum squeezed in p: ``cov = diag(1/(2 eps), eps/2)``."""
    if not 0.0 < epsilon <= 1.0:
        raise ValueError(f"epsilon must be in (0, 1], got {epsilon}")
    return GaussianState(np.zeros(2), np.diag([0.5 / epsilon, 0.5 * epsilon]))


def squeezed_vacuum(s: float) -> GaussianState:
    """``squeezer(s)`` applied to the vacuum: ``cov = diag(s^2, 1/s^2) / 2``."""
    return apply(vacuum(1), squeezer(s))


def direct_sum(*states: GaussianState) -> GaussianState:
    """Product state of independent subsystems, modes in argument order."""
    from scipy.linalg import block_diag

    return GaussianState(
        np.concatenate([s.mean for s in states]),
        block_diag(*[s.cov for s in states]),
    )


def phase_shift(theta: float) -> SymplecticTransform:
    c, s = np.cos(theta), np.sin(theta)
    return SymplecticTransform.from_matrix([[c, -s], [s, c]])


def squeezer(s: float) -> SymplecticTransform:
    """Position-scaling squeezer ``diag(s, 1/s)``."""
    if not s > 0:
        raise ValueError(f"squeezing factor must be positive, got {s}")
    return SymplecticTransform.from_matrix(np.diag([s, 1.0 / s]))


def cz_gate(g: float) -> SymplecticTransform:
    m = np.eye(4)
    m[1, 2] = g  # p_j += g q_k
    m[3, 0] = g  # p_k += g q_j
    return SymplecticTransform.from_matrix(m)


def beam_splitter(theta: float) -> SymplecticTransform:
    c, s = np.cos(theta), np.sin(theta)
    i2 = np.eye(2)
    return SymplecticTransform.from_matrix(np.block([[c * i2, -s * i2], [s * i2, c * i2]]))


def two_mode_squeezer(alpha: float) -> SymplecticTransform:
    """``[[cosh a I, sinh a Z], [sinh a Z, cosh a I]]`` with ``Z = diag(1, -1)``."""
    ch, sh = np.cosh(alpha), np.sinh(alpha)
    i2, z2 = np.eye(2), np.diag([1.0, -1.0])
    return SymplecticTransform.from_matrix(np.block([[ch * i2, sh * z2], [sh * z2, ch * i2]]))


def displace(sq: float, sp: float) -> SymplecticTransform:
    return SymplecticTransform(np.eye(2), [sq, sp])


def embed(t: SymplecticTransform, modes: Sequence[int], num_modes: int) -> SymplecticTransform:
    """Lift ``t`` to ``num_modes`` modes, acting on ``modes`` (in that order)."""
    modes = list(modes)
    if len(modes) != t.num_modes:
        raise ValueError(f"transform acts on {t.num_modes} modes, got {len(modes)} indices")
    if len(set(modes)) != len(modes):
        raise ValueError(f"duplicate mode indices {modes}")
    if any(m < 0 or m >= num_modes for m in modes):
        raise ValueError(f"mode indices {modes} out of range for {num_modes} modes")
    idx = quadrature_indices(modes)
    matrix = np.eye(2 * num_modes)
    matrix[np.ix_(idx, idx)] = t.matrix
    disp = np.zeros(2 * num_modes)
    disp[idx] = t.displacement
    return SymplecticTransform(matrix, disp)


def apply(state: GaussianState, t: SymplecticTransform) -> GaussianState:
    if state.num_modes != t.num_modes:
        raise ValueError(f"state has {state.num_modes} modes, transform {t.num_modes}")
    s = t.matrix
    return GaussianState(s @ state.mean + t.displacement, s @ state.cov @ s.T)


def wigner_eval(state: GaussianState, point) -> float:
    """Wigner function of a (displaced) Gaussian state at a phase-space point."""
    xi = np.asarray(point, dtype=float) - state.mean
    sign, logdet = np.linalg.slogdet(state.cov)
    quad = xi @ np.linalg.solve(state.cov, xi)
    n = state.num_modes
    return float(np.exp(-0.5 * quad - 0.5 * logdet - n * np.log(2 * np.pi)))
