"""Measurement-based single-mode and two-mode gadgets on two-mode clusters.

Single-mode gadget: the input mode ``a`` and mode ``c`` of a two-mode cluster
``(c, c')`` meet on a 50:50 beam splitter; ``b_theta1`` is read on the input
port and ``b_theta3`` on the cluster port, and ``c'`` carries the output after
the displacement ``C^dagger(m1, m3)``.

With this port assignment the feedforward of :func:`feedforward_single` cancels
the outcome-dependent shift exactly in the infinite-squeezing limit, and the
gate realized on the input is ``gate_from_angles(theta1, theta3) @ R(pi)``.
Both products coincide on covariances; the extra half turn only flips means.
:func:`implemented_gate` returns the realized gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ensemble import Ensemble, FixedOutcomes, SampledOutcomes
from .gaussian import (
    GaussianState,
    SymplecticTransform,
    apply,
    beam_splitter,
    cz_gate,
    direct_sum,
    embed,
    momentum_squeezed_vacuum,
    phase_shift,
)
from .homodyne import MeasurementRecord, gaussian_pdf
from .rng import StreamKey

ANGLE_TOL = 1e-9
_R_PI = np.array([[-1.0, 0.0], [0.0, -1.0]])


class DegenerateAnglesError(ValueError):
    """Raised when ``sin(theta1 - theta3)`` (or its partner arm) vanishes."""


def cluster_t(epsilon: float) -> float:
    return float(np.sqrt(1.0 - epsilon**2))


def _check_epsilon(epsilon: float) -> None:
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"cluster epsilon must be in (0, 1), got {epsilon}")


def _check_pair(theta1: float, theta3: float) -> None:
    if abs(np.sin(theta1 - theta3)) <= ANGLE_TOL:
        raise DegenerateAnglesError(
            f"degenerate angle pair ({theta1}, {theta3}): |sin(theta1 - theta3)| <= {ANGLE_TOL:g}"
        )


@dataclass(frozen=True)
class GadgetParams:
    """Cluster squeezing and homodyne angles of one gadget step.

    Attributes:
        epsilon: Cluster squeezing parameter in (0, 1); ``t = sqrt(1 - eps^2)``.
        angles: ``(theta1, theta3)`` for a single-mode step or
            ``(theta1, theta2, theta3, theta4)`` for a two-mode step.
    """

    epsilon: float
    angles: tuple = field(default_factory=tuple)

    def __post_init__(self):
        _check_epsilon(self.epsilon)
        angles = tuple(float(a) for a in self.angles)
        if len(angles) not in (2, 4):
            raise ValueError("angles must have 2 (single-mode) or 4 (two-mode) entries")
        object.__setattr__(self, "angles", angles)
        for pair in self.arm_angles:
            _check_pair(*pair)

    @property
    def t(self) -> float:
        return cluster_t(self.epsilon)

    @property
    def arity(self) -> int:
        return len(self.angles) // 2

    @property
    def arm_angles(self) -> list[tuple[float, float]]:
        """``[(theta1, theta3)]`` or ``[(theta1, theta3), (theta2, theta4)]``."""
        a = self.angles
        return [(a[0], a[1])] if len(a) == 2 else [(a[0], a[2]), (a[1], a[3])]


@dataclass(frozen=True)
class GadgetRun:
    output: GaussianState
    outcomes: list
    feedforward: np.ndarray
    implemented_gate: SymplecticTransform


def two_mode_cluster(epsilon: float) -> GaussianState:
    """``C_Z(t)`` applied to two momentum-squeezed vacua."""
    _check_epsilon(epsilon)
    sq = momentum_squeezed_vacuum(epsilon)
    return apply(direct_sum(sq, sq), cz_gate(cluster_t(epsilon)))


def _lambda_squeezer(lam: float) -> np.ndarray:
    # Plain matrix diag(lam, 1/lam); lam < 0 is allowed and still symplectic.
    return np.diag([lam, 1.0 / lam])


def gate_from_angles(theta1: float, theta3: float) -> SymplecticTransform:
    """``R(th+/2) S(tan(th-/2)) R(th+/2) R(pi)`` with ``th+- = theta1 +- theta3``."""
    _check_pair(theta1, theta3)
    tp, tm = theta1 + theta3, theta1 - theta3
    r = phase_shift(tp / 2).matrix
    return SymplecticTransform.from_matrix(r @ _lambda_squeezer(np.tan(tm / 2)) @ r @ _R_PI)


def implemented_gate(theta1: float, theta3: float) -> SymplecticTransform:
    """Gate realized by the single-mode gadget at infinite squeezing."""
    v = gate_from_angles(theta1, theta3).matrix
    return SymplecticTransform.from_matrix(v @ _R_PI)


def two_mode_gate_from_angles(
    theta1: float, theta2: float, theta3: float, theta4: float
) -> SymplecticTransform:
    """``B(-pi/4) [V_a(theta1, theta3) + V_b(theta2, theta4)] B(pi/4)``."""
    va = gate_from_angles(theta1, theta3).matrix
    vb = gate_from_angles(theta2, theta4).matrix
    block = np.zeros((4, 4))
    block[:2, :2], block[2:, 2:] = va, vb
    m = beam_splitter(-np.pi / 4).matrix @ block @ beam_splitter(np.pi / 4).matrix
    return SymplecticTransform.from_matrix(m)


def implemented_two_mode_gate(
    theta1: float, theta2: float, theta3: float, theta4: float
) -> SymplecticTransform:
    """Gate realized by the two-mode gadget at infinite squeezing."""
    return SymplecticTransform.from_matrix(-two_mode_gate_from_angles(theta1, theta2, theta3, theta4).matrix)


def feedforward_single(m1, m3, theta1: float, theta3: float, t: float) -> np.ndarray:
    """Feedforward displacement amplitudes ``(m_q, m_p)``.

    Args:
        m1: Outcome(s) of ``b_theta1``; scalars or equal-length arrays.
        m3: Outcome(s) of ``b_theta3``.
        theta1: Angle read on the input port.
        theta3: Angle read on the cluster port.
        t: Cluster coupling ``sqrt(1 - eps^2)``.

    Returns:
        Array with last axis ``(m_q, m_p)``. The applied operation is the
        inverse displacement, shifting ``(q, p)`` by ``(-m_q, -m_p)``.
    """
    _check_pair(theta1, theta3)
    m1, m3 = np.asarray(m1, dtype=float), np.asarray(m3, dtype=float)
    sm = np.sin(theta1 - theta3)
    mq = np.sqrt(2.0) * (m1 * np.sin(theta3) + m3 * np.sin(theta1)) / (t * sm)
    mp = -np.sqrt(2.0) * t * (m1 * np.cos(theta3) + m3 * np.cos(theta1)) / sm
    return np.stack([mq, mp], axis=-1)


def angles_for_gate(gate) -> tuple[float, float]:
    """Angles whose single-mode gadget realizes ``gate`` in one step.

    One step reaches exactly the matrices ``R(a) S(lam) R(a)`` (with ``lam``
    of either sign), which are the SL(2) matrices with ``G[0,1] = -G[1,0]``.

    Args:
        gate: 2x2 matrix or single-mode SymplecticTransform.

    Returns:
        ``(theta1, theta3)`` with ``implemented_gate(theta1, theta3) == gate``.

    Raises:
        ValueError: if ``gate`` is not reachable in one step.
    """
    g = np.asarray(getattr(gate, "matrix", gate), dtype=float)
    if abs(np.linalg.det(g) - 1.0) > 1e-9 or abs(g[0, 1] + g[1, 0]) > 1e-9 * max(1.0, np.abs(g).max()):
        raise ValueError("gate is not reachable by a single gadget step")
    a, b, c = g[0, 0], g[1, 0], g[1, 1]
    tm = np.arctan2(1.0, (c - a) / 2.0)  # in (0, pi)
    tp = np.arctan2(b, (a + c) / 2.0)
    return float((tp + tm) / 2.0), float((tp - tm) / 2.0)


def _s(t: float) -> np.ndarray:
    return np.diag([t, 1.0 / t])


def single_mode_step(ens: Ensemble, mode: int, theta1: float, theta3: float, epsilon: float, source):
    """Run one single-mode gadget on ``mode`` of an ensemble in place.

    Returns:
        ``(feedforward, gamma, records)`` where ``feedforward`` holds the
        ``(m_q, m_p)`` rows, ``gamma = S(t) (m_q, m_p)`` rows and ``records``
        lists ``(mode_index, angle, outcomes, predicted, variance)`` tuples.
    """
    t = cluster_t(epsilon)
    n = ens.num_modes
    ens.append(two_mode_cluster(epsilon))  # modes n (c) and n+1 (c')
    ens.apply(embed(beam_splitter(np.pi / 4), [mode, n], n + 2))
    records = []
    o1, p1, v1 = ens.measure(mode, theta1, source)
    records.append((mode, theta1, o1, p1, v1))
    o3, p3, v3 = ens.measure(n - 1, theta3, source)
    records.append((n - 1, theta3, o3, p3, v3))
    # survivor c' is now the last mode; move it into the input slot
    order = list(range(n - 1))
    order.insert(mode, n - 1)
    ens.permute(order)
    ff = feedforward_single(ens.pad(o1), o3, theta1, theta3, t)
    ens.shift(-ff, [mode])
    return ff, ff @ _s(t).T, records


def two_mode_step(ens: Ensemble, modes, angles, epsilon: float, source):
    """Run one two-mode gadget on ``modes = (j, k)`` of an ensemble in place.

    Arm ``a`` (``theta1, theta3``) acts on ``j`` and arm ``b`` (``theta2,
    theta4``) on ``k``, each with its own cluster, between ``B(pi/4)`` and
    ``B(-pi/4)``.

    Returns:
        ``(feedforward, gamma, records)`` with feedforward rows
        ``(m_q, m_p, mbar_q, mbar_p)`` and
        ``gamma = S~(t) B(-pi/4) (m_q, m_p, mbar_q, mbar_p)``.
    """
    j, k = modes
    th1, th2, th3, th4 = angles
    n = ens.num_modes
    t = cluster_t(epsilon)
    ens.apply(embed(beam_splitter(np.pi / 4), [j, k], n))
    ffa, _, rec_a = single_mode_step(ens, j, th1, th3, epsilon, source)
    ffb, _, rec_b = single_mode_step(ens, k, th2, th4, epsilon, source)
    ens.apply(embed(beam_splitter(-np.pi / 4), [j, k], n))
    ff = np.hstack([ens.pad(ffa), ffb])
    st = np.zeros((4, 4))
    st[:2, :2] = st[2:, 2:] = _s(t)
    gamma = ff @ (st @ beam_splitter(-np.pi / 4).matrix).T
    return ff, gamma, rec_a + rec_b


def _source(outcomes, key: StreamKey | None, needed: int):
    if outcomes is not None:
        outcomes = list(outcomes)
        if len(outcomes) != needed:
            raise ValueError(f"expected {needed} outcomes, got {len(outcomes)}")
        return FixedOutcomes(outcomes)
    key = key or StreamKey(0)
    return SampledOutcomes(key.seed, key.trial)


def _records(raw) -> list[MeasurementRecord]:
    out = []
    for mode, angle, o, p, v in raw:
        out.append(MeasurementRecord(int(mode), float(angle), float(o[0]), float(gaussian_pdf(o[0], p[0], v))))
    return out


def run_single_gadget(state: GaussianState, params: GadgetParams, outcomes=None, key: StreamKey | None = None) -> GadgetRun:
    """Teleport a single-mode state through one gadget.

    Args:
        state: Single-mode input (pure or mixed, any mean).
        params: Cluster squeezing and ``(theta1, theta3)``.
        outcomes: Optional fixed ``(m1, m3)``; sampled from ``key`` otherwise.
        key: Stream key used when sampling (defaults to seed 0, trial 0).

    Returns:
        The conditional output after standard feedforward.
    """
    if state.num_modes != 1 or params.arity != 1:
        raise ValueError("single-mode gadget needs a 1-mode state and two angles")
    ens = Ensemble.from_state(state)
    th1, th3 = params.angles
    ff, _, raw = single_mode_step(ens, 0, th1, th3, params.epsilon, _source(outcomes, key, 2))
    return GadgetRun(ens.row_state(0), _records(raw), ff[0], implemented_gate(th1, th3))


def run_two_mode_gadget(state: GaussianState, params: GadgetParams, outcomes=None, key: StreamKey | None = None) -> GadgetRun:
    """Run a two-mode state through one two-mode gadget.

    Fixed outcomes are given in measurement order ``(m1, m3, m2, m4)``.
    """
    if state.num_modes != 2 or params.arity != 2:
        raise ValueError("two-mode gadget needs a 2-mode state and four angles")
    ens = Ensemble.from_state(state)
    ff, _, raw = two_mode_step(ens, (0, 1), params.angles, params.epsilon, _source(outcomes, key, 4))
    return GadgetRun(ens.row_state(0), _records(raw), ff[0], implemented_two_mode_gate(*params.angles))
