"""Worked scenarios: single-mode squeezed input under a quarter turn, and a
two-mode squeezed target from one two-mode gadget step."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correction import (
    actual_output_cov,
    db_to_epsilon,
    deviation,
    step_correction,
    ec_unitary,
    j_k,
    r_to_db,
    tmss_alpha,
    tmsv_cov,
)
from .ensemble import Ensemble, SampledOutcomes
from .gadgets import angles_for_gate, implemented_two_mode_gate, two_mode_step
from .gaussian import GaussianState, phase_shift, two_mode_squeezer
from .temporal import Gate, InputSpec, Program, run_program


# -- single-mode scenario --------------------------------------------------------

QUARTER_TURN_ANGLES = angles_for_gate(phase_shift(np.pi / 2).matrix)


def example1_closed_forms(s: float, epsilon: float) -> dict:
    """Printed closed forms for input ``diag(s, 1/s)/2`` under ``R(pi/2)``."""
    e = epsilon
    t2 = 1.0 - e**2
    num = e * s**2 * t2 - e * (1 + e * s)
    return {
        "sigma_t": 0.5 * np.diag([1 / s, s]),
        "deviation": np.diag([-num / (s * t2 * (1 + e * s)), num / (e + s)]),
        "actual_cov": 0.5 * np.diag([(1 + e * s) / (e + s), (e + s) / (1 + e * s)]),
        "u_ec": np.diag([np.sqrt((1 + e / s) / (1 + e * s)), np.sqrt((1 + e * s) / (1 + e / s))]),
    }


@dataclass
class Example1Report:
    s: float
    epsilon: float
    sigma_in: np.ndarray
    sigma_t: np.ndarray
    deviation: np.ndarray
    actual_cov: np.ndarray
    u_ec: np.ndarray
    closed_form_residual: float
    mc_cov: np.ndarray | None = None
    mc_residual: float | None = None
    mc_tolerance: float | None = None
    trials: int = 0
    seed: int = 0

    @property
    def passed(self) -> bool:
        ok = self.closed_form_residual < 1e-10
        if self.mc_residual is not None:
            ok = ok and self.mc_residual <= self.mc_tolerance
        return ok


def example1_program(s: float) -> Program:
    return Program(1, (Gate("phase", (np.pi / 2,), (0,)),), (InputSpec("squeezed", np.sqrt(s)),))


def example1(s: float, epsilon: float, trials: int = 0, seed: int = 0) -> Example1Report:
    """Analytic pipeline plus an optional corrected Monte Carlo run."""
    if not s > 0:
        raise ValueError("s must be positive")
    sigma_in = 0.5 * np.diag([s, 1 / s])
    r = phase_shift(np.pi / 2).matrix
    sigma_t = r @ sigma_in @ r.T
    dev = deviation(sigma_t, epsilon)
    act = actual_output_cov(sigma_t, epsilon)
    u = ec_unitary(act, sigma_t).matrix
    ref = example1_closed_forms(s, epsilon)
    resid = max(
        np.abs(sigma_t - ref["sigma_t"]).max(),
        np.abs(dev - ref["deviation"]).max(),
        np.abs(act - ref["actual_cov"]).max(),
        np.abs(u - ref["u_ec"]).max(),
    )
    rep = Example1Report(s, epsilon, sigma_in, sigma_t, dev, act, u, float(resid), trials=trials, seed=seed)
    if trials:
        res = run_program(example1_program(s), epsilon, "corrected", trials=trials, seed=seed)
        rep.mc_cov = res.state.cov
        rep.mc_residual = float(np.abs(res.state.cov - sigma_t).max())
        rep.mc_tolerance = 4.0 / np.sqrt(trials)
    return rep


# -- two-mode scenario -----------------------------------------------------------

# One two-mode step with arm gates R(pi/4) and R(-pi/4) acts as a balanced
# beam splitter (up to local phases) and maps a product of two squeezed vacua
# onto the two-mode squeezed vacuum target.
BALANCED_ANGLES = tuple(
    np.array([angles_for_gate(phase_shift(np.pi / 4).matrix), angles_for_gate(phase_shift(-np.pi / 4).matrix)]).T.ravel()
)


def example2_input_cov(r: float) -> np.ndarray:
    v = implemented_two_mode_gate(*BALANCED_ANGLES).matrix
    vi = np.linalg.inv(v)
    out = vi @ tmsv_cov(r) @ vi.T
    return 0.5 * (out + out.T)


def example2_closed_forms(r: float, epsilon: float) -> dict:
    """``I + Delta`` display and the recovery matrix for the two-mode target."""
    t2 = 1.0 - epsilon**2
    j, k = j_k(r, epsilon)
    one_plus = np.zeros((4, 4))
    one_plus[0, 0] = one_plus[2, 2] = j / t2
    one_plus[1, 1] = one_plus[3, 3] = t2 * j
    one_plus[0, 2] = one_plus[2, 0] = k / t2
    one_plus[1, 3] = one_plus[3, 1] = -t2 * k
    z = np.diag([1.0, -1.0])
    jk = np.block([[j * np.eye(2), k * z], [k * z, j * np.eye(2)]])
    return {"J": j, "K": k, "one_plus_deviation": one_plus, "recovery": jk}


@dataclass
class Example2Report:
    r: float
    epsilon: float
    J: float
    K: float
    alpha: float
    sigma_t: np.ndarray
    actual_cov: np.ndarray
    identity_residual: float
    deviation_residual: float
    recovery_residual: float
    unitary_residual: float
    mc_cov: np.ndarray | None = None
    mc_residual: float | None = None
    mc_tolerance: float | None = None
    trials: int = 0
    seed: int = 0

    @property
    def alpha_db(self) -> float:
        return r_to_db(self.alpha)

    @property
    def passed(self) -> bool:
        ok = (
            self.identity_residual < 1e-10
            and self.deviation_residual < 1e-10
            and self.recovery_residual < 1e-9
            and self.unitary_residual < 1e-9
        )
        if self.mc_residual is not None:
            ok = ok and self.mc_residual <= self.mc_tolerance
        return ok


def example2(r: float, epsilon: float, trials: int = 0, seed: int = 0) -> Example2Report:
    """Two-mode squeezed target: J, K, alpha and the recovery check."""
    sigma_t = tmsv_cov(r)
    act = actual_output_cov(sigma_t, epsilon)
    ref = example2_closed_forms(r, epsilon)
    j, k = ref["J"], ref["K"]
    alpha = tmss_alpha(r, epsilon)
    dev = deviation(sigma_t, epsilon)
    u_alpha = two_mode_squeezer(alpha).matrix
    rec = u_alpha @ act @ u_alpha.T
    rep = Example2Report(
        r=r,
        epsilon=epsilon,
        J=j,
        K=k,
        alpha=alpha,
        sigma_t=sigma_t,
        actual_cov=act,
        identity_residual=abs(j * j - k * k - 1.0),
        deviation_residual=float(np.abs(np.eye(4) + dev - ref["one_plus_deviation"]).max()),
        recovery_residual=float(max(np.abs(rec - sigma_t).max(), np.abs(ref["recovery"] @ act - sigma_t).max())),
        unitary_residual=float(np.abs(ec_unitary(act, sigma_t).matrix - u_alpha).max()),
        trials=trials,
        seed=seed,
    )
    if trials:
        ens = Ensemble.from_state(GaussianState(np.zeros(4), example2_input_cov(r)), trials=trials)
        _, gamma, _ = two_mode_step(ens, (0, 1), BALANCED_ANGLES, epsilon, SampledOutcomes(seed))
        corr = step_correction(sigma_t, np.zeros(4), (0, 1), epsilon)
        ens.shift(corr.displacements(gamma, ens.weights))
        ens.apply(corr.unitary)
        _, cov = ens.moments()
        rep.mc_cov = cov
        rep.mc_residual = float(np.abs(cov - sigma_t).max())
        rep.mc_tolerance = 4.0 / np.sqrt(trials)
    return rep


def example2_program(r: float) -> Program:
    """Orthogonally squeezed vacua on a balanced beam splitter."""
    s = np.exp(r)
    return Program(
        2,
        (Gate("beamsplitter", (np.pi / 4,), (0, 1)),),
        (InputSpec("squeezed", s), InputSpec("squeezed", 1 / s)),
    )


# -- correction squeezing versus input squeezing ----------------------------------


def figure3_rows(cluster_db: list[float], r_max: float = 2.5, samples: int = 51):
    """Rows ``(input_db, alpha_db per cluster level)`` on a uniform ``r`` grid."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    for db in cluster_db:
        if not db > 0:
            raise ValueError(f"cluster squeezing must be positive, got {db} dB")
    eps = [db_to_epsilon(db) for db in cluster_db]
    rows = []
    for r in np.linspace(0.0, r_max, samples):
        rows.append([r_to_db(r)] + [r_to_db(tmss_alpha(r, e)) for e in eps])
    return rows

