"""Invariant suite run by ``cvmbqc verify``.

Each check reports a measured residual against a tolerance. Statistical
checks use ``trials`` samples and tolerances proportional to ``1/sqrt(trials)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import gadgets
from .correction import actual_output_cov, ec_unitary, step_correction
from .ensemble import Ensemble, ExactOutcomes, SampledOutcomes
from .gaussian import GaussianState, apply, omega, vacuum, wigner_eval
from .homodyne import condition
from .randgen import random_angles, random_moderate_angles, random_pure_state, random_symplectic
from .scenarios import example1, example2, figure3_rows
from .temporal import InputSpec, build_ledger, Gate, Program, random_two_mode_program, run_program


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    detail: str = ""


def _check(name, residual, tol, detail="", passed=None) -> CheckResult:
    residual = float(residual)
    ok = residual <= tol if passed is None else bool(passed)
    return CheckResult(name, residual, float(tol), ok, detail)


def _step_ensemble(state, arity, angles, eps, source, exact=False, trials=1):
    ens = Ensemble.from_state(state, trials=trials, exact=exact)
    if arity == 1:
        _, gamma, _ = gadgets.single_mode_step(ens, 0, *angles, eps, source)
        gate = gadgets.implemented_gate(*angles)
    else:
        _, gamma, _ = gadgets.two_mode_step(ens, (0, 1), angles, eps, source)
        gate = gadgets.implemented_two_mode_gate(*angles)
    return ens, gamma, gate


def check_symplectic(seed, trials):
    rng = np.random.default_rng(seed)
    worst = worst_det = 0.0
    for k in range(1000):
        n = 1 + k % 4
        s = random_symplectic(n, rng).matrix
        worst = max(worst, np.abs(s @ omega(n) @ s.T - omega(n)).max())
        worst_det = max(worst_det, abs(np.linalg.det(s) - 1.0))
    return [_check("symplectic condition, 1000 random transforms", worst, 1e-10),
            _check("unit determinant, 1000 random transforms", worst_det, 1e-9)]


def check_state_invariants(seed, trials):
    rng = np.random.default_rng(seed + 1)
    spec = purity = wig = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 4))
        st = random_pure_state(n, rng, mean_scale=0.5)
        tr = random_symplectic(n, rng)
        tr = type(tr)(tr.matrix, rng.normal(size=2 * n))
        out = apply(st, tr)
        spec = max(spec, np.abs(out.symplectic_eigenvalues() - st.symplectic_eigenvalues()).max())
        purity = max(purity, abs(out.purity_det() - st.purity_det()))
        for _ in range(5):
            x = out.mean + rng.normal(size=2 * n)
            lhs = wigner_eval(out, x)
            rhs = wigner_eval(st, np.linalg.solve(tr.matrix, x - tr.displacement))
            wig = max(wig, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    return [_check("symplectic spectrum preserved by apply", spec, 1e-9),
            _check("purity preserved by apply", purity, 1e-9),
            _check("Wigner transformation law (relative)", wig, 1e-10)]


def check_homodyne(seed, trials):
    rng = np.random.default_rng(seed + 2)
    st = random_pure_state(3, rng, 0.5)
    covs = [condition(st, 1, 0.4, m)[0].cov for m in (-3.0, 0.0, 7.0)]
    indep = max(np.abs(c - covs[0]).max() for c in covs)
    a, _ = condition(st, 0, 0.3, 0.7)
    a, _ = condition(a, 1, 1.1, -0.2)  # original mode 2
    b, _ = condition(st, 2, 1.1, -0.2)
    b, _ = condition(b, 0, 0.3, 0.7)
    comm = max(np.abs(a.cov - b.cov).max(), np.abs(a.mean - b.mean).max())
    out = [_check("posterior covariance independent of outcome", indep, 1e-12),
           _check("conditioning on disjoint modes commutes", comm, 1e-10)]
    # sampled q-measurement of vacuum, variance 1/2
    ens = Ensemble.from_state(vacuum(2), trials=trials)
    o, _, _ = ens.measure(0, np.pi / 2, SampledOutcomes(seed))
    se = 0.5 * np.sqrt(2.0 / trials)
    out.append(_check("sampled vacuum quadrature variance", abs(o.var() - 0.5), 4 * se))
    # law of total covariance on the unmeasured modes
    ens = Ensemble.from_state(st, trials=trials)
    ens.measure(1, 0.4, SampledOutcomes(seed + 1))
    _, cov = ens.moments()
    before = st.reduced([0, 2]).cov
    tol = 4 * np.sqrt((np.outer(np.diag(before), np.diag(before)) + before**2) / trials).max()
    out.append(_check("law of total covariance after sampling", np.abs(cov - before).max(), tol))
    return out


def check_gadgets(seed, trials):
    rng = np.random.default_rng(seed + 3)
    worst = 0.0
    for _ in range(20):
        th = random_moderate_angles(1, rng)
        st = random_pure_state(1, rng, layers=1)
        run = gadgets.run_single_gadget(st, gadgets.GadgetParams(1e-6, th), outcomes=(0.0, 0.0))
        worst = max(worst, np.abs(run.output.cov - apply(st, gadgets.gate_from_angles(*th)).cov).max())
    out = [_check("gadget at eps=1e-6 reproduces gate_from_angles", worst, 1e-4)]
    for arity in (1, 2):
        worst = 0.0
        for _ in range(20):
            th = random_angles(arity, rng)
            eps = rng.uniform(0.02, 0.5)
            st = random_pure_state(arity, rng)
            ens, _, gate = _step_ensemble(st, arity, th, eps, ExactOutcomes(), exact=True)
            worst = max(worst, np.abs(ens.cov - actual_output_cov(apply(st, gate).cov, eps)).max())
        out.append(_check(f"conditioning oracle vs analytic output covariance ({arity}-mode)", worst, 1e-9))
    out += check_feedforward(seed, trials)
    out += check_ideal_limit(seed)
    return out


def check_feedforward(seed, trials):
    rng = np.random.default_rng(seed + 4)
    th = random_moderate_angles(1, rng)
    st = random_pure_state(1, rng, layers=1)
    ens, _, _ = _step_ensemble(st, 1, th, 0.1, SampledOutcomes(seed), trials=trials)
    mean, cov = ens.moments()
    z = np.abs(mean) / np.sqrt(np.diag(cov) / trials)
    out = [_check("zero-mean input: E[output mean] in standard errors", z.max(), 3.0)]
    # ideal limit: feedforward must cancel the outcome dependence of the mean
    shifted = GaussianState(np.array([0.8, -0.5]), st.cov)
    ens, _, gate = _step_ensemble(shifted, 1, th, 1e-4, SampledOutcomes(seed + 1), trials=min(trials, 2000))
    # residual spread is O(sqrt(eps)); without cancellation it would be O(1/sqrt(eps))
    spread = ens.means.std(axis=0).max()
    out.append(_check("feedforward cancels outcome dependence at eps=1e-4", spread, 20 * np.sqrt(1e-4)))
    bias = np.abs(ens.means.mean(axis=0) - gate.matrix @ shifted.mean).max()
    out.append(_check("displaced input: mean follows the gate at eps=1e-4", bias, 0.05))
    return out


def check_ideal_limit(seed):
    rng = np.random.default_rng(seed + 5)
    out = []
    for arity in (1, 2):
        th = random_angles(arity, rng)
        st = random_pure_state(arity, rng)
        errs = []
        for eps in (1e-2, 1e-3, 1e-4):
            ens, _, gate = _step_ensemble(st, arity, th, eps, ExactOutcomes(), exact=True)
            errs.append(np.abs(ens.moments()[1] - apply(st, gate).cov).max())
        slope = np.polyfit(np.log10([1e-2, 1e-3, 1e-4]), np.log10(errs), 1)[0]
        mono = errs[0] > errs[1] > errs[2]
        out.append(_check(f"ideal-limit slope ({arity}-mode, uncorrected)", abs(slope - 1.0), 0.2,
                          f"slope={slope:.4f}", passed=mono and 0.8 <= slope <= 1.2))
    return out


def check_correction(seed, trials):
    rng = np.random.default_rng(seed + 6)
    tol = 4.0 / np.sqrt(trials)
    out = []
    for arity in (1, 2):
        worst = 0.0
        for eps in (0.05, 0.1):
            th = random_angles(arity, rng)
            st = GaussianState(np.zeros(2 * arity), random_pure_state(arity, rng).cov)
            ens, gamma, gate = _step_ensemble(st, arity, th, eps, SampledOutcomes(seed), trials=trials)
            target = apply(st, gate)
            corr = step_correction(target.cov, target.mean, tuple(range(arity)), eps)
            ens.shift(corr.displacements(gamma, ens.weights))
            ens.apply(corr.unitary)
            worst = max(worst, np.abs(ens.moments()[1] - target.cov).max())
        out.append(_check(f"corrected Monte Carlo reproduces the target ({arity}-mode)", worst, tol))
    # the outcome-dependent displacement removes broadening
    prog = Program(1, (Gate("phase", (np.pi / 2,), (0,)),), (InputSpec("squeezed", np.sqrt(0.5)),))
    with_d = run_program(prog, 0.1, "corrected", exact=True).state.cov
    without = run_program(prog, 0.1, "corrected", exact=True, use_displacement=False).state.cov
    low = np.linalg.eigvalsh(without - with_d).min()
    out.append(_check("broadening without D is positive definite", -low, 0.0, f"min eig={low:.3e}", passed=low > 0))
    u_worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 3))
        a, b = random_pure_state(n, rng).cov, random_pure_state(n, rng).cov
        u = ec_unitary(a, b).matrix
        u_worst = max(u_worst, np.abs(u @ omega(n) @ u.T - omega(n)).max(), np.abs(u @ a @ u.T - b).max())
    out.append(_check("ec_unitary symplectic and congruent (50 pairs)", u_worst, 1e-9))
    return out


def check_examples(seed, trials):
    worst1 = max(example1(s, e).closed_form_residual for s in (0.25, 0.5, 2.0) for e in (0.05, 0.1, 0.3))
    reps = [example2(r, e) for r in (0.5, 1.0, 1.5) for e in (0.1, 0.25)]
    out = [_check("single-mode closed forms", worst1, 1e-10),
           _check("J^2 - K^2 = 1", max(r.identity_residual for r in reps), 1e-10),
           _check("two-mode deviation display", max(r.deviation_residual for r in reps), 1e-10),
           _check("two-mode squeezer recovery", max(r.recovery_residual for r in reps), 1e-9)]
    rows = np.array(figure3_rows([4.0, 6.0, 10.0]))
    mono = bool(np.all(np.diff(rows[:, 1:], axis=0) > 0))
    order = bool(np.all(rows[1:, 1] > rows[1:, 2]) and np.all(rows[1:, 2] > rows[1:, 3]))
    out.append(_check("correction squeezing curves", np.abs(rows[0, 1:]).max(), 0.0,
                      f"monotone={mono} ordered={order}", passed=mono and order and not rows[0, 1:].any()))
    return out


def check_programs(seed, trials):
    out = []
    counts = []
    for m in (2, 4, 8):
        prog = Program(m, (Gate("beamsplitter", (0.3,), (0, 1)),))
        counts.append(build_ledger(prog).entries[0].updated_entries)
    out.append(_check("ledger counts for M = 2, 4, 8", max(abs(c - e) for c, e in zip(counts, (12, 28, 60))), 0,
                      f"counts={counts}"))
    rng = np.random.default_rng(seed + 7)
    prog = random_two_mode_program(3, 4, rng, [InputSpec("squeezed", 0.6), InputSpec("squeezed", 1.4), InputSpec()])
    res = run_program(prog, 0.1, "corrected", trials=trials, seed=seed)
    out.append(_check("corrected 3-mode program vs ideal", np.abs(res.state.cov - res.target.cov).max(), 4 / np.sqrt(trials)))
    return out


SUITES: list[tuple[str, Callable]] = [
    ("gaussian-core", lambda s, n: check_symplectic(s, n) + check_state_invariants(s, n)),
    ("homodyne", check_homodyne),
    ("mbqc-gadgets", check_gadgets),
    ("error-correction", check_correction),
    ("examples", check_examples),
    ("temporal-multimode", check_programs),
]


def run_suite(seed: int = 0, trials: int = 100_000) -> list[tuple[str, CheckResult]]:
    results = []
    for suite, fn in SUITES:
        for r in fn(seed, trials):
            results.append((suite, r))
    return results
