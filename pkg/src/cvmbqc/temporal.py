"""Multimode programs run as sequences of gadget steps on a temporal cluster.

Modes are logical indices: every gadget step consumes fresh cluster modes and
retires them after measurement, so the simulated register always holds the M
computational modes. A classical tracker follows the ideal state through the
program; in corrected mode each step's correction is computed from it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .correction import db_to_r, step_correction
from .ensemble import Ensemble, ExactOutcomes, SampledOutcomes
from .gadgets import (
    DegenerateAnglesError,
    angles_for_gate,
    implemented_gate,
    implemented_two_mode_gate,
    single_mode_step,
    two_mode_step,
)
from .gaussian import (
    GaussianState,
    SymplecticTransform,
    apply,
    beam_splitter,
    cz_gate,
    direct_sum,
    displace,
    embed,
    phase_shift,
    squeezer,
    vacuum,
)

MODES = ("ideal", "uncorrected", "corrected")

# kind -> (number of parameters, number of target modes)
GATE_KINDS = {
    "phase": (1, 1),
    "squeeze": (1, 1),
    "displace": (2, 1),
    "cz": (1, 2),
    "beamsplitter": (1, 2),
    "two-mode-general": (4, 2),
}


class ProgramError(ValueError):
    """Raised for invalid programs or failures at a given step."""


@dataclass(frozen=True)
class Gate:
    kind: str
    params: tuple
    modes: tuple

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ProgramError(f"unknown gate kind {self.kind!r}")
        n_par, n_modes = GATE_KINDS[self.kind]
        params = tuple(float(x) for x in self.params)
        modes = tuple(int(m) for m in self.modes)
        if len(params) != n_par:
            raise ProgramError(f"{self.kind} takes {n_par} parameter(s), got {len(params)}")
        if len(modes) != n_modes:
            raise ProgramError(f"{self.kind} acts on {n_modes} mode(s), got {len(modes)}")
        if len(set(modes)) != len(modes):
            raise ProgramError(f"{self.kind} needs distinct target modes, got {modes}")
        if self.kind == "squeeze" and not params[0] > 0:
            raise ProgramError("squeeze factor must be positive")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "modes", modes)

    def local_transform(self) -> SymplecticTransform:
        """Ideal gate on its own target modes."""
        k, p = self.kind, self.params
        if k == "phase":
            return phase_shift(p[0])
        if k == "squeeze":
            return squeezer(p[0])
        if k == "displace":
            return displace(p[0], p[1])
        if k == "cz":
            return cz_gate(p[0])
        if k == "beamsplitter":
            return beam_splitter(p[0])
        return implemented_two_mode_gate(*p)


@dataclass(frozen=True)
class InputSpec:
    """Initial state of one mode: ``vacuum``, ``squeezed`` or ``squeezed_db``.

    ``squeezed s`` is ``squeezer(s)`` on the vacuum. ``squeezed_db d`` squeezes
    the ``quadrature`` ('q' or 'p') by ``d`` dB below the vacuum level.
    """

    kind: str = "vacuum"
    value: float = 0.0
    quadrature: str = "q"

    def __post_init__(self):
        if self.kind not in ("vacuum", "squeezed", "squeezed_db"):
            raise ProgramError(f"unknown input kind {self.kind!r}")
        if self.kind == "squeezed" and not self.value > 0:
            raise ProgramError("squeezing factor must be positive")
        if self.kind == "squeezed_db" and self.value < 0:
            raise ProgramError("dB value must be nonnegative")
        if self.quadrature not in ("q", "p"):
            raise ProgramError("quadrature must be 'q' or 'p'")

    def state(self) -> GaussianState:
        if self.kind == "vacuum":
            return vacuum(1)
        if self.kind == "squeezed":
            return apply(vacuum(1), squeezer(self.value))
        r = db_to_r(self.value)
        s = np.exp(-r) if self.quadrature == "q" else np.exp(r)
        return apply(vacuum(1), squeezer(s))


@dataclass(frozen=True)
class Program:
    num_modes: int
    steps: tuple = ()
    inputs: tuple = ()

    def __post_init__(self):
        if self.num_modes < 1:
            raise ProgramError("a program needs at least one mode")
        inputs = tuple(self.inputs) or tuple(InputSpec() for _ in range(self.num_modes))
        if len(inputs) != self.num_modes:
            raise ProgramError(f"expected {self.num_modes} inputs, got {len(inputs)}")
        for i, g in enumerate(self.steps):
            if any(m >= self.num_modes or m < 0 for m in g.modes):
                raise ProgramError(f"step {i}: mode index out of range in {g.modes}")
            try:
                compile_gate(g)
            except (DegenerateAnglesError, ValueError) as err:
                raise ProgramError(f"step {i} ({g.kind}): {err}") from err
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "inputs", inputs)

    def input_state(self) -> GaussianState:
        return direct_sum(*[spec.state() for spec in self.inputs])

    def gate_transform(self, k: int) -> SymplecticTransform:
        g = self.steps[k]
        return embed(g.local_transform(), g.modes, self.num_modes)


# -- compilation into gadget steps ----------------------------------------------


@dataclass(frozen=True)
class GadgetStep:
    """One gadget execution (or a classical displacement when ``angles`` is empty)."""

    modes: tuple
    angles: tuple
    gate: SymplecticTransform  # realized gate on ``modes``

    @property
    def classical(self) -> bool:
        return not self.angles


_IDENTITY_ANGLES = angles_for_gate(np.eye(2))


def split_single_mode(g: np.ndarray) -> list[tuple[float, float]]:
    """Angle pairs of at most two single-mode steps realizing ``g`` (in order).

    ``g = R(x) S(k) R(y)`` is realized by ``R(y - x)`` followed by
    ``R(x) S(k) R(x)``, both of which are one-step gates.
    """
    g = np.asarray(g, dtype=float)
    try:
        return [angles_for_gate(g)]
    except ValueError:
        pass
    u, sv, vt = np.linalg.svd(g)
    if np.linalg.det(u) < 0:
        u[:, 1] *= -1
        vt[1, :] *= -1
    x = np.arctan2(u[1, 0], u[0, 0])
    y = np.arctan2(vt[1, 0], vt[0, 0])
    r = phase_shift(x).matrix
    second = r @ np.diag([sv[0], 1.0 / sv[0]]) @ r
    return [angles_for_gate(phase_shift(y - x).matrix), angles_for_gate(second)]


def _single(mode, angles) -> GadgetStep:
    return GadgetStep((mode,), tuple(angles), implemented_gate(*angles))


def _pair(modes, arm_a, arm_b) -> GadgetStep:
    angles = (arm_a[0], arm_b[0], arm_a[1], arm_b[1])
    return GadgetStep(tuple(modes), angles, implemented_two_mode_gate(*angles))


def compile_block_pair(modes, ga: np.ndarray, gb: np.ndarray) -> list[GadgetStep]:
    """Two-mode steps realizing ``B(-pi/4) (ga + gb) B(pi/4)`` on ``modes``."""
    sa, sb = split_single_mode(ga), split_single_mode(gb)
    n = max(len(sa), len(sb))
    sa = [_IDENTITY_ANGLES] * (n - len(sa)) + sa
    sb = [_IDENTITY_ANGLES] * (n - len(sb)) + sb
    return [_pair(modes, a, b) for a, b in zip(sa, sb)]


def compile_gate(gate: Gate) -> list[GadgetStep]:
    """Gadget steps whose product is the ideal gate, first step first."""
    k, p, m = gate.kind, gate.params, gate.modes
    if k == "displace":
        return [GadgetStep(m, (), gate.local_transform())]
    if k in ("phase", "squeeze"):
        return [_single(m[0], a) for a in split_single_mode(gate.local_transform().matrix)]
    if k == "cz":
        shear = lambda h: np.array([[1.0, 0.0], [h, 1.0]])  # noqa: E731
        return compile_block_pair(m, shear(-p[0]), shear(p[0]))
    if k == "beamsplitter":
        r = lambda a: phase_shift(a).matrix  # noqa: E731
        return (
            [_single(m[1], a) for a in split_single_mode(r(-np.pi / 2))]
            + compile_block_pair(m, r(p[0]), r(-p[0]))
            + [_single(m[1], a) for a in split_single_mode(r(np.pi / 2))]
        )
    th1, th2, th3, th4 = p
    return [_pair(m, (th1, th3), (th2, th4))]


# -- resource ledger --------------------------------------------------------------


def updated_entries(arity: int, num_modes: int) -> int:
    """Covariance entries recorded as changed by one gate.

    Two-mode gates follow the ``4(2M - 1)`` bookkeeping rule. Single-mode
    gates use the exact count of entries in their rows and columns, which is
    the same number, and displacements change no covariance entry.
    """
    if arity == 0:
        return 0
    return 4 * (2 * num_modes - 1)


def touched_entries(arity: int, num_modes: int) -> int:
    """Entries lying in a row or column of the acted quadratures."""
    n = 2 * num_modes
    return n * n - (n - 2 * arity) ** 2


@dataclass(frozen=True)
class LedgerEntry:
    step: int
    kind: str
    modes: tuple
    gadget_steps: int
    measurements: int
    updated_entries: int
    touched_entries: int


@dataclass(frozen=True)
class ResourceLedger:
    num_modes: int
    entries: tuple = ()

    @property
    def total_updated(self) -> int:
        return sum(e.updated_entries for e in self.entries)

    @property
    def total_touched(self) -> int:
        return sum(e.touched_entries for e in self.entries)

    @property
    def memory_proxy(self) -> int:
        """Stored numbers counted as ``(2M)^2``."""
        return (2 * self.num_modes) ** 2

    @property
    def real_entries(self) -> int:
        """Independent real entries of a symmetric ``2M x 2M`` covariance."""
        n = 2 * self.num_modes
        return n * (n + 1) // 2


def build_ledger(program: Program) -> ResourceLedger:
    rows = []
    for i, gate in enumerate(program.steps):
        steps = compile_gate(gate)
        arity = 0 if gate.kind == "displace" else len(gate.modes)
        rows.append(
            LedgerEntry(
                step=i,
                kind=gate.kind,
                modes=gate.modes,
                gadget_steps=sum(not s.classical for s in steps),
                measurements=sum(2 * len(s.modes) for s in steps if not s.classical),
                updated_entries=updated_entries(arity, program.num_modes),
                touched_entries=touched_entries(arity, program.num_modes),
            )
        )
    return ResourceLedger(program.num_modes, tuple(rows))


# -- execution --------------------------------------------------------------------


def tracked_target(program: Program, upto: int | None = None) -> GaussianState:
    """Ideal state after the first ``upto`` gates (all gates by default)."""
    upto = len(program.steps) if upto is None else upto
    if not 0 <= upto <= len(program.steps):
        raise ProgramError(f"upto must be in [0, {len(program.steps)}]")
    state = program.input_state()
    for k in range(upto):
        state = apply(state, program.gate_transform(k))
    return state


@dataclass
class ProgramResult:
    """Outcome of :func:`run_program`.

    Attributes:
        mode: Execution mode.
        state: Final state (ideal) or outcome-averaged ensemble state.
        target: Ideal final state from the classical tracker.
        ledger: Covariance bookkeeping per gate.
        trials: Monte Carlo trials (0 for ideal or exact runs).
        ensemble: Final ensemble for non-ideal runs.
    """

    mode: str
    state: GaussianState
    target: GaussianState
    ledger: ResourceLedger
    trials: int = 0
    seed: int | None = None
    ensemble: Ensemble | None = field(default=None, repr=False)


def run_program(
    program: Program,
    epsilon: float | None = None,
    mode: str = "ideal",
    trials: int = 100_000,
    seed: int = 0,
    exact: bool = False,
    use_displacement: bool = True,
) -> ProgramResult:
    """Execute a program ideally or through finitely squeezed gadgets.

    Args:
        program: The program.
        epsilon: Cluster squeezing; required unless ``mode == 'ideal'``.
        mode: ``ideal``, ``uncorrected`` (standard feedforward only) or
            ``corrected`` (feedforward plus the input-aware correction).
        trials: Monte Carlo trials for sampled runs.
        seed: Seed of the outcome streams.
        exact: Average over outcomes in closed form instead of sampling.
        use_displacement: In corrected mode, apply the outcome-dependent part
            of the correction displacement (turning it off leaves only U_ec).

    Returns:
        A :class:`ProgramResult`.
    """
    if mode not in MODES:
        raise ProgramError(f"mode must be one of {MODES}, got {mode!r}")
    ledger = build_ledger(program)
    target = program.input_state()
    if mode == "ideal":
        final = tracked_target(program)
        return ProgramResult(mode, final, final, ledger)
    if epsilon is None or not 0.0 < epsilon < 1.0:
        raise ProgramError(f"{mode} mode needs epsilon in (0, 1), got {epsilon}")
    ens = Ensemble.from_state(target, trials=trials, exact=exact)
    source = ExactOutcomes() if exact else SampledOutcomes(seed)
    n = program.num_modes
    for i, gate in enumerate(program.steps):
        try:
            for step in compile_gate(gate):
                full = embed(step.gate, step.modes, n)
                target = apply(target, full)
                if step.classical:
                    ens.apply(full)
                    continue
                if len(step.modes) == 1:
                    _, gamma, _ = single_mode_step(ens, step.modes[0], *step.angles, epsilon, source)
                else:
                    _, gamma, _ = two_mode_step(ens, step.modes, step.angles, epsilon, source)
                if mode == "corrected":
                    corr = step_correction(target.cov, target.mean, step.modes, epsilon)
                    ens.shift(corr.displacements(gamma, ens.weights, use_displacement))
                    ens.apply(corr.unitary)
        except (DegenerateAnglesError, np.linalg.LinAlgError, ArithmeticError, ValueError) as err:
            if isinstance(err, ProgramError):
                raise
            raise ProgramError(f"step {i} ({gate.kind}): {err}") from err
    return ProgramResult(
        mode,
        ens.averaged_state(),
        target,
        ledger,
        trials=0 if exact else trials,
        seed=None if exact else seed,
        ensemble=ens,
    )


def random_two_mode_program(num_modes: int, num_gates: int, rng: np.random.Generator, inputs: Sequence[InputSpec] = ()) -> Program:
    """Random program of beam splitters, CZ gates and general two-mode steps."""
    steps = []
    for _ in range(num_gates):
        j, k = rng.choice(num_modes, size=2, replace=False)
        kind = rng.choice(["beamsplitter", "cz", "two-mode-general"])
        if kind == "two-mode-general":
            while True:
                th = rng.uniform(-np.pi, np.pi, 4)
                if min(abs(np.sin(th[0] - th[2])), abs(np.sin(th[1] - th[3]))) > 0.2:
                    break
            params = tuple(th)
        elif kind == "cz":
            params = (rng.uniform(-1.0, 1.0),)
        else:
            params = (rng.uniform(0.0, np.pi),)
        steps.append(Gate(str(kind), params, (int(j), int(k))))
    return Program(num_modes, tuple(steps), tuple(inputs))
