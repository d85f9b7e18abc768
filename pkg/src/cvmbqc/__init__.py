"""Simulator for measurement-based CV gates on finitely squeezed clusters,
with input-aware correction of the finite-squeezing error."""

from .correction import (
    CorrectionOperators,
    MixedStateError,
    SigmaMatrices,
    actual_output_cov,
    correction_displacement,
    correction_operators,
    db_to_epsilon,
    db_to_params,
    db_to_r,
    deviation,
    ec_unitary,
    sigma_matrices,
    step_correction,
    tmss_alpha,
)
from .gadgets import (
    DegenerateAnglesError,
    GadgetParams,
    GadgetRun,
    feedforward_single,
    gate_from_angles,
    implemented_gate,
    implemented_two_mode_gate,
    run_single_gadget,
    run_two_mode_gadget,
    two_mode_cluster,
    two_mode_gate_from_angles,
)
from .gaussian import (
    GaussianState,
    SymplecticTransform,
    apply,
    beam_splitter,
    cz_gate,
    displace,
    embed,
    momentum_squeezed_vacuum,
    phase_shift,
    squeezer,
    vacuum,
    wigner_eval,
)
from .homodyne import DegenerateMeasurementError, MeasurementRecord, condition, marginal, sample
from .rng import StreamKey
from .temporal import Gate, InputSpec, Program, ResourceLedger, compile_gate, run_program, tracked_target

__version__ = "0.1.0"
