"""Coherent errors, discrete thresholds and silent stabilizer failures in QEC codes."""

from .budget import BudgetParams, failure_budget, optimal_nc, required_ps
from .codes import (
    CodeLayout,
    braid_transform,
    braiding_layout,
    describe,
    loop_operator,
    punch_hole,
    repetition_code,
    surface_code,
    validate,
)
from .coherent import (
    ContractViolation,
    NoiseConfig,
    StateVector,
    SyndromeRecord,
    apply_rotation,
    decode_and_correct,
    rotated_amplitudes,
    logical_error_angle,
    measure_stabilizer,
    precision_experiment,
    prepare_logical,
    qec_cycle,
    silent_drift_experiment,
)
from .decoding import Decoder, get_decoder
from .frame import (
    PauliFrame,
    ShotStats,
    SilentConfig,
    exact_failure_probability,
    inject_silent_failures,
    measure_syndrome,
    run_shots,
    sample_errors,
    silent_failure_experiment,
    threshold_scan,
)
from .pauli import PauliOperator, commutes, in_group, pauli_mul, residual_logicals

__version__ = "0.1.0"
