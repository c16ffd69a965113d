"""Exact simulation of delayed-choice interferometry with a three-level atom."""

from .analysis import (
    entanglement_entropy,
    purity,
    schmidt_decompose,
    second_kind_mixture,
    subsystem_equivalence_check,
    super_systemic_witness,
)
from .atom import AtomLevel, AtomPreparation, SuperSystemState, interact, prepare_atom
from .detection import (
    DetectionRecord,
    PlateKind,
    ScreenModel,
    position_pdf,
    sample_detections,
    visibility,
)
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    choice_invariance_check,
    run_experiment,
    run_marshall,
    run_paper_variant,
    run_wheeler,
)
from .hilbert import (
    DensityOperator,
    MixtureComponent,
    StateVector,
    density_from_pure,
    ket,
    mix,
    partial_trace,
    tensor,
)
from .optics import OpticalElement, apply_circuit, beam_splitter, mirror, phase_shift

__version__ = "0.1.0"
