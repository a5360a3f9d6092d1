from .analysis import concurrence_closed_form, concurrence_pure, reduced_purity, success_prob_closed_form
from .backends import AnalyticBackend, FockBackend, TeleportBackend, get_backend
from .cli import run_experiment
from .coherent_algebra import apply_balanced_bs, apply_phase_shift, apply_raw_bs, coherent_overlap, fock_amplitude, \
    make_superposition, measurement_distribution, normalize, overlap, project_two_mode_number, to_fock
from .errors import CatTeleportError, NumericalFailure, ValidationFailed
from .fock_engine import apply_phase_fock, apply_two_mode_bs, coherent_fock, fidelity, partial_trace
from .model import Bipartition, ChannelSign, ChannelSpec, ClosedFormCurve, ECSSpec, Engine, ExperimentConfig, \
    OutcomeKind, ParityModel, TeleportReport
from .protocols import apply_correction_and_classify, build_cat, build_channel, build_ecs, parity_oracle, \
    prepare_channel_via_bs, small_alpha_teleport, teleport_ecs
from .reporting import emit_report
from .states import CoherentSuperposition, DensityMatrix, FockState, MeasurementOutcome

__all__ = [
    "CoherentSuperposition",
    "FockState",
    "DensityMatrix",
    "MeasurementOutcome",
    "make_superposition",
    "coherent_overlap",
    "overlap",
    "normalize",
    "apply_phase_shift",
    "apply_balanced_bs",
    "apply_raw_bs",
    "fock_amplitude",
    "project_two_mode_number",
    "measurement_distribution",
    "to_fock",
    "coherent_fock",
    "apply_two_mode_bs",
    "apply_phase_fock",
    "partial_trace",
    "fidelity",
    "reduced_purity",
    "concurrence_pure",
    "concurrence_closed_form",
    "success_prob_closed_form",
    "build_cat",
    "build_ecs",
    "build_channel",
    "prepare_channel_via_bs",
    "teleport_ecs",
    "apply_correction_and_classify",
    "small_alpha_teleport",
    "parity_oracle",
    "run_experiment",
    "emit_report",
    "AnalyticBackend",
    "FockBackend",
    "TeleportBackend",
    "get_backend",
    "Bipartition",
    "ChannelSign",
    "ChannelSpec",
    "ClosedFormCurve",
    "ECSSpec",
    "Engine",
    "ExperimentConfig",
    "OutcomeKind",
    "ParityModel",
    "TeleportReport",
    "CatTeleportError",
    "ValidationFailed",
    "NumericalFailure",
]
