import logging
from typing import Optional, Sequence

from .backend import TeleportBackend
from .. import fock_engine
from ..coherent_algebra import to_fock
from ..model import BeamSplitterVariant, Engine
from ..states import CoherentSuperposition, FockState, MeasurementOutcome

logger = logging.getLogger(__name__)


class FockBackend(TeleportBackend[FockState]):
    """Dense truncated engine with one cutoff shared by every mode."""

    def __init__(self, cutoff: int) -> None:
        if cutoff < 1:
            raise ValueError(f"cutoff must be positive, got {cutoff}")
        self._cutoff = cutoff

    @property
    def engine(self) -> Engine:
        return Engine.FOCK

    @property
    def cutoff(self) -> Optional[int]:
        return self._cutoff

    def encode(self, state: CoherentSuperposition) -> FockState:
        expanded = to_fock(state, self._cutoff)
        logger.debug(f"Encoded {state.mode_count}-mode state at cutoff {self._cutoff}, "
                     f"truncation error {expanded.truncation_error:.3e}")
        return fock_engine.normalize_fock(expanded)

    def tensor(self, a: FockState, b: FockState) -> FockState:
        return fock_engine.tensor_product(a, b)

    def balanced_bs(self, state: FockState, i: int, j: int) -> FockState:
        return fock_engine.apply_two_mode_bs(state, i, j, BeamSplitterVariant.BALANCED)

    def raw_bs(self, state: FockState, i: int, j: int) -> FockState:
        return fock_engine.apply_two_mode_bs(state, i, j, BeamSplitterVariant.RAW)

    def phase_shift(self, state: FockState, mode: int, phi: float) -> FockState:
        return fock_engine.apply_phase_fock(state, mode, phi)

    def project_vacuum(self, state: FockState, modes: Sequence[int]) -> FockState:
        return fock_engine.project_vacuum_fock(state, modes)

    def measure(self, state: FockState, i: int, j: int,
                mass_tolerance: Optional[float] = None) -> list[MeasurementOutcome[FockState]]:
        return fock_engine.number_distribution(state, i, j)

    def fidelity(self, a: FockState, b: FockState) -> float:
        return fock_engine.fidelity(a, b)
