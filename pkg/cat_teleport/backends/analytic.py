from typing import Optional, Sequence

from .backend import TeleportBackend
from .. import coherent_algebra
from ..model import Engine
from ..states import CoherentSuperposition, MeasurementOutcome


class AnalyticBackend(TeleportBackend[CoherentSuperposition]):

    @property
    def engine(self) -> Engine:
        return Engine.ANALYTIC

    def encode(self, state: CoherentSuperposition) -> CoherentSuperposition:
        return state if state.normalized else coherent_algebra.normalize(state)

    def tensor(self, a: CoherentSuperposition, b: CoherentSuperposition) -> CoherentSuperposition:
        return coherent_algebra.tensor_product(a, b)

    def balanced_bs(self, state: CoherentSuperposition, i: int, j: int) -> CoherentSuperposition:
        return coherent_algebra.apply_balanced_bs(state, i, j)

    def raw_bs(self, state: CoherentSuperposition, i: int, j: int) -> CoherentSuperposition:
        return coherent_algebra.apply_raw_bs(state, i, j)

    def phase_shift(self, state: CoherentSuperposition, mode: int, phi: float) -> CoherentSuperposition:
        return coherent_algebra.apply_phase_shift(state, mode, phi)

    def project_vacuum(self, state: CoherentSuperposition, modes: Sequence[int]) -> CoherentSuperposition:
        return coherent_algebra.project_vacuum(state, modes)

    def measure(self, state: CoherentSuperposition, i: int, j: int,
                mass_tolerance: Optional[float] = None) -> list[MeasurementOutcome[CoherentSuperposition]]:
        return coherent_algebra.measurement_distribution(state, i, j, mass_tolerance)

    def fidelity(self, a: CoherentSuperposition, b: CoherentSuperposition) -> float:
        return coherent_algebra.state_fidelity(a, b)
