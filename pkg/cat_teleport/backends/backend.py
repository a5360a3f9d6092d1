"""Engine abstraction shared by the protocols."""
from abc import ABC, abstractmethod
from typing import Optional, Sequence

from ..model import Engine
from ..states import CoherentSuperposition, MeasurementOutcome


class TeleportBackend[StateT](ABC):
    """Operations a protocol needs from a state engine.

    States enter every protocol in the exact coherent representation and are converted once by
    ``encode``; everything after that stays in the engine's own representation.
    """

    @property
    @abstractmethod
    def engine(self) -> Engine:
        pass

    @property
    def cutoff(self) -> Optional[int]:
        return None

    @abstractmethod
    def encode(self, state: CoherentSuperposition) -> StateT:
        """Converts an exact coherent superposition into the engine representation.

        Args:
            state: The state to convert.

        Returns:
            The normalized engine state.
        """
        pass

    @abstractmethod
    def tensor(self, a: StateT, b: StateT) -> StateT:
        pass

    @abstractmethod
    def balanced_bs(self, state: StateT, i: int, j: int) -> StateT:
        """Applies ℬ_ij: mode i receives (a_i + a_j)/√2 and mode j receives (a_i − a_j)/√2."""
        pass

    @abstractmethod
    def raw_bs(self, state: StateT, i: int, j: int) -> StateT:
        pass

    @abstractmethod
    def phase_shift(self, state: StateT, mode: int, phi: float) -> StateT:
        pass

    @abstractmethod
    def project_vacuum(self, state: StateT, modes: Sequence[int]) -> StateT:
        """Removes modes that are in the vacuum.

        Raises:
            ModeNotSeparated: If any of the modes carries photons.
        """
        pass

    @abstractmethod
    def measure(self, state: StateT, i: int, j: int,
                mass_tolerance: Optional[float] = None) -> list[MeasurementOutcome[StateT]]:
        """Photon-number distribution on modes (i, j), ordered by n+m then n.

        Args:
            state: A normalized state.
            i: Mode reporting n.
            j: Mode reporting m.
            mass_tolerance: Probability mass allowed to stay unenumerated, where the engine enumerates lazily.

        Returns:
            Outcomes with unnormalized residual states over the remaining modes.
        """
        pass

    @abstractmethod
    def fidelity(self, a: StateT, b: StateT) -> float:
        pass
