from typing import Any, Optional

from .analytic import AnalyticBackend
from .backend import TeleportBackend
from .fock import FockBackend
from ..fock_engine import select_cutoff
from ..model import Engine
from ..states import FockState

__all__ = ["AnalyticBackend", "FockBackend", "TeleportBackend", "get_backend", "backend_for"]


def get_backend(engine: Engine, cutoff: Optional[int] = None, mean_photons: float = 0.0) -> TeleportBackend[Any]:
    """Returns the engine implementation; the Fock cutoff follows the cutoff rule unless given."""
    if engine is Engine.ANALYTIC:
        return AnalyticBackend()
    if engine is Engine.FOCK:
        return FockBackend(cutoff if cutoff is not None else select_cutoff(mean_photons))
    raise ValueError(f"engine {engine} does not name a single backend")


def backend_for(state: Any) -> TeleportBackend[Any]:
    if isinstance(state, FockState):
        return FockBackend(max(state.cutoffs, default=1))
    return AnalyticBackend()
