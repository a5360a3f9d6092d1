"""Immutable state containers for the analytic and Fock engines."""
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np
import numpy.typing as npt

from .config import settings
from .errors import EngineLimitExceeded, MismatchedModeCount

ComplexArray = npt.NDArray[np.complex128]


def _read_only(values: Any) -> Any:
    array = np.asarray(values, dtype=np.complex128)
    array.setflags(write=False)
    return array


def check_tensor_size(cutoffs: tuple[int, ...]) -> int:
    elements = int(np.prod(cutoffs, dtype=np.int64)) if cutoffs else 1
    if elements > settings.max_fock_elements:
        raise EngineLimitExceeded(
            f"a Fock tensor with cutoffs {cutoffs} needs {elements} amplitudes, "
            f"above the limit of {settings.max_fock_elements}")
    return elements


class CoherentTerm(NamedTuple):
    coeff: complex
    labels: tuple[complex, ...]


@dataclass(frozen=True)
class CoherentSuperposition:
    """Finite superposition of multimode coherent kets.

    Row ``k`` of ``labels`` holds the coherent amplitudes of term ``k``, one column per mode.
    A state may have zero modes (a scalar left over after measuring every mode) or zero
    terms (an exact cancellation inside an engine); the public constructor in
    ``coherent_algebra`` rejects both.
    """
    mode_count: int
    coeffs: ComplexArray
    labels: ComplexArray
    normalized: bool = False

    def __post_init__(self) -> None:
        if self.mode_count < 0:
            raise ValueError("mode_count must not be negative")
        coeffs = np.asarray(self.coeffs, dtype=np.complex128).reshape(-1)
        labels = np.asarray(self.labels, dtype=np.complex128)
        if labels.size == 0:
            labels = labels.reshape(len(coeffs), self.mode_count)
        if labels.shape != (len(coeffs), self.mode_count):
            raise MismatchedModeCount(
                f"labels of shape {labels.shape} do not fit {len(coeffs)} terms over {self.mode_count} modes")
        object.__setattr__(self, "coeffs", _read_only(coeffs))
        object.__setattr__(self, "labels", _read_only(labels))

    @property
    def term_count(self) -> int:
        return len(self.coeffs)

    @property
    def terms(self) -> tuple[CoherentTerm, ...]:
        return tuple(CoherentTerm(complex(c), tuple(complex(x) for x in row))
                     for c, row in zip(self.coeffs, self.labels))

    def to_dict(self) -> dict[str, Any]:
        return {
            "modes": self.mode_count,
            "terms": [{"coeff": [float(c.real), float(c.imag)],
                       "labels": [[float(x.real), float(x.imag)] for x in row]}
                      for c, row in zip(self.coeffs, self.labels)],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CoherentSuperposition":
        mode_count = int(data["modes"])
        terms = data["terms"]
        coeffs = [complex(*term["coeff"]) for term in terms]
        labels = [[complex(*label) for label in term["labels"]] for term in terms]
        for row in labels:
            if len(row) != mode_count:
                raise MismatchedModeCount(f"term with {len(row)} labels in a {mode_count}-mode state")
        return cls(mode_count=mode_count, coeffs=np.array(coeffs, dtype=np.complex128),
                   labels=np.array(labels, dtype=np.complex128).reshape(len(coeffs), mode_count))


@dataclass(frozen=True)
class FockState:
    """Dense amplitude tensor over per-mode photon-number cutoffs.

    ``truncation_error`` records the squared-norm deficit of the truncation that produced the
    tensor, so the engines can report how much of the exact state fell outside the cutoffs.
    """
    cutoffs: tuple[int, ...]
    amplitudes: ComplexArray
    truncation_error: float = 0.0

    def __post_init__(self) -> None:
        cutoffs = tuple(int(c) for c in self.cutoffs)
        if any(c < 1 for c in cutoffs):
            raise ValueError(f"cutoffs must be positive, got {cutoffs}")
        check_tensor_size(cutoffs)
        amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if amplitudes.shape != cutoffs:
            raise MismatchedModeCount(f"amplitude tensor of shape {amplitudes.shape} does not match cutoffs {cutoffs}")
        object.__setattr__(self, "cutoffs", cutoffs)
        object.__setattr__(self, "amplitudes", _read_only(amplitudes))

    @property
    def mode_count(self) -> int:
        return len(self.cutoffs)

    def squared_norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True)
class DensityMatrix:
    dims: tuple[int, ...]
    entries: ComplexArray

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        size = int(np.prod(dims, dtype=np.int64))
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.shape != (size, size):
            raise MismatchedModeCount(f"density matrix of shape {entries.shape} does not match dims {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", _read_only(entries))

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def purity(self) -> float:
        # Tr(rho^2) for Hermitian rho is the squared Frobenius norm
        return float(np.vdot(self.entries, self.entries).real)


@dataclass(frozen=True)
class MeasurementOutcome[StateT]:
    """One photon-number result on a mode pair with its unnormalized residual state."""
    n: int
    m: int
    probability: float
    state: StateT
