"""Truncated Fock-space engine.

Amplitudes live in dense tensors, one axis per mode. The beam splitter acts block by block on the
total photon number of the two modes, so it never leaks amplitude outside the cutoff grid.
"""
import logging
import math
from functools import lru_cache, reduce
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.linalg import eigh

from .coherent_algebra import fock_amplitudes, unit_phase
from .errors import BadModeIndex, CutoffMismatch, InvalidDensityMatrix, MismatchedModeCount, ModeNotSeparated, \
    ReportWriteFailed, ZeroState
from .model import BeamSplitterVariant
from .states import DensityMatrix, FockState, MeasurementOutcome, check_tensor_size

logger = logging.getLogger(__name__)

ZERO_NORM = 1e-14
HERMITICITY_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-10
POSITIVITY_TOLERANCE = -1e-9
SEPARATION_TOLERANCE = 1e-9
OUTCOME_PROBABILITY_FLOOR = 1e-20


def select_cutoff(mean_photons: float) -> int:
    """Per-mode cutoff ceil(μ + 6√μ + 10) for a largest squared label μ."""
    if mean_photons < 0:
        raise ValueError(f"mean photon number must not be negative, got {mean_photons}")
    return math.ceil(mean_photons + 6.0 * math.sqrt(mean_photons) + 10.0)


def coherent_fock(a: complex, cutoff: int) -> FockState:
    if cutoff < 1:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    amplitudes = fock_amplitudes(a, cutoff)
    retained = float(np.vdot(amplitudes, amplitudes).real)
    return FockState(cutoffs=(cutoff,), amplitudes=amplitudes, truncation_error=max(0.0, 1.0 - retained))


def fock_basis_state(cutoffs: Sequence[int], occupation: Sequence[int]) -> FockState:
    cutoffs = tuple(cutoffs)
    occupation = tuple(occupation)
    if len(cutoffs) != len(occupation):
        raise MismatchedModeCount(f"{len(occupation)} occupations for {len(cutoffs)} modes")
    if any(not 0 <= n < c for n, c in zip(occupation, cutoffs)):
        raise ValueError(f"occupation {occupation} does not fit cutoffs {cutoffs}")
    check_tensor_size(cutoffs)
    amplitudes = np.zeros(cutoffs, dtype=np.complex128)
    amplitudes[occupation] = 1.0
    return FockState(cutoffs=cutoffs, amplitudes=amplitudes)


def tensor_product(a: FockState, b: FockState) -> FockState:
    cutoffs = a.cutoffs + b.cutoffs
    check_tensor_size(cutoffs)
    return FockState(cutoffs=cutoffs, amplitudes=np.multiply.outer(a.amplitudes, b.amplitudes),
                     truncation_error=a.truncation_error + b.truncation_error)


def superpose(terms: Sequence[tuple[complex, FockState]]) -> FockState:
    if not terms:
        raise ValueError("cannot superpose an empty list of states")
    cutoffs = terms[0][1].cutoffs
    if any(state.cutoffs != cutoffs for _, state in terms):
        raise CutoffMismatch("superposed states must share their cutoffs")
    amplitudes = reduce(np.add, [coeff * state.amplitudes for coeff, state in terms])
    return FockState(cutoffs=cutoffs, amplitudes=amplitudes,
                     truncation_error=max(state.truncation_error for _, state in terms))


def _check_mode(s: FockState, mode: int) -> None:
    if not 0 <= mode < s.mode_count:
        raise BadModeIndex(f"mode {mode} is outside a {s.mode_count}-mode state")


@lru_cache(maxsize=1024)
def _block_unitary(total: int, cutoff: int) -> tuple[np.ndarray, np.ndarray]:
    """exp(iπ/4 (a_i†a_j + a_j†a_i)) on the states |k, total−k⟩ that fit under the cutoff.

    Blocks with total ≥ cutoff are missing basis states; their generator is restricted to what fits,
    which keeps the block unitary.
    """
    ks = np.arange(max(0, total - cutoff + 1), min(total, cutoff - 1) + 1)
    generator = np.zeros((len(ks), len(ks)))
    for row in range(len(ks) - 1):
        k = ks[row]
        generator[row + 1, row] = generator[row, row + 1] = math.sqrt((k + 1) * (total - k))
    eigenvalues, vectors = eigh(generator)
    unitary = (vectors * np.exp(0.25j * math.pi * eigenvalues)) @ vectors.conj().T
    return ks, unitary


def _raw_bs(amplitudes: np.ndarray, i: int, j: int, cutoff: int) -> np.ndarray:
    moved = np.moveaxis(amplitudes, (i, j), (-2, -1))
    out = np.zeros_like(moved)
    for total in range(2 * cutoff - 1):
        ks, unitary = _block_unitary(total, cutoff)
        out[..., ks, total - ks] = moved[..., ks, total - ks] @ unitary.T
    return np.moveaxis(out, (-2, -1), (i, j))


def _phase_factors(phi: float, cutoff: int) -> np.ndarray:
    return np.array([unit_phase(phi * n) for n in range(cutoff)], dtype=np.complex128)


def _apply_phase(amplitudes: np.ndarray, mode: int, phi: float) -> np.ndarray:
    shape = [1] * amplitudes.ndim
    shape[mode] = amplitudes.shape[mode]
    return amplitudes * _phase_factors(phi, amplitudes.shape[mode]).reshape(shape)


def apply_two_mode_bs(s: FockState, i: int, j: int,
                      variant: BeamSplitterVariant = BeamSplitterVariant.BALANCED) -> FockState:
    _check_mode(s, i)
    _check_mode(s, j)
    if i == j:
        raise BadModeIndex(f"a beam splitter needs distinct modes, got {i} twice")
    if s.cutoffs[i] != s.cutoffs[j]:
        raise CutoffMismatch(f"beam splitter modes {i} and {j} have cutoffs {s.cutoffs[i]} and {s.cutoffs[j]}")
    amplitudes = np.asarray(s.amplitudes)
    if variant is BeamSplitterVariant.BALANCED:
        amplitudes = _apply_phase(amplitudes, j, -math.pi / 2.0)
    amplitudes = _raw_bs(amplitudes, i, j, s.cutoffs[i])
    if variant is BeamSplitterVariant.BALANCED:
        amplitudes = _apply_phase(amplitudes, j, -math.pi / 2.0)
    return FockState(cutoffs=s.cutoffs, amplitudes=amplitudes, truncation_error=s.truncation_error)


def apply_phase_fock(s: FockState, i: int, phi: float) -> FockState:
    _check_mode(s, i)
    return FockState(cutoffs=s.cutoffs, amplitudes=_apply_phase(np.asarray(s.amplitudes), i, phi),
                     truncation_error=s.truncation_error)


def normalize_fock(s: FockState) -> FockState:
    norm_sq = s.squared_norm()
    if norm_sq < ZERO_NORM:
        raise ZeroState(f"cannot normalize a Fock state with squared norm {norm_sq:.3e}")
    return FockState(cutoffs=s.cutoffs, amplitudes=np.asarray(s.amplitudes) / math.sqrt(norm_sq),
                     truncation_error=s.truncation_error)


def fidelity(s1: FockState, s2: FockState) -> float:
    if s1.cutoffs != s2.cutoffs:
        raise CutoffMismatch(f"cannot compare states with cutoffs {s1.cutoffs} and {s2.cutoffs}")
    norm1 = s1.squared_norm()
    norm2 = s2.squared_norm()
    if norm1 <= 0.0 or norm2 <= 0.0:
        raise ZeroState("fidelity is undefined for a zero state")
    value = abs(np.vdot(s1.amplitudes, s2.amplitudes)) ** 2 / (norm1 * norm2)
    return min(1.0, max(0.0, float(value)))


def partial_trace(s: FockState, keep: Sequence[int]) -> DensityMatrix:
    keep = tuple(keep)
    if not keep or len(set(keep)) != len(keep) or len(keep) >= s.mode_count:
        raise BadModeIndex(f"keep={keep} is not a nonempty proper subset of {s.mode_count} modes")
    for mode in keep:
        _check_mode(s, mode)
    norm_sq = s.squared_norm()
    if norm_sq < ZERO_NORM:
        raise ZeroState("cannot reduce a zero state")
    dims = tuple(s.cutoffs[mode] for mode in keep)
    kept = int(np.prod(dims))
    matrix = np.moveaxis(np.asarray(s.amplitudes), keep, tuple(range(len(keep)))).reshape(kept, -1)
    return DensityMatrix(dims=dims, entries=matrix @ matrix.conj().T / norm_sq)


def check_density_matrix(rho: DensityMatrix) -> DensityMatrix:
    entries = np.asarray(rho.entries)
    asymmetry = float(np.max(np.abs(entries - entries.conj().T))) if entries.size else 0.0
    if asymmetry > HERMITICITY_TOLERANCE:
        raise InvalidDensityMatrix(f"density matrix is not Hermitian, deviation {asymmetry:.3e}")
    if abs(rho.trace() - 1.0) > TRACE_TOLERANCE:
        raise InvalidDensityMatrix(f"density matrix has trace {rho.trace():.12f}")
    lowest = float(np.min(np.linalg.eigvalsh(entries)))
    if lowest < POSITIVITY_TOLERANCE:
        raise InvalidDensityMatrix(f"density matrix has eigenvalue {lowest:.3e}")
    return rho


def project_vacuum_fock(s: FockState, modes: Sequence[int]) -> FockState:
    for mode in modes:
        _check_mode(s, mode)
    index = tuple(0 if k in modes else slice(None) for k in range(s.mode_count))
    projected = np.asarray(s.amplitudes)[index]
    total = s.squared_norm()
    kept = float(np.vdot(projected, projected).real)
    lost = 1.0 - kept / total if total > 0.0 else 0.0
    if lost > max(SEPARATION_TOLERANCE, 10.0 * s.truncation_error):
        raise ModeNotSeparated(f"modes {tuple(modes)} carry {lost:.3e} of the norm outside the vacuum")
    cutoffs = tuple(c for k, c in enumerate(s.cutoffs) if k not in modes)
    return FockState(cutoffs=cutoffs, amplitudes=projected, truncation_error=s.truncation_error)


def number_distribution(s: FockState, i: int, j: int) -> list[MeasurementOutcome[FockState]]:
    """Every (n, m) on the cutoff grid of modes i, j with probability above 1e-20, by n+m then n."""
    _check_mode(s, i)
    _check_mode(s, j)
    if i == j:
        raise BadModeIndex(f"a two-mode measurement needs distinct modes, got {i} twice")
    norm_sq = s.squared_norm()
    if norm_sq < ZERO_NORM:
        raise ZeroState("cannot measure a zero state")
    moved = np.moveaxis(np.asarray(s.amplitudes), (i, j), (0, 1))
    rest = tuple(c for k, c in enumerate(s.cutoffs) if k not in (i, j))
    cut_i, cut_j = s.cutoffs[i], s.cutoffs[j]
    outcomes: list[MeasurementOutcome[FockState]] = []
    for total in range(cut_i + cut_j - 1):
        for n in range(max(0, total - cut_j + 1), min(total, cut_i - 1) + 1):
            m = total - n
            residual = moved[n, m]
            probability = float(np.vdot(residual, residual).real) / norm_sq
            if probability > OUTCOME_PROBABILITY_FLOOR:
                state = FockState(cutoffs=rest, amplitudes=residual / math.sqrt(norm_sq),
                                  truncation_error=s.truncation_error)
                outcomes.append(MeasurementOutcome(n=n, m=m, probability=probability, state=state))
    logger.debug(f"Fock distribution on modes ({i}, {j}) has {len(outcomes)} outcomes")
    return outcomes


def dump_amplitudes(s: FockState, path: Path) -> None:
    """Writes little-endian interleaved re/im doubles in row-major mode order."""
    try:
        np.ascontiguousarray(s.amplitudes, dtype="<c16").tofile(path)
    except OSError as e:
        raise ReportWriteFailed(f"cannot write amplitudes to {path}: {e}") from e


def load_amplitudes(path: Path, cutoffs: Sequence[int]) -> FockState:
    cutoffs = tuple(cutoffs)
    raw = np.fromfile(path, dtype="<c16")
    expected = int(np.prod(cutoffs)) if cutoffs else 1
    if raw.size != expected:
        raise MismatchedModeCount(f"{path} holds {raw.size} amplitudes, cutoffs {cutoffs} need {expected}")
    return FockState(cutoffs=cutoffs, amplitudes=raw.astype(np.complex128).reshape(cutoffs))
