"""Exact algebra of finite superpositions of multimode coherent states.

States are stored as a coefficient vector and a (terms x modes) label matrix. Inner products go
through the Gram matrix of the coherent kets, so nothing here truncates the photon-number basis.
"""
import cmath
import logging
import math
from functools import reduce
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln

from .config import settings
from .errors import BadModeIndex, CutoffTooSmall, EmptyState, InvalidLabel, InvalidTolerance, \
    MismatchedModeCount, ModeNotSeparated, NearSingularState, NonConvergence, NotNormalized, SameMode, ZeroState
from .states import CoherentSuperposition, FockState, MeasurementOutcome, check_tensor_size

logger = logging.getLogger(__name__)

LABEL_MERGE_TOLERANCE = 1e-12
COEFF_DROP_RATIO = 1e-15
NEAR_SINGULAR_NORM = 1e-14
NORMALIZED_TOLERANCE = 1e-10
SEPARATION_TOLERANCE = 1e-10
# outcomes below this probability are left out of distributions
OUTCOME_PROBABILITY_FLOOR = 1e-24

_SQRT_HALF = math.sqrt(0.5)


def unit_phase(phi: float) -> complex:
    """e^{iφ}, exact for multiples of π/2."""
    quarter_turns = phi / (math.pi / 2.0)
    k = round(quarter_turns)
    if abs(quarter_turns - k) < 1e-12 * max(1, abs(k)):
        return (1 + 0j, 1j, -1 + 0j, -1j)[k % 4]
    return cmath.exp(1j * phi)


def make_superposition(mode_count: int, terms: Sequence[tuple[complex, Sequence[complex]]]) -> CoherentSuperposition:
    if mode_count < 1:
        raise ValueError(f"mode_count must be positive, got {mode_count}")
    if not terms:
        raise EmptyState("a superposition needs at least one term")
    coeffs = []
    labels = []
    for coeff, term_labels in terms:
        if len(term_labels) != mode_count:
            raise MismatchedModeCount(f"term with {len(term_labels)} labels in a {mode_count}-mode state")
        coeffs.append(complex(coeff))
        labels.append([complex(label) for label in term_labels])
    coeff_array = np.array(coeffs, dtype=np.complex128)
    label_array = np.array(labels, dtype=np.complex128)
    if not np.all(np.isfinite(label_array)):
        raise InvalidLabel("coherent labels must be finite")
    if not np.all(np.isfinite(coeff_array)):
        raise InvalidLabel("term coefficients must be finite")
    return CoherentSuperposition(mode_count=mode_count, coeffs=coeff_array, labels=label_array)


def merge_labels(labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Groups rows that agree within LABEL_MERGE_TOLERANCE; returns representatives and the row-to-group map."""
    representatives: list[int] = []
    inverse = np.empty(len(labels), dtype=np.intp)
    for k, row in enumerate(labels):
        for slot, rep in enumerate(representatives):
            if np.all(np.abs(labels[rep] - row) <= LABEL_MERGE_TOLERANCE):
                inverse[k] = slot
                break
        else:
            inverse[k] = len(representatives)
            representatives.append(k)
    return labels[representatives], inverse


def _compact(mode_count: int, coeffs: np.ndarray, labels: np.ndarray, normalized: bool = False) -> CoherentSuperposition:
    coeffs = np.asarray(coeffs, dtype=np.complex128).reshape(-1)
    labels = np.asarray(labels, dtype=np.complex128).reshape(len(coeffs), mode_count)
    unique, inverse = merge_labels(labels)
    merged = np.zeros(len(unique), dtype=np.complex128)
    np.add.at(merged, inverse, coeffs)
    scale = float(np.max(np.abs(coeffs))) if len(coeffs) else 0.0
    keep = np.abs(merged) > COEFF_DROP_RATIO * scale
    return CoherentSuperposition(mode_count=mode_count, coeffs=merged[keep], labels=unique[keep],
                                 normalized=normalized)


def coherent_overlap(a: complex, b: complex) -> complex:
    return cmath.exp(-0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2 + a.conjugate() * b)


def gram_matrix(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Products of single-mode overlaps ⟨left_j|right_k⟩ over all modes."""
    left_sq = np.sum(np.abs(left) ** 2, axis=1)
    right_sq = np.sum(np.abs(right) ** 2, axis=1)
    cross = np.conj(left) @ right.T
    return np.exp(-0.5 * left_sq[:, None] - 0.5 * right_sq[None, :] + cross)


def overlap(s1: CoherentSuperposition, s2: CoherentSuperposition) -> complex:
    if s1.mode_count != s2.mode_count:
        raise MismatchedModeCount(f"cannot overlap a {s1.mode_count}-mode state with a {s2.mode_count}-mode state")
    gram = gram_matrix(s1.labels, s2.labels)
    return complex(np.conj(s1.coeffs) @ gram @ s2.coeffs)


def squared_norm(s: CoherentSuperposition) -> float:
    return overlap(s, s).real


def normalize(s: CoherentSuperposition) -> CoherentSuperposition:
    norm_sq = squared_norm(s)
    if norm_sq < NEAR_SINGULAR_NORM:
        raise NearSingularState(f"cannot normalize a state with squared norm {norm_sq:.3e}")
    return CoherentSuperposition(mode_count=s.mode_count, coeffs=np.asarray(s.coeffs) / math.sqrt(norm_sq),
                                 labels=s.labels, normalized=True)


def require_normalized(s: CoherentSuperposition) -> None:
    norm_sq = squared_norm(s)
    if abs(norm_sq - 1.0) > NORMALIZED_TOLERANCE:
        raise NotNormalized(f"expected a normalized state, squared norm is {norm_sq:.12f}")


def state_fidelity(s1: CoherentSuperposition, s2: CoherentSuperposition) -> float:
    """|⟨s1|s2⟩|² / (‖s1‖²‖s2‖²); neither state has to be normalized."""
    norm1 = squared_norm(s1)
    norm2 = squared_norm(s2)
    if norm1 <= 0.0 or norm2 <= 0.0:
        raise ZeroState("fidelity is undefined for a zero state")
    value = abs(overlap(s1, s2)) ** 2 / (norm1 * norm2)
    return min(1.0, max(0.0, value))


def _check_mode(s: CoherentSuperposition, mode: int) -> None:
    if not 0 <= mode < s.mode_count:
        raise BadModeIndex(f"mode {mode} is outside a {s.mode_count}-mode state")


def _check_pair(s: CoherentSuperposition, i: int, j: int) -> None:
    _check_mode(s, i)
    _check_mode(s, j)
    if i == j:
        raise SameMode(f"a two-mode operation needs distinct modes, got {i} twice")


def apply_phase_shift(s: CoherentSuperposition, mode: int, phi: float) -> CoherentSuperposition:
    _check_mode(s, mode)
    labels = np.array(s.labels)
    labels[:, mode] *= unit_phase(phi)
    return _compact(s.mode_count, s.coeffs, labels, s.normalized)


def apply_balanced_bs(s: CoherentSuperposition, i: int, j: int) -> CoherentSuperposition:
    """ℬ_ij: mode i receives (α_i+α_j)/√2 and mode j receives (α_i−α_j)/√2."""
    _check_pair(s, i, j)
    labels = np.array(s.labels)
    a, b = s.labels[:, i], s.labels[:, j]
    labels[:, i] = (a + b) * _SQRT_HALF
    labels[:, j] = (a - b) * _SQRT_HALF
    return _compact(s.mode_count, s.coeffs, labels, s.normalized)


def apply_raw_bs(s: CoherentSuperposition, i: int, j: int) -> CoherentSuperposition:
    """B_ij = exp(iπ/4 (a_i†a_j + a_j†a_i)): (α, β) → ((α+iβ)/√2, (β+iα)/√2)."""
    _check_pair(s, i, j)
    labels = np.array(s.labels)
    a, b = s.labels[:, i], s.labels[:, j]
    labels[:, i] = (a + 1j * b) * _SQRT_HALF
    labels[:, j] = (b + 1j * a) * _SQRT_HALF
    return _compact(s.mode_count, s.coeffs, labels, s.normalized)


def amplitude_table(labels: np.ndarray, count: int) -> np.ndarray:
    """⟨n|α⟩ for every label (rows) and n < count (columns), evaluated in log space."""
    labels = np.asarray(labels, dtype=np.complex128).reshape(-1)
    n = np.arange(count)
    moduli = np.abs(labels)
    with np.errstate(divide="ignore", invalid="ignore"):
        power = np.where(n[None, :] == 0, 0.0, n[None, :] * np.log(moduli)[:, None])
    log_magnitude = -0.5 * moduli[:, None] ** 2 + power - 0.5 * gammaln(n + 1)[None, :]
    phases = np.exp(1j * np.outer(np.angle(labels), n))
    return np.asarray(np.exp(log_magnitude) * phases)


def fock_amplitudes(a: complex, count: int) -> np.ndarray:
    if count < 0:
        raise ValueError(f"count must not be negative, got {count}")
    return amplitude_table(np.array([a]), count)[0]


def fock_amplitude(a: complex, n: int) -> complex:
    if n < 0:
        raise ValueError(f"photon number must not be negative, got {n}")
    return complex(fock_amplitudes(a, n + 1)[n])


def project_two_mode_number(s: CoherentSuperposition, i: int, j: int, n: int, m: int) \
        -> tuple[float, CoherentSuperposition]:
    """Projects modes i and j onto ⟨n|_i⟨m|_j; the residual over the remaining modes stays unnormalized."""
    _check_pair(s, i, j)
    if n < 0 or m < 0:
        raise ValueError(f"photon numbers must not be negative, got ({n}, {m})")
    require_normalized(s)
    weights = s.coeffs * amplitude_table(s.labels[:, i], n + 1)[:, n] * amplitude_table(s.labels[:, j], m + 1)[:, m]
    rest = np.delete(s.labels, [i, j], axis=1)
    residual = _compact(s.mode_count - 2, weights, rest)
    return max(0.0, squared_norm(residual)), residual


def _check_tolerance(mass_tolerance: float) -> None:
    if not 0.0 < mass_tolerance < 1.0:
        raise InvalidTolerance(f"mass_tolerance must lie in (0, 1), got {mass_tolerance}")


def measurement_distribution(s: CoherentSuperposition, i: int, j: int, mass_tolerance: Optional[float] = None) \
        -> list[MeasurementOutcome[CoherentSuperposition]]:
    """Enumerates photon-number outcomes on modes (i, j) by increasing n+m, ties by ascending n.

    Enumeration stops after the first complete diagonal that brings the cumulative probability to
    1 − mass_tolerance.
    """
    tolerance = settings.mass_tolerance if mass_tolerance is None else mass_tolerance
    _check_tolerance(tolerance)
    _check_pair(s, i, j)
    require_normalized(s)
    cap = settings.max_photons

    rest, inverse = merge_labels(np.delete(s.labels, [i, j], axis=1))
    gram = gram_matrix(rest, rest)
    table_i = amplitude_table(s.labels[:, i], cap + 1)
    table_j = amplitude_table(s.labels[:, j], cap + 1)

    outcomes: list[MeasurementOutcome[CoherentSuperposition]] = []
    cumulative = 0.0
    for total in range(cap + 1):
        for n in range(total + 1):
            m = total - n
            weights = np.zeros(len(rest), dtype=np.complex128)
            np.add.at(weights, inverse, s.coeffs * table_i[:, n] * table_j[:, m])
            probability = max(0.0, float((np.conj(weights) @ gram @ weights).real))
            cumulative += probability
            if probability > OUTCOME_PROBABILITY_FLOOR:
                residual = CoherentSuperposition(mode_count=s.mode_count - 2, coeffs=weights, labels=rest)
                outcomes.append(MeasurementOutcome(n=n, m=m, probability=probability, state=residual))
        if cumulative >= 1.0 - tolerance:
            logger.debug(f"Distribution on modes ({i}, {j}) converged at n+m={total} "
                         f"with {len(outcomes)} outcomes and mass {cumulative:.15f}")
            return outcomes
    raise NonConvergence(f"photon-number distribution reached mass {cumulative:.12f} "
                         f"at the cap n+m={cap} without meeting tolerance {tolerance}")


def to_fock(s: CoherentSuperposition, cutoff: int | Sequence[int]) -> FockState:
    cutoffs = (cutoff,) * s.mode_count if isinstance(cutoff, int) else tuple(cutoff)
    if len(cutoffs) != s.mode_count:
        raise MismatchedModeCount(f"{len(cutoffs)} cutoffs for a {s.mode_count}-mode state")
    if any(c < 1 for c in cutoffs):
        raise ValueError(f"cutoffs must be positive, got {cutoffs}")
    check_tensor_size(cutoffs)
    exact = squared_norm(s)
    if exact < NEAR_SINGULAR_NORM:
        raise NearSingularState(f"cannot expand a state with squared norm {exact:.3e}")

    tables = [amplitude_table(s.labels[:, k], c) for k, c in enumerate(cutoffs)]
    amplitudes = np.zeros(cutoffs, dtype=np.complex128)
    for t, coeff in enumerate(s.coeffs):
        amplitudes += coeff * reduce(np.multiply.outer, [table[t] for table in tables])

    retained = float(np.vdot(amplitudes, amplitudes).real) / exact
    if retained < settings.min_retained_norm:
        raise CutoffTooSmall(f"cutoffs {cutoffs} keep only {retained:.6f} of the state norm")
    return FockState(cutoffs=cutoffs, amplitudes=amplitudes, truncation_error=max(0.0, 1.0 - retained))


def tensor_product(a: CoherentSuperposition, b: CoherentSuperposition) -> CoherentSuperposition:
    coeffs = np.outer(a.coeffs, b.coeffs).reshape(-1)
    labels = np.concatenate([np.repeat(a.labels, b.term_count, axis=0), np.tile(b.labels, (a.term_count, 1))],
                            axis=1)
    return CoherentSuperposition(mode_count=a.mode_count + b.mode_count, coeffs=coeffs, labels=labels,
                                 normalized=a.normalized and b.normalized)


def project_vacuum(s: CoherentSuperposition, modes: Sequence[int]) -> CoherentSuperposition:
    """Drops modes whose label is the vacuum in every term; raises ModeNotSeparated otherwise."""
    for mode in modes:
        _check_mode(s, mode)
        largest = float(np.max(np.abs(s.labels[:, mode]))) if s.term_count else 0.0
        if largest > SEPARATION_TOLERANCE:
            raise ModeNotSeparated(f"mode {mode} still carries a label of modulus {largest:.3e}")
    rest = np.delete(s.labels, list(modes), axis=1)
    return _compact(s.mode_count - len(modes), s.coeffs, rest, s.normalized)


def superpose(terms: Sequence[tuple[complex, CoherentSuperposition]]) -> CoherentSuperposition:
    """Σ w_k |s_k⟩ as one superposition; the result is not renormalized."""
    if not terms:
        raise EmptyState("a superposition needs at least one term")
    mode_count = terms[0][1].mode_count
    if any(state.mode_count != mode_count for _, state in terms):
        raise MismatchedModeCount("superposed states must have the same mode count")
    coeffs = np.concatenate([complex(weight) * np.asarray(state.coeffs) for weight, state in terms])
    labels = np.concatenate([np.asarray(state.labels) for _, state in terms], axis=0)
    return _compact(mode_count, coeffs, labels)
