"""Entanglement measures and closed-form probabilities."""
import logging
import math
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh

from .coherent_algebra import merge_labels, gram_matrix, require_normalized
from .errors import MismatchedModeCount, NotNormalized
from .fock_engine import partial_trace
from .model import Bipartition, ChannelSign, ClosedFormCurve, PartitionKind
from .states import CoherentSuperposition, FockState

logger = logging.getLogger(__name__)

# Gram eigenvalues below this fraction of the largest one span no direction
GRAM_RANK_CUTOFF = 1e-13


def _check_bipartition(mode_count: int, partition: Bipartition) -> None:
    covered = sorted(partition.side_a + partition.side_b)
    if covered != list(range(mode_count)):
        raise MismatchedModeCount(f"bipartition {partition.side_a}|{partition.side_b} "
                                  f"does not cover the {mode_count} modes of the state")


def _orthonormal_coordinates(labels: np.ndarray) -> np.ndarray:
    """Columns express each distinct coherent ket in an orthonormal basis of their span."""
    weights, vectors = eigh(gram_matrix(labels, labels))
    keep = weights > GRAM_RANK_CUTOFF * max(float(weights[-1]), 0.0)
    return np.sqrt(weights[keep])[:, None] * vectors[:, keep].conj().T


def _coherent_purity(s: CoherentSuperposition, side_a: Sequence[int]) -> float:
    side_b = [k for k in range(s.mode_count) if k not in side_a]
    labels_a, index_a = merge_labels(np.asarray(s.labels)[:, list(side_a)])
    labels_b, index_b = merge_labels(np.asarray(s.labels)[:, side_b])
    coeffs = np.zeros((len(labels_a), len(labels_b)), dtype=np.complex128)
    np.add.at(coeffs, (index_a, index_b), s.coeffs)
    matrix = _orthonormal_coordinates(labels_a) @ coeffs @ _orthonormal_coordinates(labels_b).T
    rho = matrix @ matrix.conj().T
    return float(np.vdot(rho, rho).real) / float(np.trace(rho).real) ** 2


def _fock_purity(s: FockState, side_a: Sequence[int]) -> float:
    norm_sq = s.squared_norm()
    if abs(norm_sq - 1.0) > 1e-9 + 10.0 * s.truncation_error:
        raise NotNormalized(f"expected a normalized Fock state, squared norm is {norm_sq:.12f}")
    return partial_trace(s, side_a).purity()


def reduced_purity(s: CoherentSuperposition | FockState, partition: Bipartition) -> float:
    """Tr ρ_A² of the reduced state on ``partition.side_a``."""
    _check_bipartition(s.mode_count, partition)
    if isinstance(s, FockState):
        return _fock_purity(s, partition.side_a)
    require_normalized(s)
    return _coherent_purity(s, partition.side_a)


def concurrence_pure(s: CoherentSuperposition | FockState, partition: Bipartition) -> float:
    """√(2(1 − Tr ρ_A²)) for a pure state; reaches 1 on one ebit."""
    purity = reduced_purity(s, partition)
    return math.sqrt(max(0.0, 2.0 * (1.0 - purity)))


def concurrence_closed_form(channel_sign: ChannelSign, partition: PartitionKind, alpha: float) -> float:
    if alpha < 0:
        raise ValueError(f"alpha must not be negative, got {alpha}")
    a2 = alpha * alpha
    if partition is PartitionKind.C3_45:
        return 1.0 if channel_sign is ChannelSign.MINUS else math.tanh(4.0 * a2)
    if a2 == 0.0:
        return 0.0
    numerator = math.sqrt(-math.expm1(-4.0 * a2) * -math.expm1(-12.0 * a2))
    if channel_sign is ChannelSign.PLUS:
        return numerator / (1.0 + math.exp(-8.0 * a2))
    return numerator / -math.expm1(-8.0 * a2)


def success_prob_closed_form(channel_sign: ChannelSign, alpha: complex, parties: int = 2) -> float:
    """1/2 on the minus channel; (1 − x)²/(2(1 + x²)) with x = exp(−2^N|α|²) on the plus channel."""
    if parties < 1:
        raise ValueError(f"parties must be positive, got {parties}")
    if channel_sign is ChannelSign.MINUS:
        return 0.5
    exponent = 2.0 ** parties * abs(alpha) ** 2
    x = math.exp(-exponent)
    return math.expm1(-exponent) ** 2 / (2.0 * (1.0 + x * x))


def closed_form_curve(name: str, grid: Sequence[float], function: Callable[[float], float]) -> ClosedFormCurve:
    return ClosedFormCurve(name=name, alpha=list(grid), values=[function(alpha) for alpha in grid])


def success_curve(channel_sign: ChannelSign, grid: Sequence[float], parties: int = 2) -> ClosedFormCurve:
    return closed_form_curve(f"success-{channel_sign}", grid,
                             lambda alpha: success_prob_closed_form(channel_sign, alpha, parties))


def concurrence_curve(channel_sign: ChannelSign, partition: PartitionKind, grid: Sequence[float]) -> ClosedFormCurve:
    return closed_form_curve(f"concurrence-{channel_sign}-{partition}", grid,
                             lambda alpha: concurrence_closed_form(channel_sign, partition, alpha))
