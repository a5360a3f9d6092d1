import math
from pathlib import Path

import numpy as np
import pytest

from cat_teleport.coherent_algebra import make_superposition, to_fock
from cat_teleport.errors import BadModeIndex, CutoffMismatch, EngineLimitExceeded, InvalidDensityMatrix, \
    ModeNotSeparated, ReportWriteFailed, ZeroState
from cat_teleport.fock_engine import apply_phase_fock, apply_two_mode_bs, check_density_matrix, coherent_fock, \
    dump_amplitudes, fidelity, fock_basis_state, load_amplitudes, normalize_fock, number_distribution, partial_trace, \
    project_vacuum_fock, select_cutoff, superpose, tensor_product
from cat_teleport.model import BeamSplitterVariant
from cat_teleport.protocols import psi_plus
from cat_teleport.states import DensityMatrix, FockState

SEED = 7


def _random_state(cutoffs: tuple[int, ...], seed: int = SEED) -> FockState:
    rng = np.random.default_rng(seed)
    amplitudes = rng.normal(size=cutoffs) + 1j * rng.normal(size=cutoffs)
    return normalize_fock(FockState(cutoffs=cutoffs, amplitudes=amplitudes))


def _mean_photons(s: FockState, mode: int) -> float:
    populations = np.abs(np.asarray(s.amplitudes)) ** 2
    axes = tuple(k for k in range(s.mode_count) if k != mode)
    return float(np.arange(s.cutoffs[mode]) @ populations.sum(axis=axes))


def test_select_cutoff_rule() -> None:
    assert select_cutoff(0.0) == 10
    assert select_cutoff(4.0) == 26
    with pytest.raises(ValueError):
        select_cutoff(-1.0)


def test_coherent_fock_norms() -> None:
    # Given
    partial_sum = math.fsum(math.exp(-4.0) * 4.0 ** n / math.factorial(n) for n in range(8))

    # When
    generous = coherent_fock(1.0, 20)
    truncated = coherent_fock(2.0, 8)

    # Then
    assert generous.squared_norm() >= 1.0 - 1e-12
    assert truncated.squared_norm() == pytest.approx(partial_sum, abs=1e-12)
    assert truncated.squared_norm() == pytest.approx(0.9489, abs=1e-4)
    assert truncated.truncation_error == pytest.approx(1.0 - partial_sum, abs=1e-12)


def test_fidelity_of_opposite_coherent_states() -> None:
    assert fidelity(coherent_fock(1.0, 30), coherent_fock(-1.0, 30)) == pytest.approx(math.exp(-4.0), abs=1e-12)


def test_raw_splitter_on_one_photon() -> None:
    # Given
    state = fock_basis_state((3, 3), (1, 0))

    # When
    split = apply_two_mode_bs(state, 0, 1, BeamSplitterVariant.RAW)

    # Then
    assert split.amplitudes[1, 0] == pytest.approx(math.sqrt(0.5), abs=1e-14)
    assert split.amplitudes[0, 1] == pytest.approx(1j * math.sqrt(0.5), abs=1e-14)


def test_balanced_splitter_on_one_photon() -> None:
    state = fock_basis_state((3, 3), (1, 0))

    split = apply_two_mode_bs(state, 0, 1)

    assert fidelity(split, psi_plus(3)) == pytest.approx(1.0, abs=1e-14)


def test_two_photon_interference() -> None:
    # Given
    state = fock_basis_state((3, 3), (1, 1))

    # When
    outcomes = number_distribution(apply_two_mode_bs(state, 0, 1), 0, 1)

    # Then
    assert [(o.n, o.m) for o in outcomes] == [(0, 2), (2, 0)]
    assert [o.probability for o in outcomes] == pytest.approx([0.5, 0.5], abs=1e-14)


def test_balanced_splitter_matches_coherent_labels() -> None:
    # Given
    alpha = 1.0
    cutoff = 20
    pair = tensor_product(coherent_fock(alpha, cutoff), coherent_fock(alpha, cutoff))

    # When
    split = apply_two_mode_bs(pair, 0, 1)
    expected = to_fock(make_superposition(2, [(1, [math.sqrt(2.0) * alpha, 0.0])]), cutoff)

    # Then
    assert fidelity(split, expected) >= 1.0 - 10.0 * max(split.truncation_error, 1e-10)


@pytest.mark.parametrize("variant", list(BeamSplitterVariant))
def test_splitter_is_unitary_and_conserves_photons(variant: BeamSplitterVariant) -> None:
    # Given
    state = _random_state((5, 5, 4))
    photons_before = _mean_photons(state, 0) + _mean_photons(state, 1)

    # When
    split = apply_two_mode_bs(state, 0, 1, variant)

    # Then
    assert split.squared_norm() == pytest.approx(1.0, abs=1e-12)
    assert _mean_photons(split, 0) + _mean_photons(split, 1) == pytest.approx(photons_before, abs=1e-10)
    assert _mean_photons(split, 2) == pytest.approx(_mean_photons(state, 2), abs=1e-12)


def test_phase_shift_preserves_the_norm() -> None:
    state = _random_state((4, 6))

    shifted = apply_phase_fock(state, 1, 0.9)

    assert shifted.squared_norm() == pytest.approx(1.0, abs=1e-12)
    assert shifted.amplitudes[2, 3] == pytest.approx(state.amplitudes[2, 3] * np.exp(2.7j), abs=1e-14)


def test_splitter_rejects_mismatched_modes() -> None:
    with pytest.raises(CutoffMismatch):
        apply_two_mode_bs(fock_basis_state((3, 4), (0, 0)), 0, 1)
    with pytest.raises(BadModeIndex):
        apply_two_mode_bs(fock_basis_state((3, 3), (0, 0)), 1, 1)


def test_partial_trace_of_one_ebit() -> None:
    # Given
    state = psi_plus(4)

    # When
    rho = check_density_matrix(partial_trace(state, (0,)))

    # Then
    assert rho.trace() == pytest.approx(1.0, abs=1e-12)
    assert rho.purity() == pytest.approx(0.5, abs=1e-8)


def test_partial_trace_of_a_product_is_pure() -> None:
    state = normalize_fock(tensor_product(coherent_fock(0.5, 15), coherent_fock(0.3j, 15)))

    assert partial_trace(state, (1,)).purity() == pytest.approx(1.0, abs=1e-10)


def test_check_density_matrix_rejects_bad_trace() -> None:
    with pytest.raises(InvalidDensityMatrix):
        check_density_matrix(DensityMatrix(dims=(2,), entries=np.eye(2)))


def test_project_vacuum_fock() -> None:
    # Given
    state = fock_basis_state((3, 3), (1, 0))

    # When
    projected = project_vacuum_fock(state, [1])

    # Then
    assert projected.cutoffs == (3,)
    assert projected.amplitudes[1] == 1.0
    with pytest.raises(ModeNotSeparated):
        project_vacuum_fock(state, [0])


def test_superpose_and_normalize() -> None:
    plus = superpose([(1.0, fock_basis_state((2,), (0,))), (1.0, fock_basis_state((2,), (1,)))])

    assert normalize_fock(plus).amplitudes == pytest.approx([math.sqrt(0.5), math.sqrt(0.5)])
    with pytest.raises(ZeroState):
        normalize_fock(superpose([(1.0, fock_basis_state((2,), (0,))), (-1.0, fock_basis_state((2,), (0,)))]))


def test_tensor_size_limit() -> None:
    with pytest.raises(EngineLimitExceeded):
        fock_basis_state((300, 300, 300), (0, 0, 0))


def test_amplitude_dump_layout(tmp_path: Path) -> None:
    # Given
    state = _random_state((3, 2))
    path = tmp_path / "amplitudes.bin"

    # When
    dump_amplitudes(state, path)

    # Then
    raw = np.fromfile(path, dtype="<f8")
    assert raw.size == 12
    assert raw[2] == state.amplitudes[0, 1].real
    assert raw[3] == state.amplitudes[0, 1].imag
    assert np.array_equal(load_amplitudes(path, (3, 2)).amplitudes, state.amplitudes)


def test_amplitude_dump_reports_write_errors(tmp_path: Path) -> None:
    with pytest.raises(ReportWriteFailed):
        dump_amplitudes(psi_plus(2), tmp_path / "missing" / "amplitudes.bin")
