import math

import pytest

from cat_teleport.analysis import closed_form_curve, concurrence_closed_form, concurrence_curve, concurrence_pure, \
    reduced_purity, success_curve, success_prob_closed_form
from cat_teleport.backends import FockBackend
from cat_teleport.coherent_algebra import apply_phase_shift, make_superposition
from cat_teleport.errors import MismatchedModeCount, NotNormalized
from cat_teleport.fock_engine import select_cutoff
from cat_teleport.model import Bipartition, ChannelSign, ChannelSpec, ECSSpec, PartitionKind
from cat_teleport.protocols import build_channel, build_ecs
from cat_teleport.states import CoherentSuperposition

ALPHA_GRID = [0.25, 0.5, 1.0, 1.5, 2.0]
PLUS_SUCCESS_AT_ONE = (1.0 - math.exp(-4.0)) ** 2 / (2.0 * (1.0 + math.exp(-8.0)))


def _channel(sign: ChannelSign, alpha: float) -> CoherentSuperposition:
    return build_channel(ChannelSpec(sign=sign, alpha=alpha, parties=3))


@pytest.mark.parametrize("alpha", [0.3, 0.7, 1.5])
def test_bipartite_odd_state_carries_one_ebit(alpha: float) -> None:
    # Given
    state = build_ecs(ECSSpec(eps_plus=1, eps_minus=-1, alpha=alpha, parties=2))

    # When
    concurrence = concurrence_pure(state, Bipartition.split((0,), 2))

    # Then
    assert concurrence == pytest.approx(1.0, abs=1e-8)
    assert reduced_purity(state, Bipartition.split((0,), 2)) == pytest.approx(0.5, abs=1e-8)


def test_plus_channel_head_concurrence() -> None:
    state = _channel(ChannelSign.PLUS, 0.5)

    assert concurrence_pure(state, Bipartition.split((0,), 3)) == pytest.approx(0.7615942, abs=1e-7)


def test_product_state_is_pure() -> None:
    state = make_superposition(2, [(1, [0.4, 1.2j])])

    assert reduced_purity(state, Bipartition.split((1,), 2)) == pytest.approx(1.0, abs=1e-12)
    assert concurrence_pure(state, Bipartition.split((1,), 2)) == pytest.approx(0.0, abs=1e-7)


@pytest.mark.parametrize("sign", list(ChannelSign))
@pytest.mark.parametrize("partition", list(PartitionKind))
@pytest.mark.parametrize("alpha", ALPHA_GRID)
def test_channel_concurrence_matches_closed_form(sign: ChannelSign, partition: PartitionKind, alpha: float) -> None:
    # Given
    state = _channel(sign, alpha)

    # When
    concurrence = concurrence_pure(state, Bipartition.split((partition.mode,), 3))

    # Then
    assert concurrence == pytest.approx(concurrence_closed_form(sign, partition, alpha), abs=1e-7)


@pytest.mark.parametrize("partition", [PartitionKind.C3_45, PartitionKind.C4_35])
def test_fock_concurrence_matches_closed_form(partition: PartitionKind) -> None:
    # Given
    alpha = 0.5
    state = FockBackend(select_cutoff(2.0 * alpha ** 2)).encode(_channel(ChannelSign.PLUS, alpha))

    # When
    concurrence = concurrence_pure(state, Bipartition.split((partition.mode,), 3))

    # Then
    assert concurrence == pytest.approx(concurrence_closed_form(ChannelSign.PLUS, partition, alpha), abs=1e-6)


def test_concurrence_is_symmetric_and_local_phase_invariant() -> None:
    # Given
    state = _channel(ChannelSign.MINUS, 0.7)
    partition = Bipartition.split((1,), 3)

    # When
    rotated = apply_phase_shift(apply_phase_shift(state, 1, 0.4), 2, -1.3)

    # Then
    reference = concurrence_pure(state, partition)
    assert concurrence_pure(state, partition.swapped()) == pytest.approx(reference, abs=1e-8)
    assert concurrence_pure(rotated, partition) == pytest.approx(reference, abs=1e-10)


def test_reduced_purity_validation() -> None:
    state = _channel(ChannelSign.MINUS, 1.0)

    with pytest.raises(MismatchedModeCount):
        reduced_purity(state, Bipartition(side_a=(0,), side_b=(1,)))
    with pytest.raises(NotNormalized):
        reduced_purity(make_superposition(2, [(3, [0.1, 0.2])]), Bipartition.split((0,), 2))
    with pytest.raises(ValueError):
        Bipartition(side_a=(0, 1), side_b=(1, 2))


def test_concurrence_closed_form_values() -> None:
    a2 = 0.25
    expected = math.sqrt((1 - math.exp(-4 * a2)) * (1 - math.exp(-12 * a2)))

    assert concurrence_closed_form(ChannelSign.MINUS, PartitionKind.C3_45, 0.5) == 1.0
    assert concurrence_closed_form(ChannelSign.PLUS, PartitionKind.C3_45, 0.5) == pytest.approx(math.tanh(1.0))
    assert concurrence_closed_form(ChannelSign.PLUS, PartitionKind.C5_34, 0.5) == \
        pytest.approx(expected / (1 + math.exp(-2.0)), abs=1e-14)
    assert concurrence_closed_form(ChannelSign.MINUS, PartitionKind.C4_35, 0.5) == \
        pytest.approx(expected / (1 - math.exp(-2.0)), abs=1e-14)
    assert 1.0 - concurrence_closed_form(ChannelSign.PLUS, PartitionKind.C3_45, 3.0) < 1e-15
    assert concurrence_closed_form(ChannelSign.PLUS, PartitionKind.C4_35, 0.0) == 0.0


def test_success_probability_closed_form() -> None:
    assert success_prob_closed_form(ChannelSign.MINUS, 0.25) == 0.5
    assert success_prob_closed_form(ChannelSign.PLUS, 1.0) == pytest.approx(PLUS_SUCCESS_AT_ONE, abs=1e-12)
    assert PLUS_SUCCESS_AT_ONE == pytest.approx(0.48169, abs=1e-5)
    assert abs(success_prob_closed_form(ChannelSign.PLUS, 3.0) - 0.5) < 1e-6
    assert success_prob_closed_form(ChannelSign.PLUS, 0.0) == 0.0


def test_curves_share_the_grid() -> None:
    # Given
    grid = [0.0, 0.5, 1.0]

    # When
    success = success_curve(ChannelSign.PLUS, grid)
    concurrence = concurrence_curve(ChannelSign.MINUS, PartitionKind.C5_34, grid[1:])
    squares = closed_form_curve("square", grid, lambda alpha: alpha * alpha)

    # Then
    assert success.name == "success-plus"
    assert success.alpha == grid
    assert success.values[2] == pytest.approx(PLUS_SUCCESS_AT_ONE, abs=1e-12)
    assert concurrence.name == "concurrence-minus-5(34)"
    assert squares.values == [0.0, 0.25, 1.0]
