import pytest

from cat_teleport.errors import InvalidGrid
from cat_teleport.model import ChannelSign, Engine, PartitionKind
from cat_teleport.scans import parse_grid, run_scan, scan_async, scan_concurrence, scan_success


def test_parse_grid_includes_the_stop_value() -> None:
    # When
    grid = parse_grid("0:3:0.1")

    # Then
    assert len(grid) == 31
    assert grid[0] == 0.0
    assert grid[10] == 1.0
    assert grid[-1] == 3.0


def test_parse_grid_single_point() -> None:
    assert parse_grid("0.5:0.5:0.1") == [0.5]


@pytest.mark.parametrize("spec", ["1:0:0.1", "0:1", "a:1:0.1", "0:1:0", "-1:1:0.5", "0:inf:0.1"])
def test_parse_grid_rejects_malformed_grids(spec: str) -> None:
    with pytest.raises(InvalidGrid):
        parse_grid(spec)


@pytest.mark.asyncio
async def test_scan_async_keeps_grid_order() -> None:
    values = await scan_async([3.0, 1.0, 2.0], lambda alpha: alpha * alpha)

    assert values == [9.0, 1.0, 4.0]


def test_run_scan_outside_an_event_loop() -> None:
    assert run_scan([0.5, 1.5], lambda alpha: 2.0 * alpha) == [1.0, 3.0]


def test_success_scan_matches_closed_form() -> None:
    # When
    report = scan_success(ChannelSign.PLUS, [0.0, 0.5, 1.0, 1.5])

    # Then
    assert report.engine is Engine.ANALYTIC
    assert report.curve.name == "success-plus"
    assert report.curve.alpha == [0.0, 0.5, 1.0, 1.5]
    assert report.max_deviation < 1e-8
    assert report.curve.values[0] == 0.0


def test_minus_success_scan_is_flat() -> None:
    report = scan_success(ChannelSign.MINUS, [0.25, 1.0])

    assert report.curve.values == pytest.approx([0.5, 0.5], abs=1e-9)


@pytest.mark.parametrize("partition", list(PartitionKind))
def test_concurrence_scan_matches_closed_form(partition: PartitionKind) -> None:
    report = scan_concurrence(ChannelSign.PLUS, partition, [0.25, 0.5, 1.0])

    assert report.reference.name == f"concurrence-plus-{partition}"
    assert report.max_deviation < 1e-7


def test_scans_cross_check_engines() -> None:
    # When
    concurrence = scan_concurrence(ChannelSign.MINUS, PartitionKind.C5_34, [0.5, 1.0], Engine.BOTH)
    success = scan_success(ChannelSign.MINUS, [0.5], Engine.BOTH)

    # Then
    assert concurrence.engine is Engine.BOTH
    assert concurrence.max_deviation < 1e-7
    assert success.engine is Engine.BOTH
    assert success.curve.values == pytest.approx([0.5], abs=1e-9)
