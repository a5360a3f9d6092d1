"""Parameter scans over α grids."""
import asyncio
import logging
import math
from typing import Callable, Optional, Sequence

from .analysis import concurrence_curve, concurrence_pure, success_curve
from .backends import FockBackend
from .errors import EngineDisagreement, InvalidGrid
from .fock_engine import select_cutoff
from .model import Bipartition, ChannelSign, ChannelSpec, ClosedFormCurve, ECSSpec, Engine, PartitionKind, ScanReport
from .protocols import ENGINE_AGREEMENT_TOLERANCE, build_channel, teleport_ecs

logger = logging.getLogger(__name__)

CLOSED_FORM_TOLERANCE = 1e-8


def parse_grid(spec: str) -> list[float]:
    """Reads ``start:stop:step``; the stop value is included when it lies within half a step of the grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise InvalidGrid(f"grid {spec!r} must look like start:stop:step")
    try:
        start, stop, step = (float(part) for part in parts)
    except ValueError as e:
        raise InvalidGrid(f"grid {spec!r} has a non-numeric bound") from e
    if not all(math.isfinite(v) for v in (start, stop, step)) or step <= 0.0 or stop < start:
        raise InvalidGrid(f"grid {spec!r} needs finite bounds, start <= stop and a positive step")
    if start < 0.0:
        raise InvalidGrid(f"grid {spec!r} must not go below zero")
    count = math.floor((stop - start) / step + 0.5)
    return [round(start + k * step, 12) for k in range(count + 1)]


async def scan_async(grid: Sequence[float], point: Callable[[float], float]) -> list[float]:
    """Evaluates every grid point in a worker thread; results keep grid order."""
    return list(await asyncio.gather(*(asyncio.to_thread(point, alpha) for alpha in grid)))


def run_scan(grid: Sequence[float], point: Callable[[float], float]) -> list[float]:
    return asyncio.run(scan_async(grid, point))


def success_point(channel_sign: ChannelSign, engine: Engine, cutoff: Optional[int] = None) -> Callable[[float], float]:
    def evaluate(alpha: float) -> float:
        report = teleport_ecs(ECSSpec(eps_plus=1, eps_minus=1, alpha=alpha, parties=2),
                              ChannelSpec(sign=channel_sign, alpha=alpha, parties=3), engine, cutoff=cutoff)
        return report.success_probability
    return evaluate


def concurrence_point(channel_sign: ChannelSign, partition: PartitionKind, engine: Engine,
                      cutoff: Optional[int] = None) -> Callable[[float], float]:
    bipartition = Bipartition.split((partition.mode,), 3)

    def evaluate(alpha: float) -> float:
        channel = build_channel(ChannelSpec(sign=channel_sign, alpha=alpha, parties=3))
        if engine is Engine.FOCK:
            backend = FockBackend(cutoff if cutoff is not None else select_cutoff(2.0 * alpha * alpha))
            return concurrence_pure(backend.encode(channel), bipartition)
        return concurrence_pure(channel, bipartition)
    return evaluate


def _scan_report(name: str, grid: list[float], point: Callable[[float], float], reference: ClosedFormCurve,
                 engine: Engine) -> ScanReport:
    values = run_scan(grid, point)
    deviation = max((abs(v - r) for v, r in zip(values, reference.values)), default=0.0)
    if deviation > CLOSED_FORM_TOLERANCE:
        logger.warning(f"Scan {name} deviates from its closed form by {deviation:.3e}")
    return ScanReport(curve=ClosedFormCurve(name=name, alpha=grid, values=values), reference=reference,
                      engine=engine, max_deviation=deviation)


def _cross_checked(name: str, grid: list[float], point_for: Callable[[Engine], Callable[[float], float]],
                   reference: ClosedFormCurve, engine: Engine) -> ScanReport:
    if engine is not Engine.BOTH:
        return _scan_report(name, grid, point_for(engine), reference, engine)
    analytic = _scan_report(name, grid, point_for(Engine.ANALYTIC), reference, Engine.ANALYTIC)
    fock = _scan_report(name, grid, point_for(Engine.FOCK), reference, Engine.FOCK)
    gap = max((abs(a - f) for a, f in zip(analytic.curve.values, fock.curve.values)), default=0.0)
    if gap > ENGINE_AGREEMENT_TOLERANCE:
        raise EngineDisagreement(f"scan {name} differs between engines by {gap:.3e}")
    return analytic.model_copy(update={"engine": Engine.BOTH})


def scan_success(channel_sign: ChannelSign, grid: list[float], engine: Engine = Engine.ANALYTIC,
                 cutoff: Optional[int] = None) -> ScanReport:
    reference = success_curve(channel_sign, grid)
    return _cross_checked(reference.name, grid, lambda e: success_point(channel_sign, e, cutoff), reference, engine)


def scan_concurrence(channel_sign: ChannelSign, partition: PartitionKind, grid: list[float],
                     engine: Engine = Engine.ANALYTIC, cutoff: Optional[int] = None) -> ScanReport:
    reference = concurrence_curve(channel_sign, partition, grid)
    return _cross_checked(reference.name, grid, lambda e: concurrence_point(channel_sign, partition, e, cutoff),
                          reference, engine)
