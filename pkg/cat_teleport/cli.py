"""Command-line runner for the named experiments.

Exit statuses: 0 success, 2 invalid request, 3 numerical failure, 4 report could not be written.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ValidationError

from . import fock_engine
from .analysis import concurrence_pure
from .backends import FockBackend
from .coherent_algebra import state_fidelity
from .config import settings
from .errors import EngineDisagreement, NumericalFailure, ReportWriteFailed, ValidationFailed
from .model import Bipartition, ChannelPreparationReport, ChannelSpec, CrossValidationReport, ECSSpec, Engine, \
    Experiment, ExperimentConfig, LimitCheckReport, Parity, ParityDemoReport, ParityModel, TeleportReport
from .protocols import ENGINE_AGREEMENT_TOLERANCE, bipartite_limit_fidelity, build_channel, channel_limit_fidelity, \
    compare_reports, parity_oracle, prepare_channel_on, prepare_channel_via_bs, sample_outcomes, \
    small_alpha_teleport, teleport_ecs
from .reporting import emit_report
from .scans import parse_grid, scan_concurrence, scan_success

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_WRITE = 4

DEFAULT_ALPHA = 1.0 + 0j
LIMIT_ALPHA = 1e-3 + 0j

# flag name -> ExperimentConfig field
_FLAG_FIELDS = {
    "alpha": "alpha", "eps_plus": "eps_plus", "eps_minus": "eps_minus", "channel_sign": "channel_sign",
    "engine": "engine", "cutoff": "cutoff_override", "mass_tolerance": "mass_tolerance", "seed": "seed",
    "shots": "shots", "output": "output_path", "format": "format", "alpha_grid": "alpha_grid",
    "partition": "partition", "parties": "parties", "n": "n", "a": "a", "b": "b",
    "prepare_channel": "prepare_channel",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cat-teleport",
                                     description="Teleportation of entangled coherent states with linear optics")
    parser.add_argument("experiment", choices=[e.value for e in Experiment])
    parser.add_argument("--config", type=Path, help="JSON experiment config; flags override its values")
    parser.add_argument("--alpha", help="coherent amplitude as re,im")
    parser.add_argument("--eps-plus", dest="eps_plus", help="input amplitude ε₊ as re,im")
    parser.add_argument("--eps-minus", dest="eps_minus", help="input amplitude ε₋ as re,im")
    parser.add_argument("--channel-sign", dest="channel_sign", choices=["plus", "minus"])
    parser.add_argument("--engine", choices=[e.value for e in Engine])
    parser.add_argument("--cutoff", type=int, help="per-mode Fock cutoff")
    parser.add_argument("--mass-tolerance", dest="mass_tolerance", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--shots", type=int, help="sample this many runs from the exact distribution")
    parser.add_argument("--output", type=Path, help="report path, stdout when omitted")
    parser.add_argument("--format", choices=["json", "csv"])
    parser.add_argument("--alpha-grid", dest="alpha_grid", help="scan grid as start:stop:step")
    parser.add_argument("--partition", choices=["3(45)", "4(35)", "5(34)"])
    parser.add_argument("--parties", type=int, help="parties of the teleported state")
    parser.add_argument("--n", type=int, help="Fock level for parity-demo")
    parser.add_argument("--a", help="vacuum amplitude of the single-photon input as re,im")
    parser.add_argument("--b", help="|Ψ⁺⟩ amplitude of the single-photon input as re,im")
    parser.add_argument("--prepare-channel", dest="prepare_channel", action="store_true", default=None)
    parser.add_argument("--log-level", dest="log_level", default=None)
    return parser


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    data: dict[str, Any] = {}
    if args.config is not None:
        data.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
    for flag, field in _FLAG_FIELDS.items():
        value = getattr(args, flag)
        if value is not None:
            data[field] = value
    data["experiment"] = args.experiment
    return ExperimentConfig.model_validate(data)


def _teleport(config: ExperimentConfig, parties: int) -> TeleportReport:
    alpha = config.alpha_or(DEFAULT_ALPHA)
    input_spec = ECSSpec(eps_plus=config.eps_plus, eps_minus=config.eps_minus, alpha=alpha, parties=parties)
    channel_spec = ChannelSpec(sign=config.channel_sign, alpha=alpha, parties=parties + 1)

    def run(engine: Engine) -> TeleportReport:
        return teleport_ecs(input_spec, channel_spec, engine, prepare_channel=config.prepare_channel,
                            cutoff=config.cutoff_override, mass_tolerance=config.mass_tolerance)

    if config.engine is Engine.BOTH:
        report = run(Engine.ANALYTIC)
        compare_reports(report, run(Engine.FOCK))
        report = report.model_copy(update={"engine": Engine.BOTH})
    else:
        report = run(config.engine)
    if config.shots is not None:
        report = report.model_copy(update={"sampling": sample_outcomes(report, config.shots, config.seed)})
    return report


def _prepared_channel_on_fock(alpha: complex, spec: ChannelSpec, cutoff: Optional[int]) -> tuple[float, float]:
    backend = FockBackend(cutoff if cutoff is not None
                          else fock_engine.select_cutoff(2.0 ** (spec.parties - 1) * abs(alpha) ** 2))
    prepared = prepare_channel_on(backend, alpha, spec.parties, spec.sign)
    target = backend.encode(build_channel(spec))
    head = concurrence_pure(prepared, Bipartition.split((0,), spec.parties))
    return fock_engine.fidelity(prepared, target), head


def _channel_prepare(config: ExperimentConfig) -> ChannelPreparationReport:
    alpha = config.alpha_or(DEFAULT_ALPHA)
    spec = ChannelSpec(sign=config.channel_sign, alpha=alpha, parties=config.parties + 1)
    if config.engine is Engine.FOCK:
        fidelity, head = _prepared_channel_on_fock(alpha, spec, config.cutoff_override)
    else:
        prepared = prepare_channel_via_bs(alpha, spec.parties, spec.sign)
        fidelity = state_fidelity(prepared, build_channel(spec))
        head = concurrence_pure(prepared, Bipartition.split((0,), spec.parties))
        if config.engine is Engine.BOTH:
            fock_fidelity, fock_head = _prepared_channel_on_fock(alpha, spec, config.cutoff_override)
            gap = max(abs(fidelity - fock_fidelity), abs(head - fock_head))
            if gap > ENGINE_AGREEMENT_TOLERANCE:
                raise EngineDisagreement(f"prepared channel differs between engines by {gap:.3e}")
    return ChannelPreparationReport(alpha=alpha, parties=spec.parties, sign=spec.sign, engine=config.engine,
                                    fidelity=fidelity, head_concurrence=head)


def _limit_check(config: ExperimentConfig) -> LimitCheckReport:
    alpha = abs(config.alpha_or(LIMIT_ALPHA))
    small_alpha = small_alpha_teleport(config.a, config.b)
    if config.engine is Engine.BOTH and abs(small_alpha.success_probability - 0.5) > ENGINE_AGREEMENT_TOLERANCE:
        raise EngineDisagreement(f"single-photon success probability {small_alpha.success_probability} is not 1/2")
    return LimitCheckReport(alpha=alpha, channel_limit_fidelity=channel_limit_fidelity(alpha),
                            bipartite_limit_fidelity=bipartite_limit_fidelity(alpha), small_alpha=small_alpha)


def _parity_demo(config: ExperimentConfig) -> ParityDemoReport:
    cutoff = max(config.cutoff_override or 0, config.n + 1)
    field = fock_engine.fock_basis_state((cutoff,), (config.n,))
    rng = np.random.default_rng(config.seed) if config.seed is not None else None
    readout = parity_oracle(field, ParityModel(), rng)
    if config.engine is Engine.BOTH and (readout.parity is Parity.ODD) != (config.n % 2 == 1):
        raise EngineDisagreement(f"parity read-out {readout.parity} contradicts n={config.n}")
    return ParityDemoReport(parity=readout.parity, atom=readout.atom)


def _cross_validate(config: ExperimentConfig) -> CrossValidationReport:
    alpha = config.alpha_or(DEFAULT_ALPHA)
    input_spec = ECSSpec(eps_plus=config.eps_plus, eps_minus=config.eps_minus, alpha=alpha, parties=2)
    channel_spec = ChannelSpec(sign=config.channel_sign, alpha=alpha, parties=3)
    analytic = teleport_ecs(input_spec, channel_spec, Engine.ANALYTIC, mass_tolerance=config.mass_tolerance)
    fock = teleport_ecs(input_spec, channel_spec, Engine.FOCK, cutoff=config.cutoff_override)
    gap = compare_reports(analytic, fock)
    analytic_fidelity = state_fidelity(prepare_channel_via_bs(alpha, 3, config.channel_sign),
                                       build_channel(channel_spec))
    fock_fidelity, _ = _prepared_channel_on_fock(alpha, channel_spec, config.cutoff_override)
    if abs(analytic_fidelity - fock_fidelity) > ENGINE_AGREEMENT_TOLERANCE:
        raise EngineDisagreement(f"prepared-channel fidelities differ: {analytic_fidelity} vs {fock_fidelity}")
    return CrossValidationReport(alpha=alpha, cutoff=fock.params.cutoff or 0,
                                 analytic_success=analytic.success_probability,
                                 fock_success=fock.success_probability, max_probability_gap=gap,
                                 channel_fidelity_analytic=analytic_fidelity, channel_fidelity_fock=fock_fidelity)


def _dispatch(config: ExperimentConfig) -> BaseModel:
    match config.experiment:
        case Experiment.TELEPORT:
            return _teleport(config, config.parties)
        case Experiment.TELEPORT_TRIPARTITE:
            return _teleport(config, 3)
        case Experiment.CHANNEL_PREPARE:
            return _channel_prepare(config)
        case Experiment.SCAN_SUCCESS:
            return scan_success(config.channel_sign, parse_grid(config.alpha_grid), config.engine,
                                config.cutoff_override)
        case Experiment.SCAN_CONCURRENCE:
            return scan_concurrence(config.channel_sign, config.partition, parse_grid(config.alpha_grid),
                                    config.engine, config.cutoff_override)
        case Experiment.LIMIT_CHECK:
            return _limit_check(config)
        case Experiment.PARITY_DEMO:
            return _parity_demo(config)
        case Experiment.CROSS_VALIDATE:
            return _cross_validate(config)
    raise ValueError(f"unknown experiment {config.experiment}")


def run_experiment(config: ExperimentConfig) -> int:
    """Runs one experiment and writes its report; returns the process exit status."""
    logger.info(f"Running {config.experiment} on the {config.engine} engine")
    try:
        report = _dispatch(config)
        emit_report(report, config.format, config.output_path)
    except (ValidationFailed, ValueError) as e:
        logger.error(f"Invalid request for {config.experiment}: {e}")
        return EXIT_VALIDATION
    except NumericalFailure as e:
        logger.error(f"{config.experiment} failed numerically ({type(e).__name__}): {e.message}")
        return EXIT_NUMERICAL
    except ReportWriteFailed as e:
        logger.error(e.message)
        return EXIT_WRITE
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=(args.log_level or settings.log_level).upper(), stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = build_config(args)
    except (ValidationError, ValueError) as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_VALIDATION
    except OSError as e:
        logger.error(f"Cannot read config file {args.config}: {e}")
        return EXIT_VALIDATION
    return run_experiment(config)


if __name__ == "__main__":
    sys.exit(main())
