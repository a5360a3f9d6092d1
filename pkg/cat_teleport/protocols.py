"""State builders and end-to-end protocols: channel preparation, teleportation and parity read-out."""
import logging
import math
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from . import coherent_algebra, fock_engine
from .analysis import success_prob_closed_form
from .backends import AnalyticBackend, FockBackend, TeleportBackend, backend_for, get_backend
from .coherent_algebra import make_superposition, normalize, superpose, tensor_product
from .config import settings
from .errors import AlphaMismatch, CutoffTooSmall, EngineDisagreement, MismatchedModeCount, ModeNotSeparated, \
    NonConvergence, ParityMismatch, ZeroState
from .model import AtomState, ChannelSign, ChannelSpec, ECSSpec, Engine, OutcomeClass, OutcomeKind, OutcomeRecord, \
    Parity, ParityModel, SampleCount, SamplingSummary, SinglePhotonParams, TeleportParams, TeleportReport, cascade_layout
from .states import CoherentSuperposition, FockState, MeasurementOutcome

logger = logging.getLogger(__name__)

ALPHA_TOLERANCE = 1e-12
PROBABILITY_MASS_TOLERANCE = 1e-9
ENGINE_AGREEMENT_TOLERANCE = 1e-6
SMALL_ALPHA_CUTOFF = 3


def _signed_pair(labels: Sequence[complex], plus: complex, minus: complex) -> CoherentSuperposition:
    return make_superposition(len(labels), [(plus, list(labels)), (minus, [-label for label in labels])])


def build_cat(eps_plus: complex, eps_minus: complex, alpha: complex) -> CoherentSuperposition:
    """Normalized ε₊|α⟩ + ε₋|−α⟩."""
    return normalize(_signed_pair([alpha], eps_plus, eps_minus))


def build_ecs(spec: ECSSpec) -> CoherentSuperposition:
    return normalize(_signed_pair(spec.label_layout, spec.eps_plus, spec.eps_minus))


def build_channel(spec: ChannelSpec) -> CoherentSuperposition:
    return normalize(_signed_pair(spec.label_layout, 1.0, spec.sign.factor))


def _vacuum(modes: int) -> CoherentSuperposition:
    return make_superposition(modes, [(1.0, [0j] * modes)])


def prepare_channel_on[StateT](backend: TeleportBackend[StateT], alpha: complex, parties: int = 3,
                               sign: ChannelSign = ChannelSign.MINUS) -> StateT:
    """Splits a cat of amplitude α·√2^(parties−1) through ℬ_{k,k+1} for k = 0 … parties−2.

    The odd cat yields the minus channel and the even cat the plus channel.
    """
    if parties < 2:
        raise ValueError(f"a channel needs at least two modes, got {parties}")
    source = build_cat(1.0, sign.factor, alpha * math.sqrt(2.0 ** (parties - 1)))
    state = backend.encode(tensor_product(source, _vacuum(parties - 1)))
    for k in range(parties - 1):
        state = backend.balanced_bs(state, k, k + 1)
    logger.debug(f"Prepared a {parties}-mode {sign} channel at alpha={alpha} on the {backend.engine} engine")
    return state


def prepare_channel_via_bs(alpha: complex, parties: int = 3,
                           sign: ChannelSign = ChannelSign.MINUS) -> CoherentSuperposition:
    return prepare_channel_on(AnalyticBackend(), alpha, parties, sign)


def parity_decomposition(alpha: complex, parties: int = 3) -> CoherentSuperposition:
    """(|L⟩⁻|rest⟩⁺ + |L⟩⁺|rest⟩⁻)/√2 over the minus-channel layout, L being the leading label."""
    if parties < 2:
        raise ValueError(f"the decomposition needs at least two modes, got {parties}")
    head = cascade_layout(alpha, parties)[0]
    rest_plus = build_ecs(ECSSpec(eps_plus=1, eps_minus=1, alpha=alpha, parties=parties - 1))
    rest_minus = build_ecs(ECSSpec(eps_plus=1, eps_minus=-1, alpha=alpha, parties=parties - 1))
    return superpose([
        (math.sqrt(0.5), tensor_product(build_cat(1, -1, head), rest_plus)),
        (math.sqrt(0.5), tensor_product(build_cat(1, 1, head), rest_minus)),
    ])


def disentangle_input[StateT](backend: TeleportBackend[StateT], state: StateT, parties: int) -> StateT:
    """Applies ℬ_{N,1}···ℬ_{N,N−1} (1-based), leaving every mode but the last in the vacuum."""
    for k in reversed(range(parties - 1)):
        state = backend.balanced_bs(state, parties - 1, k)
    return state


def _validate_pairing(input_spec: ECSSpec, channel_spec: ChannelSpec) -> None:
    if input_spec.parties < 2 or input_spec.parties + 1 != channel_spec.parties:
        raise ParityMismatch(f"a {input_spec.parties}-party input needs a {input_spec.parties + 1}-mode channel, "
                             f"got {channel_spec.parties} modes")
    if abs(input_spec.alpha - channel_spec.alpha) > ALPHA_TOLERANCE:
        raise AlphaMismatch(f"input alpha {input_spec.alpha} differs from channel alpha {channel_spec.alpha}")


def _is_success(k: int, channel_sign: ChannelSign) -> bool:
    if channel_sign is ChannelSign.MINUS:
        return k % 2 == 1
    return k > 0 and k % 2 == 0


def apply_correction_and_classify[StateT](n: int, m: int, channel_sign: ChannelSign, bob_state: StateT,
                                          backend: Optional[TeleportBackend[StateT]] = None) \
        -> tuple[OutcomeClass, StateT]:
    """Classifies a measurement branch and applies Bob's correction.

    Branches with m = 0 need no correction. Branches with n = 0 and m > 0 get a π phase on every one
    of Bob's modes. Everything else, (0, 0) included, is a failure.
    """
    backend = backend if backend is not None else backend_for(bob_state)
    state = bob_state
    if n == 0 and m > 0:
        for mode in range(_mode_count(bob_state)):
            state = backend.phase_shift(state, mode, math.pi)
    if m == 0 and _is_success(n, channel_sign):
        kind = OutcomeKind.PERFECT_SUCCESS
    elif n == 0 and _is_success(m, channel_sign):
        kind = OutcomeKind.CORRECTED_SUCCESS
    else:
        kind = OutcomeKind.FAILURE
    return OutcomeClass(kind=kind, n=n, m=m), state


def _mode_count(state: Any) -> int:
    return int(state.mode_count)


def _records[StateT](backend: TeleportBackend[StateT], outcomes: list[MeasurementOutcome[StateT]],
                     channel_sign: ChannelSign, target: StateT) -> list[OutcomeRecord]:
    records = []
    for outcome in outcomes:
        outcome_class, corrected = apply_correction_and_classify(outcome.n, outcome.m, channel_sign,
                                                                 outcome.state, backend)
        records.append(OutcomeRecord(n=outcome.n, m=outcome.m, kind=outcome_class.kind,
                                     probability=outcome.probability,
                                     fidelity=backend.fidelity(corrected, target)))
    return records


def _check_mass(records: list[OutcomeRecord], tolerance: float) -> None:
    total = math.fsum(record.probability for record in records)
    if abs(total - 1.0) > tolerance + PROBABILITY_MASS_TOLERANCE:
        raise NonConvergence(f"outcome probabilities sum to {total:.12f}")


def teleport_ecs(input_spec: ECSSpec, channel_spec: ChannelSpec, engine: Engine = Engine.ANALYTIC, *,
                 prepare_channel: bool = False, cutoff: Optional[int] = None,
                 mass_tolerance: Optional[float] = None) -> TeleportReport:
    """Teleports an N-party entangled coherent state through an (N+1)-mode channel.

    Alice disentangles her input onto its last mode, merges it with the first channel mode on a
    balanced beam splitter and counts photons on both. Fidelities compare Bob's corrected modes
    with the input state.
    """
    _validate_pairing(input_spec, channel_spec)
    parties = input_spec.parties
    tolerance = settings.mass_tolerance if mass_tolerance is None else mass_tolerance
    backend = get_backend(engine, cutoff, mean_photons=2.0 ** parties * abs(input_spec.alpha) ** 2)
    logger.info(f"Teleporting a {parties}-party state at alpha={input_spec.alpha} over the {channel_spec.sign} "
                f"channel on the {backend.engine} engine")

    target = build_ecs(input_spec)
    disentangled = disentangle_input(backend, backend.encode(target), parties)
    try:
        merged_input = backend.project_vacuum(disentangled, range(parties - 1))
    except ModeNotSeparated as e:
        raise ParityMismatch(f"the input layout does not disentangle onto one mode: {e.message}") from e

    if prepare_channel:
        channel = prepare_channel_on(backend, channel_spec.alpha, channel_spec.parties, channel_spec.sign)
    else:
        channel = backend.encode(build_channel(channel_spec))
    joint = backend.balanced_bs(backend.tensor(merged_input, channel), 0, 1)
    outcomes = backend.measure(joint, 0, 1, tolerance)

    records = _records(backend, outcomes, channel_spec.sign, backend.encode(target))
    _check_mass(records, tolerance)
    success = math.fsum(record.probability for record in records if record.kind.is_success)
    logger.info(f"Teleportation finished with {len(records)} outcomes and success probability {success:.12f}")
    return TeleportReport(
        params=TeleportParams(input_state=input_spec, channel=channel_spec, prepare_channel=prepare_channel,
                              cutoff=backend.cutoff, mass_tolerance=tolerance),
        engine=backend.engine,
        outcomes=records,
        success_probability=success,
        closed_form_reference=success_prob_closed_form(channel_spec.sign, input_spec.alpha, parties),
    )


def _fock_superposition(cutoffs: tuple[int, ...], terms: Sequence[tuple[complex, Sequence[int]]]) -> FockState:
    return fock_engine.superpose([(coeff, fock_engine.fock_basis_state(cutoffs, occupation))
                                  for coeff, occupation in terms])


def psi_plus(cutoff: int) -> FockState:
    """(|10⟩ + |01⟩)/√2."""
    return _fock_superposition((cutoff, cutoff), [(math.sqrt(0.5), (1, 0)), (math.sqrt(0.5), (0, 1))])


def single_photon_channel(cutoff: int) -> FockState:
    """(|1⟩|00⟩ + |0⟩|Ψ⁺⟩)/√2, the α→0 limit of the three-mode minus channel."""
    return _fock_superposition((cutoff,) * 3, [(math.sqrt(0.5), (1, 0, 0)), (0.5, (0, 1, 0)), (0.5, (0, 0, 1))])


def _single_photon_input(a: complex, b: complex, cutoff: int) -> FockState:
    norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    if norm == 0.0:
        raise ZeroState("the single-photon input needs (a, b) ≠ (0, 0)")
    vacuum = fock_engine.fock_basis_state((cutoff, cutoff), (0, 0))
    return fock_engine.superpose([(a / norm, vacuum), (b / norm, psi_plus(cutoff))])


def small_alpha_teleport(a: complex, b: complex) -> TeleportReport:
    """Teleports a|00⟩ + b|Ψ⁺⟩ through the single-photon channel with ℬ₁₃ℬ₁₂ and a count on modes 1 and 3."""
    cutoff = SMALL_ALPHA_CUTOFF
    backend = FockBackend(cutoff)
    target = _single_photon_input(a, b, cutoff)
    state = backend.tensor(target, single_photon_channel(cutoff))
    state = backend.balanced_bs(state, 0, 1)
    state = backend.balanced_bs(state, 0, 2)
    state = backend.project_vacuum(state, [1])
    outcomes = backend.measure(state, 0, 1)
    records = _records(backend, outcomes, ChannelSign.MINUS, target)
    success = math.fsum(record.probability for record in records if record.kind.is_success)
    logger.info(f"Single-photon teleportation finished with success probability {success:.12f}")
    return TeleportReport(
        params=SinglePhotonParams(a=a, b=b, cutoff=cutoff),
        engine=Engine.FOCK,
        outcomes=records,
        success_probability=success,
        closed_form_reference=0.5,
    )


def channel_limit_fidelity(alpha: complex, cutoff: Optional[int] = None) -> float:
    """Fidelity of the three-mode minus channel with (|1⟩|00⟩ + |0⟩|Ψ⁺⟩)/√2 on the Fock engine."""
    cutoff = cutoff if cutoff is not None else fock_engine.select_cutoff(2.0 * abs(alpha) ** 2)
    channel = FockBackend(cutoff).encode(build_channel(ChannelSpec(sign=ChannelSign.MINUS, alpha=alpha)))
    return fock_engine.fidelity(channel, single_photon_channel(cutoff))


def bipartite_limit_fidelity(alpha: complex, cutoff: Optional[int] = None) -> float:
    """Fidelity of the two-mode minus state with |Ψ⁺⟩ on the Fock engine."""
    cutoff = cutoff if cutoff is not None else fock_engine.select_cutoff(abs(alpha) ** 2)
    state = FockBackend(cutoff).encode(build_ecs(ECSSpec(eps_plus=1, eps_minus=-1, alpha=alpha, parties=2)))
    return fock_engine.fidelity(state, psi_plus(cutoff))


@dataclass(frozen=True)
class ParityReadout:
    parity: Parity
    atom: AtomState
    probability: float
    state: FockState


def parity_distribution(field: FockState, model: ParityModel) -> list[ParityReadout]:
    """Both atom read-outs after U = exp(−i g t a†a σ_x), with their posterior field states.

    On the canonical oracle (g t = π/2) the posterior is the exact even or odd projection of the field.
    """
    if field.mode_count != 1:
        raise MismatchedModeCount(f"the parity oracle acts on one field mode, got {field.mode_count}")
    if field.truncation_error > 1.0 - settings.min_retained_norm:
        raise CutoffTooSmall(f"field truncation error {field.truncation_error:.3e} is too large for a parity read-out")
    norm_sq = field.squared_norm()
    if norm_sq < fock_engine.ZERO_NORM:
        raise ZeroState("cannot read the parity of a zero field")
    cutoff = field.cutoffs[0]
    angle = model.coupling * model.interaction_time
    rotation = np.array([coherent_algebra.unit_phase(angle * n) for n in range(cutoff)])
    amplitudes = np.asarray(field.amplitudes) / math.sqrt(norm_sq)
    stay = rotation.real * amplitudes
    flip = -1j * rotation.imag * amplitudes
    if model.atom_state is AtomState.GROUND:
        branches = {AtomState.GROUND: stay, AtomState.EXCITED: flip}
    else:
        branches = {AtomState.GROUND: flip, AtomState.EXCITED: stay}
    undo = rotation if model.is_canonical else np.ones(cutoff)

    readouts = []
    for atom, branch in branches.items():
        probability = float(np.vdot(branch, branch).real)
        if probability <= coherent_algebra.OUTCOME_PROBABILITY_FLOOR:
            continue
        parity = Parity.EVEN if (atom is AtomState.GROUND) == (model.atom_state is AtomState.GROUND) else Parity.ODD
        posterior = FockState(cutoffs=(cutoff,), amplitudes=undo * branch / math.sqrt(probability),
                              truncation_error=field.truncation_error)
        readouts.append(ParityReadout(parity=parity, atom=atom, probability=probability, state=posterior))
    return readouts


def parity_oracle(field: FockState, model: Optional[ParityModel] = None,
                  rng: Optional[np.random.Generator] = None) -> ParityReadout:
    """Reads the photon-number parity through the atom.

    Samples the atom outcome when a generator is given and otherwise returns the most probable branch.
    """
    readouts = parity_distribution(field, model if model is not None else ParityModel())
    if rng is not None:
        probabilities = np.array([readout.probability for readout in readouts])
        return readouts[int(rng.choice(len(readouts), p=probabilities / probabilities.sum()))]
    return max(readouts, key=lambda readout: readout.probability)


def sample_outcomes(report: TeleportReport, shots: int, seed: Optional[int] = None) -> SamplingSummary:
    """Draws protocol runs from the exact outcome distribution of a report."""
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    rng = np.random.default_rng(seed)
    probabilities = np.array([outcome.probability for outcome in report.outcomes])
    counts = rng.multinomial(shots, probabilities / probabilities.sum())
    successes = sum(int(count) for count, outcome in zip(counts, report.outcomes) if outcome.kind.is_success)
    return SamplingSummary(
        shots=shots,
        seed=seed,
        counts=[SampleCount(n=outcome.n, m=outcome.m, count=int(count))
                for count, outcome in zip(counts, report.outcomes) if count > 0],
        success_frequency=successes / shots,
    )


def compare_reports(first: TeleportReport, second: TeleportReport,
                    tolerance: float = ENGINE_AGREEMENT_TOLERANCE) -> float:
    """Largest probability gap between two reports; raises EngineDisagreement beyond the tolerance."""
    first_map = {(o.n, o.m): o.probability for o in first.outcomes}
    second_map = {(o.n, o.m): o.probability for o in second.outcomes}
    gaps = [abs(first_map.get(key, 0.0) - second_map.get(key, 0.0)) for key in first_map.keys() | second_map.keys()]
    gaps.append(abs(first.success_probability - second.success_probability))
    gap = max(gaps)
    if gap > tolerance:
        raise EngineDisagreement(f"{first.engine} and {second.engine} engines disagree by {gap:.3e} "
                                 f"in a reported probability, above {tolerance}")
    return gap
