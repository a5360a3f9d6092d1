import cmath
import math
from enum import StrEnum
from pathlib import Path
from typing import Annotated, Any, List, Optional, Self

from pydantic import AfterValidator, BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, WithJsonSchema, \
    model_validator

from .config import settings


def parse_complex(value: Any) -> Any:
    """Accepts complex numbers, ``"re,im"`` or ``"re"`` strings and ``[re, im]`` pairs."""
    if isinstance(value, str):
        parts = [part.strip() for part in value.split(",")]
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
        raise ValueError(f"cannot read a complex number from {value!r}, expected 're,im'")
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"expected a [re, im] pair, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    return value


def _require_finite(value: complex) -> complex:
    if not cmath.isfinite(value):
        raise ValueError(f"complex amplitude {value!r} is not finite")
    return value


def _dump_complex(value: complex) -> list[float]:
    return [value.real, value.imag]


ComplexNumber = Annotated[
    complex,
    BeforeValidator(parse_complex),
    AfterValidator(_require_finite),
    PlainSerializer(_dump_complex, return_type=list[float], when_used="json"),
    WithJsonSchema({"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}),
]


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, populate_by_name=True)


class ChannelSign(StrEnum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def factor(self) -> int:
        return 1 if self is ChannelSign.PLUS else -1


class Engine(StrEnum):
    ANALYTIC = "analytic"
    FOCK = "fock"
    BOTH = "both"


class BeamSplitterVariant(StrEnum):
    RAW = "raw"
    BALANCED = "balanced"


class OutcomeKind(StrEnum):
    PERFECT_SUCCESS = "PerfectSuccess"
    CORRECTED_SUCCESS = "CorrectedSuccess"
    FAILURE = "Failure"

    @property
    def is_success(self) -> bool:
        return self is not OutcomeKind.FAILURE


class PartitionKind(StrEnum):
    C3_45 = "3(45)"
    C4_35 = "4(35)"
    C5_34 = "5(34)"

    @property
    def mode(self) -> int:
        """Index of the single-mode side inside the three-mode channel."""
        return {"3(45)": 0, "4(35)": 1, "5(34)": 2}[self.value]


class AtomState(StrEnum):
    GROUND = "ground"
    EXCITED = "excited"


class Parity(StrEnum):
    EVEN = "even"
    ODD = "odd"


class ReportFormat(StrEnum):
    JSON = "json"
    CSV = "csv"


class Experiment(StrEnum):
    TELEPORT = "teleport"
    TELEPORT_TRIPARTITE = "teleport-tripartite"
    CHANNEL_PREPARE = "channel-prepare"
    SCAN_SUCCESS = "scan-success"
    SCAN_CONCURRENCE = "scan-concurrence"
    LIMIT_CHECK = "limit-check"
    PARITY_DEMO = "parity-demo"
    CROSS_VALIDATE = "cross-validate"


def cascade_layout(alpha: complex, modes: int) -> tuple[complex, ...]:
    """Labels produced by splitting one coherent amplitude through a chain of balanced beam splitters.

    ``modes = 2`` gives (α, α), ``3`` gives (√2α, α, α) and ``4`` gives (2α, √2α, α, α).
    """
    if modes < 1:
        raise ValueError(f"a layout needs at least one mode, got {modes}")
    return tuple(alpha * math.sqrt(2.0 ** (modes - 2 - k)) for k in range(modes - 1)) + (alpha,)


class ECSSpec(FrozenModel):
    eps_plus: ComplexNumber = Field(description="Amplitude ε₊ of the branch with positive labels", default=1 + 0j)
    eps_minus: ComplexNumber = Field(description="Amplitude ε₋ of the branch with negated labels", default=1 + 0j)
    alpha: ComplexNumber = Field(description="Coherent amplitude α of the last party")
    parties: int = Field(description="Number of modes carrying the state, 1 for a cat state", default=2, ge=1)

    @model_validator(mode="after")
    def _check_amplitudes(self) -> Self:
        if self.eps_plus == 0 and self.eps_minus == 0:
            raise ValueError("eps_plus and eps_minus must not both vanish")
        return self

    @property
    def label_layout(self) -> tuple[complex, ...]:
        return cascade_layout(self.alpha, self.parties)


class ChannelSpec(FrozenModel):
    sign: ChannelSign = Field(description="Relative sign of the two channel branches", default=ChannelSign.MINUS)
    alpha: ComplexNumber = Field(description="Coherent amplitude α of the last channel mode")
    parties: int = Field(description="Number of channel modes", default=3, ge=3)

    @property
    def label_layout(self) -> tuple[complex, ...]:
        return cascade_layout(self.alpha, self.parties)


class OutcomeClass(FrozenModel):
    kind: OutcomeKind = Field(description="Classification of the measurement branch")
    n: int = Field(description="Photons counted on the merged input mode", ge=0)
    m: int = Field(description="Photons counted on the first channel mode", ge=0)


class OutcomeRecord(FrozenModel):
    n: int = Field(description="Photons counted on the merged input mode", ge=0)
    m: int = Field(description="Photons counted on the first channel mode", ge=0)
    kind: OutcomeKind = Field(description="Classification of the branch", alias="class")
    probability: float = Field(description="Probability of the branch", ge=0.0)
    fidelity: float = Field(description="Fidelity of Bob's state after correction with the relabeled input")


class TeleportParams(FrozenModel):
    input_state: ECSSpec = Field(description="State to teleport", alias="input")
    channel: ChannelSpec = Field(description="Shared quantum channel")
    prepare_channel: bool = Field(description="Whether the channel was synthesized by beam splitters", default=False)
    cutoff: Optional[int] = Field(description="Per-mode cutoff of the Fock engine", default=None)
    mass_tolerance: float = Field(description="Probability mass left unenumerated", default=1e-10)


class SinglePhotonParams(FrozenModel):
    a: ComplexNumber = Field(description="Amplitude of the two-mode vacuum in the input")
    b: ComplexNumber = Field(description="Amplitude of |Ψ⁺⟩ in the input")
    cutoff: int = Field(description="Per-mode cutoff of the Fock engine", default=3)


class SampleCount(FrozenModel):
    n: int = Field(description="Photons counted on the merged input mode")
    m: int = Field(description="Photons counted on the first channel mode")
    count: int = Field(description="Number of shots with this outcome", ge=0)


class SamplingSummary(FrozenModel):
    shots: int = Field(description="Number of sampled protocol runs", ge=1)
    seed: Optional[int] = Field(description="Seed of the random generator", default=None)
    counts: List[SampleCount] = Field(description="Shot counts per outcome, in report order")
    success_frequency: float = Field(description="Fraction of shots that ended in a success branch")


class TeleportReport(FrozenModel):
    params: TeleportParams | SinglePhotonParams = Field(description="Echo of the run parameters")
    engine: Engine = Field(description="Engine that produced the outcomes")
    outcomes: List[OutcomeRecord] = Field(description="Enumerated measurement branches")
    success_probability: float = Field(description="Total probability of the success branches")
    closed_form_reference: float = Field(description="Closed-form success probability for the same parameters")
    sampling: Optional[SamplingSummary] = Field(description="Monte Carlo summary when shots were requested",
                                                default=None)

    @property
    def total_probability(self) -> float:
        return math.fsum(outcome.probability for outcome in self.outcomes)


class ParityModel(FrozenModel):
    coupling: float = Field(description="Dispersive coupling g in frequency units", default=1.0, gt=0.0)
    time: Optional[float] = Field(description="Interaction time, π/(2g) when omitted", default=None)
    atom_state: AtomState = Field(description="Initial state of the two-level atom", default=AtomState.GROUND)

    @property
    def interaction_time(self) -> float:
        return self.time if self.time is not None else math.pi / (2.0 * self.coupling)

    @property
    def is_canonical(self) -> bool:
        return abs(self.coupling * self.interaction_time - math.pi / 2.0) <= 1e-12


class Bipartition(FrozenModel):
    side_a: tuple[int, ...] = Field(description="Modes on the first side")
    side_b: tuple[int, ...] = Field(description="Modes on the second side")

    @model_validator(mode="after")
    def _check_sides(self) -> Self:
        if not self.side_a or not self.side_b:
            raise ValueError("both sides of a bipartition must be nonempty")
        if set(self.side_a) & set(self.side_b):
            raise ValueError(f"sides {self.side_a} and {self.side_b} overlap")
        return self

    @classmethod
    def split(cls, side_a: tuple[int, ...], mode_count: int) -> "Bipartition":
        return cls(side_a=tuple(side_a), side_b=tuple(k for k in range(mode_count) if k not in side_a))

    def swapped(self) -> "Bipartition":
        return Bipartition(side_a=self.side_b, side_b=self.side_a)


class ClosedFormCurve(FrozenModel):
    name: str = Field(description="Identifier of the curve")
    alpha: List[float] = Field(description="Grid of |α| values")
    values: List[float] = Field(description="Curve values on the grid")

    @model_validator(mode="after")
    def _check_curve(self) -> Self:
        if len(self.alpha) != len(self.values):
            raise ValueError(f"{len(self.alpha)} grid points but {len(self.values)} values")
        if any(a < 0 for a in self.alpha):
            raise ValueError("alpha grid must be non-negative")
        if any(not -1e-9 <= v <= 1.0 + 1e-9 for v in self.values):
            raise ValueError(f"curve {self.name} leaves the interval [0, 1]")
        return self


class ScanReport(FrozenModel):
    curve: ClosedFormCurve = Field(description="Values computed by the engine")
    reference: ClosedFormCurve = Field(description="Closed-form values on the same grid")
    engine: Engine = Field(description="Engine used for the computed curve")
    max_deviation: float = Field(description="Largest pointwise gap between curve and reference")


class ChannelPreparationReport(FrozenModel):
    alpha: ComplexNumber = Field(description="Coherent amplitude α")
    parties: int = Field(description="Number of channel modes")
    sign: ChannelSign = Field(description="Channel sign")
    engine: Engine = Field(description="Engine used for the beam-splitter cascade")
    fidelity: float = Field(description="Fidelity of the prepared channel with the target channel")
    head_concurrence: float = Field(description="Concurrence between the first mode and the rest")


class LimitCheckReport(FrozenModel):
    alpha: float = Field(description="Small amplitude used for the limit fidelities")
    channel_limit_fidelity: float = Field(description="Fidelity of the three-mode channel with its α→0 limit")
    bipartite_limit_fidelity: float = Field(description="Fidelity of the two-mode minus state with |Ψ⁺⟩")
    small_alpha: TeleportReport = Field(description="Single-photon teleportation run")


class ParityDemoReport(FrozenModel):
    parity: Parity = Field(description="Photon-number parity read from the atom")
    atom: AtomState = Field(description="Measured atom state")


class CrossValidationReport(FrozenModel):
    alpha: ComplexNumber = Field(description="Coherent amplitude α")
    cutoff: int = Field(description="Per-mode cutoff used by the Fock engine")
    analytic_success: float = Field(description="Success probability from the analytic engine")
    fock_success: float = Field(description="Success probability from the Fock engine")
    max_probability_gap: float = Field(description="Largest gap between per-outcome probabilities")
    channel_fidelity_analytic: float = Field(description="Prepared-channel fidelity on the analytic engine")
    channel_fidelity_fock: float = Field(description="Prepared-channel fidelity on the Fock engine")


class ExperimentConfig(FrozenModel):
    experiment: Experiment = Field(description="Named experiment to run")
    alpha: Optional[ComplexNumber] = Field(description="Coherent amplitude α, experiment default when omitted",
                                           default=None)
    eps_plus: ComplexNumber = Field(description="Input amplitude ε₊", default=1 + 0j)
    eps_minus: ComplexNumber = Field(description="Input amplitude ε₋", default=1 + 0j)
    channel_sign: ChannelSign = Field(description="Channel sign", default=ChannelSign.MINUS)
    engine: Engine = Field(description="Engine selection", default=Engine.ANALYTIC)
    cutoff_override: Optional[int] = Field(description="Per-mode Fock cutoff instead of the cutoff rule",
                                           default=None, ge=1)
    mass_tolerance: float = Field(description="Probability mass allowed to stay unenumerated",
                                  default_factory=lambda: settings.mass_tolerance, gt=0.0, lt=1.0)
    seed: Optional[int] = Field(description="Seed for sampling mode", default=None)
    shots: Optional[int] = Field(description="Number of sampled runs; exact enumeration only when omitted",
                                 default=None, ge=1)
    output_path: Optional[Path] = Field(description="Report path, stdout when omitted", default=None)
    format: ReportFormat = Field(description="Report format", default=ReportFormat.JSON)
    alpha_grid: str = Field(description="Scan grid as start:stop:step", default="0:3:0.1")
    partition: PartitionKind = Field(description="Bipartition for concurrence scans", default=PartitionKind.C3_45)
    parties: int = Field(description="Parties of the teleported state", default=2, ge=2)
    n: int = Field(description="Fock level for the parity demo", default=0, ge=0)
    a: ComplexNumber = Field(description="Vacuum amplitude of the single-photon input", default=1 + 0j)
    b: ComplexNumber = Field(description="|Ψ⁺⟩ amplitude of the single-photon input", default=0j)
    prepare_channel: bool = Field(description="Synthesize the channel with beam splitters", default=False)

    def alpha_or(self, default: complex) -> complex:
        return self.alpha if self.alpha is not None else default
