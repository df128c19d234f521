from __future__ import annotations

import dataclasses
import enum
import json
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

from core.settings import Settings
from core.types import NodeId
from field.models import FieldParams
from gtest.errors import InvalidConfig
from gtest.models import IdentificationResult, Strategy
from identity.models import Adjudication


class Behavior(enum.Enum):
    HONEST = 'honest'
    PERTURB_SHARD = 'perturb'
    TAMPER_SCALAR = 'tamper_scalar'
    BAD_SECOND_SIGNATURE = 'bad_signature'
    SILENT = 'silent'


@dataclasses.dataclass(frozen=True)
class AdversaryProfile:
    behavior: Behavior = Behavior.PERTURB_SHARD
    # PerturbShard: how many coordinates receive a uniform nonzero offset.
    perturbed_coordinates: int = 1

    @classmethod
    def from_name(cls, name: str) -> AdversaryProfile:
        try:
            return cls(Behavior(name))
        except ValueError:
            choices = [b.value for b in Behavior]
            raise InvalidConfig(f"Unknown adversary behavior '{name}', expected one of {choices}") from None


HONEST = AdversaryProfile(Behavior.HONEST)


class EventKind(enum.Enum):
    SEND = 'send'
    DELIVER = 'deliver'
    TIMEOUT = 'timeout'
    TEST = 'test'
    VERDICT = 'verdict'
    RESEND = 'resend'
    FRAUD_PROOF = 'fraud_proof'
    ADJUDICATE = 'adjudicate'
    RECOVER = 'recover'


@dataclasses.dataclass(frozen=True)
class SimEvent:
    timestamp: float
    seq: int
    kind: EventKind
    actor: NodeId
    detail: str = ''
    payload: Any = dataclasses.field(default=None, compare=False, repr=False)

    def to_record(self) -> Dict[str, Any]:
        return {'timestamp': self.timestamp, 'kind': self.kind.value, 'actor': self.actor, 'detail': self.detail}


@dataclasses.dataclass(frozen=True)
class SimConfig:
    n: int
    m: int
    f: int
    delta: float = 1.0
    params: FieldParams = dataclasses.field(default_factory=FieldParams.production)
    seed: int = 0
    rho: float = 0.01
    adversary: AdversaryProfile = AdversaryProfile()
    adversary_ids: Optional[Tuple[NodeId, ...]] = None
    shard_bytes: int = 4096
    scalar_bytes: int = 1
    signature_bytes: int = 256
    secret_key_bytes: int = 128
    signature_scheme: str = 'hmac'
    max_resends: int = 2
    transmission_error_rate: float = 0.0
    strategy: Strategy = Strategy.DORFMAN

    def __post_init__(self) -> None:
        if not 0 <= self.f < self.n:
            raise InvalidConfig(f"Need 0 <= f < n, got f={self.f}, n={self.n}")
        if self.delta <= 0:
            raise InvalidConfig(f"Maximum delay must be positive, got {self.delta}")
        if self.shard_bytes < 0 or self.max_resends < 0:
            raise InvalidConfig("shard_bytes and max_resends must be non-negative")
        if not 0 <= self.transmission_error_rate < 1:
            raise InvalidConfig(f"transmission_error_rate must lie in [0, 1), got {self.transmission_error_rate}")
        if self.adversary_ids is not None:
            outside = [i for i in self.adversary_ids if not 1 <= i <= self.n]
            if outside or len(set(self.adversary_ids)) != len(self.adversary_ids):
                raise InvalidConfig(f"Adversary ids must be distinct node ids in [1, {self.n}], got {self.adversary_ids}")

    @classmethod
    def from_settings(cls, settings: Settings) -> SimConfig:
        return cls(
            n=settings.n, m=settings.m, f=settings.f, delta=settings.delta,
            params=FieldParams.for_modulus(settings.q), seed=settings.seed, rho=settings.rho,
            adversary=AdversaryProfile.from_name(settings.adversary),
            adversary_ids=settings.adversary_ids or None, shard_bytes=settings.shard_bytes,
            scalar_bytes=settings.scalar_bytes, signature_bytes=settings.signature_bytes,
            secret_key_bytes=settings.secret_key_bytes, signature_scheme=settings.signature_scheme,
            max_resends=settings.max_resends, transmission_error_rate=settings.transmission_error_rate,
            strategy=Strategy.from_name(settings.strategy),
        )


@dataclasses.dataclass
class JoinTranscript:
    newcomer_id: NodeId
    planted: FrozenSet[NodeId]
    verdicts: List[Tuple[NodeId, str]] = dataclasses.field(default_factory=list)
    fraud_proofs: List[Adjudication] = dataclasses.field(default_factory=list)
    timeouts: List[NodeId] = dataclasses.field(default_factory=list)
    bytes_by_node: Dict[NodeId, int] = dataclasses.field(default_factory=dict)
    emitted_bytes: int = 0
    events: List[SimEvent] = dataclasses.field(default_factory=list)
    identification: Optional[IdentificationResult] = None
    elapsed: float = 0.0
    recovered_ok: Optional[bool] = None

    def __repr__(self) -> str:
        found = sorted(self.identification.malicious_set) if self.identification else None
        return (f"<JoinTranscript(planted={sorted(self.planted)}, found={found}, "
                f"bytes={self.total_bytes}, elapsed={self.elapsed:.3f})>")

    @property
    def total_bytes(self) -> int:
        return sum(self.bytes_by_node.values())

    @property
    def success(self) -> bool:
        return self.identification is not None and self.identification.malicious_set == self.planted

    def to_lines(self) -> List[str]:
        return [json.dumps(event.to_record(), sort_keys=True) for event in self.events]


@dataclasses.dataclass(frozen=True)
class ReplicationStats:
    count: int
    successes: int
    stage_a_failures: int
    trials_mean: float
    trials_std: float
    trials_max: int
    bytes_mean: float
    timeouts_mean: float
    recovered: int

    @property
    def success_rate(self) -> float:
        return self.successes / self.count

    def as_row(self) -> Dict[str, Any]:
        row = dataclasses.asdict(self)
        row['success_rate'] = self.success_rate
        return row
