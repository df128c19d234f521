from __future__ import annotations

import dataclasses
import enum
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence

from codes.models import Verdict
from core.types import Group, NodeId, as_group
from gtest.errors import InvalidConfig


class Strategy(enum.Enum):
    DORFMAN = 'dorfman'
    INDIVIDUAL = 'individual'

    @classmethod
    def from_name(cls, name: str) -> Strategy:
        try:
            return cls(name)
        except ValueError:
            raise InvalidConfig(f"Unknown strategy '{name}', expected one of {[s.value for s in cls]}") from None


class Stage(enum.Enum):
    FIRST_HONEST = 'A'
    POOLED = 'B'
    RETEST = 'retest'


@dataclasses.dataclass(frozen=True)
class GtConfig:
    n: int
    m: int
    f: int
    rho: float = 0.01
    seed: int = 0

    def __post_init__(self) -> None:
        if self.m < 1 or self.f < 0:
            raise InvalidConfig(f"Need m >= 1 and f >= 0, got m={self.m}, f={self.f}")
        if not 0 < self.rho < 1:
            raise InvalidConfig(f"rho must lie in (0, 1), got {self.rho}")
        if self.n < self.m + self.f + 1:
            raise InvalidConfig(f"Need n >= m + f + 1, got n={self.n}, m={self.m}, f={self.f}")


class TestOracle:
    """Boolean group test with a trial counter.

    ``test`` returns HONEST or POSITIVE for a set of node ids; it may raise
    ``MembersUnavailable`` instead, in which case no trial is counted.
    """
    __test__ = False

    def __init__(self, test: Callable[[Group], Verdict]) -> None:
        self._test = test
        self.trials: int = 0

    def __call__(self, nodes: Sequence[NodeId]) -> Verdict:
        verdict = self._test(as_group(nodes))
        self.trials += 1
        return verdict

    @classmethod
    def from_planted(cls, malicious: Iterable[NodeId]) -> TestOracle:
        planted = frozenset(malicious)

        def test(group: Group) -> Verdict:
            return Verdict.POSITIVE if planted.intersection(group) else Verdict.HONEST

        return cls(test)


@dataclasses.dataclass(frozen=True)
class TraceEntry:
    stage: Stage
    group: Group
    verdict: Verdict


@dataclasses.dataclass
class IdentificationResult:
    honest_set: FrozenSet[NodeId]
    malicious_set: FrozenSet[NodeId]
    trials_used: int
    stage_trace: List[TraceEntry]
    excluded: Dict[NodeId, str] = dataclasses.field(default_factory=dict)
    stage_a_trials: int = 0
    assumption_violated: bool = False
    first_honest_group: Optional[Group] = None

    def __repr__(self) -> str:
        return (f"<IdentificationResult(malicious={sorted(self.malicious_set)}, honest={len(self.honest_set)}, "
                f"trials={self.trials_used}, stage_a={self.stage_a_trials})>")
