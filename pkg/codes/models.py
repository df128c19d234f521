from __future__ import annotations

import dataclasses
import enum
from typing import Tuple

from codes.errors import DuplicateScalar, ShapeMismatch
from core.types import NodeId
from field.models import FieldElement


class Verdict(enum.Enum):
    HONEST = 'honest'
    POSITIVE = 'positive'


@dataclasses.dataclass(frozen=True)
class Shard:
    subshards: Tuple[Tuple[FieldElement, ...], ...]
    original_byte_length: int

    def __post_init__(self) -> None:
        if not self.subshards:
            raise ShapeMismatch("A shard needs at least one sub-shard")
        lengths = {len(s) for s in self.subshards}
        if len(lengths) != 1 or 0 in lengths:
            raise ShapeMismatch(f"Sub-shards must share one length >= 1, got {sorted(lengths)}")

    def __repr__(self) -> str:
        return f"<Shard(m={self.m}, L={self.length}, bytes={self.original_byte_length})>"

    @property
    def m(self) -> int:
        return len(self.subshards)

    @property
    def length(self) -> int:
        return len(self.subshards[0])


@dataclasses.dataclass(frozen=True)
class CodedShard:
    x: FieldElement
    values: Tuple[FieldElement, ...]

    def __repr__(self) -> str:
        return f"<CodedShard(x={self.x}, L={len(self.values)})>"


@dataclasses.dataclass(frozen=True)
class TestGroup:
    __test__ = False

    members: Tuple[Tuple[NodeId, FieldElement], ...]

    def __post_init__(self) -> None:
        scalars = self.scalars
        if len(set(scalars)) != len(scalars):
            raise DuplicateScalar(scalars)
        if 0 in scalars:
            raise ShapeMismatch("Test group scalars must be nonzero")

    @property
    def m(self) -> int:
        return len(self.members) - 1

    @property
    def node_ids(self) -> Tuple[NodeId, ...]:
        return tuple(node for node, _ in self.members)

    @property
    def scalars(self) -> Tuple[FieldElement, ...]:
        return tuple(x for _, x in self.members)


@dataclasses.dataclass(frozen=True)
class ParityVector:
    weights: Tuple[FieldElement, ...]


@dataclasses.dataclass(frozen=True)
class TestOutcome:
    __test__ = False

    output: Tuple[FieldElement, ...]
    verdict: Verdict

    @property
    def honest(self) -> bool:
        return self.verdict is Verdict.HONEST
