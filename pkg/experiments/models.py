from __future__ import annotations

import dataclasses
from typing import Dict

from experiments.errors import InvalidParams


@dataclasses.dataclass(frozen=True)
class CostParams:
    b: int
    n: int
    m: int
    w: int = 1
    z: int = 256
    s: int = 128
    d: int = 16

    def __post_init__(self) -> None:
        if bad := [k for k, v in dataclasses.asdict(self).items() if v < 1]:
            raise InvalidParams(f"Cost parameters must be positive: {', '.join(bad)}")


@dataclasses.dataclass(frozen=True)
class SchemeCost:
    scheme: str
    communication_bytes: int
    complexity_class: str
    decode_complexity: str


@dataclasses.dataclass(frozen=True)
class CommitteeSetting:
    label: int
    committees: int
    n: int
    f: int
    m: int

    @property
    def malice_ratio(self) -> float:
        return self.f / self.n


TABLE_SETTINGS: Dict[int, CommitteeSetting] = {
    s.label: s for s in (
        CommitteeSetting(1, committees=300, n=6, f=1, m=2),
        CommitteeSetting(2, committees=70, n=24, f=3, m=3),
        CommitteeSetting(3, committees=25, n=72, f=4, m=8),
        CommitteeSetting(4, committees=4, n=450, f=5, m=10),
    )
}


def setting(label: int) -> CommitteeSetting:
    try:
        return TABLE_SETTINGS[label]
    except KeyError:
        raise InvalidParams(f"Unknown setting {label}, expected one of {sorted(TABLE_SETTINGS)}") from None
