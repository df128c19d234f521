from typing import Iterable

from core.errors import ConfigError, RecAGTError
from core.types import NodeId


class GroupTestingError(RecAGTError):
    pass


class InvalidConfig(ConfigError):
    pass


class StageAFailed(GroupTestingError):
    def __init__(self, attempts: int) -> None:
        super().__init__(f"No all-honest group found within {attempts} trials")
        self.attempts: int = attempts


class OracleInconsistent(GroupTestingError):
    pass


class MembersUnavailable(GroupTestingError):
    """Raised by an oracle that cannot run a code test because some members
    never produced a verifiable coded shard."""

    def __init__(self, node_ids: Iterable[NodeId], reason: str) -> None:
        self.node_ids = frozenset(node_ids)
        self.reason: str = reason
        super().__init__(f"Nodes {sorted(self.node_ids)} unavailable: {reason}")
