from typing import Dict, FrozenSet, List, Sequence, Tuple

import numpy as np

NodeId = int
NodeSet = FrozenSet[NodeId]
Group = Tuple[NodeId, ...]
Rng = np.random.Generator
ByteCounter = Dict[NodeId, int]
Row = Dict[str, object]
Rows = List[Row]

CA_ID: NodeId = 0


def as_group(nodes: Sequence[NodeId]) -> Group:
    return tuple(int(node) for node in nodes)
