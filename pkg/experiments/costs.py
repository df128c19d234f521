"""Bytes a newly joined node receives under each identification scheme."""
from typing import List

from experiments.models import CostParams, SchemeCost


def cost_uncoded(cp: CostParams) -> SchemeCost:
    # every member ships the full shard
    return SchemeCost('Uncoded', cp.n * cp.b, 'O(nb)', 'O(n^2 b)')


def cost_checksum(cp: CostParams) -> SchemeCost:
    # one member ships the shard, the others a d-byte digest
    return SchemeCost('CheckSum', cp.b + cp.d * (cp.n - 1), 'O(b)', 'O(nb)')


def cost_recagt(cp: CostParams) -> SchemeCost:
    credential = cp.w + cp.z + cp.s
    shards = (cp.m + 1) * -(-cp.b // cp.m)
    proofs = (cp.m + 1) * (cp.w + 2 * cp.z)
    return SchemeCost('RecAGT', credential + shards + proofs, 'O(b)', 'O(log^2(m) loglog(m))')


def all_costs(cp: CostParams) -> List[SchemeCost]:
    return [cost_uncoded(cp), cost_checksum(cp), cost_recagt(cp)]
