"""Two-stage adaptive group testing.

Stage A draws random groups of m+1 nodes until one tests honest. Stage B pools
the remaining nodes Dorfman-style, pads each pool with known-honest nodes up to
m+1 members, and retests the members of positive pools one at a time.
"""
from __future__ import annotations

import logging
from typing import Dict, List, Optional, Sequence, Set

import numpy as np

from codes.models import Verdict
from core.types import Group, NodeId, Rng
from gtest.bounds import dorfman_partition, prob_no_malicious, trials_to_first_honest
from gtest.errors import MembersUnavailable, OracleInconsistent, StageAFailed
from gtest.models import GtConfig, IdentificationResult, Stage, Strategy, TestOracle, TraceEntry


class Identification:
    def __init__(self, cfg: GtConfig, oracle: TestOracle, nodes: Sequence[NodeId], rng: Rng, *,
                 strict: bool = False) -> None:
        self.cfg: GtConfig = cfg
        self.oracle: TestOracle = oracle
        self.nodes: List[NodeId] = [*nodes]
        self.rng: Rng = rng
        self.strict: bool = strict
        self.core: Group = ()
        self.honest: Set[NodeId] = set()
        self.malicious: Set[NodeId] = set()
        self.excluded: Dict[NodeId, str] = {}
        self.trace: List[TraceEntry] = []
        self.stage_a_trials: int = 0
        self.logger: logging.Logger = logging.getLogger('gtest.driver')

    def _exclude(self, error: MembersUnavailable) -> None:
        for node in sorted(error.node_ids):
            if node in self.honest:
                raise OracleInconsistent(f"Node {node} is known honest but became unavailable")
            self.excluded.setdefault(node, error.reason)
            self.malicious.add(node)
        self.logger.debug(f"Excluded {sorted(error.node_ids)}: {error.reason}")

    def _test(self, stage: Stage, group: Group) -> Optional[Verdict]:
        try:
            verdict = self.oracle(group)
        except MembersUnavailable as e:
            self._exclude(e)
            return None
        self.trace.append(TraceEntry(stage, group, verdict))
        self.logger.debug(f"[{stage.value}] {group} -> {verdict.value}")
        return verdict

    def find_first_honest(self) -> None:
        m = self.cfg.m
        budget = trials_to_first_honest(prob_no_malicious(self.cfg.n, self.cfg.f, m), self.cfg.rho)
        while self.stage_a_trials < budget:
            pool = [node for node in self.nodes if node not in self.excluded]
            if len(pool) < m + 1:
                raise StageAFailed(self.stage_a_trials)

            picks = self.rng.choice(len(pool), size=m + 1, replace=False)
            group = tuple(pool[int(i)] for i in picks)
            verdict = self._test(Stage.FIRST_HONEST, group)
            if verdict is None:
                continue

            self.stage_a_trials += 1
            if verdict is Verdict.HONEST:
                self.core = group
                self.honest.update(group)
                return

        self.logger.error(f"Stage A exhausted its budget of {budget} trials")
        raise StageAFailed(self.stage_a_trials)

    def _padded(self, members: Sequence[NodeId]) -> Group:
        padding = [node for node in self.core if node not in members][:self.cfg.m + 1 - len(members)]
        return (*members, *padding)

    def test_individual(self, node: NodeId) -> None:
        verdict = self._test(Stage.RETEST, self._padded([node]))
        if verdict is Verdict.HONEST:
            self.honest.add(node)
        elif verdict is Verdict.POSITIVE:
            self.malicious.add(node)

    def test_pool(self, members: List[NodeId]) -> None:
        while members:
            verdict = self._test(Stage.POOLED, self._padded(members))
            if verdict is None:
                members = [node for node in members if node not in self.excluded]
                continue

            if verdict is Verdict.HONEST:
                self.honest.update(members)
            elif len(members) == 1:
                self.malicious.add(members[0])
            else:
                before = len(self.malicious)
                for node in members:
                    self.test_individual(node)
                if self.strict and len(self.malicious) == before:
                    raise OracleInconsistent(f"Pool {members} tested positive but every member retested honest")
            return

    def run(self, strategy: Strategy = Strategy.DORFMAN) -> IdentificationResult:
        self.find_first_honest()
        remaining = [node for node in self.nodes if node not in self.honest and node not in self.excluded]

        if strategy is Strategy.INDIVIDUAL:
            for node in remaining:
                if node not in self.excluded:
                    self.test_individual(node)
        else:
            size = self.cfg.m + 1
            for subgroup in dorfman_partition(remaining, max(self.cfg.f, 1)):
                for start in range(0, len(subgroup), size):
                    chunk = [node for node in subgroup[start:start + size] if node not in self.excluded]
                    self.test_pool(chunk)

        violated = len(self.malicious) > self.cfg.f
        if violated:
            self.logger.warning(f"Found {len(self.malicious)} malicious nodes, more than the assumed f={self.cfg.f}")
        self.logger.info(
            f"Identified {sorted(self.malicious)} as malicious in {self.oracle.trials} trials "
            f"({self.stage_a_trials} in stage A)"
        )
        return IdentificationResult(
            honest_set=frozenset(self.honest),
            malicious_set=frozenset(self.malicious),
            trials_used=self.oracle.trials,
            stage_trace=self.trace,
            excluded=dict(self.excluded),
            stage_a_trials=self.stage_a_trials,
            assumption_violated=violated,
            first_honest_group=self.core,
        )


def identify_malicious(cfg: GtConfig, oracle: TestOracle, *, nodes: Optional[Sequence[NodeId]] = None,
                       rng: Optional[Rng] = None, strategy: Strategy = Strategy.DORFMAN,
                       strict: bool = False) -> IdentificationResult:
    nodes = range(1, cfg.n + 1) if nodes is None else nodes
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    return Identification(cfg, oracle, nodes, rng, strict=strict).run(strategy)
