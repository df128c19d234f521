from __future__ import annotations

import dataclasses
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from codes.codec import decode, decode_to_bytes, encode, parity_vector, perturb, run_test, split_shard
from codes.models import CodedShard, Shard, TestGroup, Verdict
from core.types import CA_ID, Group, NodeId, Rng
from gtest.driver import identify_malicious
from gtest.errors import MembersUnavailable, StageAFailed
from gtest.models import GtConfig, TestOracle
from identity.models import KeyPair, NodeIdentity, Phase3, ScalarCheck, SignedShardMessage
from identity.protocol import (
    CertificateAuthority, draw_scalars, member_build_message, member_verify_scalar, newcomer_verify_message,
)
from identity.schemes import SignatureScheme, scheme_for
from identity.wire import WireFormat
from simnet.errors import JoinFailed
from simnet.loop import EventLoop
from simnet.models import (
    HONEST, AdversaryProfile, Behavior, EventKind, JoinTranscript, ReplicationStats, SimConfig, SimEvent,
)


@dataclasses.dataclass
class Member:
    identity: NodeIdentity
    keys: KeyPair
    coded: CodedShard
    profile: AdversaryProfile = HONEST

    @property
    def node_id(self) -> NodeId:
        return self.identity.node_id

    def respond(self, scheme: SignatureScheme, committee: CommitteeState, rng: Rng) -> Optional[SignedShardMessage]:
        behavior = self.profile.behavior
        if behavior is Behavior.SILENT:
            return None

        p = committee.cfg.params
        coded = self.coded
        if behavior is Behavior.PERTURB_SHARD:
            length = len(coded.values)
            count = min(max(1, self.profile.perturbed_coordinates), length)
            picks = rng.choice(length, size=count, replace=False) if length else []
            offsets = {int(i): int(rng.integers(1, p.q)) for i in picks}
            coded = perturb(coded, offsets, p)

        message = member_build_message(self.identity, self.keys.secret, coded, scheme)
        if behavior is Behavior.TAMPER_SCALAR:
            forged, = draw_scalars(1, p, rng, exclude=[self.identity.x])
            message = dataclasses.replace(message, x=forged, coded=encode(committee.shard, forged, p))
        elif behavior is Behavior.BAD_SECOND_SIGNATURE:
            wrong = scheme.sign(b'not-the-ca-signature:' + message.first_sig, self.keys.secret)
            message = dataclasses.replace(message, second_sig=wrong)
        return message


@dataclasses.dataclass
class CommitteeState:
    cfg: SimConfig
    scheme: SignatureScheme
    ca: CertificateAuthority
    wire: WireFormat
    data: bytes
    shard: Shard
    members: Dict[NodeId, Member]
    adversaries: FrozenSet[NodeId]
    streams: Dict[str, Rng]

    def __repr__(self) -> str:
        return f"<CommitteeState(n={len(self.members)}, m={self.cfg.m}, adversaries={sorted(self.adversaries)})>"


def _streams(seed: int) -> Dict[str, Rng]:
    names = ('ca', 'data', 'adversary', 'network', 'testing')
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: np.random.default_rng(child) for name, child in zip(names, children)}


def build_committee(cfg: SimConfig) -> CommitteeState:
    logger = logging.getLogger('simnet.committee')
    streams = _streams(cfg.seed)
    p = cfg.params
    scheme = scheme_for(cfg.signature_scheme)
    ca = CertificateAuthority(scheme, p, streams['ca'])
    key_pairs = ca.init_committee(cfg.n)
    for node_id in key_pairs:
        ident = ca.identities[node_id]
        if member_verify_scalar(ident, ca.public_key, scheme) is not ScalarCheck.ACCEPT:
            raise JoinFailed(f"Node {node_id} rejected the scalar issued by the CA")

    data = streams['data'].bytes(cfg.shard_bytes)
    shard = split_shard(data, cfg.m, p)

    if cfg.adversary_ids is not None:
        adversaries = frozenset(cfg.adversary_ids)
    else:
        picks = streams['adversary'].choice(cfg.n, size=cfg.f, replace=False)
        adversaries = frozenset(int(i) + 1 for i in picks)

    members = {}
    for node_id, keys in key_pairs.items():
        ident = ca.identities[node_id]
        profile = cfg.adversary if node_id in adversaries else HONEST
        members[node_id] = Member(ident, keys, encode(shard, ident.x, p), profile)

    wire = WireFormat.for_field(
        p, scalar_bytes=cfg.scalar_bytes, signature_bytes=cfg.signature_bytes,
        secret_key_bytes=cfg.secret_key_bytes,
    )
    logger.debug(f"Built committee n={cfg.n} m={cfg.m} L={shard.length} adversaries={sorted(adversaries)}")
    return CommitteeState(cfg, scheme, ca, wire, data, shard, members, adversaries, streams)


class JoinSession:
    """One newcomer collecting, verifying and testing coded shards from the committee."""

    def __init__(self, committee: CommitteeState) -> None:
        self.committee: CommitteeState = committee
        self.cfg: SimConfig = committee.cfg
        self.newcomer_id: NodeId = self.cfg.n + 1
        self.loop: EventLoop = EventLoop(self)
        self.accepted: Dict[NodeId, CodedShard] = {}
        self.unavailable: Dict[NodeId, str] = {}
        self.pending: Dict[NodeId, int] = {}
        self.resends: Dict[NodeId, int] = {}
        self._requests = itertools.count(1)
        self.transcript = JoinTranscript(self.newcomer_id, committee.adversaries)
        self.network: Rng = committee.streams['network']
        self.logger: logging.Logger = logging.getLogger('simnet.join')

    def _count_bytes(self, sender: NodeId, size: int) -> None:
        counter = self.transcript.bytes_by_node
        counter[sender] = counter.get(sender, 0) + size
        self.transcript.emitted_bytes += size

    def _delay(self) -> float:
        # uniform on (0, delta]
        return self.cfg.delta * (1.0 - float(self.network.random()))

    def admit_newcomer(self) -> None:
        ca = self.committee.ca
        keys = ca.issue(self.newcomer_id)
        credential = self.committee.wire.serialize_credential(ca.identities[self.newcomer_id], keys)
        self._count_bytes(CA_ID, len(credential))
        self.loop.emit(EventKind.SEND, CA_ID, f"credential to {self.newcomer_id} ({len(credential)} B)")
        self.loop.schedule(self._delay(), EventKind.DELIVER, self.newcomer_id, 'credential')
        self.loop.run()

    def request(self, node: NodeId) -> None:
        request_id = self.pending[node] = next(self._requests)
        member = self.committee.members[node]
        self.loop.emit(EventKind.SEND, self.newcomer_id, f"request to {node}")

        message = member.respond(self.committee.scheme, self.committee, self.committee.streams['adversary'])
        if message is not None:
            blob = self.committee.wire.serialize_message(message)
            if self.cfg.transmission_error_rate and self.network.random() < self.cfg.transmission_error_rate:
                blob = self._corrupt(blob)
            self._count_bytes(node, len(blob))
            self.loop.emit(EventKind.SEND, node, f"shard message to {self.newcomer_id} ({len(blob)} B)")
            self.loop.schedule(self._delay(), EventKind.DELIVER, node, 'shard message', (request_id, blob))
        self.loop.schedule(self.cfg.delta, EventKind.TIMEOUT, node, 'no response', request_id)

    def _corrupt(self, blob: bytes) -> bytes:
        wire = self.committee.wire
        start = 4 + wire.scalar_bytes + wire.signature_bytes
        index = start + int(self.network.integers(0, self.committee.scheme.signature_size))
        corrupted = bytearray(blob)
        corrupted[index] ^= 0xFF
        return bytes(corrupted)

    def on_deliver(self, event: SimEvent) -> None:
        if event.payload is None:
            return
        request_id, blob = event.payload
        node = event.actor
        if self.pending.get(node) != request_id:
            return
        del self.pending[node]

        committee = self.committee
        scheme = committee.scheme
        message = committee.wire.deserialize_message(blob, scheme.signature_size)
        pk_i = committee.ca.public_key_of(message.sender_id)
        verdict = newcomer_verify_message(message, pk_i, committee.ca.public_key, scheme)
        self.transcript.verdicts.append((node, verdict.kind.value))

        if verdict.kind is Phase3.ACCEPT:
            self.accepted[node] = message.coded
        elif verdict.kind is Phase3.RESEND:
            self.resends[node] = count = self.resends.get(node, 0) + 1
            if count > self.cfg.max_resends:
                self.logger.warning(f"Node {node} still unverifiable after {self.cfg.max_resends} resends")
                self.unavailable[node] = 'unverifiable'
            else:
                self.loop.emit(EventKind.RESEND, self.newcomer_id, f"resend request to {node}")
                self.request(node)
        else:
            self.loop.emit(EventKind.FRAUD_PROOF, self.newcomer_id, f"fraud proof against {node} to CA")
            self._count_bytes(self.newcomer_id, len(blob))
            ruling = committee.ca.adjudicate(verdict.proof)
            self.transcript.fraud_proofs.append(ruling)
            self.loop.emit(EventKind.ADJUDICATE, CA_ID, str(ruling))
            self.unavailable[node] = 'fraud_proof' if ruling.guilty else 'unverified_scalar'

    def on_timeout(self, event: SimEvent) -> None:
        node = event.actor
        if self.pending.get(node) != event.payload:
            return
        del self.pending[node]
        self.unavailable[node] = 'timeout'
        self.transcript.timeouts.append(node)

    def test(self, group: Group) -> Verdict:
        for node in group:
            if node not in self.accepted and node not in self.unavailable and node not in self.pending:
                self.request(node)
        self.loop.run()

        if missing := [node for node in group if node in self.unavailable]:
            reasons = sorted({self.unavailable[node] for node in missing})
            raise MembersUnavailable(missing, ','.join(reasons))

        p = self.cfg.params
        test_group = TestGroup(tuple((node, self.accepted[node].x) for node in group))
        coded = [self.accepted[node] for node in group]
        outcome = run_test(test_group, coded, parity_vector(test_group, p), p)
        self.loop.emit(EventKind.TEST, self.newcomer_id, ' '.join(map(str, group)))
        self.loop.emit(EventKind.VERDICT, self.newcomer_id, outcome.verdict.value)
        return outcome.verdict

    def recover(self, honest: FrozenSet[NodeId]) -> Optional[bool]:
        usable = [self.accepted[node] for node in sorted(honest) if node in self.accepted][:self.cfg.m]
        if len(usable) < self.cfg.m:
            self.loop.emit(EventKind.RECOVER, self.newcomer_id, f"only {len(usable)} honest shards")
            return None

        p = self.cfg.params
        shard = decode(usable, p, m=self.cfg.m, byte_length=self.committee.shard.original_byte_length)
        ok = decode_to_bytes(shard, p) == self.committee.data
        self.loop.emit(EventKind.RECOVER, self.newcomer_id, 'match' if ok else 'mismatch')
        return ok

    def run(self) -> JoinTranscript:
        cfg = self.cfg
        self.admit_newcomer()
        gt = GtConfig(cfg.n, cfg.m, cfg.f, cfg.rho, cfg.seed)
        try:
            result = identify_malicious(gt, TestOracle(self.test), rng=self.committee.streams['testing'],
                                        strategy=cfg.strategy)
        except StageAFailed as e:
            raise JoinFailed(f"Identification aborted: {e}") from e

        transcript = self.transcript
        transcript.identification = result
        transcript.recovered_ok = self.recover(result.honest_set)
        transcript.events = self.loop.history
        transcript.elapsed = self.loop.now
        self.logger.info(
            f"Join finished: malicious={sorted(result.malicious_set)} trials={result.trials_used} "
            f"bytes={transcript.total_bytes} recovered={transcript.recovered_ok}"
        )
        return transcript


def run_join(cfg: SimConfig, committee: CommitteeState) -> JoinTranscript:
    if committee.cfg != cfg:
        raise JoinFailed("Committee was built from a different configuration")
    return JoinSession(committee).run()


def _replicate(cfg: SimConfig) -> Tuple[bool, bool, int, int, int, Optional[bool]]:
    try:
        transcript = run_join(cfg, build_committee(cfg))
    except JoinFailed:
        return False, True, 0, 0, 0, None
    result = transcript.identification
    return (transcript.success, False, result.trials_used, transcript.total_bytes,
            len(transcript.timeouts), transcript.recovered_ok)


def replication_configs(cfg: SimConfig, count: int) -> List[SimConfig]:
    children = np.random.SeedSequence(cfg.seed).spawn(count)
    return [dataclasses.replace(cfg, seed=int(child.generate_state(1)[0])) for child in children]


def run_replications(cfg: SimConfig, count: int, *, workers: int = 1) -> ReplicationStats:
    if count < 1:
        raise JoinFailed(f"Replication count must be >= 1, got {count}")

    configs = replication_configs(cfg, count)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = [*pool.map(_replicate, configs, chunksize=max(1, count // (4 * workers)))]
    else:
        outcomes = [*map(_replicate, configs)]

    completed = [o for o in outcomes if not o[1]]
    trials = np.array([o[2] for o in completed], dtype=float)
    return ReplicationStats(
        count=count,
        successes=sum(1 for o in outcomes if o[0]),
        stage_a_failures=count - len(completed),
        trials_mean=float(trials.mean()) if trials.size else 0.0,
        trials_std=float(trials.std(ddof=1)) if trials.size > 1 else 0.0,
        trials_max=int(trials.max()) if trials.size else 0,
        bytes_mean=float(np.mean([o[3] for o in completed])) if completed else 0.0,
        timeouts_mean=float(np.mean([o[4] for o in completed])) if completed else 0.0,
        recovered=sum(1 for o in completed if o[5]),
    )
