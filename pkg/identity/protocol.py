"""Identity proof protocol: CA scalar assignment, double-signed shard messages
and the fraud-proof branch checked by a joining node."""
from __future__ import annotations

import logging
from typing import Dict, Iterable, List, Set

from codes.models import CodedShard
from core.types import CA_ID, NodeId, Rng
from field.models import FieldElement, FieldParams
from identity.errors import CommitteeTooLarge, IdentityError
from identity.models import (
    Adjudication, KeyPair, NodeIdentity, ScalarCheck, SignedShardMessage, VerificationVerdict,
    scalar_payload,
)
from identity.schemes import SignatureScheme

# Below this many candidates the scalars are drawn as one permutation sample.
_SMALL_FIELD = 1 << 20


def draw_scalars(count: int, p: FieldParams, rng: Rng, *, exclude: Iterable[int] = ()) -> List[FieldElement]:
    taken: Set[int] = set(exclude)
    available = p.q - 1 - len(taken - {0})
    if count > available:
        raise CommitteeTooLarge(count + len(taken), p.q)

    if p.q - 1 <= _SMALL_FIELD:
        pool = [x for x in range(1, p.q) if x not in taken]
        picks = rng.choice(len(pool), size=count, replace=False)
        return [p.element(pool[int(i)]) for i in picks]

    scalars: List[FieldElement] = []
    while len(scalars) < count:
        x = int(rng.integers(1, p.q))
        if x not in taken:
            taken.add(x)
            scalars.append(p.element(x))
    return scalars


def ca_init_committee(n: int, p: FieldParams, ca_keys: KeyPair, rng: Rng, scheme: SignatureScheme, *,
                      first_id: NodeId = 1) -> List[NodeIdentity]:
    if n >= p.q:
        raise CommitteeTooLarge(n, p.q)

    identities = []
    for node_id, x in enumerate(draw_scalars(n, p, rng), start=first_id):
        sig = scheme.sign(scalar_payload(x, node_id), ca_keys.secret)
        identities.append(NodeIdentity(node_id, x, sig))
    return identities


def member_verify_scalar(ident: NodeIdentity, pk_c: bytes, scheme: SignatureScheme) -> ScalarCheck:
    if scheme.verify(ident.ca_signature, ident.payload, pk_c):
        return ScalarCheck.ACCEPT
    return ScalarCheck.RESEND_REQUEST


def member_build_message(ident: NodeIdentity, sk_i: bytes, coded: CodedShard,
                         scheme: SignatureScheme) -> SignedShardMessage:
    second_sig = scheme.sign(ident.ca_signature, sk_i)
    return SignedShardMessage(ident.node_id, ident.x, ident.ca_signature, second_sig, coded)


def newcomer_verify_message(msg: SignedShardMessage, pk_i: bytes, pk_c: bytes,
                            scheme: SignatureScheme) -> VerificationVerdict:
    second_ok = scheme.verify(msg.second_sig, msg.first_sig, pk_i)
    first_ok = scheme.verify(msg.first_sig, scalar_payload(msg.x, msg.sender_id), pk_c)
    if second_ok and first_ok:
        return VerificationVerdict.accept()
    if not second_ok:
        return VerificationVerdict.resend()
    return VerificationVerdict.fraud_proof(msg)


def ca_adjudicate_fraud(proof: SignedShardMessage, pk_i: bytes, pk_c: bytes,
                        scheme: SignatureScheme) -> Adjudication:
    authenticated = scheme.verify(proof.second_sig, proof.first_sig, pk_i)
    inconsistent = not scheme.verify(proof.first_sig, scalar_payload(proof.x, proof.sender_id), pk_c)
    return Adjudication(proof.sender_id, authenticated and inconsistent)


class CertificateAuthority:
    """Issues keys and scalars, answers public-key queries and rules on fraud proofs."""

    def __init__(self, scheme: SignatureScheme, p: FieldParams, rng: Rng) -> None:
        self.scheme: SignatureScheme = scheme
        self.params: FieldParams = p
        self.rng: Rng = rng
        self.keys: KeyPair = scheme.keygen(rng)
        self.directory: Dict[NodeId, bytes] = {CA_ID: self.keys.public}
        self.identities: Dict[NodeId, NodeIdentity] = {}
        self.logger: logging.Logger = logging.getLogger('identity.ca')

    @property
    def public_key(self) -> bytes:
        return self.keys.public

    def public_key_of(self, node_id: NodeId) -> bytes:
        try:
            return self.directory[node_id]
        except KeyError:
            raise IdentityError(f"No public key registered for node {node_id}") from None

    def init_committee(self, n: int) -> Dict[NodeId, KeyPair]:
        identities = ca_init_committee(n, self.params, self.keys, self.rng, self.scheme)
        key_pairs = {}
        for ident in identities:
            key_pairs[ident.node_id] = self._register(ident)
        self.logger.debug(f"Committee of {n} initialised")
        return key_pairs

    def issue(self, node_id: NodeId) -> KeyPair:
        if node_id in self.identities or node_id == CA_ID:
            raise IdentityError(f"Node {node_id} already holds an identity")

        issued = {ident.x for ident in self.identities.values()}
        x, = draw_scalars(1, self.params, self.rng, exclude=issued)
        sig = self.scheme.sign(scalar_payload(x, node_id), self.keys.secret)
        return self._register(NodeIdentity(node_id, x, sig))

    def _register(self, ident: NodeIdentity) -> KeyPair:
        keys = self.scheme.keygen(self.rng)
        self.identities[ident.node_id] = ident
        self.directory[ident.node_id] = keys.public
        return keys

    def adjudicate(self, proof: SignedShardMessage) -> Adjudication:
        result = ca_adjudicate_fraud(proof, self.public_key_of(proof.sender_id), self.keys.public, self.scheme)
        if result.guilty:
            self.logger.info(f"Fraud proof against node {proof.sender_id} upheld")
        else:
            self.logger.info(f"Fraud proof against node {proof.sender_id} unproven")
        return result

