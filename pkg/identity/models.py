from __future__ import annotations

import dataclasses
import enum
from typing import Optional

from codes.models import CodedShard
from core.types import NodeId
from field.models import FieldElement

SCALAR_PAYLOAD_BYTES = 8
NODE_ID_BYTES = 4


def scalar_payload(x: int, node_id: NodeId) -> bytes:
    """Bytes the CA signs: the scalar bound to the node it was issued to."""
    return int(x).to_bytes(SCALAR_PAYLOAD_BYTES, 'big') + int(node_id).to_bytes(NODE_ID_BYTES, 'big')


@dataclasses.dataclass(frozen=True)
class KeyPair:
    secret: bytes
    public: bytes

    def __repr__(self) -> str:
        return f"<KeyPair(public={self.public.hex()[:16]}...)>"


@dataclasses.dataclass(frozen=True)
class NodeIdentity:
    node_id: NodeId
    x: FieldElement
    ca_signature: bytes

    @property
    def payload(self) -> bytes:
        return scalar_payload(self.x, self.node_id)


@dataclasses.dataclass(frozen=True)
class SignedShardMessage:
    sender_id: NodeId
    x: FieldElement
    first_sig: bytes
    second_sig: bytes
    coded: CodedShard

    def __repr__(self) -> str:
        return f"<SignedShardMessage(sender_id={self.sender_id}, x={self.x}, L={len(self.coded.values)})>"


class ScalarCheck(enum.Enum):
    ACCEPT = 'accept'
    RESEND_REQUEST = 'resend_request'


class Phase3(enum.Enum):
    ACCEPT = 'accept'
    RESEND = 'resend'
    FRAUD_PROOF = 'fraud_proof'


@dataclasses.dataclass(frozen=True)
class VerificationVerdict:
    kind: Phase3
    proof: Optional[SignedShardMessage] = None

    @classmethod
    def accept(cls) -> VerificationVerdict:
        return cls(Phase3.ACCEPT)

    @classmethod
    def resend(cls) -> VerificationVerdict:
        return cls(Phase3.RESEND)

    @classmethod
    def fraud_proof(cls, message: SignedShardMessage) -> VerificationVerdict:
        return cls(Phase3.FRAUD_PROOF, message)


@dataclasses.dataclass(frozen=True)
class Adjudication:
    node_id: NodeId
    guilty: bool

    def __str__(self) -> str:
        return f"Guilty({self.node_id})" if self.guilty else "Unproven"
