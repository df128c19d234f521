"""Byte-exact layouts for the messages a joining node receives.

Shard message: [sender_id 4B][scalar wB][first sig zB][second sig zB][payload length 8B][payload]
Credential:    [node_id 4B][scalar wB][CA sig zB][secret key sB]
"""
from __future__ import annotations

import dataclasses
import logging

from codes.models import CodedShard
from field.models import FieldElement, FieldParams
from identity.errors import WireFormatError
from identity.models import NODE_ID_BYTES, KeyPair, NodeIdentity, SignedShardMessage

LENGTH_BYTES = 8

logger = logging.getLogger('identity.wire')


@dataclasses.dataclass(frozen=True)
class WireFormat:
    scalar_bytes: int = 1
    signature_bytes: int = 256
    secret_key_bytes: int = 128
    element_bytes: int = 8

    @classmethod
    def for_field(cls, p: FieldParams, *, scalar_bytes: int = 1, signature_bytes: int = 256,
                  secret_key_bytes: int = 128) -> WireFormat:
        if scalar_bytes < p.element_bytes:
            logger.warning(f"Widening scalar field from {scalar_bytes} to {p.element_bytes} bytes for q={p.q}")
            scalar_bytes = p.element_bytes
        return cls(scalar_bytes, signature_bytes, secret_key_bytes, p.element_bytes)

    @property
    def header_bytes(self) -> int:
        return NODE_ID_BYTES + self.scalar_bytes + 2 * self.signature_bytes + LENGTH_BYTES

    def message_size(self, length: int) -> int:
        return self.header_bytes + length * self.element_bytes

    @property
    def credential_size(self) -> int:
        return NODE_ID_BYTES + self.scalar_bytes + self.signature_bytes + self.secret_key_bytes

    def _pad(self, blob: bytes, size: int, what: str) -> bytes:
        if len(blob) > size:
            raise WireFormatError(f"{what} of {len(blob)} bytes exceeds the {size}-byte field")
        return blob.ljust(size, b'\x00')

    def _int(self, value: int, size: int, what: str) -> bytes:
        try:
            return int(value).to_bytes(size, 'big')
        except OverflowError:
            raise WireFormatError(f"{what} {value} does not fit in {size} bytes") from None

    def serialize_message(self, msg: SignedShardMessage) -> bytes:
        payload = b''.join(self._int(v, self.element_bytes, 'element') for v in msg.coded.values)
        return b''.join((
            self._int(msg.sender_id, NODE_ID_BYTES, 'sender id'),
            self._int(msg.x, self.scalar_bytes, 'scalar'),
            self._pad(msg.first_sig, self.signature_bytes, 'first signature'),
            self._pad(msg.second_sig, self.signature_bytes, 'second signature'),
            self._int(len(payload), LENGTH_BYTES, 'payload length'),
            payload,
        ))

    def deserialize_message(self, data: bytes, signature_size: int) -> SignedShardMessage:
        if len(data) < self.header_bytes:
            raise WireFormatError(f"Message of {len(data)} bytes is shorter than its {self.header_bytes}-byte header")

        offset = 0

        def take(size: int) -> bytes:
            nonlocal offset
            chunk = data[offset:offset + size]
            offset += size
            return chunk

        sender_id = int.from_bytes(take(NODE_ID_BYTES), 'big')
        x = FieldElement(int.from_bytes(take(self.scalar_bytes), 'big'))
        first_sig = take(self.signature_bytes)[:signature_size]
        second_sig = take(self.signature_bytes)[:signature_size]
        length = int.from_bytes(take(LENGTH_BYTES), 'big')
        payload = take(length)
        if len(payload) != length or offset != len(data) or length % self.element_bytes:
            raise WireFormatError(f"Payload length {length} does not match the {len(data)}-byte message")

        width = self.element_bytes
        values = tuple(
            FieldElement(int.from_bytes(payload[i:i + width], 'big')) for i in range(0, length, width)
        )
        return SignedShardMessage(sender_id, x, first_sig, second_sig, CodedShard(x, values))

    def serialize_credential(self, ident: NodeIdentity, keys: KeyPair) -> bytes:
        return b''.join((
            self._int(ident.node_id, NODE_ID_BYTES, 'node id'),
            self._int(ident.x, self.scalar_bytes, 'scalar'),
            self._pad(ident.ca_signature, self.signature_bytes, 'CA signature'),
            self._pad(keys.secret, self.secret_key_bytes, 'secret key'),
        ))
