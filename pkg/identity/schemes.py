from __future__ import annotations

import abc
import hashlib
import hmac
from typing import ClassVar, Dict, Type

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey, Ed25519PublicKey

from core.errors import ConfigError
from core.types import Rng
from identity.errors import MalformedKey
from identity.models import KeyPair


class SignatureScheme(abc.ABC):
    name: ClassVar[str]
    signature_size: ClassVar[int]

    @abc.abstractmethod
    def keygen(self, rng: Rng) -> KeyPair:
        ...

    @abc.abstractmethod
    def sign(self, msg: bytes, secret: bytes) -> bytes:
        ...

    @abc.abstractmethod
    def verify(self, sig: bytes, msg: bytes, public: bytes) -> bool:
        ...

    def hash(self, msg: bytes) -> bytes:
        return hashlib.sha256(msg).digest()


class HmacScheme(SignatureScheme):
    """Keyed-hash signatures; verification goes through a registry of issued keys.

    Not an asymmetric scheme: whoever holds the registry can sign. It exists so
    traces stay cheap and reproducible under a seed.
    """
    name = 'hmac'
    signature_size = 32
    KEY_SIZE = 32

    def __init__(self) -> None:
        super().__init__()
        self._registry: Dict[bytes, bytes] = {}

    def keygen(self, rng: Rng) -> KeyPair:
        secret = rng.bytes(self.KEY_SIZE)
        public = hashlib.sha256(b'recagt-public:' + secret).digest()
        self._registry[public] = secret
        return KeyPair(secret=secret, public=public)

    def sign(self, msg: bytes, secret: bytes) -> bytes:
        if len(secret) != self.KEY_SIZE:
            raise MalformedKey(f"HMAC secret must be {self.KEY_SIZE} bytes, got {len(secret)}")
        return hmac.new(secret, msg, hashlib.sha256).digest()

    def verify(self, sig: bytes, msg: bytes, public: bytes) -> bool:
        if len(public) != self.KEY_SIZE:
            raise MalformedKey(f"HMAC public key must be {self.KEY_SIZE} bytes, got {len(public)}")
        if (secret := self._registry.get(public)) is None:
            return False
        return hmac.compare_digest(sig, hmac.new(secret, msg, hashlib.sha256).digest())


class Ed25519Scheme(SignatureScheme):
    name = 'ed25519'
    signature_size = 64

    def keygen(self, rng: Rng) -> KeyPair:
        key = Ed25519PrivateKey.from_private_bytes(rng.bytes(32))
        secret = key.private_bytes(
            serialization.Encoding.Raw, serialization.PrivateFormat.Raw, serialization.NoEncryption()
        )
        public = key.public_key().public_bytes(serialization.Encoding.Raw, serialization.PublicFormat.Raw)
        return KeyPair(secret=secret, public=public)

    def sign(self, msg: bytes, secret: bytes) -> bytes:
        try:
            key = Ed25519PrivateKey.from_private_bytes(secret)
        except ValueError as e:
            raise MalformedKey(f"Invalid Ed25519 secret key: {e}") from e
        return key.sign(msg)

    def verify(self, sig: bytes, msg: bytes, public: bytes) -> bool:
        try:
            key = Ed25519PublicKey.from_public_bytes(public)
        except ValueError as e:
            raise MalformedKey(f"Invalid Ed25519 public key: {e}") from e

        try:
            key.verify(sig, msg)
        except InvalidSignature:
            return False
        return True


SCHEMES: Dict[str, Type[SignatureScheme]] = {scheme.name: scheme for scheme in (HmacScheme, Ed25519Scheme)}


def scheme_for(name: str) -> SignatureScheme:
    try:
        return SCHEMES[name]()
    except KeyError:
        raise ConfigError(f"Unknown signature scheme '{name}', expected one of {sorted(SCHEMES)}") from None
