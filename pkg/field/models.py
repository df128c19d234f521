from __future__ import annotations

import dataclasses
from typing import NewType, Optional

from field.errors import FieldError, InvalidModulus, NotPrime, ZeroInverse

FieldElement = NewType('FieldElement', int)

MERSENNE_61 = (1 << 61) - 1
PRODUCTION_BYTES_PER_ELEMENT = 7

# Deterministic Miller-Rabin witnesses for every n < 3.3 * 10^24.
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _WITNESSES:
        if n % p == 0:
            return n == p

    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1

    for a in _WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _max_bytes_per_element(q: int) -> int:
    width = 0
    while 1 << (8 * (width + 1)) <= q:
        width += 1
    return width


@dataclasses.dataclass(frozen=True)
class FieldParams:
    """Prime field F_q plus the byte packing width used for shard payloads."""
    q: int
    bytes_per_element: int

    def __post_init__(self) -> None:
        if self.q >= 1 << 64:
            raise InvalidModulus(f"Field modulus must be below 2^64, got {self.q}")
        if not is_prime(self.q):
            raise NotPrime(f"Field modulus {self.q} is not prime")
        if self.bytes_per_element < 0 or (1 << (8 * self.bytes_per_element)) > self.q:
            raise InvalidModulus(
                f"{self.bytes_per_element} bytes per element do not fit below q={self.q}"
            )

    def __repr__(self) -> str:
        return f"<FieldParams(q={self.q}, bytes_per_element={self.bytes_per_element})>"

    @classmethod
    def for_modulus(cls, q: int, bytes_per_element: Optional[int] = None) -> FieldParams:
        if bytes_per_element is None:
            bytes_per_element = _max_bytes_per_element(q)
        return cls(q, bytes_per_element)

    @classmethod
    def production(cls) -> FieldParams:
        return cls(MERSENNE_61, PRODUCTION_BYTES_PER_ELEMENT)

    @property
    def is_mersenne_61(self) -> bool:
        return self.q == MERSENNE_61

    @property
    def element_bytes(self) -> int:
        """Bytes needed to serialize any residue."""
        return max(1, ((self.q - 1).bit_length() + 7) // 8)

    def element(self, value: int) -> FieldElement:
        if not 0 <= value < self.q:
            raise FieldError(f"{value} is not a reduced residue mod {self.q}")
        return FieldElement(value)

    def reduce(self, value: int) -> FieldElement:
        return FieldElement(value % self.q)

    # Raw residue arithmetic; the fe_* functions in field.ops wrap these.
    def add(self, a: int, b: int) -> int:
        s = a + b
        return s - self.q if s >= self.q else s

    def sub(self, a: int, b: int) -> int:
        s = a - b
        return s + self.q if s < 0 else s

    def neg(self, a: int) -> int:
        return self.q - a if a else 0

    def mul(self, a: int, b: int) -> int:
        x = a * b
        if self.q == MERSENNE_61:
            r = (x >> 61) + (x & MERSENNE_61)
            return r - MERSENNE_61 if r >= MERSENNE_61 else r
        return x % self.q

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise ZeroInverse(f"0 has no inverse mod {self.q}")
        return pow(a, self.q - 2, self.q)

    def pow(self, a: int, e: int) -> int:
        return pow(a, e, self.q)
