"""Shard testable codes.

A shard B is split into m sub-shards B_0..B_{m-1}; node i stores the evaluation
f(x_i) = sum_v B_v * x_i^v. Any m+1 evaluations can be checked against each other
with one parity row, and any m of them recover B.
"""
from __future__ import annotations

import logging
from typing import List, Mapping, Optional, Sequence, Tuple

from codes.errors import DuplicateScalar, LengthOverflow, ShapeMismatch
from codes.models import CodedShard, ParityVector, Shard, TestGroup, TestOutcome, Verdict
from field.errors import FieldError
from field.models import FieldElement, FieldParams
from field.ops import pack_bytes, unpack_bytes

logger = logging.getLogger('codes.codec')

Matrix = Tuple[Tuple[FieldElement, ...], ...]


def _check_distinct(scalars: Sequence[int]) -> None:
    if len(set(scalars)) != len(scalars):
        raise DuplicateScalar(scalars)


def split_shard(data: bytes, m: int, p: FieldParams) -> Shard:
    if m < 1:
        raise ShapeMismatch(f"Sub-shard count must be >= 1, got {m}")

    elements, length = pack_bytes(data, p)
    size = max(1, -(-len(elements) // m))
    elements.extend([FieldElement(0)] * (size * m - len(elements)))
    subshards = tuple(tuple(elements[v * size:(v + 1) * size]) for v in range(m))
    return Shard(subshards, length)


def decode_to_bytes(shard: Shard, p: FieldParams) -> bytes:
    capacity = shard.length * shard.m * p.bytes_per_element
    if shard.original_byte_length > capacity:
        raise LengthOverflow(
            f"Stored length {shard.original_byte_length} exceeds shard capacity of {capacity} bytes"
        )

    elements = [e for subshard in shard.subshards for e in subshard]
    try:
        return unpack_bytes(elements, shard.original_byte_length, p)
    except FieldError as e:
        raise LengthOverflow(str(e)) from e


def encode(shard: Shard, x: FieldElement, p: FieldParams) -> CodedShard:
    x = int(x)
    values = []
    for column in zip(*shard.subshards):
        acc = 0
        for coefficient in reversed(column):
            acc = p.add(p.mul(acc, x), coefficient)
        values.append(FieldElement(acc))
    return CodedShard(FieldElement(x), tuple(values))


def lagrange_weights(scalars: Sequence[int], p: FieldParams) -> Tuple[FieldElement, ...]:
    """1 / prod_{k != j} (x_j - x_k) for every j."""
    _check_distinct(scalars)
    weights = []
    for j, xj in enumerate(scalars):
        denominator = 1
        for k, xk in enumerate(scalars):
            if k != j:
                denominator = p.mul(denominator, p.sub(xj, xk))
        weights.append(FieldElement(p.inv(denominator)))
    return tuple(weights)


def parity_vector(group: TestGroup, p: FieldParams) -> ParityVector:
    # Lagrange leading-coefficient weights: the last row of the inverse
    # Vandermonde matrix, normalized so that sum_j w_j * x_j^m = 1.
    return ParityVector(lagrange_weights(group.scalars, p))


def run_test(group: TestGroup, coded: Sequence[CodedShard], pv: ParityVector, p: FieldParams) -> TestOutcome:
    if not len(coded) == len(group.members) == len(pv.weights):
        raise ShapeMismatch(
            f"Group of {len(group.members)} members got {len(coded)} coded shards and {len(pv.weights)} weights"
        )
    for (node, x), shard in zip(group.members, coded):
        if shard.x != x:
            raise ShapeMismatch(f"Coded shard of node {node} carries scalar {shard.x}, expected {x}")
    if len({len(shard.values) for shard in coded}) > 1:
        raise ShapeMismatch("Coded shards in one test group must have equal length")

    weights = pv.weights
    output = tuple(
        FieldElement(sum(w * v for w, v in zip(weights, column)) % p.q)
        for column in zip(*(shard.values for shard in coded))
    )
    verdict = Verdict.POSITIVE if any(output) else Verdict.HONEST
    return TestOutcome(output, verdict)


def decoding_matrix(scalars: Sequence[int], p: FieldParams) -> Matrix:
    """Inverse of the m x m Vandermonde matrix G^m at ``scalars``.

    Row v holds the weights that read coefficient B_v off the m evaluations.
    """
    _check_distinct(scalars)
    m = len(scalars)

    # master(x) = prod_k (x - x_k), low degree first
    master = [1]
    for xk in scalars:
        shifted = [0] + master
        for i, c in enumerate(master):
            shifted[i] = p.sub(shifted[i], p.mul(xk, c))
        master = shifted

    columns: List[List[int]] = []
    for xj in scalars:
        quotient = [0] * m
        quotient[m - 1] = master[m]
        for i in range(m - 1, 0, -1):
            quotient[i - 1] = p.add(master[i], p.mul(xj, quotient[i]))

        value = 0
        for c in reversed(quotient):
            value = p.add(p.mul(value, xj), c)
        w = p.inv(value)
        columns.append([p.mul(w, c) for c in quotient])

    return tuple(tuple(FieldElement(columns[j][v]) for j in range(m)) for v in range(m))


def decode(subset: Sequence[CodedShard], p: FieldParams, *,
           m: Optional[int] = None, byte_length: Optional[int] = None) -> Shard:
    if not subset:
        raise ShapeMismatch("Decoding needs at least one coded shard")
    if m is not None and len(subset) != m:
        raise ShapeMismatch(f"Decoding needs exactly m={m} coded shards, got {len(subset)}")
    if len({len(shard.values) for shard in subset}) > 1:
        raise ShapeMismatch("Coded shards must have equal length to decode")

    scalars = [shard.x for shard in subset]
    matrix = decoding_matrix(scalars, p)
    q = p.q
    columns = [*zip(*(shard.values for shard in subset))]
    subshards = tuple(
        tuple(FieldElement(sum(w * c for w, c in zip(row, column)) % q) for column in columns)
        for row in matrix
    )
    if byte_length is None:
        byte_length = len(columns) * len(subset) * p.bytes_per_element
    logger.debug(f"Decoded {len(subset)} coded shards of length {len(columns)}")
    return Shard(subshards, byte_length)


def perturb(coded: CodedShard, offsets: Mapping[int, int], p: FieldParams) -> CodedShard:
    values = list(coded.values)
    for index, offset in offsets.items():
        values[index] = FieldElement(p.add(values[index], p.reduce(offset)))
    return CodedShard(coded.x, tuple(values))
