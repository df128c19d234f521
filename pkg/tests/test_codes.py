import itertools

import numpy as np
import pytest

from codes.codec import (
    decode, decode_to_bytes, decoding_matrix, encode, lagrange_weights, parity_vector, perturb, run_test, split_shard,
)
from codes.errors import DuplicateScalar, LengthOverflow, ShapeMismatch
from codes.models import CodedShard, Shard, TestGroup, Verdict
from field.models import FieldElement
from identity.protocol import draw_scalars


def vandermonde_inverse(scalars, p):
    """Gauss-Jordan inverse of G[j][v] = x_j^v, the oracle for the closed forms."""
    k = len(scalars)
    rows = [[p.pow(x, v) for v in range(k)] + [int(i == j) for i in range(k)] for j, x in enumerate(scalars)]
    for col in range(k):
        pivot = next(r for r in range(col, k) if rows[r][col])
        rows[col], rows[pivot] = rows[pivot], rows[col]
        scale = p.inv(rows[col][col])
        rows[col] = [p.mul(scale, e) for e in rows[col]]
        for r in range(k):
            if r != col and rows[r][col]:
                factor = rows[r][col]
                rows[r] = [p.sub(e, p.mul(factor, pe)) for e, pe in zip(rows[r], rows[col])]
    return [row[k:] for row in rows]


def group_of(scalars):
    return TestGroup(tuple((i, FieldElement(x)) for i, x in enumerate(scalars, start=1)))


def worked_shard():
    return Shard(((FieldElement(3),), (FieldElement(5),)), 0)


def test_encode_worked_example(gf11):
    shard = worked_shard()
    assert encode(shard, FieldElement(1), gf11).values == (8,)
    assert encode(shard, FieldElement(2), gf11).values == (2,)
    assert encode(shard, FieldElement(3), gf11).values == (7,)
    assert encode(shard, FieldElement(0), gf11).values == shard.subshards[0]


def test_parity_worked_example(gf11):
    assert parity_vector(group_of([1, 2, 3]), gf11).weights == (6, 10, 6)


def test_run_test_worked_example(gf11):
    group = group_of([1, 2, 3])
    pv = parity_vector(group, gf11)
    coded = [CodedShard(FieldElement(x), (FieldElement(v),)) for x, v in ((1, 8), (2, 2), (3, 7))]
    outcome = run_test(group, coded, pv, gf11)
    assert outcome.output == (0,)
    assert outcome.verdict is Verdict.HONEST

    coded[1] = CodedShard(FieldElement(2), (FieldElement(3),))
    outcome = run_test(group, coded, pv, gf11)
    assert outcome.output == (10,)
    assert outcome.verdict is Verdict.POSITIVE


def test_run_test_on_empty_payload(gf11):
    group = group_of([1, 2, 3])
    coded = [CodedShard(FieldElement(x), ()) for x in (1, 2, 3)]
    outcome = run_test(group, coded, parity_vector(group, gf11), gf11)
    assert outcome.output == ()
    assert outcome.honest


def test_decode_worked_example(gf11):
    subset = [CodedShard(FieldElement(1), (FieldElement(8),)), CodedShard(FieldElement(2), (FieldElement(2),))]
    assert decoding_matrix([1, 2], gf11) == ((2, 10), (10, 1))
    shard = decode(subset, gf11, m=2)
    assert shard.subshards == ((3,), (5,))


def test_decode_single_subshard(gf257):
    coded = CodedShard(FieldElement(42), (FieldElement(9), FieldElement(17)))
    assert decode([coded], gf257, m=1).subshards == ((9, 17),)


@pytest.mark.parametrize("m", range(1, 9))
def test_closed_forms_match_gaussian_inverse(gf257, m):
    rng = np.random.default_rng(m)
    scalars = draw_scalars(m + 1, gf257, rng)
    inverse = vandermonde_inverse(scalars, gf257)
    assert list(parity_vector(group_of(scalars), gf257).weights) == inverse[m]

    subset = scalars[:m]
    assert [list(row) for row in decoding_matrix(subset, gf257)] == vandermonde_inverse(subset, gf257)


@pytest.mark.parametrize("m", range(1, 9))
def test_parity_orthogonality(production, m):
    rng = np.random.default_rng(100 + m)
    scalars = draw_scalars(m + 1, production, rng)
    weights = lagrange_weights(scalars, production)
    for power in range(m):
        total = sum(w * production.pow(x, power) for w, x in zip(weights, scalars)) % production.q
        assert total == 0
    assert sum(w * production.pow(x, m) for w, x in zip(weights, scalars)) % production.q == 1


def test_duplicate_scalars_rejected(gf257):
    with pytest.raises(DuplicateScalar):
        group_of([3, 3, 4])
    with pytest.raises(DuplicateScalar):
        decoding_matrix([5, 5], gf257)


def test_shape_checks(gf257):
    group = group_of([1, 2, 3])
    pv = parity_vector(group, gf257)
    coded = [CodedShard(FieldElement(x), (FieldElement(1),)) for x in (1, 2)]
    with pytest.raises(ShapeMismatch):
        run_test(group, coded, pv, gf257)
    with pytest.raises(ShapeMismatch):
        run_test(group, coded + [CodedShard(FieldElement(4), (FieldElement(1),))], pv, gf257)
    with pytest.raises(ShapeMismatch):
        decode(coded, gf257, m=3)
    with pytest.raises(ShapeMismatch):
        Shard(((FieldElement(1),), (FieldElement(1), FieldElement(2))), 0)


def test_honest_groups_never_flagged(production):
    rng = np.random.default_rng(11)
    for trial in range(200):
        m = 1 + trial % 6
        shard = split_shard(rng.bytes(int(rng.integers(1, 200))), m, production)
        scalars = draw_scalars(m + 1, production, rng)
        group = group_of(scalars)
        coded = [encode(shard, x, production) for x in scalars]
        assert run_test(group, coded, parity_vector(group, production), production).honest


@pytest.mark.slow
def test_honest_groups_never_flagged_at_scale(production):
    rng = np.random.default_rng(12)
    for _ in range(10_000):
        shard = split_shard(rng.bytes(21), 3, production)
        scalars = draw_scalars(4, production, rng)
        group = group_of(scalars)
        coded = [encode(shard, x, production) for x in scalars]
        assert run_test(group, coded, parity_vector(group, production), production).honest


def test_single_perturbation_always_detected(production):
    rng = np.random.default_rng(13)
    for trial in range(200):
        m = 1 + trial % 5
        shard = split_shard(rng.bytes(64), m, production)
        scalars = draw_scalars(m + 1, production, rng)
        group = group_of(scalars)
        coded = [encode(shard, x, production) for x in scalars]
        victim = int(rng.integers(0, m + 1))
        coordinate = int(rng.integers(0, shard.length))
        coded[victim] = perturb(coded[victim], {coordinate: int(rng.integers(1, production.q))}, production)
        assert not run_test(group, coded, parity_vector(group, production), production).honest


@pytest.mark.slow
def test_false_negative_rate_small_field(gf257):
    rng = np.random.default_rng(14)
    draws, misses = 100_000, 0
    for _ in range(draws):
        shard = Shard(((FieldElement(int(rng.integers(0, 257))),), (FieldElement(int(rng.integers(0, 257))),)), 0)
        scalars = draw_scalars(3, gf257, rng)
        group = group_of(scalars)
        coded = [encode(shard, x, gf257) for x in scalars]
        for i in range(3):
            coded[i] = perturb(coded[i], {0: int(rng.integers(0, 257))}, gf257)
        if run_test(group, coded, parity_vector(group, gf257), gf257).honest and \
                any(encode(shard, x, gf257) != c for x, c in zip(scalars, coded)):
            misses += 1
    bound = 1 / 257
    assert misses / draws <= bound + 3 * np.sqrt(bound * (1 - bound) / draws)


def test_recovery_from_every_subset(production):
    rng = np.random.default_rng(15)
    for n in range(2, 13):
        for m in range(1, n):
            data = rng.bytes(int(rng.integers(1, 60)))
            shard = split_shard(data, m, production)
            coded = [encode(shard, x, production) for x in draw_scalars(n, production, rng)]
            for subset in itertools.combinations(coded, m):
                recovered = decode(list(subset), production, m=m, byte_length=shard.original_byte_length)
                assert recovered == shard
                assert decode_to_bytes(recovered, production) == data


@pytest.mark.parametrize("data", [b'', b'abc', bytes(range(256)) * 3])
def test_split_roundtrip(production, data):
    for m in (1, 2, 5):
        shard = split_shard(data, m, production)
        assert shard.m == m
        assert shard.length >= 1
        assert decode_to_bytes(shard, production) == data


def test_large_blob_roundtrip(production):
    data = np.random.default_rng(16).bytes(1 << 16)
    shard = split_shard(data, 4, production)
    coded = [encode(shard, x, production) for x in (3, 7, 11, 19)]
    recovered = decode(coded, production, m=4, byte_length=len(data))
    assert decode_to_bytes(recovered, production) == data


def test_decode_to_bytes_checks_stored_length(gf257):
    shard = Shard(((FieldElement(1),), (FieldElement(2),)), 3)
    with pytest.raises(LengthOverflow):
        decode_to_bytes(shard, gf257)

def test_perturb_reduces_offsets(gf257):
    coded = CodedShard(FieldElement(1), (FieldElement(5), FieldElement(7)))
    assert perturb(coded, {0: -6, 1: 257}, gf257).values == (256, 7)
