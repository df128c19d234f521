import numpy as np
import pytest

from core.errors import ConfigError
from field.errors import FieldError, InvalidModulus, NotPrime, PackingUnsupported, ZeroInverse
from field.models import MERSENNE_61, FieldElement, FieldParams, is_prime
from field.ops import fe_add, fe_div, fe_inv, fe_mul, fe_neg, fe_pow, fe_sub, pack_bytes, unpack_bytes

FIELDS = [FieldParams.for_modulus(11), FieldParams.for_modulus(257), FieldParams.production()]


def sample(p, count=40, seed=7):
    rng = np.random.default_rng(seed)
    high = min(p.q, 1 << 62)
    return [FieldElement(int(v) % p.q) for v in rng.integers(0, high, size=count)]


def test_worked_examples(gf11):
    assert fe_add(FieldElement(8), FieldElement(5), gf11) == 2
    assert fe_mul(FieldElement(8), FieldElement(7), gf11) == 1
    assert fe_inv(FieldElement(2), gf11) == 6
    assert fe_inv(FieldElement(1), gf11) == 1


def test_zero_has_no_inverse(gf11):
    with pytest.raises(ZeroInverse):
        fe_inv(FieldElement(0), gf11)
    with pytest.raises(ZeroDivisionError):
        fe_div(FieldElement(3), FieldElement(0), gf11)


@pytest.mark.parametrize("p", FIELDS, ids=lambda p: str(p.q))
def test_field_axioms(p):
    values = sample(p)
    for a, b, c in zip(values, values[1:], values[2:]):
        assert fe_add(a, FieldElement(0), p) == a
        assert fe_mul(a, FieldElement(1), p) == a
        assert fe_add(a, b, p) == fe_add(b, a, p)
        assert fe_mul(a, b, p) == fe_mul(b, a, p)
        assert fe_add(fe_add(a, b, p), c, p) == fe_add(a, fe_add(b, c, p), p)
        assert fe_mul(fe_mul(a, b, p), c, p) == fe_mul(a, fe_mul(b, c, p), p)
        assert fe_mul(a, fe_add(b, c, p), p) == fe_add(fe_mul(a, b, p), fe_mul(a, c, p), p)
        assert fe_add(a, fe_neg(a, p), p) == 0
        assert fe_sub(fe_add(a, b, p), b, p) == a
        if a:
            assert fe_mul(a, fe_inv(a, p), p) == 1
            assert fe_div(fe_mul(b, a, p), a, p) == b


@pytest.mark.parametrize("p", FIELDS, ids=lambda p: str(p.q))
def test_results_stay_reduced(p):
    top = FieldElement(p.q - 1)
    assert fe_add(top, top, p) == p.q - 2
    assert fe_mul(top, top, p) == 1
    assert 0 <= fe_pow(top, 12345, p) < p.q


def test_mersenne_reduction_matches_plain_modulo(production):
    for a, b in zip(sample(production, seed=1), sample(production, seed=2)):
        assert production.mul(a, b) == a * b % MERSENNE_61


def test_fermat(gf257):
    for a in range(1, 257):
        assert fe_pow(FieldElement(a), 256, gf257) == 1


def test_primality():
    assert is_prime(MERSENNE_61)
    assert is_prime(257)
    assert not is_prime(1)
    assert not is_prime(561)
    assert not is_prime((1 << 61) + 1)


def test_rejects_bad_moduli():
    with pytest.raises(NotPrime):
        FieldParams.for_modulus(12)
    with pytest.raises(ConfigError):
        FieldParams.for_modulus(15)
    with pytest.raises(InvalidModulus) as info:
        FieldParams.for_modulus((1 << 64) + 13)
    assert info.value.exit_code == 3
    with pytest.raises(InvalidModulus):
        FieldParams(257, 2)
    assert issubclass(InvalidModulus, FieldError)


def test_element_and_reduce(gf257):
    assert gf257.element(256) == 256
    with pytest.raises(FieldError):
        gf257.element(257)
    with pytest.raises(FieldError):
        gf257.element(-1)
    assert gf257.reduce(-1) == 256
    assert gf257.reduce(257 * 3 + 5) == 5


def test_packing_widths(gf11, gf257, production):
    assert gf11.bytes_per_element == 0
    assert gf257.bytes_per_element == 1
    assert production.bytes_per_element == 7
    assert FieldParams.for_modulus(MERSENNE_61).bytes_per_element == 7
    assert production.element_bytes == 8
    assert gf11.element_bytes == 1


def test_pack_examples(gf257):
    assert pack_bytes(b'', gf257) == ([], 0)
    assert pack_bytes(b'\x07', gf257) == ([7], 1)


def test_pack_needs_a_byte_per_element(gf11):
    with pytest.raises(PackingUnsupported) as info:
        pack_bytes(b'\x01', gf11)
    assert isinstance(info.value, ConfigError)


@pytest.mark.parametrize("size", [0, 1, 6, 7, 8, 1024, 1031])
def test_pack_roundtrip(production, size):
    data = np.random.default_rng(size).bytes(size)
    elements, length = pack_bytes(data, production)
    assert length == size
    assert len(elements) == -(-size // 7)
    assert all(0 <= e < production.q for e in elements)
    assert unpack_bytes(elements, length, production) == data


def test_unpack_rejects_overlong_length(gf257):
    with pytest.raises(FieldError):
        unpack_bytes([1, 2], 3, gf257)
