from typing import List, Sequence, Tuple

from field.errors import FieldError, PackingUnsupported
from field.models import FieldElement, FieldParams


def fe_add(a: FieldElement, b: FieldElement, p: FieldParams) -> FieldElement:
    return FieldElement(p.add(a, b))


def fe_sub(a: FieldElement, b: FieldElement, p: FieldParams) -> FieldElement:
    return FieldElement(p.sub(a, b))


def fe_mul(a: FieldElement, b: FieldElement, p: FieldParams) -> FieldElement:
    return FieldElement(p.mul(a, b))


def fe_neg(a: FieldElement, p: FieldParams) -> FieldElement:
    return FieldElement(p.neg(a))


def fe_inv(a: FieldElement, p: FieldParams) -> FieldElement:
    return FieldElement(p.inv(a))


def fe_div(a: FieldElement, b: FieldElement, p: FieldParams) -> FieldElement:
    return FieldElement(p.mul(a, p.inv(b)))


def fe_pow(a: FieldElement, e: int, p: FieldParams) -> FieldElement:
    return FieldElement(p.pow(a, e))


def pack_bytes(data: bytes, p: FieldParams) -> Tuple[List[FieldElement], int]:
    """Packs ``data`` big-endian into residues, zero-padding the final chunk.

    Returns the elements and the original length, which ``unpack_bytes`` needs
    to strip the padding again.
    """
    width = p.bytes_per_element
    if width == 0:
        raise PackingUnsupported(f"q={p.q} is too small to hold a single byte per element")

    data = bytes(data)
    length = len(data)
    if rem := length % width:
        data += b'\x00' * (width - rem)
    elements = [FieldElement(int.from_bytes(data[i:i + width], 'big')) for i in range(0, len(data), width)]
    return elements, length


def unpack_bytes(elements: Sequence[int], length: int, p: FieldParams) -> bytes:
    width = p.bytes_per_element
    if width == 0:
        raise PackingUnsupported(f"q={p.q} is too small to hold a single byte per element")
    if length > len(elements) * width:
        raise FieldError(f"Stored length {length} exceeds {len(elements)} packed elements")

    needed = -(-length // width)
    try:
        raw = b''.join(int(e).to_bytes(width, 'big') for e in elements[:needed])
    except OverflowError as e:
        raise FieldError(f"Element does not fit in {width} bytes: {e}") from e
    return raw[:length]
