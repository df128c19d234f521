from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Sequence, TypeVar

from gtest.errors import InvalidConfig

T = TypeVar('T')


def _check_committee(n: int, f: int, m: int) -> None:
    if min(n, f, m) < 0:
        raise InvalidConfig(f"n, f and m must be non-negative, got n={n}, f={f}, m={m}")
    if n < m + f + 1:
        raise InvalidConfig(f"Need n >= m + f + 1, got n={n}, m={m}, f={f}")


def prob_no_malicious_exact(n: int, f: int, m: int) -> Fraction:
    """P(H=0): chance that m+1 nodes drawn without replacement are all honest."""
    _check_committee(n, f, m)
    p = Fraction(1)
    for i in range(m + 1):
        p *= Fraction(n - i - f, n - i)
    return p


def prob_no_malicious(n: int, f: int, m: int) -> float:
    return float(prob_no_malicious_exact(n, f, m))


def prob_no_malicious_ratio(n: int, ratio: float, m: int) -> float:
    """P(H=0) written with the malice ratio f/n."""
    if not 0 <= ratio < 1:
        raise InvalidConfig(f"Malice ratio must lie in [0, 1), got {ratio}")
    return prob_no_malicious(n, round(ratio * n), m)


def trials_to_first_honest(p0: float, rho: float) -> int:
    if not 0 < p0 <= 1:
        raise InvalidConfig(f"P(H=0) must lie in (0, 1], got {p0}")
    if not 0 < rho < 1:
        raise InvalidConfig(f"rho must lie in (0, 1), got {rho}")
    if p0 == 1:
        return 1
    return max(1, math.ceil(math.log(rho) / math.log1p(-p0)))


def total_trials_bound(n: int, m: int, f: int, rho: float) -> float:
    """Upper bound on the trials needed to identify every malicious node (un-ceiled)."""
    p0 = prob_no_malicious(n, f, m)
    if f == 0:
        return float(trials_to_first_honest(p0, rho))
    if not 0 < rho < 1:
        raise InvalidConfig(f"rho must lie in (0, 1), got {rho}")
    return math.log(rho) / math.log1p(-p0) + 2 * math.sqrt((n - m - 1) * f)


def dorfman_bound(population: int, f: int) -> float:
    return 2 * math.sqrt(population * f)


def _ceil_sqrt(x: int) -> int:
    return 0 if x <= 0 else math.isqrt(x - 1) + 1


def dorfman_partition(remaining: Sequence[T], f: int) -> List[List[T]]:
    """Splits ``remaining`` into ceil(sqrt(r*f)) near-equal subgroups, in order.

    Group sizes differ by at most one; the larger groups come first.
    """
    if f < 1:
        raise InvalidConfig(f"Dorfman partition needs f >= 1, got {f}")

    r = len(remaining)
    if r == 0:
        return []
    count = min(r, _ceil_sqrt(r * f))
    base, extra = divmod(r, count)
    groups, start = [], 0
    for i in range(count):
        size = base + (1 if i < extra else 0)
        groups.append(list(remaining[start:start + size]))
        start += size
    return groups
