from __future__ import annotations

import hashlib
import logging
import platform
import time
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from codes.codec import decode, decode_to_bytes, encode, parity_vector, run_test, split_shard
from codes.models import TestGroup, Verdict
from core.types import Rng, Row, Rows
from experiments.costs import all_costs
from experiments.errors import InvalidParams
from experiments.models import CostParams
from field.models import FieldParams
from identity.protocol import draw_scalars

logger = logging.getLogger('experiments.bench')

FIG6_COLUMNS = ('part', 'scheme', 'n', 'm', 'b', 'communication_bytes', 'median_seconds')
DEFAULT_SIZES = (1 << 12, 1 << 13, 1 << 14, 1 << 15, 1 << 16)
DEFAULT_BENCH_NS = (5, 10, 20, 40)
DEFAULT_COST_NS = tuple(range(1, 101))
MIN_REPEATS = 5

Check = Callable[[], object]


def machine_metadata() -> Dict[str, str]:
    return {
        'platform': platform.platform(),
        'python': platform.python_version(),
        'processor': platform.processor() or platform.machine(),
        'numpy': np.__version__,
    }


def median_time(check: Check, repeats: int = MIN_REPEATS) -> float:
    samples = []
    for _ in range(max(repeats, MIN_REPEATS)):
        start = time.perf_counter()
        check()
        samples.append(time.perf_counter() - start)
    return float(np.median(samples))


def linear_fit(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float, float]:
    """Least-squares line through (xs, ys) as (slope, intercept, r^2)."""
    if len(xs) != len(ys) or len(xs) < 2:
        raise InvalidParams("linear_fit needs two equally long sequences of at least two points")

    x, y = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sum((y - (slope * x + intercept)) ** 2))
    total = float(np.sum((y - y.mean()) ** 2))
    return float(slope), float(intercept), 1.0 - residual / total if total else 1.0


def uncoded_check(copies: Sequence[bytes]) -> bool:
    # every pair of full copies is compared by recomputed digest
    return all(
        hashlib.md5(copies[i]).digest() == hashlib.md5(copies[j]).digest()
        for i in range(len(copies)) for j in range(i + 1, len(copies))
    )


def checksum_check(data: bytes, digests: Sequence[bytes]) -> bool:
    digest = hashlib.md5(data).digest()
    return all(d == digest for d in digests)


def recagt_workload(data: bytes, m: int, p: FieldParams, rng: Rng) -> Check:
    shard = split_shard(data, m, p)
    scalars = draw_scalars(m + 1, p, rng)
    coded = [encode(shard, x, p) for x in scalars]
    group = TestGroup(tuple(enumerate(scalars, start=1)))

    def check() -> bytes:
        outcome = run_test(group, coded, parity_vector(group, p), p)
        if outcome.verdict is not Verdict.HONEST:
            raise AssertionError("Honest coded shards failed the parity test")
        recovered = decode(coded[:m], p, m=m, byte_length=shard.original_byte_length)
        return decode_to_bytes(recovered, p)

    return check


def timing_rows(sizes: Iterable[int], ns: Sequence[int], m: int, *, repeats: int = MIN_REPEATS,
                max_bytes: int = 64 << 20, seed: int = 0, p: Optional[FieldParams] = None) -> Rows:
    p = p or FieldParams.production()
    rng = np.random.default_rng(seed)
    rows: Rows = []
    for b in sizes:
        if not 0 < b <= max_bytes:
            raise InvalidParams(f"Shard size {b} outside (0, {max_bytes}]")

        data = rng.bytes(b)
        recagt = recagt_workload(data, m, p, rng)
        digest = hashlib.md5(data).digest()
        for n in ns:
            if n < m + 1:
                raise InvalidParams(f"Timing needs n >= m + 1, got n={n}, m={m}")
            checks: Dict[str, Check] = {
                'Uncoded': lambda: uncoded_check([data] * n),
                'CheckSum': lambda: checksum_check(data, [digest] * (n - 1)),
                'RecAGT': recagt,
            }
            for scheme, check in checks.items():
                seconds = median_time(check, repeats)
                logger.debug(f"{scheme} b={b} n={n}: {seconds:.6f}s")
                rows.append({'part': 'time', 'scheme': scheme, 'n': n, 'm': m, 'b': b, 'median_seconds': seconds})
    return rows


def cost_rows(ns: Iterable[int], b: int, *, ratio: float = 0.1, **defaults: int) -> Rows:
    rows: Rows = []
    for n in ns:
        m = max(1, round(ratio * n))
        for cost in all_costs(CostParams(b=b, n=n, m=m, **defaults)):
            rows.append({'part': 'cost', 'scheme': cost.scheme, 'n': n, 'm': m, 'b': b,
                         'communication_bytes': cost.communication_bytes})
    return rows


def fig6_bench(*, b: int = 1 << 20, cost_ns: Iterable[int] = DEFAULT_COST_NS,
               sizes: Iterable[int] = DEFAULT_SIZES, bench_ns: Sequence[int] = DEFAULT_BENCH_NS,
               m: int = 2, repeats: int = MIN_REPEATS, max_bytes: int = 64 << 20, seed: int = 0) -> Rows:
    return cost_rows(cost_ns, b) + timing_rows(sizes, bench_ns, m, repeats=repeats,
                                               max_bytes=max_bytes, seed=seed)


def recagt_slope(rows: Rows) -> Tuple[float, float, float]:
    """Regression of RecAGT median time against shard size at the smallest benchmarked n."""
    timed = [r for r in rows if r['part'] == 'time' and r['scheme'] == 'RecAGT']
    n = min(r['n'] for r in timed)
    points: List[Row] = [r for r in timed if r['n'] == n]
    return linear_fit([r['b'] for r in points], [r['median_seconds'] for r in points])
