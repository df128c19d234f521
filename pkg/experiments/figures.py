from __future__ import annotations

import logging
import math
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from core.types import Rng, Row, Rows
from experiments.models import TABLE_SETTINGS, CommitteeSetting
from gtest.bounds import dorfman_bound, prob_no_malicious, total_trials_bound
from simnet.committee import run_replications
from simnet.models import SimConfig

logger = logging.getLogger('experiments.figures')

FIG4_COLUMNS = ('n', 'f', 'm', 'f_over_n', 'm_over_n', 'p_closed_form', 'p_monte_carlo', 'stderr')
FIG5_COLUMNS = ('sweep', 'setting', 'n', 'm', 'f', 't_bound', 't_bound_ceil', 't_dorfman',
                't_empirical_mean', 't_empirical_std', 'success_rate', 'stage_a_failures', 'replications')

MC_CHUNK = 1 << 14
FIG4_RATIOS = (0.05, 0.1, 0.2, 0.3)
FIG4_RATIO_N = 100


def monte_carlo_no_malicious(n: int, f: int, m: int, draws: int, rng: Rng) -> Tuple[float, float]:
    """Fraction of uniformly drawn (m+1)-subsets with no member among the first f ids, and its stderr."""
    if draws < 1:
        raise ValueError(f"draws must be >= 1, got {draws}")

    hits = 0
    remaining = draws
    k = m + 1
    while remaining:
        batch = min(remaining, MC_CHUNK)
        # the k smallest of n iid keys form a uniform k-subset
        keys = rng.random((batch, n))
        chosen = np.argpartition(keys, k - 1, axis=1)[:, :k] if k < n else np.broadcast_to(np.arange(n), (batch, n))
        hits += int(np.count_nonzero((chosen >= f).all(axis=1)))
        remaining -= batch

    p_hat = hits / draws
    return p_hat, math.sqrt(p_hat * (1 - p_hat) / draws)


def settings_grid(max_m: int = 15) -> List[Tuple[int, int, int]]:
    return [(s.n, s.f, m) for s in TABLE_SETTINGS.values() for m in range(1, max_m + 1)]


def ratio_grid(n: int = FIG4_RATIO_N, ratios: Sequence[float] = FIG4_RATIOS,
               max_m: int = 30) -> List[Tuple[int, int, int]]:
    return [(n, round(r * n), m) for r in ratios for m in range(1, max_m + 1)]


def fig4_data(points: Iterable[Tuple[int, int, int]], *, draws: int = 100_000, seed: int = 0) -> Rows:
    rows: Rows = []
    points = list(points)
    streams = np.random.SeedSequence(seed).spawn(len(points))
    for (n, f, m), stream in zip(points, streams):
        row: Row = {'n': n, 'f': f, 'm': m, 'f_over_n': f / n, 'm_over_n': m / n}
        if n >= m + f + 1 and f >= 0 and m >= 1:
            row['p_closed_form'] = prob_no_malicious(n, f, m)
            if draws:
                row['p_monte_carlo'], row['stderr'] = monte_carlo_no_malicious(
                    n, f, m, draws, np.random.default_rng(stream))
        else:
            logger.debug(f"Skipping grid point n={n}, f={f}, m={m}")
        rows.append(row)
    return rows


def _bound_row(sweep: str, s: CommitteeSetting, n: int, f: int, rho: float) -> Row:
    bound = total_trials_bound(n, s.m, f, rho)
    return {'sweep': sweep, 'setting': s.label, 'n': n, 'm': s.m, 'f': f,
            't_bound': bound, 't_bound_ceil': math.ceil(bound), 't_dorfman': dorfman_bound(n - s.m - 1, f)}


def f_sweep(s: CommitteeSetting, rho: float, *, f_max: int = 14, replications: int = 0,
            seed: int = 0, workers: int = 1, sim_overrides: Optional[Dict[str, Any]] = None) -> Rows:
    rows: Rows = []
    for f in range(1, min(f_max, s.n - s.m - 1) + 1):
        row = _bound_row('f', s, s.n, f, rho)
        if replications:
            cfg = SimConfig(n=s.n, m=s.m, f=f, rho=rho, seed=seed + f, **(sim_overrides or {}))
            stats = run_replications(cfg, replications, workers=workers)
            row.update(t_empirical_mean=stats.trials_mean, t_empirical_std=stats.trials_std,
                       success_rate=stats.success_rate, stage_a_failures=stats.stage_a_failures,
                       replications=replications)
            logger.info(f"Setting {s.label} f={f}: bound {row['t_bound']:.2f}, "
                        f"empirical {stats.trials_mean:.2f} +/- {stats.trials_std:.2f}")
        rows.append(row)
    return rows


def n_sweep(s: CommitteeSetting, rho: float, *, n_max: int = 100) -> Rows:
    return [_bound_row('n', s, n, s.f, rho) for n in range(s.m + s.f + 1, max(n_max, s.n) + 1)]


def fig5_data(settings: Optional[Sequence[CommitteeSetting]] = None, rho: float = 0.01, *,
              f_max: int = 14, n_max: int = 100, replications: int = 1000, seed: int = 0,
              workers: int = 1, sim_overrides: Optional[Dict[str, Any]] = None) -> Rows:
    settings = settings or list(TABLE_SETTINGS.values())
    rows: Rows = []
    for s in settings:
        rows += f_sweep(s, rho, f_max=f_max, replications=replications, seed=seed,
                        workers=workers, sim_overrides=sim_overrides)
    for s in settings:
        rows += n_sweep(s, rho, n_max=n_max)
    return rows
