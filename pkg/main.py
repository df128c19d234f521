import math
import sys
from typing import List, Optional, Sequence

import numpy as np

from core.client import Context, RecAGTApp
from core.errors import RecAGTError
from core.settings import Settings, parse_int_list
from experiments import bench, figures
from experiments.costs import all_costs
from experiments.export import write_csv
from experiments.models import TABLE_SETTINGS, CostParams, setting
from gtest.bounds import (
    prob_no_malicious, prob_no_malicious_exact, prob_no_malicious_ratio, total_trials_bound, trials_to_first_honest,
)
from gtest.models import Strategy
from identity.schemes import SCHEMES
from simnet.committee import build_committee, run_join, run_replications
from simnet.models import Behavior, SimConfig

app = RecAGTApp(Settings)

COST_COLUMNS = ('scheme', 'n', 'm', 'b', 'communication_bytes', 'complexity_class', 'decode_complexity')
TRIALS_COLUMNS = ('n', 'm', 'f', 'rho', 'strategy', 't_bound', 't_bound_ceil', 'stage_a_budget', 'count', 'successes',
                  'success_rate', 'stage_a_failures', 'trials_mean', 'trials_std', 'trials_max',
                  'bytes_mean', 'timeouts_mean', 'recovered')
EVENT_COLUMNS = ('timestamp', 'kind', 'actor', 'detail')

committee_options = [
    app.option('--n', type=int, help="Committee size."),
    app.option('--m', type=int, help="Sub-shards per shard."),
    app.option('--f', type=int, help="Number of malicious members."),
]


def with_committee(func):
    for decorate in reversed(committee_options):
        func = decorate(func)
    return func


def use_setting(ctx: Context) -> None:
    """Fill n, f and m from a numbered committee setting unless given explicitly."""
    if (label := getattr(ctx.args, 'setting', None)) is None:
        return
    chosen = setting(label)
    for key in ('n', 'f', 'm'):
        if not ctx.given(key):
            ctx.settings.set(key, getattr(chosen, key))


def export(ctx: Context, columns: Sequence[str], rows: List[dict], **extra) -> None:
    if ctx.out is not None:
        write_csv(ctx.out, columns, rows, ctx.header(**extra))
        ctx.send(f"wrote {ctx.out}")


@app.command(help="Probability that a random group of m+1 members holds no malicious node.")
@with_committee
@app.option('--ratio', type=float, help="Malice ratio f/n, replaces --f with round(ratio * n).")
@app.option('--draws', dest='mc_draws', type=int, help="Monte Carlo draws, 0 to skip.")
def probability(ctx: Context) -> None:
    s = ctx.settings
    if (ratio := ctx.args.ratio) is not None:
        value = prob_no_malicious_ratio(s.n, ratio, s.m)
        s.set('f', round(ratio * s.n))
    else:
        value = prob_no_malicious(s.n, s.f, s.m)
    exact = prob_no_malicious_exact(s.n, s.f, s.m)
    ctx.send(f"{value!r}")
    ctx.send(f"exact: {exact}")

    row = {'n': s.n, 'f': s.f, 'm': s.m, 'f_over_n': s.f / s.n, 'm_over_n': s.m / s.n, 'p_closed_form': float(exact)}
    if s.mc_draws > 0:
        p_hat, stderr = figures.monte_carlo_no_malicious(s.n, s.f, s.m, s.mc_draws, np.random.default_rng(s.seed))
        row.update(p_monte_carlo=p_hat, stderr=stderr)
        ctx.send(f"monte_carlo: {p_hat:.6f} (stderr {stderr:.6f}, {s.mc_draws} draws)")
    export(ctx, figures.FIG4_COLUMNS, [row])


@app.command(help="Trial bound for identifying every malicious node, with an empirical check.")
@with_committee
@app.option('--setting', type=int, choices=sorted(TABLE_SETTINGS), help="Use a numbered committee setting.")
@app.option('--rho', type=float, help="Tolerated probability of failing to find an honest group.")
@app.option('--reps', dest='replications', type=int, help="Simulated joins, 0 for the bound only.")
@app.option('--shard-bytes', type=int, help="Shard size in bytes for simulated joins.")
@app.option('--strategy', choices=[s.value for s in Strategy], help="Stage B procedure for simulated joins.")
@app.option('--workers', type=int, help="Worker processes for replications.")
def trials(ctx: Context) -> None:
    use_setting(ctx)
    s = ctx.settings
    bound = total_trials_bound(s.n, s.m, s.f, s.rho)
    budget = trials_to_first_honest(prob_no_malicious(s.n, s.f, s.m), s.rho)
    ctx.send(f"n={s.n} m={s.m} f={s.f} rho={s.rho}")
    ctx.send(f"bound: {bound:.4f} (ceil {math.ceil(bound)}, first honest group within {budget} trials)")

    row = {'n': s.n, 'm': s.m, 'f': s.f, 'rho': s.rho, 'strategy': s.strategy, 't_bound': bound,
           't_bound_ceil': math.ceil(bound), 'stage_a_budget': budget}
    if s.replications > 0:
        stats = run_replications(SimConfig.from_settings(s), s.replications, workers=s.workers)
        row.update(stats.as_row())
        ctx.send(f"empirical: {stats.trials_mean:.3f} +/- {stats.trials_std:.3f} trials "
                 f"(max {stats.trials_max}) over {stats.count} joins")
        ctx.send(f"success rate: {stats.success_rate:.4f}, stage A failures: {stats.stage_a_failures}")
    export(ctx, TRIALS_COLUMNS, [row])


@app.command(help="Bytes a newcomer receives under each identification scheme.")
@with_committee
@app.option('--b', type=int, default=1 << 20, help="Shard size in bytes.")
def cost(ctx: Context) -> None:
    s = ctx.settings
    cp = CostParams(b=ctx.args.b, n=s.n, m=s.m, w=s.scalar_bytes, z=s.signature_bytes,
                    s=s.secret_key_bytes, d=s.checksum_bytes)
    rows = []
    for scheme in all_costs(cp):
        ctx.send(f"{scheme.scheme:<10}{scheme.communication_bytes:>14}  {scheme.complexity_class:<8}{scheme.decode_complexity}")
        rows.append({'scheme': scheme.scheme, 'n': cp.n, 'm': cp.m, 'b': cp.b,
                     'communication_bytes': scheme.communication_bytes,
                     'complexity_class': scheme.complexity_class, 'decode_complexity': scheme.decode_complexity})
    export(ctx, COST_COLUMNS, rows)


@app.command('bench', help="Time digest comparison against parity test plus decode.")
@app.option('--m', type=int, help="Sub-shards per shard.")
@app.option('--sizes', type=parse_int_list, default=bench.DEFAULT_SIZES, help="Comma separated shard sizes.")
@app.option('--ns', type=parse_int_list, default=bench.DEFAULT_BENCH_NS, help="Comma separated committee sizes.")
@app.option('--repeats', dest='bench_repeats', type=int, help="Timed runs per cell, at least 5.")
def run_bench(ctx: Context) -> None:
    s = ctx.settings
    rows = bench.timing_rows(ctx.args.sizes, ctx.args.ns, s.m, repeats=s.bench_repeats,
                             max_bytes=s.bench_max_bytes, seed=s.seed)
    for row in rows:
        ctx.send(f"{row['scheme']:<10}n={row['n']:<5}b={row['b']:<10}{row['median_seconds']:.6f}s")
    slope, intercept, r2 = bench.recagt_slope(rows)
    ctx.send(f"RecAGT fit: {slope:.3e} s/byte, intercept {intercept:.3e} s, r^2 {r2:.4f}")
    export(ctx, bench.FIG6_COLUMNS, rows, **bench.machine_metadata())


@app.command(help="Run a newcomer joining a committee and print the transcript.")
@with_committee
@app.option('--rho', type=float, help="Tolerated probability of failing to find an honest group.")
@app.option('--delta', type=float, help="Maximum message delay.")
@app.option('--q', type=str, help="Field modulus, must be prime.")
@app.option('--adversary', choices=[b.value for b in Behavior], help="How the malicious members misbehave.")
@app.option('--adversary-ids', type=str, help="Comma separated malicious node ids.")
@app.option('--shard-bytes', type=int, help="Shard size in bytes.")
@app.option('--scheme', dest='signature_scheme', choices=sorted(SCHEMES), help="Signature scheme.")
@app.option('--error-rate', dest='transmission_error_rate', type=float,
            help="Chance an honest message is corrupted in transit.")
@app.option('--max-resends', type=int, help="Re-requests before a node counts as unverifiable.")
@app.option('--trace', help="Also write the transcript as JSON lines to this path.")
def simulate(ctx: Context) -> None:
    cfg = SimConfig.from_settings(ctx.settings)
    transcript = run_join(cfg, build_committee(cfg))
    lines = transcript.to_lines()
    for line in lines:
        ctx.send(line)

    result = transcript.identification
    ctx.send(f"planted: {sorted(transcript.planted)}")
    ctx.send(f"identified: {sorted(result.malicious_set)}")
    ctx.send(f"trials: {result.trials_used} (first honest group after {result.stage_a_trials})")
    ctx.send(f"bytes: {transcript.total_bytes}, recovered: {transcript.recovered_ok}")

    if ctx.args.trace:
        path = ctx.settings.output_path(ctx.args.trace)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(''.join(f"{line}\n" for line in lines), encoding='utf-8')
    export(ctx, EVENT_COLUMNS, [event.to_record() for event in transcript.events],
           planted=','.join(map(str, sorted(transcript.planted))),
           identified=','.join(map(str, sorted(result.malicious_set))))


@app.command(help="Probability grid for groups free of malicious nodes.")
@app.option('--grid', choices=['settings', 'ratio', 'both'], default='both', help="Which grid to evaluate.")
@app.option('--max-m', type=int, default=15, help="Largest group parameter m.")
@app.option('--draws', dest='mc_draws', type=int, help="Monte Carlo draws per point, 0 to skip.")
def fig4(ctx: Context) -> None:
    points = []
    if ctx.args.grid in ('settings', 'both'):
        points += figures.settings_grid(ctx.args.max_m)
    if ctx.args.grid in ('ratio', 'both'):
        points += figures.ratio_grid(max_m=2 * ctx.args.max_m)
    rows = figures.fig4_data(points, draws=ctx.settings.mc_draws, seed=ctx.settings.seed)
    emit_table(ctx, figures.FIG4_COLUMNS, rows)


@app.command(help="Trial bounds and empirical trials across malicious counts and committee sizes.")
@app.option('--setting', type=int, action='append', choices=sorted(TABLE_SETTINGS), help="Restrict to a setting.")
@app.option('--rho', type=float, help="Tolerated probability of failing to find an honest group.")
@app.option('--reps', dest='replications', type=int, help="Simulated joins per point, 0 for bounds only.")
@app.option('--f-max', type=int, default=14, help="Largest malicious count in the f sweep.")
@app.option('--n-max', type=int, default=100, help="Largest committee size in the n sweep.")
@app.option('--shard-bytes', type=int, help="Shard size in bytes for simulated joins.")
@app.option('--strategy', choices=[s.value for s in Strategy], help="Stage B procedure for simulated joins.")
@app.option('--workers', type=int, help="Worker processes for replications.")
def fig5(ctx: Context) -> None:
    s = ctx.settings
    chosen = [setting(label) for label in ctx.args.setting] if ctx.args.setting else None
    rows = figures.fig5_data(chosen, s.rho, f_max=ctx.args.f_max, n_max=ctx.args.n_max,
                             replications=s.replications, seed=s.seed, workers=s.workers,
                             sim_overrides={'shard_bytes': s.shard_bytes, 'delta': s.delta,
                                            'signature_scheme': s.signature_scheme,
                                            'strategy': Strategy.from_name(s.strategy)})
    emit_table(ctx, figures.FIG5_COLUMNS, rows)


@app.command(help="Communication cost per committee size and decode timing per shard size.")
@app.option('--b', type=int, default=1 << 20, help="Shard size in bytes for the cost curves.")
@app.option('--m', type=int, help="Sub-shards per shard for the timing half.")
@app.option('--sizes', type=parse_int_list, default=bench.DEFAULT_SIZES, help="Comma separated shard sizes.")
@app.option('--ns', type=parse_int_list, default=bench.DEFAULT_BENCH_NS, help="Comma separated committee sizes.")
@app.option('--repeats', dest='bench_repeats', type=int, help="Timed runs per cell, at least 5.")
def fig6(ctx: Context) -> None:
    s = ctx.settings
    rows = bench.fig6_bench(b=ctx.args.b, sizes=ctx.args.sizes, bench_ns=ctx.args.ns, m=s.m,
                            repeats=s.bench_repeats, max_bytes=s.bench_max_bytes, seed=s.seed)
    emit_table(ctx, bench.FIG6_COLUMNS, rows, **bench.machine_metadata())


def emit_table(ctx: Context, columns: Sequence[str], rows: List[dict], **extra) -> None:
    write_csv(ctx.out, columns, rows, ctx.header(**extra), stream=ctx.app.stdout)


@app.event
def on_command_error(ctx: Optional[Context], error: BaseException) -> int:
    if isinstance(error, RecAGTError):
        print(f"{ctx.command if ctx else app.parser.prog}: error: {error.message}", file=app.stderr)
        return error.exit_code

    app.logger.exception(f"Command {ctx.command if ctx else '?'} crashed", exc_info=error)
    return 1


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    return app.run(argv)


if __name__ == '__main__':
    sys.exit(cli_main())
