import dataclasses
import json
import math

import pytest

from core.settings import Settings
from core.types import CA_ID
from gtest.bounds import total_trials_bound
from gtest.errors import InvalidConfig
from gtest.models import Strategy
from identity.wire import WireFormat
from simnet.committee import build_committee, replication_configs, run_join, run_replications
from simnet.errors import JoinFailed
from simnet.loop import EventLoop
from simnet.models import AdversaryProfile, Behavior, EventKind, SimConfig


def join(cfg, attempts=20):
    """Runs one join, moving to the next seed when stage A gives up."""
    for seed in range(cfg.seed, cfg.seed + attempts):
        attempt = dataclasses.replace(cfg, seed=seed)
        committee = build_committee(attempt)
        try:
            return run_join(attempt, committee), committee
        except JoinFailed:
            continue
    raise AssertionError(f"every join failed on {attempts} consecutive seeds")


def small(**kwargs):
    defaults = dict(n=6, m=2, f=1, seed=1, shard_bytes=200)
    return SimConfig(**{**defaults, **kwargs})


def kinds(transcript):
    return [event.kind for event in transcript.events]


class Recorder:
    def __init__(self):
        self.seen = []

    def on_deliver(self, event):
        self.seen.append(event.detail)


def test_event_loop_orders_by_time_then_insertion():
    recorder = Recorder()
    loop = EventLoop(recorder)
    loop.schedule(2.0, EventKind.DELIVER, 1, 'late')
    loop.schedule(1.0, EventKind.DELIVER, 2, 'first')
    loop.schedule(1.0, EventKind.DELIVER, 3, 'second')
    loop.schedule(1.5, EventKind.TIMEOUT, 4, 'ignored')
    loop.run()
    assert recorder.seen == ['first', 'second', 'late']
    assert loop.now == 2.0
    assert [e.detail for e in loop.history] == ['first', 'second', 'ignored', 'late']
    assert len(loop) == 0


def test_perturbing_node_is_found_and_shard_recovered():
    transcript, committee = join(small(adversary_ids=(4,)))
    result = transcript.identification
    assert transcript.planted == {4}
    assert result.malicious_set == {4}
    assert result.honest_set == {1, 2, 3, 5, 6}
    assert transcript.success
    assert transcript.recovered_ok is True
    assert transcript.newcomer_id == 7
    assert EventKind.RECOVER in kinds(transcript)


@pytest.mark.parametrize("label, n, f, m", [(1, 6, 1, 2), (2, 24, 3, 3), (3, 72, 4, 8)])
def test_committee_settings_end_to_end(label, n, f, m):
    transcript, _ = join(SimConfig(n=n, m=m, f=f, seed=10 * label, shard_bytes=128))
    assert transcript.identification.malicious_set == transcript.planted
    assert len(transcript.planted) == f
    assert transcript.recovered_ok is True


def test_silent_nodes_time_out():
    cfg = small(n=8, f=2, adversary=AdversaryProfile(Behavior.SILENT), adversary_ids=(2, 5))
    transcript, _ = join(cfg)
    result = transcript.identification
    assert result.malicious_set == {2, 5}
    assert set(transcript.timeouts) == {2, 5}
    assert result.excluded == {2: 'timeout', 5: 'timeout'}
    assert 2 not in transcript.bytes_by_node and 5 not in transcript.bytes_by_node


def test_tampered_scalar_yields_upheld_fraud_proof():
    cfg = small(adversary=AdversaryProfile(Behavior.TAMPER_SCALAR), adversary_ids=(3,))
    transcript, _ = join(cfg)
    assert [str(r) for r in transcript.fraud_proofs] == ['Guilty(3)']
    assert transcript.identification.excluded == {3: 'fraud_proof'}
    assert transcript.identification.malicious_set == {3}
    assert EventKind.ADJUDICATE in kinds(transcript)
    assert transcript.bytes_by_node[transcript.newcomer_id] > 0


def test_bad_second_signature_exhausts_resends():
    cfg = small(adversary=AdversaryProfile(Behavior.BAD_SECOND_SIGNATURE), adversary_ids=(6,), max_resends=2)
    transcript, committee = join(cfg)
    assert [v for node, v in transcript.verdicts if node == 6] == ['resend'] * 3
    assert transcript.identification.excluded == {6: 'unverifiable'}
    assert transcript.identification.malicious_set == {6}
    assert not transcript.fraud_proofs
    assert transcript.bytes_by_node[6] == 3 * committee.wire.message_size(committee.shard.length)


def test_transmission_errors_trigger_honest_resends():
    cfg = SimConfig(n=24, m=3, f=0, seed=3, shard_bytes=64, transmission_error_rate=0.3, max_resends=30)
    transcript, _ = join(cfg)
    assert 'resend' in {v for _, v in transcript.verdicts}
    assert transcript.identification.malicious_set == frozenset()
    assert transcript.recovered_ok is True


def test_byte_accounting(production):
    transcript, committee = join(small(adversary_ids=(1,)))
    wire = WireFormat.for_field(production)
    assert committee.wire == wire
    assert transcript.bytes_by_node[CA_ID] == wire.credential_size == 4 + 8 + 256 + 128
    message = wire.message_size(committee.shard.length)
    for node, sent in transcript.bytes_by_node.items():
        if node != CA_ID:
            assert sent == message
    assert transcript.total_bytes == transcript.emitted_bytes


def test_joins_are_deterministic():
    cfg = small(n=24, m=3, f=3, seed=77)
    first, _ = join(cfg)
    second, _ = join(cfg)
    assert first.to_lines() == second.to_lines()
    assert first.bytes_by_node == second.bytes_by_node
    assert first.elapsed == second.elapsed


def test_transcript_lines_are_json():
    transcript, _ = join(small())
    records = [json.loads(line) for line in transcript.to_lines()]
    assert set(records[0]) == {'timestamp', 'kind', 'actor', 'detail'}
    assert records[0]['kind'] == 'send' and records[0]['actor'] == CA_ID
    stamps = [r['timestamp'] for r in records]
    assert stamps == sorted(stamps)


def test_replies_arrive_before_their_timeout():
    transcript, _ = join(small(delta=0.25))
    assert any(e.kind is EventKind.DELIVER for e in transcript.events)
    assert transcript.timeouts == []


def test_config_validation():
    with pytest.raises(InvalidConfig):
        small(adversary_ids=(9,))
    with pytest.raises(InvalidConfig):
        small(f=6)
    with pytest.raises(InvalidConfig):
        small(delta=0)
    with pytest.raises(InvalidConfig):
        AdversaryProfile.from_name('sneaky')


def test_config_from_settings():
    cfg = SimConfig.from_settings(Settings(n='24', m='3', f='3', adversary='silent', adversary_ids='1,2,3', q='257'))
    assert (cfg.n, cfg.m, cfg.f) == (24, 3, 3)
    assert cfg.adversary.behavior is Behavior.SILENT
    assert cfg.adversary_ids == (1, 2, 3)
    assert cfg.params.q == 257
    assert cfg.strategy is Strategy.DORFMAN
    assert SimConfig.from_settings(Settings(strategy='individual')).strategy is Strategy.INDIVIDUAL
    with pytest.raises(InvalidConfig):
        SimConfig.from_settings(Settings(strategy='binary'))


def test_replication_seeds_are_stable():
    cfg = small()
    assert replication_configs(cfg, 5) == replication_configs(cfg, 5)
    assert len({c.seed for c in replication_configs(cfg, 50)}) == 50


def test_replication_aggregates_are_reproducible():
    cfg = small(n=24, m=3, f=3, shard_bytes=16, seed=11)
    first = run_replications(cfg, 8)
    second = run_replications(cfg, 8)
    pooled = run_replications(cfg, 8, workers=2)
    assert first == second == pooled


def test_individual_strategy_tests_every_remaining_node():
    cfg = SimConfig(n=24, m=3, f=3, seed=21, shard_bytes=32, strategy=Strategy.INDIVIDUAL)
    transcript, _ = join(cfg)
    result = transcript.identification
    assert result.malicious_set == transcript.planted
    assert result.trials_used - result.stage_a_trials == 24 - 4
    assert transcript.recovered_ok is True


def test_replication_stats():
    stats = run_replications(small(shard_bytes=32), 30)
    assert stats.count == 30
    assert stats.successes + stats.stage_a_failures <= 30
    assert stats.success_rate >= 0.9
    assert stats.recovered == stats.successes
    assert 0 < stats.trials_mean <= stats.trials_max
    row = stats.as_row()
    assert row['success_rate'] == stats.success_rate


@pytest.mark.slow
@pytest.mark.parametrize("label, n, f, m", [(1, 6, 1, 2), (2, 24, 3, 3), (3, 72, 4, 8), (4, 450, 5, 10)])
def test_replications_meet_trial_bound(label, n, f, m):
    count = 1000
    stats = run_replications(SimConfig(n=n, m=m, f=f, seed=label, shard_bytes=32), count, workers=2)
    assert stats.stage_a_failures / count <= 0.01 + 3 * math.sqrt(0.01 * 0.99 / count)
    assert stats.successes == count - stats.stage_a_failures
    assert stats.trials_mean <= math.ceil(total_trials_bound(n, m, f, 0.01)) + f
