"""
证明转移：共享 Bell 对（attack1）、隐形传态（attack2）、碰撞作弊与错误比特检测
"""
import json

import pytest

from conftest import within_sigmas
from digest.hash import make_params
from digest.key_manager import derive_key
from gmw_protocol.protocol import GmwInstance, prover_commit, prover_respond
from graph_iso.graph import gen_instance
from harness_cli.pipeline import non_isomorphic_pair
from proof_transfer.attack1 import a1_cheat, a1_eve_verify, a1_run_honest, a1_verifier_challenge
from proof_transfer.attack2 import (a2_cheat, a2_eve_verify, a2_run_honest, a2_verifier_challenge,
                                    eve_prepare_qubits)
from proof_transfer.detection import (CLAIMED_DETECTION, a2_detection_probability, a2_estimate_detection,
                                      resolve_model)
from proof_transfer.pool import PoolExhaustedError, ProtocolAbortError, SharedPairPool
from proof_transfer.records import ProofTuple
from quantum_sim.gates import GateWord, apply_gate_word
from quantum_sim.states import Bb84Tag, BellOutcome, fidelity, prepare, teleport


KEY = derive_key("proof-transfer-tests")


@pytest.fixture
def hash_params():
    return make_params('hash', 8, KEY, width=8)


def _instance(rng, n_nodes=8, n_rounds=8):
    g0, g1, sigma = gen_instance(n_nodes, 0.5, rng)
    return GmwInstance(g0, g1, sigma, n_rounds)


# =============================================================================
# 共享对
# =============================================================================

def test_pool_consumption(rng):
    pool = SharedPairPool(5)
    assert pool.take(3) == range(0, 3)
    assert pool.remaining == 2
    with pytest.raises(PoolExhaustedError):
        pool.take(3)
    with pytest.raises(ProtocolAbortError):
        pool.eve_take(4)
    assert pool.eve_take(3) == range(0, 3)


def test_pool_measure_once_per_party(rng):
    pool = SharedPairPool(1)
    pool.take(1)
    v = pool.measure_verifier(0, 1, rng)
    assert pool.measure_eve(0, 1, rng) == v
    with pytest.raises(ProtocolAbortError):
        pool.measure_verifier(0, 1, rng)
    with pytest.raises(ProtocolAbortError):
        pool.measure_eve(0, 0, rng)


# =============================================================================
# attack1
# =============================================================================

def test_a1_challenge_consumes_width(rng, hash_params):
    inst = _instance(rng)
    pool = SharedPairPool(16)
    _, h_graph = prover_commit(inst, rng)
    a1_verifier_challenge(pool, hash_params, h_graph, rng)
    assert pool.consumed_count == 8
    a1_verifier_challenge(pool, hash_params, h_graph, rng)
    with pytest.raises(PoolExhaustedError):
        a1_verifier_challenge(pool, hash_params, h_graph, rng)


def test_a1_challenge_bit_uniform(rng, hash_params):
    inst = _instance(rng)
    trials = 2000
    ones = 0
    for _ in range(trials):
        _, h_graph = prover_commit(inst, rng)
        ones += a1_verifier_challenge(SharedPairPool(8), hash_params, h_graph, rng)
    assert within_sigmas(ones, trials, 0.5)


def test_a1_honest_completeness(rng, hash_params):
    for _ in range(50):
        transcript, eve_accepts, pairs = a1_run_honest(_instance(rng), hash_params, rng)
        assert eve_accepts
        assert pairs == 8 * 8
        assert len(transcript.tuples) == 8


def test_a1_pairs_equal_rounds_squared(rng):
    params = make_params('hash', 8, KEY, width=5)
    _, eve_accepts, pairs = a1_run_honest(_instance(rng, n_rounds=5), params, rng)
    assert eve_accepts
    assert pairs == 5 ** 2


def test_a1_transcript_lines(rng, hash_params):
    transcript, _, _ = a1_run_honest(_instance(rng, n_rounds=2), hash_params, rng)
    lines = transcript.to_lines()
    assert json.loads(lines[0])['header']['attack'] == 'attack1'
    rounds = [json.loads(line) for line in lines[1:]]
    assert [r['round'] for r in rounds] == [0, 1]
    assert all(len(r['bases']) == 8 for r in rounds)


def test_a1_eve_verify_misaligned(rng, hash_params):
    transcript, _, _ = a1_run_honest(_instance(rng, n_rounds=2), hash_params, rng)
    pool = SharedPairPool(16)
    pool.take(16)
    with pytest.raises(ProtocolAbortError):
        a1_eve_verify(pool, hash_params, transcript.tuples[:1], None, None, rng)


def test_a1_swapped_rounds(rng, hash_params):
    trials, accepted = 1000, 0
    for _ in range(trials):
        inst = _instance(rng, n_rounds=2)
        pool = SharedPairPool(16)
        tuples = []
        for _ in range(2):
            lam, h_graph = prover_commit(inst, rng)
            b = a1_verifier_challenge(pool, hash_params, h_graph, rng)
            tuples.append(ProofTuple(h_graph, prover_respond(inst, lam, b), b))
        accepted += a1_eve_verify(pool, hash_params, tuples[::-1], inst.g0, inst.g1, rng)
    assert within_sigmas(accepted, trials, 0.25)


@pytest.mark.parametrize("n_rounds", [1, 2])
def test_a1_fabrication_soundness_bijective(rng, n_rounds):
    params = make_params('bijective', 4, KEY)
    trials, accepted = 1500, 0
    for _ in range(trials):
        g0, g1 = non_isomorphic_pair(4, rng)
        pool = SharedPairPool(n_rounds * params.width_bits)
        result = a1_cheat(g0, g1, params, pool, 10 ** 5, rng)
        assert result.collision_calls == 0
        ok = a1_eve_verify(pool, params, result.tuples, g0, g1, rng)
        assert ok == result.success
        accepted += ok
    assert within_sigmas(accepted, trials, 0.5 ** n_rounds)


def test_a1_fabrication_without_collisions(rng):
    params = make_params('hash', 8, KEY, width=4)
    trials, accepted = 1500, 0
    for _ in range(trials):
        g0, g1 = non_isomorphic_pair(8, rng)
        pool = SharedPairPool(3 * 4)
        result = a1_cheat(g0, g1, params, pool, 0, rng)
        accepted += a1_eve_verify(pool, params, result.tuples, g0, g1, rng)
    assert within_sigmas(accepted, trials, 0.125)


def test_a1_collision_cheat(rng, hash_params):
    sessions, successes, matched, rounds = 100, 0, 0, 0
    for _ in range(sessions):
        g0, g1 = non_isomorphic_pair(8, rng)
        pool = SharedPairPool(4 * 8)
        result = a1_cheat(g0, g1, hash_params, pool, 10 ** 5, rng)
        assert len(result.tuples) == 4
        if result.success:
            successes += 1
            assert a1_eve_verify(pool, hash_params, result.tuples, g0, g1, rng)
        matched += result.matched_rounds
        rounds += 4
    assert successes >= 99
    assert within_sigmas(matched, rounds, 0.5)


# =============================================================================
# attack2
# =============================================================================

def test_a2_honest_completeness(rng, hash_params):
    for _ in range(50):
        transcript, eve_accepts, pairs, qubits = a2_run_honest(_instance(rng, n_rounds=5), hash_params, rng)
        assert eve_accepts
        assert pairs == 5
        assert qubits == 5
        assert len(transcript.tuples) == 5


def test_a2_challenge_bit_uniform(rng, hash_params):
    inst = _instance(rng)
    trials, ones = 2000, 0
    for _ in range(trials):
        _, h_graph = prover_commit(inst, rng)
        ch = a2_verifier_challenge(SharedPairPool(1), eve_prepare_qubits(1, rng), hash_params, h_graph, 0, rng)
        assert ch.b == ch.outcome.d0 ^ ch.outcome.d1
        ones += ch.b
    assert within_sigmas(ones, trials, 0.5)


def test_a2_challenge_resource_errors(rng, hash_params):
    inst = _instance(rng)
    _, h_graph = prover_commit(inst, rng)
    with pytest.raises(PoolExhaustedError):
        a2_verifier_challenge(SharedPairPool(1), eve_prepare_qubits(1, rng), hash_params, h_graph, 1, rng)
    with pytest.raises(PoolExhaustedError):
        a2_verifier_challenge(SharedPairPool(0), eve_prepare_qubits(1, rng), hash_params, h_graph, 0, rng)


def test_identity_word_restores_theta():
    theta = prepare(Bb84Tag(1, 1))
    _, receiver = teleport(apply_gate_word(GateWord.from_string("11"), theta), None, forced=BellOutcome(0, 0))
    assert fidelity(receiver, theta) == pytest.approx(1, abs=1e-12)


def test_a2_eve_verify_empty(rng, hash_params):
    assert a2_eve_verify([], hash_params, [], None, None, rng)


def test_a2_eve_verify_misaligned(rng, hash_params):
    transcript, _, _, _ = a2_run_honest(_instance(rng, n_rounds=2), hash_params, rng)
    with pytest.raises(ProtocolAbortError):
        a2_eve_verify([], hash_params, transcript.tuples, None, None, rng)


def test_a2_flipped_phase_bit_detection(rng, hash_params):
    trials, rejected = 2000, 0
    for _ in range(trials):
        inst = _instance(rng, n_rounds=1)
        eve_qubits = eve_prepare_qubits(1, rng)
        lam, h_graph = prover_commit(inst, rng)
        ch = a2_verifier_challenge(SharedPairPool(1), eve_qubits, hash_params, h_graph, 0, rng, report_mask=(1, 0))
        tup = ProofTuple(h_graph, prover_respond(inst, lam, ch.b), ch.b)
        rejected += not a2_eve_verify([ch], hash_params, [tup], inst.g0, inst.g1, rng)
    assert within_sigmas(rejected, trials, a2_detection_probability('flip-phase', hash_params))


def test_a2_collision_cheat(rng, hash_params):
    sessions, successes, matched, rounds = 100, 0, 0, 0
    for _ in range(sessions):
        g0, g1 = non_isomorphic_pair(8, rng)
        pool = SharedPairPool(4)
        eve_qubits = eve_prepare_qubits(4, rng)
        result = a2_cheat(g0, g1, hash_params, eve_qubits, pool, 10 ** 5, rng)
        assert pool.consumed_count == 4
        if result.success:
            successes += 1
            assert a2_eve_verify(result.challenges, hash_params, result.tuples, g0, g1, rng)
        matched += result.matched_rounds
        rounds += 4
    assert successes >= 99
    assert within_sigmas(matched, rounds, 0.5)


def test_a2_cheat_bijective_degrades(rng):
    params = make_params('bijective', 4, KEY)
    trials, successes = 1500, 0
    for _ in range(trials):
        g0, g1 = non_isomorphic_pair(4, rng)
        result = a2_cheat(g0, g1, params, eve_prepare_qubits(2, rng), SharedPairPool(2), 10 ** 5, rng)
        successes += result.success
    assert within_sigmas(successes, trials, 0.25)


@pytest.mark.parametrize("mode", ['bijective', 'hash'])
def test_a2_signature_cheat_passes_eve(rng, mode):
    params = make_params(mode, 8, KEY, width=16)
    sessions, successes = 100, 0
    for _ in range(sessions):
        g0, g1 = non_isomorphic_pair(8, rng)
        result = a2_cheat(g0, g1, params, eve_prepare_qubits(4, rng), SharedPairPool(4), 200, rng,
                          collision='signature')
        if result.success:
            successes += 1
            assert a2_eve_verify(result.challenges, params, result.tuples, g0, g1, rng)
    assert successes >= 99


# =============================================================================
# 错误比特检测
# =============================================================================

@pytest.mark.parametrize("model, expected", [
    ('truthful', 0.0),
    ('flip-phase', 0.5),
    ('flip-parity', 0.5),
    ('flip-both', 1.0),
    ('uniform-wrong', 2 / 3),
])
def test_detection_oracle(hash_params, model, expected):
    assert a2_detection_probability(model, hash_params) == pytest.approx(expected, abs=1e-9)


def test_detection_differs_from_claim(hash_params):
    assert a2_detection_probability('uniform-wrong', hash_params) != pytest.approx(CLAIMED_DETECTION)


def test_y_error_on_zero_with_identity_word():
    value = a2_detection_probability('flip-both', thetas=[Bb84Tag(0, 0)], words=[GateWord.from_string("11")])
    assert value == pytest.approx(1.0)


def test_detection_custom_model(hash_params):
    value = a2_detection_probability({(0, 0): 0.5, (1, 1): 0.5}, hash_params)
    assert value == pytest.approx(0.5)
    with pytest.raises(ValueError):
        resolve_model({(0, 2): 1.0})
    with pytest.raises(ValueError):
        resolve_model({(1, 0): 0.5})
    with pytest.raises(ValueError):
        resolve_model('always-lie')
    with pytest.raises(ValueError):
        a2_detection_probability('truthful')


@pytest.mark.parametrize("model", ['flip-phase', 'flip-parity', 'flip-both', 'uniform-wrong'])
def test_detection_estimate_matches_oracle(rng, model):
    params = make_params('hash', 8, KEY, width=4)
    trials = 3000
    detected = a2_estimate_detection(model, params, trials, rng)
    assert within_sigmas(detected, trials, a2_detection_probability(model, params))
