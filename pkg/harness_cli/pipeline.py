"""
每个实验的单次会话与指标汇总

会话函数签名统一为 (config, context, rng) -> Counter，计数全部是可交换的累加量，
因此批次可以按任意顺序合并，报告仍然逐字节一致。
"""

from collections import Counter
from dataclasses import dataclass

import numpy as np

from digest.hash import DigestParams, make_params, permutation_fix_pair_count
from digest.key_manager import derive_key
from gmw_protocol.protocol import GmwInstance, challenge_independence, run_cheating_prover, run_honest
from graph_iso.graph import Graph, degree_multiset, gen_instance, random_graph
from harness_cli.config import RunConfig
from harness_cli.stats import Metric, binomial_metric
from proof_transfer.attack1 import a1_cheat, a1_eve_verify, a1_run_honest
from proof_transfer.attack2 import a2_cheat, a2_eve_verify, a2_run_honest, eve_prepare_qubits
from proof_transfer.detection import CLAIMED_DETECTION, a2_detection_probability, a2_estimate_detection
from proof_transfer.pool import SharedPairPool
from quantum_sim.gates import signature_class_distribution
from split_secret.parties import (alice_run, bob_responder, impostor_responder, snoop_guess_accuracy,
                                  snooping_alice)
from split_secret.shares import ChunkConfig, charlie_setup, charlie_verify, make_chunk_config


EDGE_DENSITY = 0.5
N_BUCKETS = 4
MAX_PAIR_RESAMPLES = 1000
DETECTION_MODELS = ('flip-phase', 'flip-parity', 'flip-both', 'uniform-wrong')


@dataclass(frozen=True)
class RunContext:
    key: bytes
    params: DigestParams | None = None
    bucket_params: DigestParams | None = None
    chunks: ChunkConfig | None = None


def resolve_key(config: RunConfig) -> bytes:
    if config.key_hex is not None:
        return bytes.fromhex(config.key_hex)
    return derive_key(f"digest-key-{config.seed}")


def build_context(config: RunConfig) -> RunContext:
    key = resolve_key(config)
    if config.experiment.startswith('splitshare'):
        return RunContext(key, chunks=make_chunk_config(config.m, config.k, key))
    params = make_params(config.digest_mode, config.n_nodes, key, config.digest_width)
    # 挑战位独立性按 H 的哈希分桶，与摘要模式无关
    bucket_params = params if params.mode == 'hash' else make_params('hash', config.n_nodes, key)
    return RunContext(key, params=params, bucket_params=bucket_params)


def non_isomorphic_pair(n: int, rng: np.random.Generator) -> tuple[Graph, Graph]:
    """
    独立采样两张图，直到度序列不同（保证不同构，没有 σ 可用）
    """
    for _ in range(MAX_PAIR_RESAMPLES):
        g0 = random_graph(n, EDGE_DENSITY, rng)
        g1 = random_graph(n, EDGE_DENSITY, rng)
        if degree_multiset(g0) != degree_multiset(g1):
            return g0, g1
    raise ValueError(f"{MAX_PAIR_RESAMPLES} 次采样都没有得到不同构的 {n} 节点图对")


def gmw_session(config: RunConfig, ctx: RunContext, rng: np.random.Generator) -> Counter:
    g0, g1, sigma = gen_instance(config.n_nodes, EDGE_DENSITY, rng)
    records = run_honest(GmwInstance(g0, g1, sigma, config.n_rounds), rng)
    tally = Counter(
        honest_accept=int(all(r.accepted for r in records)),
        challenge_ones=sum(r.challenge_bit for r in records),
        challenge_total=len(records),
    )
    for i, (ones, total) in enumerate(challenge_independence(records, ctx.bucket_params, N_BUCKETS)):
        tally[f'bucket{i}_ones'] += ones
        tally[f'bucket{i}_total'] += total

    h0, h1 = non_isomorphic_pair(config.n_nodes, rng)
    _, accepted_all = run_cheating_prover(h0, h1, config.n_rounds, rng)
    tally['cheat_accept'] += int(accepted_all)
    return tally


def attack1_session(config: RunConfig, ctx: RunContext, rng: np.random.Generator) -> Counter:
    g0, g1, sigma = gen_instance(config.n_nodes, EDGE_DENSITY, rng)
    transcript, eve_accepts, pairs = a1_run_honest(GmwInstance(g0, g1, sigma, config.n_rounds), ctx.params, rng)
    return Counter(
        eve_accept=int(eve_accepts),
        pairs_exact=int(pairs == config.n_rounds * ctx.params.width_bits),
        challenge_ones=sum(t.b for t in transcript.tuples),
        challenge_total=len(transcript.tuples),
        bell_pairs=pairs,
    )


def attack2_session(config: RunConfig, ctx: RunContext, rng: np.random.Generator) -> Counter:
    g0, g1, sigma = gen_instance(config.n_nodes, EDGE_DENSITY, rng)
    transcript, eve_accepts, pairs, qubits = a2_run_honest(GmwInstance(g0, g1, sigma, config.n_rounds),
                                                           ctx.params, rng)
    return Counter(
        eve_accept=int(eve_accepts),
        pairs_exact=int(pairs == config.n_rounds),
        challenge_ones=sum(t.b for t in transcript.tuples),
        challenge_total=len(transcript.tuples),
        bell_pairs=pairs,
        qubits=qubits,
    )


def _cheat_tally(result, eve_accepts: bool, pairs: int, n_rounds: int) -> Counter:
    tally = Counter(
        cheat_success=int(result.success),
        eve_accept=int(eve_accepts),
        parity_match=result.matched_rounds,
        rounds_total=n_rounds,
        collision_calls=result.collision_calls,
        bell_pairs=pairs,
    )
    if result.success:
        tally['verified_given_success'] += int(eve_accepts)
        tally['success_total'] += 1
    return tally


def attack1_cheat_session(config: RunConfig, ctx: RunContext, rng: np.random.Generator) -> Counter:
    g0, g1 = non_isomorphic_pair(config.n_nodes, rng)
    pool = SharedPairPool(config.n_rounds * ctx.params.width_bits)
    result = a1_cheat(g0, g1, ctx.params, pool, config.collision_budget, rng)
    eve_accepts = a1_eve_verify(pool, ctx.params, result.tuples, g0, g1, rng)
    return _cheat_tally(result, eve_accepts, pool.consumed_count, config.n_rounds)


def attack2_cheat_session(config: RunConfig, ctx: RunContext, rng: np.random.Generator) -> Counter:
    g0, g1 = non_isomorphic_pair(config.n_nodes, rng)
    pool = SharedPairPool(config.n_rounds)
    eve_qubits = eve_prepare_qubits(config.n_rounds, rng)
    result = a2_cheat(g0, g1, ctx.params, eve_qubits, pool, config.collision_budget, rng, config.collision_mode)
    eve_accepts = a2_eve_verify(result.challenges, ctx.params, result.tuples, g0, g1, rng)
    tally = _cheat_tally(result, eve_accepts, pool.consumed_count, config.n_rounds)
    tally['qubits'] += len(eve_qubits)
    return tally


def attack2_detect_session(config: RunConfig, ctx: RunContext, rng: np.random.Generator) -> Counter:
    # 每个模型各做一次传送；每次消耗一个 Bell 对和一个 Eve qubit
    tally = Counter({f'detect_{name}': a2_estimate_detection(name, ctx.params, 1, rng) for name in DETECTION_MODELS})
    tally['bell_pairs'] += len(DETECTION_MODELS)
    tally['qubits'] += len(DETECTION_MODELS)
    return tally


def _random_secret(m: int, rng: np.random.Generator) -> tuple[int, ...]:
    return tuple(int(b) for b in rng.integers(0, 2, size=m))


def splitshare_session(config: RunConfig, ctx: RunContext, rng: np.random.Generator) -> Counter:
    shares = charlie_setup(_random_secret(config.m, rng), rng)
    alice_ok, parity_bits, returned = alice_run(shares.s_a, shares.qubits, ctx.chunks,
                                                bob_responder(shares.s_b, ctx.chunks), rng)
    return Counter(
        alice_accept=int(alice_ok),
        charlie_accept=int(charlie_verify(shares, ctx.chunks, parity_bits, returned, rng)),
        shares_xor=int(all(a ^ b == c for a, b, c in zip(shares.s_a, shares.s_b, shares.s_c))),
        qubits=shares.m,
    )


def splitshare_impostor_session(config: RunConfig, ctx: RunContext, rng: np.random.Generator) -> Counter:
    shares = charlie_setup(_random_secret(config.m, rng), rng)
    alice_ok, _, _ = alice_run(shares.s_a, shares.qubits, ctx.chunks, impostor_responder(ctx.chunks), rng)
    return Counter(impostor_accept=int(alice_ok), qubits=shares.m)


def splitshare_snoop_session(config: RunConfig, ctx: RunContext, rng: np.random.Generator) -> Counter:
    shares = charlie_setup(_random_secret(config.m, rng), rng)
    _, parity_bits, returned = alice_run(shares.s_a, shares.qubits, ctx.chunks,
                                         bob_responder(shares.s_b, ctx.chunks), rng)
    guesses, disturbed = snooping_alice(shares.s_a, returned, ctx.chunks, rng)
    return Counter(
        charlie_reject=int(not charlie_verify(shares, ctx.chunks, parity_bits, disturbed, rng)),
        snoop_correct=sum(g == b for g, b in zip(guesses, shares.s_b)),
        snoop_total=shares.m,
        qubits=shares.m,
    )


SESSIONS = {
    'gmw': gmw_session,
    'attack1': attack1_session,
    'attack1-cheat': attack1_cheat_session,
    'attack2': attack2_session,
    'attack2-cheat': attack2_cheat_session,
    'attack2-detect': attack2_detect_session,
    'splitshare': splitshare_session,
    'splitshare-impostor': splitshare_impostor_session,
    'splitshare-snoop': splitshare_snoop_session,
}


def run_batch(config: RunConfig, seeds: list[np.random.SeedSequence]) -> Counter:
    """一批会话：每个会话用自己的子种子建 Generator，结果累加"""
    ctx = build_context(config)
    session = SESSIONS[config.experiment]
    total = Counter()
    for seed in seeds:
        total.update(session(config, ctx, np.random.default_rng(seed)))
    return total


def cheat_success_model(config: RunConfig, params: DigestParams) -> float:
    """
    作弊成功率的模型值

    bijective：碰撞不存在，只有每轮奇偶恰好一致才成功，2^-n。
    hash：按均匀摘要模型，一轮失败 = 需要碰撞 (1/2) × 预算内没找到 ((1 - 2^-w)^B)。
    signature：目标落在签名类 c 的概率和单次命中的概率都是 p_c，一轮失败 = 1/2 × Σ p_c (1 - p_c)^B，
    两种摘要模式相同。
    """
    if config.collision_mode == 'signature':
        dist = signature_class_distribution(params.width_bits)
        round_fail = 0.5 * sum(p * (1 - p) ** config.collision_budget for p in dist.values())
        return (1 - round_fail) ** config.n_rounds
    if params.mode == 'bijective':
        return 0.5 ** config.n_rounds
    round_fail = 0.5 * (1 - 2.0 ** -params.width_bits) ** config.collision_budget
    return (1 - round_fail) ** config.n_rounds


def _rate(name: str, tally: Counter, hits: str, total: str, model: float,
          claimed: float | None = None) -> list[Metric]:
    # 分母为 0 的指标（如 0 轮会话的挑战位）不出现在报告里
    if tally[total] == 0:
        return []
    return [binomial_metric(name, tally[hits], tally[total], model, claimed)]


def _per_trial(name: str, tally: Counter, hits: str, trials: int, model: float,
               claimed: float | None = None) -> list[Metric]:
    return [binomial_metric(name, tally[hits], trials, model, claimed)]


def summarize(config: RunConfig, tally: Counter) -> list[Metric]:
    """把累加计数转换成 (经验值, 模型值, 偏离) 指标"""
    trials = config.trials
    experiment = config.experiment
    metrics: list[Metric] = []

    if experiment == 'gmw':
        metrics += _per_trial('honest_acceptance', tally, 'honest_accept', trials, 1.0)
        metrics += _per_trial('cheat_acceptance', tally, 'cheat_accept', trials, 0.5 ** config.n_rounds)
        metrics += _rate('challenge_bit_one', tally, 'challenge_ones', 'challenge_total', 0.5)
        for i in range(N_BUCKETS):
            metrics += _rate(f'challenge_bit_one_bucket{i}', tally, f'bucket{i}_ones', f'bucket{i}_total', 0.5)
        return metrics

    if experiment in ('attack1', 'attack2'):
        metrics += _per_trial('eve_acceptance', tally, 'eve_accept', trials, 1.0)
        metrics += _per_trial('pair_consumption_exact', tally, 'pairs_exact', trials, 1.0)
        metrics += _rate('challenge_bit_one', tally, 'challenge_ones', 'challenge_total', 0.5)
        return metrics

    if experiment in ('attack1-cheat', 'attack2-cheat'):
        params = build_context(config).params
        model = cheat_success_model(config, params)
        metrics += _per_trial('cheat_success', tally, 'cheat_success', trials, model)
        metrics += _per_trial('eve_acceptance', tally, 'eve_accept', trials, model)
        metrics += _rate('verified_given_success', tally, 'verified_given_success', 'success_total', 1.0)
        metrics += _rate('parity_match', tally, 'parity_match', 'rounds_total', 0.5)
        return metrics

    if experiment == 'attack2-detect':
        params = build_context(config).params
        for name in DETECTION_MODELS:
            metrics += _per_trial(f'detection_{name}', tally, f'detect_{name}', trials,
                                  a2_detection_probability(name, params), CLAIMED_DETECTION)
        return metrics

    if experiment == 'splitshare':
        metrics += _per_trial('alice_acceptance', tally, 'alice_accept', trials, 1.0)
        metrics += _per_trial('charlie_acceptance', tally, 'charlie_accept', trials, 1.0)
        metrics += _per_trial('shares_xor_identity', tally, 'shares_xor', trials, 1.0)
        return metrics

    if experiment == 'splitshare-impostor':
        metrics += _per_trial('impostor_acceptance', tally, 'impostor_accept', trials, 0.75 ** config.m)
        return metrics

    if experiment == 'splitshare-snoop':
        metrics += _per_trial('snoop_detection', tally, 'charlie_reject', trials, 1 - 0.75 ** config.m)
        metrics += _rate('snoop_guess_accuracy', tally, 'snoop_correct', 'snoop_total', snoop_guess_accuracy())
        return metrics

    raise ValueError(f"未知实验: {experiment}")


def resources(config: RunConfig, tally: Counter) -> dict:
    """bell_pairs、qubits、collision_calls 是所有会话的总数，*_per_session 是平均到每个会话的值"""
    counters = {
        'bell_pairs': tally['bell_pairs'],
        'qubits': tally['qubits'],
        'collision_calls': tally['collision_calls'],
        'bell_pairs_per_session': tally['bell_pairs'] / config.trials,
        'qubits_per_session': tally['qubits'] / config.trials,
    }
    if config.experiment in ('attack1', 'attack1-cheat') and config.digest_mode == 'bijective':
        # 置换修正方案的 m·2^k 对数，只作为对照数字
        counters['permutation_fix_pairs'] = permutation_fix_pair_count(2, config.n_rounds)
    return counters
