"""
基于共享 Bell 对的证明转移

V 用 h(H) 的每一位选择测量基，测得 R，挑战位 b = parity(R)。
事后 Eve 用同样的基测量自己那一半，得到 b'，再检查 ξ(G_b') = H。
每轮消耗 w 个 Bell 对，n 轮共 n·w 个（w = n 时即 n²）。
"""

import logging

import numpy as np

from digest.collision import CollisionNotFoundError, find_isomorph_with_digest
from digest.hash import BitSeq, DigestParams, digest, parity
from gmw_protocol.protocol import GmwInstance, prover_commit, prover_respond, verifier_check
from graph_iso.graph import Graph, apply_perm, random_perm
from proof_transfer.pool import ProtocolAbortError, SharedPairPool
from proof_transfer.records import CheatResult, ProofTuple, Transcript


logger = logging.getLogger(__name__)


def _measure_by_digest(pool: SharedPairPool, params: DigestParams, h_graph: Graph,
                       rng: np.random.Generator) -> tuple[range, str, list[int]]:
    bases = digest(params, h_graph)
    indices = pool.take(len(bases))
    results = [pool.measure_verifier(i, basis, rng) for i, basis in zip(indices, bases)]
    return indices, str(bases), results


def repair_with_collision(params: DigestParams, base: Graph, target: BitSeq, rng: np.random.Generator,
                          collision_budget: int, collision: str = 'digest') -> tuple[tuple | None, int]:
    """
    在 base 的同构像里找与 target 碰撞的图（collision 见 find_isomorph_with_digest）
    :return: ((ξ', H') 或 None, 花掉的尝试次数)
    """
    if collision_budget < 1:
        return None, 0
    try:
        xi_prime, h_prime, tries = find_isomorph_with_digest(params, base, target, rng, collision_budget, collision)
    except CollisionNotFoundError as e:
        return None, e.tries
    return (xi_prime, h_prime), tries


def a1_verifier_challenge(pool: SharedPairPool, params: DigestParams, h_graph: Graph,
                          rng: np.random.Generator) -> int:
    """
    V 的挑战位：B = h(H)，第 i 对按 B_i 选基测量，返回 R 的奇偶

    Raises:
        PoolExhaustedError: 剩余的对少于 w
    """
    _, _, results = _measure_by_digest(pool, params, h_graph, rng)
    return parity(results)


def a1_eve_verify(pool: SharedPairPool, params: DigestParams, tuples: list[ProofTuple],
                  g0: Graph, g1: Graph, rng: np.random.Generator) -> bool:
    """
    Eve 的验证：对每个 (H_k, ξ_k, b_k)，用 h(H_k) 选基测量自己那一半，得到 b'，检查 ξ_k(G_b') = H_k

    元组里的 b 不参与判断，b' 由 Eve 自己测出

    Raises:
        ProtocolAbortError: 元组数与 V 消耗的对数对不上
    """
    w = params.width_bits
    if len(tuples) * w != pool.consumed_count - pool.eve_cursor:
        raise ProtocolAbortError(
            f"对齐失败: {len(tuples)} 个元组需要 {len(tuples) * w} 对，V 消耗了 {pool.consumed_count - pool.eve_cursor} 对")

    for k, tup in enumerate(tuples):
        bases = digest(params, tup.h_graph)
        indices = pool.eve_take(w)
        b_prime = parity(pool.measure_eve(i, basis, rng) for i, basis in zip(indices, bases))
        if not verifier_check(g0, g1, tup.h_graph, b_prime, tup.xi):
            logger.debug(f"Eve 拒绝第 {k} 轮: b'={b_prime}")
            return False
    return True


def a1_run_honest(inst: GmwInstance, params: DigestParams,
                  rng: np.random.Generator) -> tuple[Transcript, bool, int]:
    """
    P 与 V 完整交互（挑战位来自 a1_verifier_challenge），之后 Eve 验证

    :return: (记录, Eve 是否接受, 实际消耗的 Bell 对数)
    """
    pool = SharedPairPool(inst.n_rounds * params.width_bits)
    transcript = Transcript(header={'attack': 'attack1', 'n_rounds': inst.n_rounds, 'digest': params.to_header()})

    for _ in range(inst.n_rounds):
        lam, h_graph = prover_commit(inst, rng)
        indices, bases, results = _measure_by_digest(pool, params, h_graph, rng)
        b = parity(results)
        xi = prover_respond(inst, lam, b)
        transcript.add_round(
            ProofTuple(h_graph, xi, b),
            bases=bases,
            results=''.join(str(r) for r in results),
            pool_indices=[indices.start, indices.stop],
            v_accepted=verifier_check(inst.g0, inst.g1, h_graph, b, xi),
        )

    eve_accepts = a1_eve_verify(pool, params, transcript.tuples, inst.g0, inst.g1, rng)
    return transcript, eve_accepts, pool.consumed_count


def a1_cheat(g0: Graph, g1: Graph, params: DigestParams, pool: SharedPairPool,
             collision_budget: int, rng: np.random.Generator) -> CheatResult:
    """
    V 没有和 P 交互，靠摘要碰撞伪造元组

    每轮：随机取 c 和 ξ: G_c -> H，按 h(H) 测量得到 parity(R)。
    与 c 相等则发送 (H, ξ, c)；否则在 G_{c̄} 的同构像中找 h(H') = h(H)，发送 (H', ξ', c̄)。
    找不到碰撞时该轮失败，仍发送 (H, ξ, c)。

    轮数由 pool 的剩余容量决定：len(pool) // w

    Args:
        g0, g1: 公共图
        params: 摘要参数
        pool: 与 Eve 共享的对
        collision_budget: 每轮碰撞搜索的最大尝试次数
        rng: 随机数流

    Returns:
        CheatResult
    """
    n_rounds = pool.remaining // params.width_bits
    graphs = (g0, g1)
    tuples = []
    calls = matched = failed = 0

    for _ in range(n_rounds):
        c = int(rng.integers(0, 2))
        xi = random_perm(g0.n, rng)
        h_graph = apply_perm(xi, graphs[c])
        if a1_verifier_challenge(pool, params, h_graph, rng) == c:
            matched += 1
            tuples.append(ProofTuple(h_graph, xi, c))
            continue
        found, tries = repair_with_collision(params, graphs[1 - c], digest(params, h_graph), rng, collision_budget)
        calls += tries
        if found:
            tuples.append(ProofTuple(found[1], found[0], 1 - c))
        else:
            failed += 1
            logger.debug(f"碰撞预算用完，第 {len(tuples)} 轮作弊失败")
            tuples.append(ProofTuple(h_graph, xi, c))

    return CheatResult(tuples, failed == 0, calls, matched, failed)
