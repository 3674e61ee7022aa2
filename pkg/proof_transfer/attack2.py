"""
基于隐形传态的证明转移

Eve 事先给 V 发送 n 个 BB84 态 |θ>，并与 V 共享 n 个 Bell 对。
每轮 V 用 C = h(H) 选出 U_C，把 U_C|θ> 传给 Eve，挑战位 b = d0 ⊕ d1。
Eve 事后纠正、作用 U_C 的逆，在 θ 的基下测量，应当得到 θ 的值；再检查 ξ(G_b) = H。
每轮只消耗 1 个 Bell 对。
"""

import logging
from dataclasses import dataclass

import numpy as np

from digest.hash import DigestParams, digest
from gmw_protocol.protocol import GmwInstance, prover_commit, prover_respond, verifier_check
from graph_iso.graph import Graph, apply_perm, random_perm
from proof_transfer.attack1 import repair_with_collision
from proof_transfer.pool import PoolExhaustedError, ProtocolAbortError, SharedPairPool
from proof_transfer.records import CheatResult, ProofTuple, Transcript
from quantum_sim.gates import GateWord, apply_gate_word, invert_gate_word
from quantum_sim.states import (Bb84Tag, BellOutcome, PureState, correct_teleported, measure, prepare,
                                state_to_record)


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EveQubits:
    """Eve 交给 V 的单 qubit 态；tags 只有 Eve 自己知道"""
    tags: tuple[Bb84Tag, ...]
    states: tuple[PureState, ...]

    def __len__(self):
        return len(self.states)


def eve_prepare_qubits(count: int, rng: np.random.Generator) -> EveQubits:
    tags = tuple(Bb84Tag(int(v), int(b)) for v, b in rng.integers(0, 2, size=(count, 2)))
    return EveQubits(tags, tuple(prepare(t) for t in tags))


@dataclass(frozen=True)
class TeleportChallenge:
    theta_tag: Bb84Tag
    word: GateWord
    outcome: BellOutcome
    receiver_state: PureState

    @property
    def b(self) -> int:
        return self.outcome.challenge_bit

    def to_record(self) -> dict:
        return {
            'word': str(self.word),
            'd0': self.outcome.d0,
            'd1': self.outcome.d1,
            'receiver': state_to_record(self.receiver_state),
        }


def a2_verifier_challenge(pool: SharedPairPool, eve_qubits: EveQubits, params: DigestParams,
                          h_graph: Graph, round_index: int, rng: np.random.Generator,
                          report_mask: tuple[int, int] = (0, 0)) -> TeleportChallenge:
    """
    V 的挑战：C = h(H)，|φ> = U_C|θ>，通过第 round_index 个 Bell 对传给 Eve

    Args:
        pool: 共享 Bell 对，按轮次顺序消耗
        eve_qubits: Eve 交给 V 的态
        params: 摘要参数
        h_graph: P 提交的 H
        round_index: 轮次
        rng: 随机数流
        report_mask: 对上报的经典比特做的异或（诚实时为 (0, 0)）

    Returns:
        TeleportChallenge，其中 outcome 是 V 上报给 Eve 的比特
    """
    if round_index >= len(eve_qubits):
        raise PoolExhaustedError(f"Eve 的 qubit 不足: 第 {round_index} 轮，共 {len(eve_qubits)} 个")
    word = GateWord(digest(params, h_graph).bits)
    phi = apply_gate_word(word, eve_qubits.states[round_index])

    index = pool.take(1)[0]
    if index != round_index:
        raise ProtocolAbortError(f"Bell 对下标 {index} 与轮次 {round_index} 不一致")
    outcome, receiver = pool.teleport_from(index, phi, rng)
    return TeleportChallenge(eve_qubits.tags[round_index], word, outcome.flipped(report_mask), receiver)


def a2_eve_verify(challenges: list[TeleportChallenge], params: DigestParams, tuples: list[ProofTuple],
                  g0: Graph, g1: Graph, rng: np.random.Generator) -> bool:
    """
    Eve 的验证：纠正 -> U_{C'}^{-1}（C' = h(H_k)）-> 在 θ 的基下测量，结果必须等于 θ 的值；
    再用传送得到的 b = d0 ⊕ d1 检查 ξ_k(G_b) = H_k
    """
    if len(challenges) != len(tuples):
        raise ProtocolAbortError(f"对齐失败: {len(challenges)} 次传送，{len(tuples)} 个元组")

    for k, (ch, tup) in enumerate(zip(challenges, tuples)):
        word = GateWord(digest(params, tup.h_graph).bits)
        restored = invert_gate_word(word, correct_teleported(ch.receiver_state, ch.outcome))
        value, _ = measure(restored, 0, ch.theta_tag.basis_bit, rng)
        if value != ch.theta_tag.value_bit:
            logger.debug(f"Eve 在第 {k} 轮的量子检查失败")
            return False
        if not verifier_check(g0, g1, tup.h_graph, ch.b, tup.xi):
            logger.debug(f"Eve 在第 {k} 轮的图检查失败")
            return False
    return True


def a2_run_honest(inst: GmwInstance, params: DigestParams,
                  rng: np.random.Generator) -> tuple[Transcript, bool, int, int]:
    """
    :return: (记录, Eve 是否接受, 消耗的 Bell 对数, 消耗的 Eve qubit 数)
    """
    pool = SharedPairPool(inst.n_rounds)
    eve_qubits = eve_prepare_qubits(inst.n_rounds, rng)
    transcript = Transcript(header={'attack': 'attack2', 'n_rounds': inst.n_rounds, 'digest': params.to_header()})
    challenges = []

    for k in range(inst.n_rounds):
        lam, h_graph = prover_commit(inst, rng)
        ch = a2_verifier_challenge(pool, eve_qubits, params, h_graph, k, rng)
        xi = prover_respond(inst, lam, ch.b)
        challenges.append(ch)
        transcript.add_round(
            ProofTuple(h_graph, xi, ch.b),
            pool_indices=[k, k + 1],
            v_accepted=verifier_check(inst.g0, inst.g1, h_graph, ch.b, xi),
            **ch.to_record(),
        )

    eve_accepts = a2_eve_verify(challenges, params, transcript.tuples, inst.g0, inst.g1, rng)
    return transcript, eve_accepts, pool.consumed_count, len(challenges)


def a2_cheat(g0: Graph, g1: Graph, params: DigestParams, eve_qubits: EveQubits, pool: SharedPairPool,
             collision_budget: int, rng: np.random.Generator, collision: str = 'digest') -> CheatResult:
    """
    V 没有和 P 交互，靠摘要碰撞伪造元组

    每轮：随机取 d 和 ξ: G_d -> H，用 h(H) 作用 U_C 后传送，得到 b。
    b = d 则发送 (H, ξ, d)；否则找 h(H') = h(H) 的 G_{d̄} 同构像，发送 (H', ξ', d̄)。
    V 总是如实上报传送比特。因为 h(H') = h(H)，Eve 作用的逆仍能还原 θ。

    collision='signature' 时只要求 h(H') 与 h(H) 得到同一个集合 S：
    U_{C'}^{-1} U_C 在四个 BB84 态上只差全局相位，Eve 的测量不受影响。bijective 摘要也挡不住这种碰撞。
    """
    graphs = (g0, g1)
    tuples, challenges = [], []
    calls = matched = failed = 0

    for k in range(len(eve_qubits)):
        d = int(rng.integers(0, 2))
        xi = random_perm(g0.n, rng)
        h_graph = apply_perm(xi, graphs[d])
        ch = a2_verifier_challenge(pool, eve_qubits, params, h_graph, k, rng)
        challenges.append(ch)
        if ch.b == d:
            matched += 1
            tuples.append(ProofTuple(h_graph, xi, d))
            continue
        found, tries = repair_with_collision(params, graphs[1 - d], digest(params, h_graph), rng,
                                             collision_budget, collision)
        calls += tries
        if found:
            tuples.append(ProofTuple(found[1], found[0], 1 - d))
        else:
            failed += 1
            logger.debug(f"碰撞预算用完，第 {k} 轮作弊失败")
            tuples.append(ProofTuple(h_graph, xi, d))

    return CheatResult(tuples, failed == 0, calls, matched, failed, challenges)
