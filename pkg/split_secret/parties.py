"""
Alice 识别 Bob：逐段把 qubit 交给应答者，核对应答中的 S_A 位

应答者可以是真正的 Bob（知道 S_B，即知道每个 qubit 的基），也可以是冒充者。
另外给出偷看 S_B 的 Alice，用来检验 Charlie 能否发现扰动。
"""

from dataclasses import dataclass
from itertools import product
from typing import Callable

import numpy as np

from quantum_sim.states import BB84_TAGS, Bb84Tag, PureState, measure, outcome_distribution, prepare
from split_secret.shares import ChunkConfig


@dataclass(frozen=True)
class ChunkResponse:
    s_a_chunk: tuple[int, ...]
    parity_bit: int
    returned_qubits: tuple[PureState, ...]


Responder = Callable[[list[PureState], int, np.random.Generator], ChunkResponse]


def _measure_and_reprepare(qubit: PureState, basis_bit: int, rng: np.random.Generator) -> tuple[int, PureState]:
    # 用“测量后按结果重新制备”代替量子非破坏测量；基正确时不扰动
    value, _ = measure(qubit, 0, basis_bit, rng)
    return value, prepare(Bb84Tag(value, basis_bit))


def bob_respond(chunk_qubits, chunk_index: int, shares_b, cfg: ChunkConfig,
                rng: np.random.Generator) -> ChunkResponse:
    """
    真正的 Bob：按 S_B 的基测量，得到 S_A 这一段，重新制备后交还

    Args:
        chunk_qubits: 这一段的 qubit
        chunk_index: 段号
        shares_b: Bob 的 S_B（全长）
        cfg: 分段配置
        rng: 随机数流
    """
    chunk_qubits = list(chunk_qubits)
    if len(chunk_qubits) != cfg.chunk_len:
        raise ValueError(f"这一段应有 {cfg.chunk_len} 个 qubit，收到 {len(chunk_qubits)} 个")
    s_b_chunk = [shares_b[j] for j in cfg.chunk_range(chunk_index)]

    values, returned = [], []
    for qubit, basis in zip(chunk_qubits, s_b_chunk):
        value, state = _measure_and_reprepare(qubit, basis, rng)
        values.append(value)
        returned.append(state)
    return ChunkResponse(tuple(values), cfg.chunk_parity(values, s_b_chunk), tuple(returned))


def impostor_respond(chunk_qubits, cfg: ChunkConfig, rng: np.random.Generator) -> ChunkResponse:
    """冒充者：随机选基测量并重新制备，奇偶位随机猜"""
    chunk_qubits = list(chunk_qubits)
    if len(chunk_qubits) != cfg.chunk_len:
        raise ValueError(f"这一段应有 {cfg.chunk_len} 个 qubit，收到 {len(chunk_qubits)} 个")
    values, returned = [], []
    for qubit in chunk_qubits:
        value, state = _measure_and_reprepare(qubit, int(rng.integers(0, 2)), rng)
        values.append(value)
        returned.append(state)
    return ChunkResponse(tuple(values), int(rng.integers(0, 2)), tuple(returned))


def bob_responder(shares_b, cfg: ChunkConfig) -> Responder:
    shares_b = tuple(shares_b)

    def respond(chunk_qubits, chunk_index, rng):
        return bob_respond(chunk_qubits, chunk_index, shares_b, cfg, rng)
    return respond


def impostor_responder(cfg: ChunkConfig) -> Responder:
    def respond(chunk_qubits, chunk_index, rng):
        return impostor_respond(chunk_qubits, cfg, rng)
    return respond


def alice_run(s_a, qubits, cfg: ChunkConfig, responder: Responder,
              rng: np.random.Generator) -> tuple[bool, list[int], list[PureState]]:
    """
    Alice 逐段询问应答者；所有段的 S_A 位都对上才认定对方是 Bob

    :return: (是否接受, (b_1..b_k), 交还的全部 qubit)
    """
    qubits = list(qubits)
    accept = True
    parity_bits, returned = [], []
    for i in range(cfg.k):
        chunk = cfg.chunk_range(i)
        response = responder([qubits[j] for j in chunk], i, rng)
        if tuple(response.s_a_chunk) != tuple(s_a[j] for j in chunk):
            accept = False
        parity_bits.append(response.parity_bit)
        returned.extend(response.returned_qubits)
    return accept, parity_bits, returned


def snooping_alice(s_a, qubits, cfg: ChunkConfig,
                   rng: np.random.Generator) -> tuple[tuple[int, ...], list[PureState]]:
    """
    想偷看 S_B 的 Alice：随机选基测量每个 qubit

    推断规则：结果与 S_A 相符就猜测量用的基，不符就猜另一个基（不符说明基选错了）
    :return: (猜测的 S_B, 她交给 Charlie 的被扰动序列)
    """
    qubits = list(qubits)
    if len(qubits) != cfg.m:
        raise ValueError(f"应有 {cfg.m} 个 qubit，收到 {len(qubits)} 个")
    guesses, disturbed = [], []
    for known, qubit in zip(s_a, qubits):
        basis = int(rng.integers(0, 2))
        value, state = _measure_and_reprepare(qubit, basis, rng)
        guesses.append(basis if value == known else 1 - basis)
        disturbed.append(state)
    return tuple(guesses), disturbed


def _random_basis_outcomes():
    # 枚举 (真实态, 测量基, 结果) 及其概率
    for tag, basis in product(BB84_TAGS, (0, 1)):
        probs = outcome_distribution(prepare(tag), 0, basis)
        for value in (0, 1):
            yield tag, basis, value, 0.25 * 0.5 * probs[value]


def impostor_bit_accuracy() -> float:
    """冒充者每个 qubit 报对 S_A 位的精确概率"""
    return sum(p for tag, _, value, p in _random_basis_outcomes() if value == tag.value_bit)


def wrong_basis_detection() -> float:
    """随机基测量并重新制备后，Charlie 在制备基下发现异常的精确概率"""
    total = 0.0
    for tag, basis, value, p in _random_basis_outcomes():
        p0, p1 = outcome_distribution(prepare(Bb84Tag(value, basis)), 0, tag.basis_bit)
        total += p * (p1 if tag.value_bit == 0 else p0)
    return total


def snoop_guess_accuracy() -> float:
    """snooping_alice 的推断规则猜对 S_B 单个位的精确概率"""
    return sum(p for tag, basis, value, p in _random_basis_outcomes()
               if (basis if value == tag.value_bit else 1 - basis) == tag.basis_bit)
