"""
V 上报错误传送比特时，Eve 的检测概率

错误上报等价于在 Eve 纠正后的态上多了一个 Pauli 误差：
翻转 d0 -> Z，翻转 d1 -> X，两个都翻转 -> Y（忽略全局相位）。
精确值通过枚举 θ × Bell 结果 × 上报掩码 × 比特序列 得到，蒙特卡洛估计必须与之一致。
"""

from itertools import product

import numpy as np

from digest.hash import DigestParams
from quantum_sim.gates import GateWord, apply_gate_word, invert_gate_word
from quantum_sim.states import (BB84_TAGS, BELL_OUTCOMES, Bb84Tag, correct_teleported, make_bell,
                                measure, outcome_distribution, prepare, teleport)


# 文中给出的检测概率
CLAIMED_DETECTION = 0.75
MAX_ENUM_WIDTH = 12
VALID_MASKS = frozenset(product((0, 1), repeat=2))

WRONG_BITS_MODELS = {
    'truthful': {(0, 0): 1.0},
    'flip-phase': {(1, 0): 1.0},
    'flip-parity': {(0, 1): 1.0},
    'flip-both': {(1, 1): 1.0},
    'uniform-wrong': {(1, 0): 1 / 3, (0, 1): 1 / 3, (1, 1): 1 / 3},
}


def resolve_model(model) -> dict[tuple[int, int], float]:
    """模型可以是名字，也可以是 {异或掩码: 概率} 字典"""
    if isinstance(model, str):
        if model not in WRONG_BITS_MODELS:
            raise ValueError(f"未知的错误比特模型: {model}，可选: {list(WRONG_BITS_MODELS)}")
        return WRONG_BITS_MODELS[model]
    dist = {tuple(int(x) for x in mask): float(p) for mask, p in dict(model).items()}
    if not dist or any(m not in VALID_MASKS for m in dist):
        raise ValueError(f"掩码必须是 (0/1, 0/1): {list(dist)}")
    if any(p < 0 for p in dist.values()) or abs(sum(dist.values()) - 1) > 1e-9:
        raise ValueError(f"概率必须非负且和为 1: {dist}")
    return dist


def all_words(width: int) -> list[GateWord]:
    if not 1 <= width <= MAX_ENUM_WIDTH:
        raise ValueError(f"枚举宽度必须在 1 和 {MAX_ENUM_WIDTH} 之间，当前值: {width}")
    return [GateWord(bits) for bits in product((0, 1), repeat=width)]


def _wrong_value_probability(theta: Bb84Tag, word: GateWord, receiver, reported) -> float:
    restored = invert_gate_word(word, correct_teleported(receiver, reported))
    p0, p1 = outcome_distribution(restored, 0, theta.basis_bit)
    return p1 if theta.value_bit == 0 else p0


def a2_detection_probability(model, params: DigestParams | None = None,
                             thetas=None, words=None) -> float:
    """
    精确检测概率

    Args:
        model: 错误比特模型（名字或掩码分布）
        params: 摘要参数，words 为空时按宽度枚举全部比特序列（均匀摘要模型）
        thetas: 参与枚举的 BB84 态，默认四个全取
        words: 参与枚举的比特序列

    Returns:
        P(Eve 的测量结果 != θ 的值)
    """
    dist = resolve_model(model)
    thetas = list(BB84_TAGS) if thetas is None else list(thetas)
    if words is None:
        if params is None:
            raise ValueError("需要 params 或 words 之一")
        words = all_words(params.width_bits)
    words = list(words)

    total = 0.0
    for theta, word in product(thetas, words):
        phi = apply_gate_word(word, prepare(theta))
        for true_outcome in BELL_OUTCOMES:
            # 每个 Bell 结果的概率都是 1/4，与输入无关
            _, receiver = teleport(phi, None, pair=make_bell(), forced=true_outcome)
            for mask, p_mask in dist.items():
                total += 0.25 * p_mask * _wrong_value_probability(theta, word, receiver, true_outcome.flipped(mask))
    return total / (len(thetas) * len(words))


def a2_estimate_detection(model, params: DigestParams, trials: int,
                          rng: np.random.Generator) -> int:
    """
    蒙特卡洛：随机 θ、随机比特序列、真实传送，按模型篡改上报比特
    :return: 检测到的次数
    """
    dist = resolve_model(model)
    masks = list(dist)
    probs = np.array([dist[m] for m in masks])
    detected = 0
    for _ in range(trials):
        theta = BB84_TAGS[int(rng.integers(0, 4))]
        word = GateWord(tuple(int(b) for b in rng.integers(0, 2, size=params.width_bits)))
        outcome, receiver = teleport(apply_gate_word(word, prepare(theta)), rng)
        mask = masks[int(rng.choice(len(masks), p=probs))]
        restored = invert_gate_word(word, correct_teleported(receiver, outcome.flipped(mask)))
        value, _ = measure(restored, 0, theta.basis_bit, rng)
        detected += value != theta.value_bit
    return detected
