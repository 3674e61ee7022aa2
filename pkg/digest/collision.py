"""
暴力碰撞搜索：在 base 的随机同构像里找摘要等于 target 的图

digest 模式要求摘要逐位相等；signature 模式只要求两个摘要作为 U_C 时得到同一个集合 S
"""

import logging

import numpy as np

from digest.hash import BitSeq, DigestParams, digest, undigest
from graph_iso.graph import Graph, Permutation, apply_perm, degree_multiset, edge_count, random_perm
from quantum_sim.gates import GateWord, gate_word_signature


logger = logging.getLogger(__name__)

COLLISION_MODES = ('digest', 'signature')


class CollisionNotFoundError(LookupError):
    def __init__(self, tries: int):
        super().__init__(f"在 {tries} 次尝试内未找到碰撞")
        self.tries = tries


def _preimage_could_be_isomorph(params: DigestParams, base: Graph, target: BitSeq) -> bool:
    # bijective 模式下 target 的原像唯一，先用同构不变量排除
    try:
        preimage = undigest(params, target)
    except ValueError:
        return False
    return (preimage.n == base.n
            and edge_count(preimage) == edge_count(base)
            and degree_multiset(preimage) == degree_multiset(base))


def find_isomorph_with_digest(params: DigestParams, base: Graph, target: BitSeq,
                              rng: np.random.Generator, max_tries: int,
                              collision: str = 'digest') -> tuple[Permutation, Graph, int]:
    """
    随机采样 ξ'，直到 h(ξ'(base)) 与 target 碰撞

    Args:
        params: 摘要参数
        base: 要取同构像的图（作弊时是 G_{c̄}）
        target: 目标摘要
        rng: 随机数流
        max_tries: 最多尝试次数
        collision: 'digest' 要求 h(H') = target；'signature' 要求两者的 U_C 签名相同

    Returns:
        (ξ', H', 实际尝试次数)

    Raises:
        CollisionNotFoundError: 预算用完仍未找到
    """
    if max_tries < 1:
        raise ValueError(f"max_tries 必须 >= 1，当前值: {max_tries}")
    if collision not in COLLISION_MODES:
        raise ValueError(f"未知的碰撞模式: {collision}，可选: {COLLISION_MODES}")

    if collision == 'signature':
        wanted = gate_word_signature(GateWord(target.bits))

        def hit(candidate: Graph) -> bool:
            return gate_word_signature(GateWord(digest(params, candidate).bits)) == wanted
    else:
        if params.mode == 'bijective' and not _preimage_could_be_isomorph(params, base, target):
            raise CollisionNotFoundError(0)

        def hit(candidate: Graph) -> bool:
            return digest(params, candidate) == target

    for tries in range(1, max_tries + 1):
        xi = random_perm(base.n, rng)
        candidate = apply_perm(xi, base)
        if hit(candidate):
            logger.debug(f"碰撞命中({collision})，尝试次数 {tries}")
            return xi, candidate, tries

    raise CollisionNotFoundError(max_tries)
