"""
GMW 图同构零知识协议（P 与 V 之间），以及不知道 σ 的作弊证明者

每一轮：
1. P 随机取 λ，发送 H = λ(G0)
2. V 随机发送挑战位 b
3. P 回复 ξ = λ ∘ σ^b
4. V 检查 ξ(G_b) = H
"""

import json
from dataclasses import dataclass

import numpy as np

from digest.hash import DigestParams, digest
from graph_iso.graph import (Graph, Permutation, apply_perm, check_sizes, compose, graph_to_record,
                             random_perm)


@dataclass(frozen=True)
class GmwInstance:
    g0: Graph
    g1: Graph
    sigma: Permutation
    n_rounds: int

    def __post_init__(self):
        if apply_perm(self.sigma, self.g1) != self.g0:
            raise ValueError("σ(G1) != G0，实例不合法")
        if self.n_rounds < 0:
            raise ValueError(f"n_rounds 不能为负，当前值: {self.n_rounds}")


@dataclass(frozen=True)
class RoundRecord:
    h_graph: Graph
    challenge_bit: int
    xi: Permutation
    accepted: bool

    def to_record(self, round_index: int) -> dict:
        return {
            'round': round_index,
            'H': graph_to_record(self.h_graph),
            'b': self.challenge_bit,
            'xi': list(self.xi.mapping),
            'accepted': self.accepted,
        }


def prover_commit(inst: GmwInstance, rng: np.random.Generator,
                  lam: Permutation | None = None) -> tuple[Permutation, Graph]:
    """λ 均匀随机，H = λ(G0)；lam 可强制指定（测试用）"""
    lam = random_perm(inst.g0.n, rng) if lam is None else lam
    return lam, apply_perm(lam, inst.g0)


def prover_respond(inst: GmwInstance, lam: Permutation, b: int) -> Permutation:
    """ξ = λ ∘ σ^b"""
    return compose(lam, inst.sigma) if b else lam


def verifier_check(g0: Graph, g1: Graph, h_graph: Graph, b: int, xi: Permutation) -> bool:
    """ξ(G_b) = H，精确比较邻接矩阵"""
    g_b = g1 if b else g0
    check_sizes(g_b.n, h_graph.n)
    check_sizes(xi.n, h_graph.n)
    return apply_perm(xi, g_b) == h_graph


def verifier_challenge(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2))


def run_honest(inst: GmwInstance, rng: np.random.Generator) -> list[RoundRecord]:
    """完整的诚实会话，返回 n_rounds 条记录"""
    records = []
    for _ in range(inst.n_rounds):
        lam, h_graph = prover_commit(inst, rng)
        b = verifier_challenge(rng)
        xi = prover_respond(inst, lam, b)
        records.append(RoundRecord(h_graph, b, xi, verifier_check(inst.g0, inst.g1, h_graph, b, xi)))
    return records


def run_cheating_prover(g0: Graph, g1: Graph, n_rounds: int,
                        rng: np.random.Generator) -> tuple[list[RoundRecord], bool]:
    """
    不知道 σ 的证明者：每轮先猜 b'，提交 H = ρ(G_b')，只有 V 的 b 恰好等于 b' 时才能通过

    V 一旦拒绝就结束会话，所以记录条数可能少于 n_rounds
    :return: (记录, 是否全部通过)
    """
    records = []
    for _ in range(n_rounds):
        guess = int(rng.integers(0, 2))
        rho = random_perm(g0.n, rng)
        h_graph = apply_perm(rho, g1 if guess else g0)
        b = verifier_challenge(rng)
        accepted = verifier_check(g0, g1, h_graph, b, rho)
        records.append(RoundRecord(h_graph, b, rho, accepted))
        if not accepted:
            return records, False
    return records, True


def challenge_independence(records: list[RoundRecord], params: DigestParams,
                           n_buckets: int = 4) -> list[tuple[int, int]]:
    """
    按 H 的摘要分桶，统计每个桶里的 (b=1 次数, 总次数)

    挑战位与 H 独立时，每个桶的频率都应接近 1/2
    """
    table = [[0, 0] for _ in range(n_buckets)]
    for rec in records:
        bucket = int(''.join(str(b) for b in digest(params, rec.h_graph)), 2) % n_buckets
        table[bucket][0] += rec.challenge_bit
        table[bucket][1] += 1
    return [tuple(row) for row in table]


def transcript_lines(records: list[RoundRecord]) -> list[str]:
    return [json.dumps(rec.to_record(i)) for i, rec in enumerate(records)]

