"""
n 个节点的无向简单图与节点置换

Graph.adj 是只读的 n×n 0/1 矩阵；Permutation.mapping 是 {0..n-1} 上的双射。
canonical_bytes 是带标号的编码（同构但标号不同的图编码不同）。
"""

from dataclasses import dataclass
from itertools import product

import numpy as np


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    adj: np.ndarray

    def __post_init__(self):
        adj = np.array(self.adj, dtype=np.uint8)
        if adj.shape != (self.n, self.n):
            raise ValueError(f"邻接矩阵形状应为 ({self.n}, {self.n})，当前: {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise ValueError("邻接矩阵必须对称")
        if np.any(np.diag(adj)):
            raise ValueError("邻接矩阵对角线必须为 0")
        if np.any(adj > 1):
            raise ValueError("邻接矩阵只能包含 0/1")
        adj.setflags(write=False)
        object.__setattr__(self, 'adj', adj)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash(canonical_bytes(self))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={edge_list(self)})"


@dataclass(frozen=True)
class Permutation:
    mapping: tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(i) for i in self.mapping)
        if sorted(mapping) != list(range(len(mapping))):
            raise ValueError(f"不是双射: {mapping}")
        object.__setattr__(self, 'mapping', mapping)

    @property
    def n(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i]


def check_sizes(a: int, b: int):
    if a != b:
        raise ValueError(f"尺寸不匹配: {a} != {b}")


def identity_perm(n: int) -> Permutation:
    return Permutation(tuple(range(n)))


def graph_from_edges(n: int, edges) -> Graph:
    adj = np.zeros((n, n), dtype=np.uint8)
    for i, j in edges:
        adj[i, j] = adj[j, i] = 1
    return Graph(n, adj)


def edge_list(g: Graph) -> list[tuple[int, int]]:
    rows, cols = np.triu_indices(g.n, k=1)
    return [(int(i), int(j)) for i, j in zip(rows, cols) if g.adj[i, j]]


def edge_count(g: Graph) -> int:
    return int(np.sum(g.adj)) // 2


def degree_multiset(g: Graph) -> tuple[int, ...]:
    return tuple(sorted(int(d) for d in g.adj.sum(axis=1)))


def toggle_edge(g: Graph, i: int, j: int) -> Graph:
    if i == j:
        raise ValueError("自环不允许")
    adj = g.adj.copy()
    adj[i, j] ^= 1
    adj[j, i] ^= 1
    return Graph(g.n, adj)


def apply_perm(p: Permutation, g: Graph) -> Graph:
    """
    重新标号：g 中的边 (i, j) ⇔ 结果中的边 (p(i), p(j))
    """
    check_sizes(p.n, g.n)
    idx = np.array(p.mapping, dtype=np.intp)
    adj = np.zeros_like(g.adj)
    adj[np.ix_(idx, idx)] = g.adj
    return Graph(g.n, adj)


def compose(outer: Permutation, inner: Permutation) -> Permutation:
    """result(i) = outer(inner(i))"""
    check_sizes(outer.n, inner.n)
    return Permutation(tuple(outer.mapping[i] for i in inner.mapping))


def invert(p: Permutation) -> Permutation:
    inv = [0] * p.n
    for i, target in enumerate(p.mapping):
        inv[target] = i
    return Permutation(tuple(inv))


def random_perm(n: int, rng: np.random.Generator) -> Permutation:
    """均匀随机置换（numpy 的无偏洗牌）"""
    if n < 1:
        raise ValueError(f"n 必须 >= 1，当前值: {n}")
    return Permutation(tuple(int(i) for i in rng.permutation(n)))


def random_graph(n: int, edge_density: float, rng: np.random.Generator) -> Graph:
    if not 0 < edge_density < 1:
        raise ValueError(f"edge_density 必须在 0 和 1 之间，当前值: {edge_density}")
    upper = np.triu((rng.random((n, n)) < edge_density).astype(np.uint8), k=1)
    return Graph(n, upper + upper.T)


def gen_instance(n: int, edge_density: float, rng: np.random.Generator,
                 sigma: Permutation | None = None) -> tuple[Graph, Graph, Permutation]:
    """
    生成 GMW 实例 (G0, G1, σ)，满足 σ(G1) = G0

    Args:
        n: 节点数，>= 2
        edge_density: 每条边出现的概率
        rng: 随机数流
        sigma: 强制指定 σ（测试用）

    Returns:
        (G0, G1, σ)
    """
    if n < 2:
        raise ValueError(f"n 必须 >= 2，当前值: {n}")
    g0 = random_graph(n, edge_density, rng)
    sigma = random_perm(n, rng) if sigma is None else sigma
    check_sizes(sigma.n, n)
    g1 = apply_perm(invert(sigma), g0)
    return g0, g1, sigma


def _upper_bits(g: Graph) -> np.ndarray:
    rows, cols = np.triu_indices(g.n, k=1)
    return g.adj[rows, cols]


def canonical_bytes(g: Graph) -> bytes:
    """4 字节大端 n + 上三角邻接位（按行，高位在前，末尾补 0 对齐）"""
    return g.n.to_bytes(4, 'big') + np.packbits(_upper_bits(g)).tobytes()


def canonical_bit_length(n: int) -> int:
    upper = n * (n - 1) // 2
    return 8 * (4 + (upper + 7) // 8)


def graph_from_canonical_bytes(data: bytes) -> Graph:
    """canonical_bytes 的逆；格式不合法时抛 ValueError"""
    if len(data) < 4:
        raise ValueError("编码太短")
    n = int.from_bytes(data[:4], 'big')
    if n < 1 or len(data) * 8 != canonical_bit_length(n):
        raise ValueError(f"编码长度与 n={n} 不符")
    upper_len = n * (n - 1) // 2
    bits = np.unpackbits(np.frombuffer(data[4:], dtype=np.uint8))
    if np.any(bits[upper_len:]):
        raise ValueError("补齐位必须为 0")
    adj = np.zeros((n, n), dtype=np.uint8)
    rows, cols = np.triu_indices(n, k=1)
    adj[rows, cols] = bits[:upper_len]
    return Graph(n, adj + adj.T)


def graph_to_record(g: Graph) -> dict:
    return {'n': g.n, 'upper': np.packbits(_upper_bits(g)).tobytes().hex()}


def graph_from_record(record: dict) -> Graph:
    n = int(record['n'])
    return graph_from_canonical_bytes(n.to_bytes(4, 'big') + bytes.fromhex(record['upper']))


def all_graphs(n: int):
    """枚举 n 个节点上的全部带标号图（2^(n(n-1)/2) 个），只适合很小的 n"""
    rows, cols = np.triu_indices(n, k=1)
    for bits in product((0, 1), repeat=len(rows)):
        adj = np.zeros((n, n), dtype=np.uint8)
        adj[rows, cols] = bits
        yield Graph(n, adj + adj.T)
