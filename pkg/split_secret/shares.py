"""
Charlie 的秘密拆分与最终验证

S_A ⊕ S_B = S_C；第 i 个 qubit 的值位是 S_A[i]，基位是 S_B[i]。
Alice 拿到 S_A 和 m 个 qubit，Bob 拿到 S_B。
"""

from dataclasses import dataclass

import numpy as np

from digest.hash import parity
from digest.key_manager import key_to_seed
from quantum_sim.states import Bb84Tag, PureState, measure, prepare


MAX_CHUNK_LEN = 20


@dataclass(frozen=True)
class SecretShares:
    s_c: tuple[int, ...]
    s_a: tuple[int, ...]
    s_b: tuple[int, ...]
    qubits: tuple[PureState, ...]
    tags: tuple[Bb84Tag, ...]

    @property
    def m(self) -> int:
        return len(self.s_c)


@dataclass(frozen=True)
class ChunkConfig:
    """
    m 个 qubit 分成 k 段，每段 chunk_len = m/k 个；f 是 chunk_len 位串上的公开双射（查表）
    """
    m: int
    k: int
    chunk_len: int
    f_table: tuple[int, ...]
    f_inverse: tuple[int, ...]

    def chunk_range(self, chunk_index: int) -> range:
        if not 0 <= chunk_index < self.k:
            raise ValueError(f"chunk 下标越界: {chunk_index} (共 {self.k} 段)")
        return range(chunk_index * self.chunk_len, (chunk_index + 1) * self.chunk_len)

    def f(self, bits) -> tuple[int, ...]:
        bits = tuple(bits)
        if len(bits) != self.chunk_len:
            raise ValueError(f"f 的输入长度必须是 {self.chunk_len}，当前值: {len(bits)}")
        value = self.f_table[int(''.join(str(b) for b in bits), 2)]
        return tuple((value >> (self.chunk_len - 1 - i)) & 1 for i in range(self.chunk_len))

    def chunk_parity(self, s_a_chunk, s_b_chunk) -> int:
        """parity(f(S_A_i ⊕ S_B_i))"""
        return parity(self.f(a ^ b for a, b in zip(s_a_chunk, s_b_chunk)))


def make_chunk_config(m: int, k: int, key: bytes) -> ChunkConfig:
    """
    由公共密钥派生 f 的置换表
    :param m: qubit 总数
    :param k: 段数，必须整除 m
    :param key: 三方约定的密钥
    """
    if m < 1 or k < 1 or m % k:
        raise ValueError(f"k 必须整除 m，当前值: m={m}, k={k}")
    chunk_len = m // k
    if chunk_len > MAX_CHUNK_LEN:
        raise ValueError(f"chunk_len 最大为 {MAX_CHUNK_LEN}，当前值: {chunk_len}")
    table = np.random.default_rng(key_to_seed(key)).permutation(2 ** chunk_len)
    inverse = np.empty_like(table)
    inverse[table] = np.arange(table.size)
    return ChunkConfig(m, k, chunk_len, tuple(int(x) for x in table), tuple(int(x) for x in inverse))


def charlie_setup(s_c, rng: np.random.Generator) -> SecretShares:
    """S_B 均匀随机，S_A = S_C ⊕ S_B，qubit 按 (S_A[i], S_B[i]) 制备"""
    s_c = tuple(int(b) for b in s_c)
    if not s_c:
        raise ValueError("秘密不能为空")
    s_b = tuple(int(b) for b in rng.integers(0, 2, size=len(s_c)))
    s_a = tuple(c ^ b for c, b in zip(s_c, s_b))
    tags = tuple(Bb84Tag(a, b) for a, b in zip(s_a, s_b))
    return SecretShares(s_c, s_a, s_b, tuple(prepare(t) for t in tags), tags)


def charlie_verify(shares: SecretShares, cfg: ChunkConfig, parity_bits, returned_qubits,
                   rng: np.random.Generator) -> bool:
    """
    Charlie 检查 (b_1..b_k) 是否正确，再在制备基下重新测量每个返回的 qubit

    被错误基扰动过的 qubit 仍有 1/2 的概率通过，这是单拷贝测量的极限
    """
    parity_bits = list(parity_bits)
    returned_qubits = list(returned_qubits)
    if len(parity_bits) != cfg.k or len(returned_qubits) != shares.m:
        return False

    for i in range(cfg.k):
        chunk = cfg.chunk_range(i)
        expected = cfg.chunk_parity((shares.s_a[j] for j in chunk), (shares.s_b[j] for j in chunk))
        if parity_bits[i] != expected:
            return False

    for tag, qubit in zip(shares.tags, returned_qubits):
        value, _ = measure(qubit, 0, tag.basis_bit, rng)
        if value != tag.value_bit:
            return False
    return True
