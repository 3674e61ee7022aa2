"""
约定的摘要函数 h：图 -> w 位比特序列

两种模式：
- hash：HMAC-SHA256(key, canonical_bytes(g)) 截断到 w 位，存在碰撞
- bijective：对 canonical_bytes 做 AES-CTR 密钥流异或 + 固定的比特置换，是双射，不存在碰撞
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from Crypto.Cipher import AES
from Crypto.Hash import HMAC, SHA256

from digest.key_manager import key_to_seed
from graph_iso.graph import Graph, canonical_bit_length, canonical_bytes, graph_from_canonical_bytes


MODES = ('hash', 'bijective')
MAX_HASH_WIDTH = 64
DEFAULT_WIDTH = 8


@dataclass(frozen=True)
class DigestParams:
    width_bits: int
    mode: str = 'hash'
    key: bytes = b''
    n_nodes: int | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"未知的摘要模式: {self.mode}，可选: {MODES}")
        if self.mode == 'hash':
            if not 1 <= self.width_bits <= MAX_HASH_WIDTH:
                raise ValueError(f"hash 模式的宽度必须在 1 和 {MAX_HASH_WIDTH} 之间，当前值: {self.width_bits}")
        else:
            if self.n_nodes is None:
                raise ValueError("bijective 模式必须给出节点数")
            expected = canonical_bit_length(self.n_nodes)
            if self.width_bits != expected:
                raise ValueError(f"bijective 模式的宽度必须等于编码位长 {expected}，当前值: {self.width_bits}")

    def to_header(self) -> dict:
        return {
            'mode': self.mode,
            'width': self.width_bits,
            'key': self.key.hex(),
            'construction': 'HMAC-SHA256/truncate' if self.mode == 'hash' else 'AES-CTR-xor/bit-permutation',
        }


def make_params(mode: str, n_nodes: int, key: bytes, width: int = DEFAULT_WIDTH) -> DigestParams:
    """bijective 模式下宽度由节点数决定，忽略 width"""
    if mode == 'bijective':
        return DigestParams(canonical_bit_length(n_nodes), mode, key, n_nodes)
    return DigestParams(width, mode, key, n_nodes)


@dataclass(frozen=True)
class BitSeq:
    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'bits', tuple(int(b) for b in self.bits))

    def __len__(self):
        return len(self.bits)

    def __iter__(self):
        return iter(self.bits)

    def __getitem__(self, i):
        return self.bits[i]

    def __xor__(self, other: 'BitSeq') -> 'BitSeq':
        if len(self) != len(other):
            raise ValueError(f"长度不匹配: {len(self)} != {len(other)}")
        return BitSeq(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def __str__(self):
        return ''.join(str(b) for b in self.bits)

    @classmethod
    def from_string(cls, text: str) -> 'BitSeq':
        return cls(tuple(int(c) for c in text))


def parity(b) -> int:
    """所有位的异或"""
    return sum(b) & 1


def _hash_digest(params: DigestParams, data: bytes) -> BitSeq:
    mac = HMAC.new(params.key, digestmod=SHA256)
    mac.update(data)
    value = int.from_bytes(mac.digest(), 'big') >> (256 - params.width_bits)
    return BitSeq(tuple((value >> (params.width_bits - 1 - i)) & 1 for i in range(params.width_bits)))


@lru_cache(maxsize=64)
def _bijection_tables(key: bytes, n_bits: int) -> tuple[np.ndarray, np.ndarray]:
    # 密钥流 + 比特置换，两步都可逆
    cipher = AES.new(SHA256.new(key).digest(), AES.MODE_CTR, nonce=bytes(8))
    stream = np.unpackbits(np.frombuffer(cipher.encrypt(bytes(n_bits // 8)), dtype=np.uint8))
    perm = np.random.default_rng(key_to_seed(key)).permutation(n_bits)
    return stream, perm


def _bijective_digest(params: DigestParams, data: bytes) -> BitSeq:
    stream, perm = _bijection_tables(params.key, params.width_bits)
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8)) ^ stream
    return BitSeq(tuple(int(b) for b in bits[perm]))


def digest(params: DigestParams, g: Graph) -> BitSeq:
    """
    h(g)
    :param params: 摘要参数
    :param g: 图
    :return: w 位 BitSeq
    """
    if params.mode == 'hash':
        return _hash_digest(params, canonical_bytes(g))
    if g.n != params.n_nodes:
        raise ValueError(f"bijective 摘要参数针对 {params.n_nodes} 个节点，图有 {g.n} 个节点")
    return _bijective_digest(params, canonical_bytes(g))


def undigest(params: DigestParams, seq: BitSeq) -> Graph:
    """bijective 模式的逆映射；seq 不是任何图的像时抛 ValueError"""
    if params.mode != 'bijective':
        raise ValueError("只有 bijective 模式可逆")
    if len(seq) != params.width_bits:
        raise ValueError(f"长度不匹配: {len(seq)} != {params.width_bits}")
    stream, perm = _bijection_tables(params.key, params.width_bits)
    bits = np.empty(params.width_bits, dtype=np.uint8)
    bits[perm] = np.array(seq.bits, dtype=np.uint8)
    return graph_from_canonical_bytes(np.packbits(bits ^ stream).tobytes())


def permutation_fix_pair_count(k_graphs: int, repetitions: int) -> int:
    """用置换代替哈希时文中给出的二分态数量 m·2^k，只作为报告值，不作推导"""
    return repetitions * 2 ** k_graphs
