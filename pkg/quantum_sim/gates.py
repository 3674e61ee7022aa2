"""
经典比特序列控制的单 qubit 酉变换 U_C

bit 0 -> X，bit 1 -> H，按从左到右的顺序依次作用
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from quantum_sim.states import BB84_TAGS, GATE_H, GATE_X, PureState, prepare


SIGNATURE_DECIMALS = 9


@dataclass(frozen=True)
class GateWord:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if len(bits) < 1:
            raise ValueError("GateWord 长度至少为 1")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"GateWord 只能包含 0/1: {bits}")
        object.__setattr__(self, 'bits', bits)

    @classmethod
    def from_string(cls, text: str) -> 'GateWord':
        return cls(tuple(int(c) for c in text))

    def __str__(self):
        return ''.join(str(b) for b in self.bits)


@lru_cache(maxsize=4096)
def _word_matrix(bits: tuple[int, ...]) -> np.ndarray:
    u = np.eye(2, dtype=complex)
    for b in bits:
        u = (GATE_H if b else GATE_X) @ u
    return u


def _check_single(state: PureState):
    if state.n_qubits != 1:
        raise ValueError("U_C 只作用于单 qubit 态")


def apply_gate_word(word: GateWord, state: PureState) -> PureState:
    """U_C|θ> = |φ>"""
    _check_single(state)
    return PureState(_word_matrix(word.bits) @ state.amps)


def invert_gate_word(word: GateWord, state: PureState) -> PureState:
    """逆序作用各门的逆；X、H 都是自逆的"""
    _check_single(state)
    u_inv = _word_matrix(tuple(reversed(word.bits)))
    return PureState(u_inv @ state.amps)


def canonical_state(state: PureState) -> tuple[tuple[float, float], ...]:
    """去掉全局相位：第一个非零振幅转为正实数，再按固定精度取整"""
    amps = state.amps
    for a in amps:
        if abs(a) > 1e-9:
            amps = amps * (np.conj(a) / abs(a))
            break
    rounded = np.round(amps, SIGNATURE_DECIMALS)
    # + 0.0 把 -0.0 归一成 0.0
    return tuple((float(z.real) + 0.0, float(z.imag) + 0.0) for z in rounded)


def _matrix_signature(u: np.ndarray) -> frozenset:
    return frozenset(
        ((tag.value_bit, tag.basis_bit), canonical_state(PureState(u @ prepare(tag).amps)))
        for tag in BB84_TAGS
    )


def gate_word_signature(word: GateWord) -> frozenset:
    """
    集合 S = {(|θ>, U_C|θ>)}，θ 取遍四个 BB84 态

    两个比特序列碰撞 ⇔ 签名相等
    """
    return _matrix_signature(_word_matrix(word.bits))


@lru_cache(maxsize=128)
def signature_class_distribution(width: int) -> dict[frozenset, float]:
    """
    均匀随机的 width 位序列落在各签名类里的精确概率

    签名决定了 U_C 在全局相位意义下的矩阵，所以逐位递推即可，不用枚举 2^width 个序列
    """
    if width < 1:
        raise ValueError(f"width 必须 >= 1，当前值: {width}")
    classes = {_matrix_signature(np.eye(2, dtype=complex)): (np.eye(2, dtype=complex), 1.0)}
    for _ in range(width):
        step: dict[frozenset, tuple[np.ndarray, float]] = {}
        for u, p in classes.values():
            for gate in (GATE_X, GATE_H):
                v = gate @ u
                sig = _matrix_signature(v)
                step[sig] = (step[sig][0], step[sig][1] + p / 2) if sig in step else (v, p / 2)
        classes = step
    return {sig: p for sig, (_, p) in classes.items()}
