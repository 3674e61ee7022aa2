"""
小寄存器(1~3 qubit)的精确态矢量模拟

约定：
- qubit 0 是最高位，|q0 q1 q2> 对应下标 q0*4 + q1*2 + q2
- BB84 编码：|0>、|+> 表示 bit 0；|1>、|-> 表示 bit 1
- basis_bit = 0 为直角基 {|0>,|1>}，basis_bit = 1 为对角基 {|+>,|->}
- Bell 测量结果 (d0, d1)：d0 是相位位，d1 是奇偶位
"""

from dataclasses import dataclass

import numpy as np


NORM_TOL = 1e-12
SQRT2_INV = 1 / np.sqrt(2)

GATE_X = np.array([[0, 1], [1, 0]], dtype=complex)
GATE_Z = np.array([[1, 0], [0, -1]], dtype=complex)
GATE_H = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT2_INV


@dataclass(frozen=True, eq=False)
class PureState:
    """不可变的纯态，amps 长度为 2、4 或 8"""
    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size not in (2, 4, 8):
            raise ValueError(f"态矢量维度必须是 2、4 或 8，当前值: {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise ValueError(f"态矢量含非有限振幅: {amps}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"态矢量未归一化: |amps|^2 = {norm}")
        amps.setflags(write=False)
        object.__setattr__(self, 'amps', amps)

    @property
    def dim(self) -> int:
        return self.amps.size

    @property
    def n_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def __repr__(self):
        return f"PureState({np.round(self.amps, 6).tolist()})"


@dataclass(frozen=True)
class Bb84Tag:
    value_bit: int
    basis_bit: int

    def __post_init__(self):
        if self.value_bit not in (0, 1) or self.basis_bit not in (0, 1):
            raise ValueError(f"Bb84Tag 的两个字段必须是 0/1: {self}")


@dataclass(frozen=True)
class BellOutcome:
    d0: int
    d1: int

    def __post_init__(self):
        if self.d0 not in (0, 1) or self.d1 not in (0, 1):
            raise ValueError(f"BellOutcome 的两个字段必须是 0/1: {self}")

    @property
    def challenge_bit(self) -> int:
        return self.d0 ^ self.d1

    def flipped(self, mask: tuple[int, int]) -> 'BellOutcome':
        return BellOutcome(self.d0 ^ mask[0], self.d1 ^ mask[1])


BB84_TAGS = tuple(Bb84Tag(v, b) for b in (0, 1) for v in (0, 1))
BELL_OUTCOMES = tuple(BellOutcome(d0, d1) for d1 in (0, 1) for d0 in (0, 1))

# Bell 基：(d0, d1) -> 向量
BELL_VECTORS = {
    BellOutcome(0, 0): np.array([1, 0, 0, 1], dtype=complex) * SQRT2_INV,
    BellOutcome(1, 0): np.array([1, 0, 0, -1], dtype=complex) * SQRT2_INV,
    BellOutcome(0, 1): np.array([0, 1, 1, 0], dtype=complex) * SQRT2_INV,
    BellOutcome(1, 1): np.array([0, 1, -1, 0], dtype=complex) * SQRT2_INV,
}


def _check_index(state: PureState, qubit_index: int):
    if not 0 <= qubit_index < state.n_qubits:
        raise IndexError(f"qubit 下标越界: {qubit_index} (共 {state.n_qubits} 个 qubit)")


def _apply_single(amps: np.ndarray, n_qubits: int, qubit: int, gate: np.ndarray) -> np.ndarray:
    psi = amps.reshape(2 ** qubit, 2, 2 ** (n_qubits - qubit - 1))
    return np.einsum('ij,ajb->aib', gate, psi).reshape(-1)


def _split(amps: np.ndarray, n_qubits: int, qubit: int) -> np.ndarray:
    return amps.reshape(2 ** qubit, 2, 2 ** (n_qubits - qubit - 1))


def prepare(tag: Bb84Tag) -> PureState:
    """
    制备 BB84 态
    :param tag: (value_bit, basis_bit)
    :return: |0>、|1>、|+> 或 |->
    """
    if tag.basis_bit == 0:
        amps = np.zeros(2, dtype=complex)
        amps[tag.value_bit] = 1
        return PureState(amps)
    sign = -1 if tag.value_bit else 1
    return PureState(np.array([SQRT2_INV, sign * SQRT2_INV], dtype=complex))


def outcome_distribution(state: PureState, qubit_index: int, basis_bit: int) -> tuple[float, float]:
    """Born 规则下的精确概率 (P(0), P(1))，所有蒙特卡洛检验都以它为准"""
    _check_index(state, qubit_index)
    amps = state.amps
    if basis_bit:
        amps = _apply_single(amps, state.n_qubits, qubit_index, GATE_H)
    view = _split(amps, state.n_qubits, qubit_index)
    p0 = float(np.sum(np.abs(view[:, 0, :]) ** 2))
    p1 = float(np.sum(np.abs(view[:, 1, :]) ** 2))
    total = p0 + p1
    return p0 / total, p1 / total


def measure(state: PureState, qubit_index: int, basis_bit: int, rng: np.random.Generator) -> tuple[int, PureState]:
    """
    在给定基下测量一个 qubit

    Args:
        state: 输入态
        qubit_index: 被测 qubit
        basis_bit: 0 直角基，1 对角基
        rng: 会话自己的随机数流

    Returns:
        (结果 bit, 塌缩并重新归一化后的态)
    """
    _check_index(state, qubit_index)
    n = state.n_qubits
    amps = state.amps
    if basis_bit:
        amps = _apply_single(amps, n, qubit_index, GATE_H)
    view = _split(amps, n, qubit_index)
    p0 = float(np.sum(np.abs(view[:, 0, :]) ** 2))
    p1 = float(np.sum(np.abs(view[:, 1, :]) ** 2))
    # 概率为 0 的分支不会被选中
    outcome = 0 if rng.random() < p0 / (p0 + p1) else 1

    collapsed = np.zeros_like(view)
    collapsed[:, outcome, :] = view[:, outcome, :]
    collapsed = collapsed.reshape(-1)
    collapsed /= np.linalg.norm(collapsed)
    if basis_bit:
        collapsed = _apply_single(collapsed, n, qubit_index, GATE_H)
    return outcome, PureState(collapsed)


def make_bell() -> PureState:
    """(|00> + |11>)/√2"""
    return PureState(BELL_VECTORS[BellOutcome(0, 0)])


def _check_pair(state: PureState, qubit_a: int, qubit_b: int):
    if state.n_qubits < 2:
        raise ValueError("Bell 测量至少需要 2 个 qubit")
    _check_index(state, qubit_a)
    _check_index(state, qubit_b)
    if qubit_a == qubit_b:
        raise ValueError(f"Bell 测量的两个下标不能相同: {qubit_a}")


def bell_project(state: PureState, qubit_a: int, qubit_b: int,
                 outcome: BellOutcome) -> tuple[float, PureState | None]:
    """把 (a, b) 投影到指定的 Bell 向量上，返回 (概率, 塌缩态)；概率为 0 时塌缩态为 None"""
    _check_pair(state, qubit_a, qubit_b)
    n = state.n_qubits
    psi = np.moveaxis(state.amps.reshape((2,) * n), (qubit_a, qubit_b), (0, 1))
    rest_shape = psi.shape[2:]
    psi = psi.reshape(4, -1)

    vec = BELL_VECTORS[outcome]
    coeff = vec.conj() @ psi
    prob = float(np.sum(np.abs(coeff) ** 2))
    if prob < 1e-15:
        return 0.0, None

    projected = np.outer(vec, coeff / np.sqrt(prob)).reshape((2, 2) + rest_shape)
    projected = np.moveaxis(projected, (0, 1), (qubit_a, qubit_b))
    return prob, PureState(projected.reshape(-1))


def bell_outcome_distribution(state: PureState, qubit_a: int, qubit_b: int) -> dict[BellOutcome, float]:
    return {o: bell_project(state, qubit_a, qubit_b, o)[0] for o in BELL_OUTCOMES}


def bell_measure(state: PureState, qubit_a: int, qubit_b: int,
                 rng: np.random.Generator) -> tuple[BellOutcome, PureState]:
    """
    Bell 基测量
    :return: (BellOutcome, 塌缩态)
    """
    dist = bell_outcome_distribution(state, qubit_a, qubit_b)
    r = rng.random()
    acc = 0.0
    chosen = BELL_OUTCOMES[-1]
    for outcome in BELL_OUTCOMES:
        acc += dist[outcome]
        if r < acc:
            chosen = outcome
            break
    # 浮点累加误差可能落到概率为 0 的分支上
    if dist[chosen] < 1e-15:
        chosen = max(dist, key=dist.get)
    _, collapsed = bell_project(state, qubit_a, qubit_b, chosen)
    return chosen, collapsed


def teleport(input_state: PureState, rng: np.random.Generator,
             pair: PureState | None = None,
             forced: BellOutcome | None = None) -> tuple[BellOutcome, PureState]:
    """
    隐形传态：input ⊗ pair，对 (0, 1) 做 Bell 测量，返回接收方 qubit 2 未经纠正的态

    Args:
        input_state: 待传送的单 qubit 态
        rng: 随机数流
        pair: 共享的 Bell 对（qubit 0 归发送方），默认新建一对
        forced: 强制选定的测量分支（用于穷举检验）

    Returns:
        (BellOutcome, 接收方态)。对接收方态先施加 Z^d0 再施加 X^d1 即可恢复输入态
    """
    if input_state.n_qubits != 1:
        raise ValueError("teleport 只接受单 qubit 输入")
    pair = make_bell() if pair is None else pair
    if pair.n_qubits != 2:
        raise ValueError("teleport 需要一个 2 qubit 的共享对")

    joint = PureState(np.kron(input_state.amps, pair.amps))
    if forced is None:
        outcome, collapsed = bell_measure(joint, 0, 1, rng)
    else:
        prob, collapsed = bell_project(joint, 0, 1, forced)
        if collapsed is None:
            raise ValueError(f"强制分支 {forced} 的概率为 0")
        outcome = forced

    receiver = BELL_VECTORS[outcome].conj() @ collapsed.amps.reshape(4, 2)
    receiver /= np.linalg.norm(receiver)
    return outcome, PureState(receiver)


def correct_teleported(state: PureState, outcome: BellOutcome) -> PureState:
    """接收方纠正：先 Z^d0，再 X^d1"""
    amps = state.amps
    if outcome.d0:
        amps = GATE_Z @ amps
    if outcome.d1:
        amps = GATE_X @ amps
    return PureState(amps)


def fidelity(a: PureState, b: PureState) -> float:
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


def state_to_record(state: PureState) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in state.amps]


def state_from_record(record: list[list[float]]) -> PureState:
    return PureState(np.array([complex(re, im) for re, im in record]))
