"""
V 与 Eve 事先共享的 Bell 对

每一对里 qubit 0 属于 V，qubit 1 属于 Eve。双方按下标顺序同步消耗。
"""

import numpy as np

from quantum_sim.states import BellOutcome, PureState, make_bell, measure, teleport


class PoolExhaustedError(RuntimeError):
    pass


class ProtocolAbortError(RuntimeError):
    pass


class SharedPairPool:
    def __init__(self, size: int):
        if size < 0:
            raise ValueError(f"size 不能为负，当前值: {size}")
        self.pairs: list[PureState] = [make_bell() for _ in range(size)]
        self.consumed_count = 0
        self.eve_cursor = 0
        self._verifier_used = set()
        self._eve_used = set()

    def __len__(self):
        return len(self.pairs)

    @property
    def remaining(self) -> int:
        return len(self.pairs) - self.consumed_count

    def take(self, count: int) -> range:
        """V 侧按顺序取出 count 个对"""
        if count > self.remaining:
            raise PoolExhaustedError(f"共享对不足: 需要 {count}，剩余 {self.remaining}")
        indices = range(self.consumed_count, self.consumed_count + count)
        self.consumed_count += count
        return indices

    def eve_take(self, count: int) -> range:
        """Eve 侧按同样顺序取出 count 个对，不能超过 V 已经用掉的部分"""
        if self.eve_cursor + count > self.consumed_count:
            raise ProtocolAbortError(
                f"Eve 与 V 的消耗不一致: Eve 需要到 {self.eve_cursor + count}，V 只用到 {self.consumed_count}")
        indices = range(self.eve_cursor, self.eve_cursor + count)
        self.eve_cursor += count
        return indices

    def _mark(self, used: set, index: int, party: str):
        if index in used:
            raise ProtocolAbortError(f"{party} 重复测量第 {index} 对")
        used.add(index)

    def measure_verifier(self, index: int, basis_bit: int, rng: np.random.Generator) -> int:
        self._mark(self._verifier_used, index, 'V')
        outcome, self.pairs[index] = measure(self.pairs[index], 0, basis_bit, rng)
        return outcome

    def measure_eve(self, index: int, basis_bit: int, rng: np.random.Generator) -> int:
        self._mark(self._eve_used, index, 'Eve')
        outcome, self.pairs[index] = measure(self.pairs[index], 1, basis_bit, rng)
        return outcome

    def teleport_from(self, index: int, input_state: PureState,
                      rng: np.random.Generator) -> tuple[BellOutcome, PureState]:
        """V 用第 index 对把 input_state 传给 Eve，返回 (测量结果, Eve 手里未纠正的态)"""
        self._mark(self._verifier_used, index, 'V')
        return teleport(input_state, rng, pair=self.pairs[index])
