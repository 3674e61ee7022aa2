from dataclasses import asdict, dataclass

from digest.collision import COLLISION_MODES
from digest.hash import MAX_HASH_WIDTH, MODES
from proof_transfer.detection import MAX_ENUM_WIDTH
from split_secret.shares import MAX_CHUNK_LEN


EXPERIMENTS = (
    'gmw',
    'attack1',
    'attack1-cheat',
    'attack2',
    'attack2-cheat',
    'attack2-detect',
    'splitshare',
    'splitshare-impostor',
    'splitshare-snoop',
)

REPORT_FORMATS = ('json', 'csv-summary')

DEFAULTS = {
    'nodes': 8,
    'rounds': 8,
    'digest_width': 8,
    'digest_mode': 'hash',
    'm': 32,
    'k': 4,
    'trials': 10 ** 4,
    'seed': 42,
    'collision_budget': 10 ** 5,
    'workers': 1,
    'format': 'json',
    'collision': 'digest',
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    n_nodes: int = DEFAULTS['nodes']
    n_rounds: int = DEFAULTS['rounds']
    digest_width: int = DEFAULTS['digest_width']
    digest_mode: str = DEFAULTS['digest_mode']
    m: int = DEFAULTS['m']
    k: int = DEFAULTS['k']
    trials: int = DEFAULTS['trials']
    seed: int = DEFAULTS['seed']
    output_path: str | None = None
    report_format: str = DEFAULTS['format']
    collision_budget: int = DEFAULTS['collision_budget']
    key_hex: str | None = None
    workers: int = DEFAULTS['workers']
    collision_mode: str = DEFAULTS['collision']

    def validate(self) -> 'RunConfig':
        """按实验检查参数，不合法时抛 ConfigError"""
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"未知实验: {self.experiment}，可选: {EXPERIMENTS}")
        if self.trials < 1:
            raise ConfigError(f"trials 必须 >= 1，当前值: {self.trials}")
        if self.workers < 1:
            raise ConfigError(f"workers 必须 >= 1，当前值: {self.workers}")
        if self.report_format not in REPORT_FORMATS:
            raise ConfigError(f"未知的报告格式: {self.report_format}")
        if self.key_hex is not None:
            try:
                bytes.fromhex(self.key_hex)
            except ValueError:
                raise ConfigError(f"密钥必须是十六进制字符串: {self.key_hex}")

        if self.experiment.startswith('splitshare'):
            if self.m < 1 or self.k < 1 or self.m % self.k:
                raise ConfigError(f"k 必须整除 m，当前值: m={self.m}, k={self.k}")
            if self.m // self.k > MAX_CHUNK_LEN:
                raise ConfigError(f"m/k 最大为 {MAX_CHUNK_LEN}，当前值: {self.m // self.k}")
            return self

        if self.n_nodes < 2:
            raise ConfigError(f"nodes 必须 >= 2，当前值: {self.n_nodes}")
        if self.n_rounds < 0:
            raise ConfigError(f"rounds 不能为负，当前值: {self.n_rounds}")
        if self.digest_mode not in MODES:
            raise ConfigError(f"未知的摘要模式: {self.digest_mode}，可选: {MODES}")
        if self.digest_mode == 'hash' and not 1 <= self.digest_width <= MAX_HASH_WIDTH:
            raise ConfigError(f"digest-width 必须在 1 和 {MAX_HASH_WIDTH} 之间，当前值: {self.digest_width}")
        if self.collision_budget < 0:
            raise ConfigError(f"collision-budget 不能为负，当前值: {self.collision_budget}")
        if self.collision_mode not in COLLISION_MODES:
            raise ConfigError(f"未知的碰撞模式: {self.collision_mode}，可选: {COLLISION_MODES}")
        if self.collision_mode == 'signature' and self.experiment != 'attack2-cheat':
            raise ConfigError("signature 碰撞只适用于 attack2-cheat")
        if self.experiment == 'attack2-detect':
            if self.digest_mode != 'hash' or self.digest_width > MAX_ENUM_WIDTH:
                raise ConfigError(f"attack2-detect 需要 hash 模式且宽度 <= {MAX_ENUM_WIDTH}")
        return self

    def to_record(self) -> dict:
        record = asdict(self)
        # 输出路径不影响结果，不写进报告
        record.pop('output_path')
        return record
