"""
运行报告及其序列化（json / csv-summary）

浮点数统一保留 12 位有效数字；inf、nan 写成字符串，保证 JSON 合法。
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from harness_cli.stats import Metric


CSV_COLUMNS = ('name', 'empirical_rate', 'exact_or_model_value', 'std_devs_off', 'trials', 'ci_low', 'ci_high')
SIGNIFICANT_DIGITS = 12


@dataclass
class RunReport:
    config: dict
    metrics: list[Metric] = field(default_factory=list)
    resources: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_record(self, include_wall_time: bool = True) -> dict:
        record = {
            'config': self.config,
            'metrics': [m.to_record() for m in self.metrics],
            'resources': self.resources,
        }
        if include_wall_time:
            record['wall_time'] = self.wall_time
        return _normalize(record)


def format_float(x: float) -> float | str:
    if not math.isfinite(x):
        return str(x)
    return float(f"{x:.{SIGNIFICANT_DIGITS}g}")


def _normalize(value):
    if isinstance(value, bool) or isinstance(value, int) or value is None or isinstance(value, str):
        return value
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, dict):
        return {k: _normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    # numpy 标量
    if hasattr(value, 'item'):
        return _normalize(value.item())
    raise TypeError(f"无法序列化的字段类型: {type(value).__name__}")


def emit_report(report: RunReport, fmt: str = 'json') -> bytes:
    """
    序列化报告

    Args:
        report: 运行报告
        fmt: 'json' 或 'csv-summary'（每个指标一行，没有指标时只有表头）

    Returns:
        UTF-8 字节流
    """
    if fmt == 'json':
        return (json.dumps(report.to_record(), indent=2, ensure_ascii=False) + '\n').encode('utf-8')
    if fmt == 'csv-summary':
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, extrasaction='ignore', lineterminator='\n')
        writer.writeheader()
        for row in report.to_record()['metrics']:
            writer.writerow(row)
        return buffer.getvalue().encode('utf-8')
    raise ValueError(f"未知的报告格式: {fmt}")


def write_report(report: RunReport, path, fmt: str = 'json') -> Path:
    """写入文件，父目录不存在时自动创建；I/O 失败直接抛 OSError"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(emit_report(report, fmt))
    return path
