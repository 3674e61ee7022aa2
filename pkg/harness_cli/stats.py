"""
二项统计：经验频率、模型值、偏离的标准差数、Wilson 置信区间
"""

import math
from dataclasses import dataclass

from scipy.stats import binomtest


@dataclass(frozen=True)
class Metric:
    name: str
    empirical_rate: float
    exact_or_model_value: float
    std_devs_off: float
    trials: int
    successes: int
    ci_low: float
    ci_high: float
    claimed_value: float | None = None

    def to_record(self) -> dict:
        record = {
            'name': self.name,
            'empirical_rate': self.empirical_rate,
            'exact_or_model_value': self.exact_or_model_value,
            'std_devs_off': self.std_devs_off,
            'trials': self.trials,
            'successes': self.successes,
            'ci_low': self.ci_low,
            'ci_high': self.ci_high,
        }
        if self.claimed_value is not None:
            record['claimed_value'] = self.claimed_value
        return record


def std_devs_off(successes: int, trials: int, model: float) -> float:
    """(经验频率 - 模型值) / 二项标准差；模型方差为 0 时，相等记 0，不等记 ±inf"""
    rate = successes / trials
    sd = math.sqrt(model * (1 - model) / trials)
    if sd == 0:
        return 0.0 if rate == model else math.copysign(math.inf, rate - model)
    return (rate - model) / sd


def binomial_metric(name: str, successes: int, trials: int, model: float,
                    claimed: float | None = None, confidence: float = 0.95) -> Metric:
    ci = binomtest(int(successes), int(trials)).proportion_ci(confidence_level=confidence, method='wilson')
    return Metric(
        name=name,
        empirical_rate=successes / trials,
        exact_or_model_value=model,
        std_devs_off=std_devs_off(successes, trials, model),
        trials=int(trials),
        successes=int(successes),
        ci_low=float(ci.low),
        ci_high=float(ci.high),
        claimed_value=claimed,
    )
