from datetime import datetime

from harness_cli.config import EXPERIMENTS, RunConfig
from harness_cli.runner import run


time_start = datetime.now()


#
# 代码主体 CODES
#
for experiment in EXPERIMENTS:
    t0 = datetime.now()
    report = run(RunConfig(experiment=experiment, n_rounds=4, m=8, k=2, trials=200, collision_budget=10 ** 4))
    worst = max((abs(m.std_devs_off) for m in report.metrics), default=0.0)
    print(f"⏱️  {experiment:<20} {datetime.now() - t0}  最大偏离 {worst:.2f}σ")


time_end = datetime.now()

print()
print('------------------------')
print(f"| 耗时 = {time_end - time_start} |" )
print('------------------------')
