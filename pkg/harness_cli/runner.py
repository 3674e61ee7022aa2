"""
蒙特卡洛实验的命令行入口

每个试验的种子来自 SeedSequence(seed).spawn(trials)，批次可以串行或多进程执行，
计数按可交换的方式累加，因此同一配置的报告（除 wall_time 外）逐字节一致。
"""

import argparse
import binascii
import logging
import os
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor, as_completed

import numpy as np
from tqdm import tqdm

from digest.key_manager import generate_and_save_key, load_key
from harness_cli.config import DEFAULTS, EXPERIMENTS, REPORT_FORMATS, ConfigError, RunConfig
from harness_cli.pipeline import resolve_key, resources, run_batch, summarize
from harness_cli.report import RunReport, emit_report, write_report


logger = logging.getLogger(__name__)

BATCH_SIZE = 250


def setup_logging(directory: str) -> None:
    """
    配置日志系统，日志写到 directory/harness.log

    :param directory: 日志目录，不存在时自动创建
    """
    os.makedirs(directory, exist_ok=True)
    log_file = os.path.join(directory, "harness.log")
    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s [%(levelname)s] %(message)s",
        handlers=[logging.FileHandler(log_file, mode='w', encoding='utf-8')]
    )


def derive_seeds(seed: int, trials: int) -> list[np.random.SeedSequence]:
    """第 i 个试验的种子 = 主种子派生出的第 i 个子序列，两两不同"""
    return np.random.SeedSequence(seed).spawn(trials)


def _batches(seeds: list, size: int) -> list[list]:
    return [seeds[i:i + size] for i in range(0, len(seeds), size)]


def run(config: RunConfig, quiet: bool = True) -> RunReport:
    """
    执行 config.trials 个独立会话并汇总

    Args:
        config: 运行配置，会先做校验
        quiet: 为 True 时不显示进度条

    Returns:
        RunReport

    Raises:
        ConfigError: 配置不合法
    """
    config.validate()
    batches = _batches(derive_seeds(config.seed, config.trials), BATCH_SIZE)
    tally = Counter()
    logger.info(f"开始实验 {config.experiment}: trials={config.trials}, workers={config.workers}")

    start_time = time.time()
    with tqdm(total=config.trials, desc=config.experiment, unit="trial", disable=quiet) as pbar:
        if config.workers > 1 and len(batches) > 1:
            with ProcessPoolExecutor(max_workers=config.workers) as executor:
                futures = {executor.submit(run_batch, config, batch): len(batch) for batch in batches}
                for future in as_completed(futures):
                    tally.update(future.result())
                    pbar.update(futures[future])
        else:
            for batch in batches:
                tally.update(run_batch(config, batch))
                pbar.update(len(batch))
    duration = time.time() - start_time

    record = config.to_record()
    record['digest_key'] = resolve_key(config).hex()
    report = RunReport(record, summarize(config, tally), resources(config, tally), duration)
    logger.info(f"实验 {config.experiment} 完成，耗时 {duration:.2f} 秒")
    return report


def print_summary(report: RunReport) -> None:
    # 报告可能写到 stdout，摘要统一走 stderr
    out = sys.stderr
    print(f"\n🎉 实验完成: {report.config['experiment']}", file=out)
    print(f"⏱️  耗时: {report.wall_time:.2f}秒", file=out)
    for m in report.metrics:
        line = (f"📊 {m.name}: {m.empirical_rate:.6g} (模型 {m.exact_or_model_value:.6g}, "
                f"偏离 {m.std_devs_off:.3g}σ, n={m.trials})")
        if m.claimed_value is not None:
            line += f" 文中声称 {m.claimed_value}"
        if abs(m.std_devs_off) > 4:
            line = "⚠️ " + line
        print(line, file=out)
    print(f"🔗 资源: {report.resources}", file=out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description='GMW 图同构零知识证明与量子证明转移的蒙特卡洛实验',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog='''
使用示例:
  python main.py --experiment gmw --rounds 8 --trials 100000
  python main.py --experiment attack1-cheat --digest-width 8 --trials 1000 --workers 4
  python main.py --experiment attack2-detect --trials 100000 --format csv-summary --out out/detect.csv
  python main.py --experiment splitshare-impostor --m 8 --k 2 --trials 100000
  python main.py --generate-key digest.key
        '''
    )
    parser.add_argument('--experiment', choices=EXPERIMENTS, help='实验名称')
    parser.add_argument('--nodes', type=int, default=DEFAULTS['nodes'], help='图的节点数，默认8')
    parser.add_argument('--rounds', type=int, default=DEFAULTS['rounds'], help='协议轮数，默认8')
    parser.add_argument('--digest-width', type=int, default=DEFAULTS['digest_width'], help='摘要位数(hash模式)，默认8')
    parser.add_argument('--digest-mode', default=DEFAULTS['digest_mode'], help='摘要模式 hash | bijective，默认hash')
    parser.add_argument('--m', type=int, default=DEFAULTS['m'], help='秘密长度，默认32')
    parser.add_argument('--k', type=int, default=DEFAULTS['k'], help='分段数，默认4')
    parser.add_argument('--trials', type=int, default=DEFAULTS['trials'], help='试验次数，默认10000')
    parser.add_argument('--seed', type=int, default=DEFAULTS['seed'], help='主随机种子，默认42')
    parser.add_argument('--out', default=None, help='报告输出路径，默认写到标准输出')
    parser.add_argument('--format', default=DEFAULTS['format'], choices=REPORT_FORMATS, help='报告格式，默认json')
    parser.add_argument('--collision-budget', type=int, default=DEFAULTS['collision_budget'],
                        help='每轮碰撞搜索的最大尝试次数，默认100000')
    parser.add_argument('--collision', default=DEFAULTS['collision'],
                        help='attack2-cheat 的碰撞判据 digest | signature，默认digest')
    key_group = parser.add_mutually_exclusive_group()
    key_group.add_argument('--key', default=None, help='十六进制摘要密钥，默认由种子派生')
    key_group.add_argument('--key-file', default=None, help='base64 摘要密钥文件')
    key_group.add_argument('--generate-key', default=None, metavar='PATH', help='生成新的密钥文件后退出')
    parser.add_argument('--workers', type=int, default=DEFAULTS['workers'], help='并发进程数，默认1')
    parser.add_argument('--log-dir', default=None, help='日志目录，不指定则不写日志')
    parser.add_argument('--quiet', action='store_true', help='不显示进度条和摘要')
    return parser


def main(argv=None) -> int:
    """
    命令行入口函数

    :return: 0 成功，2 配置错误，3 I/O 错误
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.log_dir:
        setup_logging(args.log_dir)

    try:
        if args.generate_key:
            generate_and_save_key(args.generate_key)
            return 0
        if args.experiment is None:
            raise ConfigError("缺少 --experiment")
        key_hex = args.key
        if args.key_file:
            key_hex = load_key(args.key_file).hex()
        config = RunConfig(
            experiment=args.experiment,
            n_nodes=args.nodes,
            n_rounds=args.rounds,
            digest_width=args.digest_width,
            digest_mode=args.digest_mode,
            m=args.m,
            k=args.k,
            trials=args.trials,
            seed=args.seed,
            output_path=args.out,
            report_format=args.format,
            collision_budget=args.collision_budget,
            key_hex=key_hex,
            workers=args.workers,
            collision_mode=args.collision,
        ).validate()
    except (ConfigError, binascii.Error) as e:
        print(f"❌ 配置错误: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"❌ 读写失败: {e}", file=sys.stderr)
        return 3

    report = run(config, quiet=args.quiet)

    try:
        if config.output_path:
            path = write_report(report, config.output_path, config.report_format)
            if not args.quiet:
                print(f"💾 报告已保存到 {path}", file=sys.stderr)
        else:
            sys.stdout.buffer.write(emit_report(report, config.report_format))
            sys.stdout.flush()
    except OSError as e:
        print(f"❌ 写入报告失败: {e}", file=sys.stderr)
        return 3

    if not args.quiet:
        print_summary(report)
    return 0


if __name__ == "__main__":
    import multiprocessing

    multiprocessing.freeze_support()
    sys.exit(main())
