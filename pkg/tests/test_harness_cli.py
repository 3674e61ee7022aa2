"""
命令行与报告：配置校验、统计量、报告格式、确定性、退出码
"""
import csv
import io
import json
import math
from dataclasses import replace

import pytest

from digest.hash import make_params
from digest.key_manager import derive_key, generate_and_save_key
from harness_cli.config import EXPERIMENTS, ConfigError, RunConfig
from harness_cli.pipeline import cheat_success_model
from harness_cli.report import CSV_COLUMNS, RunReport, emit_report, format_float, write_report
from harness_cli.runner import derive_seeds, main, run
from harness_cli.stats import binomial_metric, std_devs_off


KEY = derive_key("harness-tests")


def _without_wall_time(data: bytes) -> dict:
    record = json.loads(data)
    record.pop('wall_time')
    return record


# =============================================================================
# 配置
# =============================================================================

@pytest.mark.parametrize("kwargs", [
    {'experiment': 'nope'},
    {'experiment': 'gmw', 'trials': 0},
    {'experiment': 'gmw', 'n_nodes': 1},
    {'experiment': 'gmw', 'digest_mode': 'sponge'},
    {'experiment': 'attack1', 'digest_width': 65},
    {'experiment': 'attack1-cheat', 'collision_budget': -1},
    {'experiment': 'attack2-detect', 'digest_width': 16},
    {'experiment': 'attack2-detect', 'digest_mode': 'bijective'},
    {'experiment': 'splitshare', 'm': 10, 'k': 3},
    {'experiment': 'splitshare', 'm': 42, 'k': 2},
    {'experiment': 'gmw', 'key_hex': 'zz'},
    {'experiment': 'gmw', 'workers': 0},
    {'experiment': 'gmw', 'report_format': 'xml'},
    {'experiment': 'attack2-cheat', 'collision_mode': 'exact'},
    {'experiment': 'attack1-cheat', 'collision_mode': 'signature'},
])
def test_config_rejected(kwargs):
    with pytest.raises(ConfigError):
        RunConfig(**kwargs).validate()


def test_config_defaults():
    cfg = RunConfig(experiment='gmw').validate()
    assert (cfg.n_nodes, cfg.n_rounds, cfg.digest_width, cfg.digest_mode) == (8, 8, 8, 'hash')
    assert (cfg.m, cfg.k, cfg.trials) == (32, 4, 10 ** 4)
    assert 'output_path' not in cfg.to_record()


# =============================================================================
# 统计量
# =============================================================================

def test_binomial_metric():
    metric = binomial_metric('x', 50, 100, 0.5)
    assert metric.empirical_rate == 0.5
    assert metric.std_devs_off == 0.0
    assert metric.ci_low < 0.5 < metric.ci_high


def test_std_devs_off_degenerate_model():
    assert std_devs_off(10, 10, 1.0) == 0.0
    assert std_devs_off(9, 10, 1.0) == -math.inf
    assert std_devs_off(1, 10, 0.0) == math.inf
    assert std_devs_off(60, 100, 0.5) == pytest.approx(2.0)


def test_cheat_success_model():
    bij = RunConfig(experiment='attack1-cheat', n_rounds=3, digest_mode='bijective')
    assert cheat_success_model(bij, make_params('bijective', 8, KEY)) == 0.125

    no_budget = RunConfig(experiment='attack1-cheat', n_rounds=3, collision_budget=0)
    assert cheat_success_model(no_budget, make_params('hash', 8, KEY)) == pytest.approx(0.125)

    hashed = RunConfig(experiment='attack1-cheat', n_rounds=8, collision_budget=10 ** 5)
    assert cheat_success_model(hashed, make_params('hash', 8, KEY)) > 0.99

    # 签名碰撞对 bijective 摘要同样有效
    sig = RunConfig(experiment='attack2-cheat', n_rounds=8, collision_budget=100, collision_mode='signature')
    assert cheat_success_model(sig, make_params('bijective', 8, KEY)) > 0.99
    sig_no_budget = replace(sig, n_rounds=3, collision_budget=0)
    assert cheat_success_model(sig_no_budget, make_params('bijective', 8, KEY)) == pytest.approx(0.125)


# =============================================================================
# 报告
# =============================================================================

def test_format_float():
    assert format_float(1 / 3) == 0.333333333333
    assert format_float(math.inf) == 'inf'
    assert format_float(math.nan) == 'nan'


def test_json_round_trip():
    report = RunReport({'experiment': 'gmw'}, [binomial_metric('m', 3, 7, 0.5, claimed=0.75)],
                       {'bell_pairs': 0, 'qubits': 0, 'collision_calls': 0}, 1.5)
    record = json.loads(emit_report(report, 'json'))
    assert record == report.to_record()
    assert set(record) == {'config', 'metrics', 'resources', 'wall_time'}
    assert record['metrics'][0]['claimed_value'] == 0.75
    assert record['metrics'][0]['empirical_rate'] == 0.428571428571


def test_csv_one_row_per_metric():
    metrics = [binomial_metric('a', 1, 2, 0.5), binomial_metric('b', 2, 2, 1.0)]
    report = RunReport({'experiment': 'gmw'}, metrics)
    rows = list(csv.DictReader(io.StringIO(emit_report(report, 'csv-summary').decode('utf-8'))))
    assert [r['name'] for r in rows] == ['a', 'b']
    assert tuple(rows[0]) == CSV_COLUMNS


def test_csv_empty_is_header_only():
    data = emit_report(RunReport({'experiment': 'gmw'}), 'csv-summary').decode('utf-8')
    assert data == ','.join(CSV_COLUMNS) + '\n'


def test_unknown_format():
    with pytest.raises(ValueError):
        emit_report(RunReport({}), 'yaml')


def test_write_report_creates_parent(tmp_path):
    path = write_report(RunReport({'experiment': 'gmw'}), tmp_path / 'out' / 'r.json')
    assert json.loads(path.read_bytes())['config'] == {'experiment': 'gmw'}


# =============================================================================
# 运行
# =============================================================================

def test_seeds_distinct():
    seeds = derive_seeds(7, 2000)
    states = {tuple(s.generate_state(2)) for s in seeds}
    assert len(states) == 2000
    assert [s.spawn_key for s in derive_seeds(7, 3)] == [s.spawn_key for s in seeds[:3]]


@pytest.mark.parametrize("experiment", EXPERIMENTS)
def test_every_experiment_runs(experiment):
    report = run(RunConfig(experiment=experiment, n_rounds=2, m=4, k=2, trials=20, collision_budget=2000))
    assert report.metrics
    for metric in report.metrics:
        assert 0.0 <= metric.empirical_rate <= 1.0
    assert set(report.resources) >= {'bell_pairs', 'qubits', 'collision_calls'}


def test_determinism_single_trial():
    cfg = RunConfig(experiment='attack2', n_rounds=3, trials=1, seed=5)
    assert _without_wall_time(emit_report(run(cfg))) == _without_wall_time(emit_report(run(cfg)))


@pytest.mark.parametrize("experiment", ['gmw', 'attack1-cheat', 'splitshare-snoop'])
def test_determinism_across_workers(experiment):
    cfg = RunConfig(experiment=experiment, n_rounds=3, m=8, k=2, trials=600, seed=11)
    serial = emit_report(run(cfg))
    parallel = emit_report(run(replace(cfg, workers=2)))
    a, b = _without_wall_time(serial), _without_wall_time(parallel)
    a['config'].pop('workers')
    b['config'].pop('workers')
    assert a == b


def test_attack2_bell_pairs_counter():
    report = run(RunConfig(experiment='attack2', n_rounds=5, trials=1))
    assert report.resources['bell_pairs'] == 5
    assert report.resources['qubits'] == 5

    report = run(RunConfig(experiment='attack2', n_rounds=5, trials=3))
    assert report.resources['bell_pairs'] == 15
    assert report.resources['bell_pairs_per_session'] == 5.0
    assert report.resources['qubits_per_session'] == 5.0


@pytest.mark.parametrize("digest_mode", ['bijective', 'hash'])
def test_signature_cheat_matches_model(digest_mode):
    cfg = RunConfig(experiment='attack2-cheat', n_rounds=2, digest_width=16, digest_mode=digest_mode,
                    collision_mode='signature', collision_budget=1, trials=1500)
    metrics = {m.name: m for m in run(cfg).metrics}
    success = metrics['cheat_success']
    assert 0.25 < success.exact_or_model_value < 1.0
    assert abs(success.std_devs_off) <= 4


def test_gmw_report_metrics():
    report = run(RunConfig(experiment='gmw', n_rounds=1, trials=2000))
    metrics = {m.name: m for m in report.metrics}
    assert metrics['honest_acceptance'].empirical_rate == 1.0
    assert metrics['cheat_acceptance'].exact_or_model_value == 0.5
    assert abs(metrics['cheat_acceptance'].std_devs_off) <= 4


def test_detect_report_carries_claim():
    report = run(RunConfig(experiment='attack2-detect', digest_width=4, trials=500))
    metrics = {m.name: m for m in report.metrics}
    uniform = metrics['detection_uniform-wrong']
    assert uniform.claimed_value == 0.75
    assert uniform.exact_or_model_value == pytest.approx(2 / 3)
    assert abs(uniform.std_devs_off) <= 4


def test_bijective_attack1_reports_permutation_fix():
    report = run(RunConfig(experiment='attack1', n_nodes=4, n_rounds=2, digest_mode='bijective', trials=5))
    assert report.resources['permutation_fix_pairs'] == 2 * 4
    assert report.resources['bell_pairs'] == 5 * 2 * 40


# =============================================================================
# 命令行
# =============================================================================

def test_main_writes_report(tmp_path):
    out = tmp_path / 'gmw.json'
    code = main(['--experiment', 'gmw', '--rounds', '2', '--trials', '10', '--out', str(out), '--quiet'])
    assert code == 0
    record = json.loads(out.read_bytes())
    assert record['config']['n_rounds'] == 2
    assert record['config']['trials'] == 10


def test_main_csv_to_stdout(capsysbinary):
    code = main(['--experiment', 'splitshare', '--m', '4', '--k', '2', '--trials', '5',
                 '--format', 'csv-summary', '--quiet'])
    assert code == 0
    out = capsysbinary.readouterr().out.decode('utf-8')
    assert out.splitlines()[0] == ','.join(CSV_COLUMNS)
    assert len(out.splitlines()) == 4


def test_main_config_error():
    assert main(['--experiment', 'gmw', '--collision', 'signature', '--quiet']) == 2
    assert main(['--experiment', 'splitshare', '--m', '10', '--k', '3', '--quiet']) == 2
    assert main(['--quiet']) == 2


def test_main_missing_key_file(tmp_path):
    assert main(['--experiment', 'gmw', '--key-file', str(tmp_path / 'none.key'), '--quiet']) == 3


def test_main_key_file_and_logging(tmp_path):
    key_file = tmp_path / 'digest.key'
    key = generate_and_save_key(str(key_file))
    out = tmp_path / 'r.json'
    code = main(['--experiment', 'attack1', '--rounds', '1', '--trials', '2', '--key-file', str(key_file),
                 '--out', str(out), '--log-dir', str(tmp_path / 'logs'), '--quiet'])
    assert code == 0
    assert json.loads(out.read_bytes())['config']['digest_key'] == key.hex()


def test_main_generate_key(tmp_path):
    key_file = tmp_path / 'new.key'
    assert main(['--generate-key', str(key_file)]) == 0
    assert key_file.exists()
    assert main(['--generate-key', str(key_file)]) == 3


def test_main_unwritable_output(tmp_path):
    blocker = tmp_path / 'file'
    blocker.write_text('x')
    code = main(['--experiment', 'gmw', '--rounds', '1', '--trials', '2', '--out', str(blocker / 'r.json'),
                 '--quiet'])
    assert code == 3
