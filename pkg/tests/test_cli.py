import json

import pytest

from lrshield.cli import COMMANDS, STAGES, main, build_parser

__all__ = [
    'test_all_deterministic',
    'test_all_small_run',
    'test_all_smoke_run',
    'test_commands',
    'test_config_error_exit',
    'test_missing_input_exit',
    'test_parser',
    'test_validate_exit_codes',
]


def _stderr_json(capsys) -> dict:

    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_commands():

    assert COMMANDS[:2] == ('synth-data', 'ingest')
    assert COMMANDS[-2:] == ('all', 'validate')
    assert list(STAGES)[2:] == [
        'features',
        'train-predictor',
        'gen-attacks',
        'train-detector',
        'evaluate',
        'mitigate',
        'report',
    ]


def test_parser():

    args = build_parser().parse_args(
        ['gen-attacks', '--jobs', '4', '--seed', '3', '--no-cache'],
    )

    assert args.command == 'gen-attacks'
    assert args.jobs == 4
    assert args.seed == 3
    assert args.no_cache
    assert args.config is None

    with pytest.raises(SystemExit):

        build_parser().parse_args(['explode'])


def test_validate_exit_codes(tmp_path, capsys):

    assert main(['validate']) == 0

    out = json.loads(capsys.readouterr().out)

    assert out['diagnostics'] == []
    assert len(out['config_hash']) == 64

    warn = tmp_path / 'warn.toml'
    warn.write_text('[detector]\ntau_min = 0.3\n')

    assert main(['validate', '--config', str(warn)]) == 1

    bad = tmp_path / 'bad.toml'
    bad.write_text('[data]\nar_phi = 1.5\n')

    capsys.readouterr()

    assert main(['validate', '--config', str(bad)]) == 2

    out = json.loads(capsys.readouterr().out)

    assert [d['key'] for d in out['diagnostics']] == ['data.ar_phi']


def test_config_error_exit(tmp_path, capsys):

    path = tmp_path / 'run.toml'
    path.write_text('[predictor]\nepsilon = 1\n')

    assert main(['features', '--config', str(path)]) == 2

    err = _stderr_json(capsys)

    assert err['error'] == 'ConfigError'
    assert err['key'] == 'predictor.epsilon'
    assert err['command'] == 'features'


def test_missing_input_exit(tmp_path, capsys):

    assert main(['features', '--out-dir', str(tmp_path)]) == 1

    err = _stderr_json(capsys)

    assert err['error'] == 'FileNotFoundError'
    assert 'synth-data' in err['message']


_SMALL = '''
seed = 3

[data]
start = "2018-01-01"
end = "2018-02-28"

[features]
split = "2018-02-15"

[predictor]
max_train_rows = 200

[attacks]
n_random = 300
tau_grid = [0.1]
max_critical_hours = 2
max_lines_per_hour = 1
node_limit = 2000

[detector]
tau_min = 0.01
max_normal_train = 500

[sweep]
C = [100.0]
tau_min = [0.01]

[mitigation]
max_scenarios = 4
'''


@pytest.mark.slow
def test_all_small_run(tmp_path):

    config = tmp_path / 'small.toml'
    config.write_text(_SMALL)
    out = tmp_path / 'out'
    argv = ['all', '--config', str(config), '--out-dir', str(out)]

    assert main(argv) == 0

    summary = json.loads((out / 'eval' / 'summary.json').read_text())
    report = json.loads((out / 'report' / 'report.json').read_text())
    features = out / 'features' / 'X.csv'
    stamp = features.stat().st_mtime_ns

    assert summary['seed'] == 3
    assert summary['samples']['normal'] > 0
    assert 0 <= summary['false_alarm'] <= 1
    assert set(report['tables']) == {
        'cm_lo',
        'detection',
        'mitigation',
        'predictor',
        'sweep',
    }
    assert len(report['tables']['predictor']) == 20

    # every stage is up to date on the second run
    assert main(argv) == 0
    assert features.stat().st_mtime_ns == stamp


_SMOKE = '''
seed = 5

[data]
start = "2018-01-01"
end = "2018-01-21"

[features]
split = "2018-01-15"

[predictor]
max_train_rows = 100

[attacks]
n_random = 50
tau_grid = [0.1]
max_critical_hours = 1
max_lines_per_hour = 1
node_limit = 50

[detector]
tau_min = 0.01
max_normal_train = 200

[sweep]
C = [100.0]
tau_min = [0.01]

[mitigation]
max_scenarios = 2
'''

_ARCHIVES = (
    'predictor.json',
    'detector.json',
    'attacks.jsonl',
    'report/report.json',
)


def _run_all(tmp_path, name: str):

    config = tmp_path / 'smoke.toml'
    config.write_text(_SMOKE)
    out = tmp_path / name

    assert main(['all', '--config', str(config), '--out-dir', str(out)]) == 0

    return out


def test_all_smoke_run(tmp_path):

    out = _run_all(tmp_path, 'out')

    summary = json.loads((out / 'eval' / 'summary.json').read_text())
    report = json.loads((out / 'report' / 'report.json').read_text())

    assert summary['seed'] == 5
    assert summary['samples']['normal'] > 0
    assert 0 <= summary['false_alarm'] <= 1
    assert set(report['tables']) == {
        'cm_lo',
        'detection',
        'mitigation',
        'predictor',
        'sweep',
    }
    assert sorted(p.name for p in (out / 'report').glob('*.csv')) == [
        'fig2_rmse_mape.csv',
        'fig3_sweep.csv',
        'fig4_detection.csv',
        'fig5_cm_lo.csv',
        'fig6_mitigation.csv',
    ]


def test_all_deterministic(tmp_path):

    first = _run_all(tmp_path, 'first')
    second = _run_all(tmp_path, 'second')
    csvs = sorted(p.name for p in (first / 'report').glob('*.csv'))

    assert csvs

    for name in (*_ARCHIVES, *(f'report/{csv}' for csv in csvs)):

        assert (first / name).read_bytes() == (second / name).read_bytes()
