import json

import pytest

from serelay.cli import main
from serelay.harness import CSV_HEADER


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ('CONFIG', 'SEED', 'TRIALS', 'SCHEME', 'RECEIVE_MODE', 'OUT', 'WORKERS'):
        monkeypatch.delenv('SERELAY_' + name, raising=False)


def _rows(text):
    return [line.split(',') for line in text.strip().splitlines()[1:]]


class TestSingle:
    def test_fixture_dump(self, capsys):
        assert main(['single', '--fixture', '--set', 'eps=0.05']) == 0
        out = json.loads(capsys.readouterr().out)
        assert out['channels']['h_r1'][0] == [-0.9693, 0.4571]
        assert out['ser']['power']['branch'] == 'C2'
        assert out['ser']['wt_method'] == 'Interior'
        assert out['tsr']['converged'] is True
        assert len(out['ser']['beams']['w_t']) == 3

    def test_scheme_filter(self, capsys):
        assert main(['single', '--scheme', 'tsr', '--trial', '2']) == 0
        out = json.loads(capsys.readouterr().out)
        assert 'tsr' in out and 'ser' not in out


class TestSweep:
    def test_csv_to_file(self, tmp_path):
        out = tmp_path / 'sweep.csv'
        assert main(['sweep', '--trials', '3', '--out', str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ','.join(CSV_HEADER)
        assert len(lines) == 1 + 4 * 2

    def test_flag_beats_env_beats_file(self, tmp_path, capsys, monkeypatch):
        cfg = tmp_path / 'run.cfg'
        cfg.write_text('trials = 10000\nseed = 1\nsweep_values = 0.05\n')
        monkeypatch.setenv('SERELAY_TRIALS', '4')
        monkeypatch.setenv('SERELAY_SEED', '5')
        assert main(['sweep', '--config', str(cfg), '--trials', '2', '--scheme', 'ser']) == 0
        rows = _rows(capsys.readouterr().out)
        assert len(rows) == 1
        assert rows[0][6:] == ['2', '5']

    def test_env_config_path(self, tmp_path, capsys, monkeypatch):
        cfg = tmp_path / 'run.cfg'
        cfg.write_text('trials = 2\nsweep_param = eta\nsweep_values = 0.5\nschemes = tsr\n')
        monkeypatch.setenv('SERELAY_CONFIG', str(cfg))
        assert main(['sweep']) == 0
        assert _rows(capsys.readouterr().out)[0][:3] == ['eta', '5.00000000000e-01', 'tsr']

    def test_deterministic_across_workers(self, capsys):
        args = ['sweep', '--trials', '6', '--set', 'sweep_values=0.01 0.1']
        main(args + ['--workers', '1'])
        one = capsys.readouterr().out
        main(args + ['--workers', '8'])
        assert capsys.readouterr().out == one

    def test_receive_mode(self, capsys):
        main(['sweep', '--trials', '2', '--scheme', 'ser', '--receive-mode', 'single',
              '--set', 'sweep_values=0.05'])
        assert _rows(capsys.readouterr().out)[0][3] == 'single'

    def test_config_error_exit_code(self, capsys):
        assert main(['sweep', '--set', 'eta=1.5']) == 2
        assert 'eta' in capsys.readouterr().err

    def test_bad_set_syntax(self, capsys):
        assert main(['sweep', '--set', 'eta']) == 2


class TestProfile:
    def test_fixture_profile(self, capsys):
        assert main(['profile-delta', '--points', '11', '--set', 'eps=0.1']) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == 'delta,rwc_zf,rwc_mrt,marker'
        assert len(lines) == 13 and lines[-1].endswith('opt')

    def test_random_draw(self, capsys):
        assert main(['profile-delta', '--points', '5', '--trial', '3']) == 0
        assert len(capsys.readouterr().out.splitlines()) == 7


class TestValidate:
    def test_quick_suite_passes(self, capsys):
        assert main(['validate', '--quick']) == 0
        out = capsys.readouterr().out
        assert out.count('[PASS]') == 11 and '11/11 checks passed' in out


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, '-m', 'serelay', 'sweep', '--trials', '1',
                          '--set', 'sweep_values=0.05'], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith('sweep_param,')
