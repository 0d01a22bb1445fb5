import csv
import io

import numpy as np
import pytest

from serelay.beamform import run_algorithm1
from serelay.channel import SystemConfig, sample_channels, trial_rng
from serelay.errors import ConfigError
from serelay.harness import (CSV_HEADER, DeltaProfile, ExperimentSpec, SweepRow,
                             delta_profile, env_overrides, format_csv, load_config,
                             paper_fixture_channels, parse_config_text, run_sweep,
                             write_csv, write_profile_csv)
from serelay.tsr_baseline import run_algorithm2


def _write(tmp_path, text, name='run.cfg'):
    p = tmp_path / name
    p.write_text(text, encoding='utf-8')
    return p


class TestLoadConfig:
    def test_empty_file_gives_defaults(self, tmp_path):
        spec = load_config(_write(tmp_path, ''))
        b = spec.base
        assert (b.N, b.M, b.eta, b.lambda_f, b.m_exp) == (5, 3, 0.8, 0.2, 3)
        assert (b.d_sr, b.d_rd, b.d_re, b.trials) == (1, 1, 1.2, 10**4)

    def test_domain_violation(self, tmp_path):
        with pytest.raises(ConfigError) as exc:
            load_config(_write(tmp_path, 'eta = 1.5\n'))
        assert exc.value.key == 'eta'

    def test_flag_overrides_file(self, tmp_path):
        spec = load_config(_write(tmp_path, 'trials = 10000\n'), {'trials': 100})
        assert spec.base.trials == 100

    def test_none_override_ignored(self, tmp_path):
        spec = load_config(_write(tmp_path, 'trials = 77\n'), {'trials': None})
        assert spec.base.trials == 77

    def test_full_file(self, tmp_path):
        text = """
        # Fig. 6 style run
        sweep_param = lambda_f
        sweep_values = 0, 0.1, 0.2   # three points
        schemes = both
        receive_mode = single
        eps = 0.001
        seed = 0x10
        """
        spec = load_config(_write(tmp_path, text))
        assert spec.sweep_param == 'lambda_f'
        assert spec.sweep_values == (0.0, 0.1, 0.2)
        assert spec.schemes == ('ser', 'tsr')
        assert spec.receive_mode == 'single'
        assert spec.base.eps == 0.001 and spec.base.seed == 16

    @pytest.mark.parametrize('text, key', [
        ('colour = red\n', 'colour'),
        ('trials = many\n', 'trials'),
        ('sweep_param = Ps\n', 'sweep_param'),
        ('schemes = ser, af\n', 'schemes'),
        ('receive_mode = all\n', 'receive_mode'),
        ('sweep_param = M\nsweep_values = 2.5\n', 'sweep_values'),
        ('sweep_param = eta\nsweep_values = 0.5 2\n', 'sweep_values'),
        ('just text\n', 'line 1'),
    ])
    def test_bad_keys_and_values(self, tmp_path, text, key):
        with pytest.raises(ConfigError) as exc:
            load_config(_write(tmp_path, text))
        assert exc.value.key == key

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_config(tmp_path / 'absent.cfg')

    def test_parse_strips_comments(self):
        assert parse_config_text('a = 1 # note\n# full\n\nb=2') == {'a': '1', 'b': '2'}


class TestRunSweep:
    def test_single_trial_matches_algorithm(self):
        base = SystemConfig(trials=1, seed=9, eps=0.05)
        rows = run_sweep(ExperimentSpec('eps', (0.05,), ('ser', 'tsr'), base))
        ch = sample_channels(base, trial_rng(9, 0))
        assert rows[0].rwc_mean == run_algorithm1(base, ch).eval.rwc
        assert rows[1].rwc_mean == run_algorithm2(base, ch).rwc
        assert rows[0].rwc_std == 0.0

    def test_eps_trend(self):
        base = SystemConfig(trials=200)
        grid = (0.001, 0.01, 0.05, 0.1)
        rows = run_sweep(ExperimentSpec('eps', grid, ('ser',), base))
        means = [r.rwc_mean for r in rows]
        assert all(b <= a for a, b in zip(means, means[1:]))

    def test_tsr_constant_in_lambda(self):
        base = SystemConfig(trials=50)
        rows = run_sweep(ExperimentSpec('lambda_f', (0.0, 0.25, 0.5), ('tsr',), base))
        assert len({r.rwc_mean for r in rows}) == 1

    def test_fixed_delta_sweep(self):
        base = SystemConfig(trials=20)
        rows = run_sweep(ExperimentSpec('delta', (0.0, 0.5), ('ser', 'tsr'), base))
        assert rows[0].rwc_mean == 0.0 and rows[1].rwc_mean == 0.0
        assert rows[2].rwc_mean > 0 and rows[3].rwc_mean > 0

    def test_antenna_sweep(self):
        rows = run_sweep(ExperimentSpec('M', (2, 4), ('ser',), SystemConfig(trials=30)))
        assert rows[0].rwc_mean < rows[1].rwc_mean

    def test_rows(self):
        rows = run_sweep(ExperimentSpec('eta', (0.5,), ('ser',), SystemConfig(trials=5, seed=3),
                                        receive_mode='single'))
        r = rows[0]
        assert (r.sweep_param, r.value, r.scheme, r.receive_mode) == ('eta', 0.5, 'ser', 'single')
        assert (r.trials, r.seed) == (5, 3) and r.rwc_mean >= 0

    def test_worker_count_irrelevant(self):
        spec = ExperimentSpec('eps', (0.01, 0.1), ('ser', 'tsr'), SystemConfig(trials=40))
        assert format_csv(run_sweep(spec, 1)) == format_csv(run_sweep(spec, 4))


class TestDeltaProfile:
    def test_curve_max_matches_closed_form(self, fixture_channels):
        prof = delta_profile(fixture_channels, SystemConfig(eps=0.001))
        assert abs(np.nanmax(prof.rwc_zf) - prof.rwc_star) <= 1e-6

    def test_zero_forcing_beats_mrt(self, fixture_channels):
        prof = delta_profile(fixture_channels, SystemConfig(eps=0.1))
        both = np.isfinite(prof.rwc_zf) & np.isfinite(prof.rwc_mrt)
        assert both.sum() > 500
        assert np.all(prof.rwc_zf[both] >= prof.rwc_mrt[both])

    def test_zero_delta_row(self, fixture_channels):
        prof = delta_profile(fixture_channels, SystemConfig(eps=0.05))
        assert prof.deltas[0] == 0 and prof.rwc_zf[0] == 0 and prof.rwc_mrt[0] == 0

    def test_profile_csv(self, fixture_channels):
        prof = delta_profile(fixture_channels, SystemConfig(eps=0.05), np.linspace(0, 1, 11))
        buf = io.StringIO()
        write_profile_csv(prof, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == 'delta,rwc_zf,rwc_mrt,marker'
        assert len(lines) == 13 and lines[-1].endswith(',,opt')
        assert float(lines[-1].split(',')[0]) == pytest.approx(prof.delta_star, rel=1e-11)


class TestCsv:
    ROWS = [SweepRow('eps', 0.001, 'ser', 'antenna_reuse', 4.123456789012345, 0.5, 100, 7),
            SweepRow('eps', 0.1, 'tsr', 'antenna_reuse', 0.0, 0.0, 100, 7)]

    def test_header_only(self, tmp_path):
        p = tmp_path / 'empty.csv'
        write_csv([], p)
        assert p.read_text() == ','.join(CSV_HEADER) + '\n'

    def test_byte_identical(self, tmp_path):
        a, b = tmp_path / 'a.csv', tmp_path / 'b.csv'
        write_csv(self.ROWS, a)
        write_csv(self.ROWS, b)
        assert a.read_bytes() == b.read_bytes()

    def test_round_trip(self, tmp_path):
        p = tmp_path / 'rows.csv'
        write_csv(self.ROWS, p)
        with open(p, newline='') as fh:
            got = list(csv.DictReader(fh))
        for row, rec in zip(self.ROWS, got):
            assert float(rec['rwc_mean']) == float(f"{row.rwc_mean:.11e}")
            assert float(rec['value']) == row.value
            assert int(rec['trials']) == row.trials and rec['scheme'] == row.scheme

    def test_twelve_significant_digits(self):
        line = format_csv(self.ROWS[:1]).splitlines()[1]
        assert line.split(',')[4] == '4.12345678901e+00'


class TestFixture:
    def test_published_entries(self):
        ch = paper_fixture_channels()
        assert ch.h_r1[0] == -0.9693 + 0.4571j
        assert ch.f[2] == -0.5517 - 0.0069j
        assert ch.H_r.shape == (5, 4)

    def test_frozen_norm(self):
        # sum of squared moduli of the printed h_r1 entries
        assert np.linalg.norm(paper_fixture_channels().h_r1) ** 2 == pytest.approx(
            9.15487036, rel=1e-14)


class TestEnvOverrides:
    def test_prefix(self, monkeypatch):
        monkeypatch.setenv('SERELAY_TRIALS', '12')
        monkeypatch.setenv('SERELAY_SCHEME', 'tsr')
        monkeypatch.delenv('SERELAY_SEED', raising=False)
        env = env_overrides()
        assert env['trials'] == '12' and env['scheme'] == 'tsr' and 'seed' not in env
