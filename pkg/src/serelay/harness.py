"""
Monte Carlo experiment runner: configuration files, parameter sweeps,
the power-allocation profile, and CSV output.

Config files are UTF-8 text with one ``key = value`` pair per line and
``#`` comments. Keys are the :class:`~serelay.channel.SystemConfig`
field names plus ``sweep_param``, ``sweep_values``, ``schemes`` and
``receive_mode``.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
import csv
import io
import math
import os

import numpy as np

from .beamform import run_algorithm1
from .channel import ChannelSet, SystemConfig, sample_channels, trial_rng
from .errors import ConfigError, InfeasibleRecycling
from .power_alloc import solve_power
from .ser_model import evaluate, link_gains
from .oracle import wcsr_on_delta_grid
from .tsr_baseline import run_algorithm2

__all__ = ['ExperimentSpec', 'SweepRow', 'DeltaProfile', 'load_config',
           'parse_config_text', 'run_sweep', 'delta_profile', 'write_csv',
           'format_csv', 'write_profile_csv', 'paper_fixture_channels',
           'SWEEP_PARAMS', 'CSV_HEADER']

SWEEP_PARAMS = ('eps', 'delta', 'lambda_f', 'eta', 'd_sr', 'M')
SCHEMES = ('ser', 'tsr')
RECEIVE_MODES = ('antenna_reuse', 'single')
CSV_HEADER = ('sweep_param', 'value', 'scheme', 'receive_mode', 'rwc_mean',
              'rwc_std', 'trials', 'seed')
_SPEC_KEYS = ('sweep_param', 'sweep_values', 'schemes', 'receive_mode')


@dataclass(frozen=True)
class ExperimentSpec:
    sweep_param: str = 'eps'
    sweep_values: tuple = (0.001, 0.01, 0.05, 0.1)
    schemes: tuple = ('ser', 'tsr')
    base: SystemConfig = field(default_factory=SystemConfig)
    receive_mode: str = 'antenna_reuse'

    def __post_init__(self):
        if self.sweep_param not in SWEEP_PARAMS:
            raise ConfigError('sweep_param', f"must be one of {SWEEP_PARAMS}")
        if not self.sweep_values:
            raise ConfigError('sweep_values', "must not be empty")
        if not self.schemes or any(s not in SCHEMES for s in self.schemes):
            raise ConfigError('schemes', f"must be a nonempty subset of {SCHEMES}")
        if self.receive_mode not in RECEIVE_MODES:
            raise ConfigError('receive_mode', f"must be one of {RECEIVE_MODES}")
        for v in self.sweep_values:
            self.config_for(v)

    def config_for(self, value):
        """Base config with the swept parameter set to ``value``."""
        if self.sweep_param == 'delta':
            if not 0.0 <= value <= 1.0:
                raise ConfigError('sweep_values', f"delta {value} outside [0, 1]")
            return self.base
        if self.sweep_param == 'M':
            if value != int(value):
                raise ConfigError('sweep_values', f"M must be an integer, got {value}")
            value = int(value)
        try:
            return self.base.with_(**{self.sweep_param: value})
        except ConfigError as exc:
            raise ConfigError('sweep_values', str(exc)) from exc


@dataclass(frozen=True)
class SweepRow:
    sweep_param: str
    value: float
    scheme: str
    receive_mode: str
    rwc_mean: float
    rwc_std: float
    trials: int
    seed: int


@dataclass(frozen=True)
class DeltaProfile:
    deltas: np.ndarray
    rwc_zf: np.ndarray
    rwc_mrt: np.ndarray
    delta_star: float
    rwc_star: float


# -- configuration ---------------------------------------------------------

def _normalize_mode(value):
    v = str(value).strip().lower()
    if v in ('reuse', 'antenna_reuse'):
        return 'antenna_reuse'
    if v == 'single':
        return 'single'
    raise ConfigError('receive_mode', f"unknown receive mode {value!r}")


def _normalize_schemes(value):
    if isinstance(value, str):
        items = [s.strip().lower() for s in value.replace(' ', ',').split(',') if s.strip()]
    else:
        items = [str(s).lower() for s in value]
    if items == ['both']:
        items = list(SCHEMES)
    bad = [s for s in items if s not in SCHEMES]
    if bad or not items:
        raise ConfigError('schemes', f"invalid scheme list {value!r}")
    return tuple(items)


def _parse_values(value):
    if isinstance(value, str):
        parts = [p for p in value.replace(',', ' ').split() if p]
        try:
            return tuple(float(p) for p in parts)
        except ValueError as exc:
            raise ConfigError('sweep_values', f"not a number list: {value!r}") from exc
    return tuple(float(v) for v in value)


def _coerce(key, raw, kind):
    try:
        if kind is int:
            return int(str(raw), 0) if isinstance(raw, str) else int(raw)
        return float(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, f"cannot parse {raw!r}") from exc


def parse_config_text(text):
    """Parse ``key = value`` lines into a dict of raw strings."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split('=', 1))
        out[key] = value
    return out


def load_config(path=None, cli_overrides=None):
    """
    Build an :class:`ExperimentSpec` from a config file and overrides.

    ``cli_overrides`` (a mapping of field names to values, ``None``
    entries ignored) take precedence over file keys; missing keys fall
    back to the defaults.

    Raises
    ------
    ConfigError
        Unknown key, unparsable value or out-of-domain value; ``.key``
        names the offending field.
    """
    raw = {}
    if path is not None:
        with open(path, encoding='utf-8') as fh:
            raw.update(parse_config_text(fh.read()))
    raw.update({k: v for k, v in (cli_overrides or {}).items() if v is not None})

    cfg_types = {f.name: f.type for f in fields(SystemConfig)}
    cfg_kwargs, spec_kwargs = {}, {}
    for key, value in raw.items():
        if key in cfg_types:
            kind = int if cfg_types[key] in (int, 'int') else float
            cfg_kwargs[key] = _coerce(key, value, kind)
        elif key == 'sweep_param':
            spec_kwargs[key] = str(value).strip()
        elif key == 'sweep_values':
            spec_kwargs[key] = _parse_values(value)
        elif key == 'schemes':
            spec_kwargs[key] = _normalize_schemes(value)
        elif key == 'receive_mode':
            spec_kwargs[key] = _normalize_mode(value)
        else:
            raise ConfigError(key, "unknown configuration key")
    base = SystemConfig(**cfg_kwargs)
    return ExperimentSpec(base=base, **spec_kwargs)


# -- sweeps ----------------------------------------------------------------

def _ser_trial(cfg, trial, receive_mode, fixed_delta):
    ch = sample_channels(cfg, trial_rng(cfg.seed, trial))
    sol = run_algorithm1(cfg, ch, receive_mode=receive_mode)
    if fixed_delta is None:
        return sol.eval.rwc
    try:
        return evaluate(cfg, ch, sol.beams, fixed_delta).rwc
    except InfeasibleRecycling:
        return 0.0


def _tsr_trial(cfg, trial, fixed_delta):
    ch = sample_channels(cfg, trial_rng(cfg.seed, trial))
    return run_algorithm2(cfg, ch, fixed_delta=fixed_delta).rwc


def _mean_std(values):
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def run_sweep(spec, workers=1):
    """
    Average worst-case secrecy rate per swept value and scheme.

    Trial ``k`` always uses the generator derived from ``(seed, k)``, so
    both schemes and every swept value that keeps the antenna counts see
    the same channel draws. Output does not depend on ``workers``.
    """
    rows = []
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for value in spec.sweep_values:
            cfg = spec.config_for(value)
            fixed_delta = float(value) if spec.sweep_param == 'delta' else None
            mode = 'reuse' if spec.receive_mode == 'antenna_reuse' else 'single'
            for scheme in spec.schemes:
                if scheme == 'ser':
                    fn = lambda k: _ser_trial(cfg, k, mode, fixed_delta)  # noqa: E731
                else:
                    fn = lambda k: _tsr_trial(cfg, k, fixed_delta)  # noqa: E731
                trials = range(cfg.trials)
                results = list(pool.map(fn, trials)) if pool else [fn(k) for k in trials]
                mean, std = _mean_std(results)
                rows.append(SweepRow(sweep_param=spec.sweep_param, value=float(value),
                                     scheme=scheme, receive_mode=spec.receive_mode,
                                     rwc_mean=mean, rwc_std=std, trials=cfg.trials,
                                     seed=cfg.seed))
    finally:
        if pool is not None:
            pool.shutdown()
    return rows


def delta_profile(channels, cfg, delta_grid=None, receive_mode='reuse'):
    """
    WCSR versus allocation ratio for the optimized zero-forcing
    transmit beamformer and for MRT (``w_t = h_d / ||h_d||``), sharing
    the same source and receive beamformers. Infeasible points are NaN.
    """
    if delta_grid is None:
        delta_grid = np.linspace(0.0, 1.0, 1001)
    deltas = np.asarray(delta_grid, dtype=float)
    sol = run_algorithm1(cfg, channels, receive_mode=receive_mode)
    zf = sol.beams
    mrt = zf.with_wt(channels.h_d / np.linalg.norm(channels.h_d))
    rwc_zf = wcsr_on_delta_grid(cfg, link_gains(cfg, channels, zf), deltas)
    rwc_mrt = wcsr_on_delta_grid(cfg, link_gains(cfg, channels, mrt), deltas)
    power = solve_power(cfg, channels, zf)
    rwc_star = evaluate(cfg, channels, zf, power.delta).rwc
    return DeltaProfile(deltas=deltas, rwc_zf=rwc_zf, rwc_mrt=rwc_mrt,
                        delta_star=power.delta, rwc_star=rwc_star)


# -- output ----------------------------------------------------------------

def _num(x):
    return f"{x:.11e}"


def format_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator='\n')
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.sweep_param, _num(r.value), r.scheme, r.receive_mode,
                    _num(r.rwc_mean), _num(r.rwc_std), r.trials, r.seed])
    return buf.getvalue()


def write_csv(rows, path):
    """Write sweep rows; 12 significant digits, header always present."""
    with open(path, 'w', encoding='utf-8', newline='') as fh:
        fh.write(format_csv(rows))


def write_profile_csv(profile, path_or_file):
    """``delta,rwc_zf,rwc_mrt,marker``; the closed-form optimum is marked ``opt``."""
    lines = ['delta,rwc_zf,rwc_mrt,marker']
    for d, z, m in zip(profile.deltas, profile.rwc_zf, profile.rwc_mrt):
        lines.append(f"{_num(d)},{_num(z)},{_num(m)},")
    lines.append(f"{_num(profile.delta_star)},{_num(profile.rwc_star)},,opt")
    text = '\n'.join(lines) + '\n'
    if hasattr(path_or_file, 'write'):
        path_or_file.write(text)
    else:
        with open(path_or_file, 'w', encoding='utf-8', newline='') as fh:
            fh.write(text)


# -- fixture ---------------------------------------------------------------

def paper_fixture_channels():
    """The published single-block channel realization (N = 5, M = 3)."""
    h_r1 = np.array([-0.9693 + 0.4571j, -1.4266 + 0.3548j, -1.8713 + 0.8418j,
                     0.7243 - 0.0702j, -0.9796 + 0.3818j])
    H_r2 = np.array([
        [0.5023 + 0.9428j, 1.0247 - 0.7866j, -0.2742 + 0.7717j],
        [0.0555 - 0.5340j, -1.5941 - 0.4515j, -0.1950 - 0.1796j],
        [-0.7962 + 0.9197j, -1.0882 - 0.2271j, 0.3783 - 0.5202j],
        [1.0129 - 1.0110j, -1.1428 - 0.3521j, -0.0615 - 0.2866j],
        [0.0170 + 1.3779j, -1.2486 - 0.0870j, 0.1937 - 1.1660j],
    ])
    f = np.array([-0.6791 + 0.0424j, 0.5303 + 0.1144j, -0.5517 - 0.0069j])
    h_d = np.array([-0.5039 + 0.3520j, 0.4230 - 1.1293j, 0.6480 + 1.6376j])
    h_e_bar = np.array([0.6417 - 0.3991j, 0.1765 - 0.9396j, -0.5278 - 0.8778j])
    return ChannelSet(h_r1=h_r1, H_r2=H_r2, f=f, h_d=h_d, h_e_bar=h_e_bar)


def env_overrides(prefix='SERELAY_'):
    """Flag values supplied through ``SERELAY_*`` environment variables."""
    names = ('config', 'seed', 'trials', 'scheme', 'receive_mode', 'out', 'workers')
    return {n: os.environ[prefix + n.upper()] for n in names
            if prefix + n.upper() in os.environ}
