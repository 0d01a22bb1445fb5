"""
Command-line entry point.

Setting precedence, highest first: command-line flag, ``SERELAY_*``
environment variable, config file, built-in default.
"""
import argparse
import json
import sys

import numpy as np

from .beamform import run_algorithm1
from .channel import sample_channels, trial_rng
from .errors import SerelayError
from .harness import (delta_profile, env_overrides, format_csv, load_config,
                      paper_fixture_channels, run_sweep, write_profile_csv)
from .tsr_baseline import run_algorithm2

_FLAG_KEYS = ('seed', 'trials', 'scheme', 'receive_mode')


def _common(p):
    p.add_argument('--config', metavar='PATH', help="key = value config file")
    p.add_argument('--seed', type=int, help="master seed")
    p.add_argument('--trials', type=int, help="Monte Carlo trials per point")
    p.add_argument('--scheme', choices=('ser', 'tsr', 'both'), help="schemes to run")
    p.add_argument('--receive-mode', dest='receive_mode', choices=('reuse', 'single'),
                   help="relay receive antennas: all (reuse) or the dedicated one")
    p.add_argument('--out', metavar='PATH', help="output file (default stdout)")
    p.add_argument('--set', dest='sets', action='append', default=[], metavar='KEY=VALUE',
                   help="override any config key; repeatable")


def build_parser():
    parser = argparse.ArgumentParser(
        prog='serelay',
        description="Worst-case secrecy rate of a self-energy-recycling relay link.")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('single', help="optimize one channel realization, dump JSON")
    _common(p)
    p.add_argument('--fixture', action='store_true', help="use the published channels")
    p.add_argument('--trial', type=int, default=0, help="trial index of the random draw")

    p = sub.add_parser('sweep', help="Monte Carlo sweep, CSV output")
    _common(p)
    p.add_argument('--workers', type=int, help="worker threads (output is identical)")

    p = sub.add_parser('profile-delta', help="rate versus allocation ratio, CSV output")
    _common(p)
    p.add_argument('--fixture', action='store_true',
                   help="use the published channels (default unless --trial is given)")
    p.add_argument('--trial', type=int, help="use this random draw instead of the fixture")
    p.add_argument('--points', type=int, default=1001, help="delta grid size")

    p = sub.add_parser('validate', help="run the oracle checks; exit 0 when all pass")
    p.add_argument('--quick', action='store_true', help="reduced sample sizes")
    return parser


def _settings(args):
    """Merge environment and flags (flags win) into config overrides."""
    env = env_overrides()
    merged = dict(env)
    for key in ('config', 'out', 'workers') + _FLAG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    overrides = {}
    for item in args.sets:
        key, sep, value = item.partition('=')
        if not sep:
            raise SerelayError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    for key in ('seed', 'trials', 'receive_mode'):
        if key in merged:
            overrides[key] = merged[key]
    if 'scheme' in merged:
        overrides['schemes'] = merged['scheme']
    spec = load_config(merged.get('config'), overrides)
    return spec, merged


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, 'w', encoding='utf-8', newline='') as fh:
            fh.write(text)


def _jsonable(x):
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return [[float(v.real), float(v.imag)] for v in x.ravel()]
        return x.tolist()
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if hasattr(x, '__dataclass_fields__'):
        return {k: _jsonable(getattr(x, k)) for k in x.__dataclass_fields__}
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    if hasattr(x, 'value') and isinstance(x.value, str):
        return x.value
    return x


def _cmd_single(args):
    spec, merged = _settings(args)
    cfg = spec.base
    ch = (paper_fixture_channels() if args.fixture
          else sample_channels(cfg, trial_rng(cfg.seed, args.trial)))
    mode = 'reuse' if spec.receive_mode == 'antenna_reuse' else 'single'
    out = {'config': _jsonable(cfg), 'channels': _jsonable(ch),
           'receive_mode': spec.receive_mode}
    if 'ser' in spec.schemes:
        out['ser'] = _jsonable(run_algorithm1(cfg, ch, receive_mode=mode))
    if 'tsr' in spec.schemes:
        out['tsr'] = _jsonable(run_algorithm2(cfg, ch))
    _emit(json.dumps(out, indent=2) + '\n', merged.get('out'))
    return 0


def _cmd_sweep(args):
    spec, merged = _settings(args)
    workers = int(merged.get('workers', 1))
    _emit(format_csv(run_sweep(spec, workers=workers)), merged.get('out'))
    return 0


def _cmd_profile(args):
    spec, merged = _settings(args)
    cfg = spec.base
    if args.trial is None or args.fixture:
        ch = paper_fixture_channels()
    else:
        ch = sample_channels(cfg, trial_rng(cfg.seed, args.trial))
    mode = 'reuse' if spec.receive_mode == 'antenna_reuse' else 'single'
    prof = delta_profile(ch, cfg, np.linspace(0.0, 1.0, args.points), receive_mode=mode)
    out = merged.get('out')
    write_profile_csv(prof, sys.stdout if out is None else out)
    return 0


def _cmd_validate(args):
    from .validation import run_all
    results = run_all(quick=args.quick, report=lambda s: print(s, flush=True))
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


_COMMANDS = {'single': _cmd_single, 'sweep': _cmd_sweep,
             'profile-delta': _cmd_profile, 'validate': _cmd_validate}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SerelayError as exc:
        print(f"serelay: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"serelay: error: {exc}", file=sys.stderr)
        return 2


if __name__ == '__main__':
    sys.exit(main())
