"""
Oracle-backed checks of the optimizers, one function per claim.

Each check returns a :class:`CheckResult`; sizes default to the full
acceptance scale and can be shrunk for smoke runs. The checks only use
:mod:`serelay.oracle` and the direct formulas in :mod:`serelay.ser_model`
as references.
"""
from dataclasses import dataclass, replace
import time

import numpy as np

from .beamform import (WtMethod, build_saturated_matrices, run_algorithm1,
                       source_relay_beamformers, wt_interior,
                       wt_saturated_bounds, wt_saturated_leakage, zf_basis)
from .channel import SystemConfig, sample_channels, trial_rng, worst_case_effective_gain
from .errors import (DecompositionFailure, InfeasibleRecycling,
                     LeakageInfeasible, NotPositiveDefinite)
from .harness import ExperimentSpec, format_csv, paper_fixture_channels, run_sweep
from .numerics import random_unit_vectors
from .oracle import (alpha_delta_grid_oracle, delta_grid_oracle,
                     monotonicity_probe, sign_changes, uncertainty_ball_oracle,
                     wcsr_on_delta_grid)
from .ser_model import (BeamformerSet, evaluate, link_gains, relay_power,
                        sinr_eavesdropper_worst, wcsr_from_gains)
from .tsr_baseline import run_algorithm2

__all__ = ['CheckResult', 'check_delta_closed_form', 'check_svd_optimality',
           'check_zf_nulling', 'check_worst_case_bound', 'check_positive_rate',
           'check_eps_and_antennas', 'check_li_strength', 'check_eh_efficiency',
           'check_tsr_alternating', 'check_rate_shapes', 'check_determinism',
           'run_all']

EPS_GRID = (0.001, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1)
M_GRID = (2, 3, 4)
LAMBDA_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
ETA_GRID = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        tag = 'PASS' if self.passed else 'FAIL'
        return f"[{tag}] {self.name}: {self.detail} ({self.seconds:.1f} s)"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        return replace(res, seconds=time.perf_counter() - t0)
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _draws(cfg, count, seed):
    for k in range(count):
        yield sample_channels(cfg, trial_rng(seed, k))


# -- closed forms versus brute force -----------------------------------------

@_timed
def check_delta_closed_form(draws=1000, grid_points=10**6, eps=0.05, seed=11,
                            rate_tol=1e-6, delta_tol=2e-6):
    """Closed-form allocation ratio against an exhaustive delta grid."""
    cfg = SystemConfig(eps=eps)
    worst_rate = worst_delta = 0.0
    bad = interior = 0
    for ch in _draws(cfg, draws, seed):
        sol = run_algorithm1(cfg, ch)
        d_grid, r_grid = delta_grid_oracle(cfg, ch, sol.beams, grid_points)
        dr = abs(sol.eval.rwc - r_grid)
        worst_rate = max(worst_rate, dr)
        ok = dr <= rate_tol
        if sol.power.branch.interior:
            interior += 1
            dd = abs(sol.power.delta - d_grid)
            worst_delta = max(worst_delta, dd)
            ok = ok and dd <= delta_tol
        bad += not ok
    return CheckResult('delta* closed form vs grid', bad == 0,
                       f"{draws} draws ({interior} interior), max |drate|={worst_rate:.2e}, "
                       f"max |ddelta|={worst_delta:.2e}, failures={bad}")


@_timed
def check_svd_optimality(draws=200, samples=10**5, seed=12, rtol=1e-9, batch=10_000):
    """Top singular pair against the eigenvalues of ``H_r H_r^H`` and random pairs."""
    cfg = SystemConfig()
    rng = np.random.default_rng(seed)
    worst_rel = 0.0
    beaten = 0
    for ch in _draws(cfg, draws, seed):
        H = ch.H_r
        w_s, w_r, _ = source_relay_beamformers(H)
        val = abs(np.vdot(w_r, H.conj().T @ w_s)) ** 2
        lam = float(np.linalg.eigvalsh(H @ H.conj().T)[-1])
        worst_rel = max(worst_rel, abs(val - lam) / lam)
        left = samples
        while left > 0:
            k = min(batch, left)
            Ws = random_unit_vectors(rng, k, H.shape[0])
            Wr = random_unit_vectors(rng, k, H.shape[1])
            vals = np.abs(np.einsum('ki,ij,kj->k', Ws.conj(), H, Wr)) ** 2
            beaten += int(np.sum(vals > val * (1 + rtol)))
            left -= k
    ok = worst_rel <= rtol and beaten == 0
    return CheckResult('SVD receive/source optimality', ok,
                       f"{draws} H_r, max rel err={worst_rel:.2e}, "
                       f"random pairs beating it={beaten}")


def _wt_corpus(draws, seed):
    """Every transmit beamformer the optimizers can emit, over a varied corpus."""
    out = []
    for eps in (0.001, 0.05, 0.1):
        cfg = SystemConfig(eps=eps)
        channels = [paper_fixture_channels()] + list(_draws(cfg, draws, seed))
        for ch in channels:
            B = zf_basis(ch.h_e_bar)
            out.append((ch, wt_interior(ch.h_d, B)))
            for mode in ('reuse', 'single'):
                out.append((ch, run_algorithm1(cfg, ch, receive_mode=mode).beams.w_t))
            w_s, w_r, _ = source_relay_beamformers(ch.H_r)
            g = abs(np.vdot(w_r, ch.H_r.conj().T @ w_s)) ** 2
            try:
                out.append((ch, wt_saturated_bounds(
                    build_saturated_matrices(cfg, ch, g, B), B)))
            except (NotPositiveDefinite, DecompositionFailure, InfeasibleRecycling):
                pass
            try:
                out.append((ch, wt_saturated_leakage(cfg, ch, g, B)[0]))
            except (LeakageInfeasible, InfeasibleRecycling):
                pass
            out.append((ch, run_algorithm2(cfg, ch).w_t))
    return out


@_timed
def check_zf_nulling(draws=100, seed=13, tol=1e-10):
    """Every emitted ``w_t`` nulls the estimated eavesdropper and has unit norm."""
    corpus = _wt_corpus(draws, seed)
    leak = max(abs(np.vdot(ch.h_e_bar, w)) for ch, w in corpus)
    norm = max(abs(np.linalg.norm(w) - 1.0) for _, w in corpus)
    return CheckResult('zero-forcing nulling', leak <= tol and norm <= tol,
                       f"{len(corpus)} beamformers, max |h_e^H w_t|={leak:.2e}, "
                       f"max |norm-1|={norm:.2e}")


@_timed
def check_worst_case_bound(draws=200, samples=10**4, eps=0.05, seed=14, reach_rtol=1e-3):
    """Sampled eavesdropper SINRs never exceed the worst case and nearly reach it."""
    cfg = SystemConfig(eps=eps)
    rng = np.random.default_rng(seed)
    exceed = 0
    worst_gap = 0.0
    cases = 0
    for k, ch in enumerate(_draws(cfg, draws, seed)):
        sol = run_algorithm1(cfg, ch)
        gains = link_gains(cfg, ch, sol.beams)
        # the optimizer's w_t (zero-forcing) and an arbitrary direction
        for w_t in (sol.beams.w_t, random_unit_vectors(rng, 1, ch.M)[0]):
            beams = sol.beams.with_wt(w_t)
            Pr = relay_power(sol.power.delta, cfg, ch, beams.w_H, w_t)
            bound = sinr_eavesdropper_worst(cfg.Ps, Pr, cfg.N0, gains.g,
                                            worst_case_effective_gain(ch.h_e_bar, eps, w_t) ** 2)
            top = uncertainty_ball_oracle(ch, eps, w_t, samples, rng)
            sampled = sinr_eavesdropper_worst(cfg.Ps, Pr, cfg.N0, gains.g, top ** 2)
            exceed += sampled > bound * (1 + 1e-12)
            worst_gap = max(worst_gap, (bound - sampled) / bound)
            cases += 1
    ok = exceed == 0 and worst_gap <= reach_rtol
    return CheckResult('worst-case eavesdropper bound', ok,
                       f"{cases} cases x {samples} samples, exceedances={exceed}, "
                       f"max rel shortfall={worst_gap:.2e}")


@_timed
def check_positive_rate(tuples=10**4, seed=15):
    """``rwc > 0`` exactly when the destination gain beats the worst-case leak."""
    rng = np.random.default_rng(seed)
    mismatches = positives = 0
    for k in range(tuples):
        cfg = SystemConfig(eps=float(rng.uniform(0.0, 0.5)))
        ch = sample_channels(cfg, trial_rng(seed, k))
        w_s, w_r = (random_unit_vectors(rng, 1, n)[0] for n in (ch.N, ch.M + 1))
        w_t = random_unit_vectors(rng, 1, ch.M)[0]
        if k % 2:
            w_t = wt_interior(ch.h_d, zf_basis(ch.h_e_bar))
        beams = BeamformerSet(w_s=w_s, w_H=ch.h_r1 / np.linalg.norm(ch.h_r1),
                              w_r=w_r, w_t=w_t)
        gains = link_gains(cfg, ch, beams)
        li = cfg.eta * gains.f_gain
        d_max = 1.0 if li < 1.0 else (1.0 - 1e-9) / li
        delta = d_max * (1.0 - rng.uniform(0.0, 1.0))  # in (0, d_max]
        rwc = evaluate(cfg, ch, beams, delta).rwc
        positives += rwc > 0
        mismatches += (rwc > 0) != (gains.hd_gain > gains.he_wc_gain)
    return CheckResult('positive-rate condition', mismatches == 0,
                       f"{tuples} tuples ({positives} positive), mismatches={mismatches}")


# -- Monte Carlo trends --------------------------------------------------------

def _means(spec, workers=1):
    return {(r.value, r.scheme): r.rwc_mean for r in run_sweep(spec, workers)}


def _strict_increase(xs):
    return all(b > a for a, b in zip(xs, xs[1:]))


@_timed
def check_eps_and_antennas(trials=10**4, seed=2018, workers=1):
    """Rate falls with the uncertainty radius, grows with M, and reuse beats single."""
    base = SystemConfig(trials=trials, seed=seed)
    by_mode = {}
    for mode in ('antenna_reuse', 'single'):
        eps = _means(ExperimentSpec('eps', EPS_GRID, ('ser',), base, mode), workers)
        ms = _means(ExperimentSpec('M', M_GRID, ('ser',), base.with_(eps=0.01), mode), workers)
        by_mode[mode] = ([eps[(e, 'ser')] for e in EPS_GRID],
                         [ms[(float(m), 'ser')] for m in M_GRID])
    eps_r, m_r = by_mode['antenna_reuse']
    eps_s, m_s = by_mode['single']
    nonincr = all(b <= a for a, b in zip(eps_r, eps_r[1:]))
    incr_m = _strict_increase(m_r)
    reuse = all(r >= s for r, s in zip(eps_r + m_r, eps_s + m_s))
    fmt = lambda xs: '[' + ', '.join(f"{x:.4f}" for x in xs) + ']'  # noqa: E731
    return CheckResult('uncertainty / antenna-count trends', nonincr and incr_m and reuse,
                       f"eps: {fmt(eps_r)} nonincreasing={nonincr}; M: {fmt(m_r)} "
                       f"increasing={incr_m}; reuse>=single={reuse}")


@_timed
def check_li_strength(trials=10**4, seed=2018, workers=1, gain_band=(0.30, 1.00)):
    """TSR ignores the loopback channel, S-ER profits from it."""
    base = SystemConfig(trials=trials, seed=seed, eta=0.8, eps=0.001,
                        d_sr=1.0, d_rd=1.0, d_re=1.2)
    m = _means(ExperimentSpec('lambda_f', LAMBDA_GRID, ('ser', 'tsr'), base), workers)
    ser = [m[(v, 'ser')] for v in LAMBDA_GRID]
    tsr = [m[(v, 'tsr')] for v in LAMBDA_GRID]
    spread = max(tsr) - min(tsr)
    gains = [s / t - 1.0 for s, t in zip(ser, tsr)]
    ok_a = spread <= 1e-12
    ok_b = _strict_increase(ser)
    ok_c = all(gain_band[0] <= x <= gain_band[1] for x in gains)
    return CheckResult('loopback-strength claims', ok_a and ok_b and ok_c,
                       f"TSR spread={spread:.1e}; S-ER increasing={ok_b}; "
                       f"gain range [{min(gains):.1%}, {max(gains):.1%}]")


@_timed
def check_eh_efficiency(trials=10**4, seed=2018, workers=1, min_gap=0.4):
    """S-ER minus TSR gap is large at high efficiency and grows with it."""
    base = SystemConfig(trials=trials, seed=seed, lambda_f=0.2, eps=0.001)
    m = _means(ExperimentSpec('eta', ETA_GRID, ('ser', 'tsr'), base), workers)
    gaps = [m[(v, 'ser')] - m[(v, 'tsr')] for v in ETA_GRID]
    ok = gaps[-1] >= min_gap and _strict_increase(gaps)
    return CheckResult('harvesting-efficiency gap', ok,
                       'gaps ' + ', '.join(f"{v}:{x:.3f}" for v, x in zip(ETA_GRID, gaps)))


# -- baseline optimizer and shape claims --------------------------------------

@_timed
def check_tsr_alternating(draws=200, seed=16, tol=2e-3, eps=0.05):
    """Alternating TSR optimizer is monotone and matches a 2-D grid."""
    cfg = SystemConfig(eps=eps)
    drops = far = unconverged = 0
    worst = 0.0
    for ch in _draws(cfg, draws, seed):
        sol = run_algorithm2(cfg, ch)
        hist = np.asarray(sol.history)
        drops += int(np.sum(np.diff(hist) < -1e-12))
        unconverged += not sol.converged
        _, _, r_grid = alpha_delta_grid_oracle(cfg, ch, sol.w_t, 200, 200)
        worst = max(worst, abs(sol.rwc - r_grid))
        far += abs(sol.rwc - r_grid) > tol
    ok = drops == 0 and far == 0
    return CheckResult('TSR alternating optimizer', ok,
                       f"{draws} draws, objective drops={drops}, unconverged={unconverged}, "
                       f"max |rate - grid|={worst:.2e}")


@_timed
def check_rate_shapes(instances=500, seed=17, eps=0.05, delta_points=10_001,
                      g_points=1000, max_draws=100_000):
    """Single peak in the allocation ratio; nondecreasing in the relay gain."""
    cfg = SystemConfig(eps=eps)
    found = bad_delta = bad_g = 0
    k = 0
    while found < instances and k < max_draws:
        ch = sample_channels(cfg, trial_rng(seed, k))
        k += 1
        sol = run_algorithm1(cfg, ch)
        if not sol.power.branch.interior:
            continue
        found += 1
        gains = link_gains(cfg, ch, sol.beams)
        deltas = np.linspace(0.0, 1.0, delta_points)
        signs = monotonicity_probe(lambda d: wcsr_on_delta_grid(cfg, gains, d), deltas)
        bad_delta += sign_changes(signs) != 1
        g_grid = np.linspace(gains.g * 1e-2, gains.g * 1e2, g_points)
        f_g = lambda gs: np.array([  # noqa: E731
            wcsr_from_gains(cfg, replace(gains, g=float(x)), sol.power.delta) for x in gs])
        bad_g += int(np.any(monotonicity_probe(f_g, g_grid) < 0))
    ok = found == instances and bad_delta == 0 and bad_g == 0
    return CheckResult('rate-shape checks', ok,
                       f"{found} interior instances ({k} draws), not single-peaked={bad_delta}, "
                       f"decreasing in g={bad_g}")


@_timed
def check_determinism(trials=200, seed=2018, workers=(1, 8)):
    """Sweep CSV is byte-identical across reruns and thread counts."""
    spec = ExperimentSpec('eps', (0.001, 0.05, 0.1), ('ser', 'tsr'),
                          SystemConfig(trials=trials, seed=seed))
    outputs = [format_csv(run_sweep(spec, w)) for w in (workers[0],) + tuple(workers)]
    same = all(o.encode() == outputs[0].encode() for o in outputs)
    return CheckResult('sweep determinism', same,
                       f"{len(outputs)} runs (workers {workers[0]}, "
                       f"{', '.join(map(str, workers))}), identical={same}")


ALL_CHECKS = (check_delta_closed_form, check_svd_optimality, check_zf_nulling,
              check_worst_case_bound, check_positive_rate, check_eps_and_antennas,
              check_li_strength, check_eh_efficiency, check_tsr_alternating,
              check_rate_shapes, check_determinism)

# reduced sizes for a fast smoke run
QUICK = {
    'check_delta_closed_form': dict(draws=50),
    'check_svd_optimality': dict(draws=20, samples=10**4),
    'check_zf_nulling': dict(draws=10),
    'check_worst_case_bound': dict(draws=20),
    'check_positive_rate': dict(tuples=1000),
    'check_eps_and_antennas': dict(trials=300),
    'check_li_strength': dict(trials=300),
    'check_eh_efficiency': dict(trials=300),
    'check_tsr_alternating': dict(draws=20),
    'check_rate_shapes': dict(instances=50),
    'check_determinism': dict(trials=20),
}


def run_all(quick=False, report=None):
    """Run every check; ``report`` (e.g. ``print``) receives each result line."""
    results = []
    for check in ALL_CHECKS:
        res = check(**(QUICK[check.__name__] if quick else {}))
        if report is not None:
            report(res.line())
        results.append(res)
    return results
