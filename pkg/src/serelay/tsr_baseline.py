"""
Time-switching relaying (TSR) benchmark.

A fraction ``alpha`` of the block harvests energy; the rest is split
between two half-duplex hops, so the rate carries a ``(1 - alpha) / 2``
prefactor. Source beamformers are MRT on ``h_r1`` and the relay receives
on its single dedicated antenna, so ``g_TSR = ||h_r1||^2``.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .beamform import wt_interior, zf_basis
from .channel import worst_case_effective_gain
from .errors import InvalidAlpha
from .numerics import golden_section_max

__all__ = ['TsrSolution', 'tsr_relay_power', 'tsr_sinrs', 'tsr_wcsr',
           'tsr_rate', 'run_algorithm2']

ALPHA0 = 1.0 / 3.0
DELTA0 = 1.0
ALPHA_LO = 1e-6
ALPHA_HI = 1.0 - 1e-6
SEARCH_TOL = 1e-8


@dataclass(frozen=True)
class TsrSolution:
    alpha: float
    delta: float
    w_t: np.ndarray
    rwc: float
    iterations: int
    converged: bool
    history: tuple = field(default=(), repr=False)


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise InvalidAlpha(f"alpha must lie in (0, 1), got {alpha}")


def tsr_relay_power(cfg, channels, alpha, delta):
    """``2 delta Ps eta alpha / (1 - alpha) ||h_r1||^2``."""
    _check_alpha(alpha)
    h = float(np.vdot(channels.h_r1, channels.h_r1).real)
    return 2.0 * delta * cfg.Ps * cfg.eta * alpha / (1.0 - alpha) * h


def tsr_sinrs(cfg, channels, alpha, delta, w_t):
    """Destination and worst-case eavesdropper SINRs for TSR."""
    Pr = tsr_relay_power(cfg, channels, alpha, delta)
    g = float(np.vdot(channels.h_r1, channels.h_r1).real)
    a = abs(np.vdot(channels.h_d, w_t)) ** 2
    b = worst_case_effective_gain(channels.h_e_bar, cfg.eps, w_t) ** 2
    return _sinrs(cfg.Ps, cfg.N0, Pr, g, a, b)


def _sinrs(Ps, N0, Pr, g, a, b):
    den_tail = Ps * N0 * g + N0 * N0
    gd = Ps * Pr * a * g / (Pr * N0 * a + den_tail)
    ge = Ps * Pr * b * g / (Pr * N0 * b + den_tail)
    return gd, ge


def tsr_wcsr(alpha, gamma_d, gamma_ewc):
    """``(1 - alpha) / 2 [log2(1 + gamma_d) - log2(1 + gamma_ewc)]^+``."""
    _check_alpha(alpha)
    r = (math.log1p(gamma_d) - math.log1p(gamma_ewc)) / math.log(2.0)
    return 0.5 * (1.0 - alpha) * max(r, 0.0)


def tsr_rate(cfg, channels, alpha, delta, w_t):
    gd, ge = tsr_sinrs(cfg, channels, alpha, delta, w_t)
    return tsr_wcsr(alpha, gd, ge)


class _Objective:
    """Scalar TSR rate with the channel gains frozen."""

    def __init__(self, cfg, channels, w_t):
        self.Ps, self.N0 = cfg.Ps, cfg.N0
        self.g = float(np.vdot(channels.h_r1, channels.h_r1).real)
        self.pmax_unit = 2.0 * cfg.Ps * cfg.eta * self.g
        self.a = abs(np.vdot(channels.h_d, w_t)) ** 2
        self.b = worst_case_effective_gain(channels.h_e_bar, cfg.eps, w_t) ** 2

    def __call__(self, alpha, delta):
        Pr = delta * self.pmax_unit * alpha / (1.0 - alpha)
        gd, ge = _sinrs(self.Ps, self.N0, Pr, self.g, self.a, self.b)
        return 0.5 * (1.0 - alpha) * max(math.log1p(gd) - math.log1p(ge), 0.0) / math.log(2.0)


def run_algorithm2(cfg, channels, eps_tol=1e-6, max_iter=100, fixed_delta=None):
    """
    Alternating maximization of the TSR rate over ``(delta, w_t, alpha)``.

    Each sweep updates the allocation ratio by a 1-D search on [0, 1],
    the transmit beamformer by the zero-forcing eigenproblem, and the
    time-switching ratio by a 1-D search on (0, 1). An update is kept
    only if it does not lower the rate, so the objective is monotone.
    Stops when the rate changes by at most ``eps_tol``; otherwise returns
    after ``max_iter`` sweeps with ``converged=False``.

    ``fixed_delta`` pins the allocation ratio and skips its update.
    """
    B = zf_basis(channels.h_e_bar)
    alpha = ALPHA0
    delta = DELTA0 if fixed_delta is None else float(fixed_delta)
    w_t = wt_interior(channels.h_d, B)
    obj = _Objective(cfg, channels, w_t)
    rate = obj(alpha, delta)
    history = [rate]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        prev = rate
        if fixed_delta is None:
            d_new, r_new = golden_section_max(lambda d: obj(alpha, d), 0.0, 1.0, SEARCH_TOL)
            if r_new >= rate:
                delta, rate = d_new, r_new
        w_new = wt_interior(channels.h_d, B)
        obj_new = _Objective(cfg, channels, w_new)
        r_new = obj_new(alpha, delta)
        if r_new >= rate:
            w_t, obj, rate = w_new, obj_new, r_new
        a_new, r_new = golden_section_max(lambda a: obj(a, delta), ALPHA_LO, ALPHA_HI, SEARCH_TOL)
        if r_new >= rate:
            alpha, rate = a_new, r_new
        history.append(rate)
        if abs(rate - prev) <= eps_tol:
            converged = True
            break
    return TsrSolution(alpha=alpha, delta=delta, w_t=w_t, rwc=rate,
                       iterations=it, converged=converged, history=tuple(history))
