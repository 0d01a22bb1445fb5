"""
Source, receive and transmit beamformers, and the one-pass optimizer
that combines them with the closed-form power allocation.

All transmit beamformers are zero-forcing: they are built as ``B v`` with
``B`` an orthonormal basis of the null space of ``h_e_bar^H``, so the
estimated eavesdropper channel is nulled exactly and only the
uncertainty radius leaks (``b = eps^2``).
"""
from dataclasses import dataclass
import enum
import math

import numpy as np

from .errors import (DecompositionFailure, InfeasibleRecycling,
                     LeakageInfeasible, NotPositiveDefinite)
from .numerics import (golden_section_max, max_gen_eigvec, nullspace_basis,
                       phase_normalize, top_singular_triplet)
from .power_alloc import Branch, PowerSolution, _power_from_gains
from .ser_model import (BeamformerSet, LinkGains, SecrecyEvaluation, evaluate,
                        link_gains, mrt_energy_beamformer, wcsr_from_gains)

__all__ = ['WtMethod', 'SerSolution', 'SaturatedMatrices',
           'source_relay_beamformers', 'single_receive_beamformers', 'zf_basis',
           'wt_interior', 'build_saturated_matrices', 'lambda_bounds',
           'wt_saturated_bounds', 'leakage_budget', 'leakage_pinned_beam',
           'wt_saturated_leakage',
           'run_algorithm1']

ZETA_TOL = 1e-4
_ZETA_GRID = 101


class WtMethod(str, enum.Enum):
    INTERIOR = 'Interior'
    SATURATED_BOUNDS = 'SaturatedBounds'
    SATURATED_LEAKAGE = 'SaturatedLeakage'


@dataclass(frozen=True)
class SerSolution:
    beams: BeamformerSet
    power: PowerSolution
    eval: SecrecyEvaluation
    wt_method: WtMethod


@dataclass(frozen=True)
class SaturatedMatrices:
    R_RD: np.ndarray
    Rt_fD: np.ndarray
    Rt_RD: np.ndarray
    R_RE: np.ndarray
    Rt_fE: np.ndarray
    Rt_RE: np.ndarray


def source_relay_beamformers(H_r):
    """
    Top singular pair of ``H_r^H``.

    Returns ``(w_s, w_r, sigma_max)`` with ``w_s`` the right singular
    vector (length N) and ``w_r`` the left one (length M+1), so that
    ``|w_r^H H_r^H w_s| = sigma_max``.
    """
    H_r = np.asarray(H_r, dtype=complex)
    sigma, u, v = top_singular_triplet(H_r.conj().T)
    return v, u, sigma


def single_receive_beamformers(h_r1, M):
    """Receive on the dedicated antenna only: ``w_r = e1``, ``w_s`` MRT."""
    w_s = mrt_energy_beamformer(h_r1)
    w_r = np.zeros(M + 1, dtype=complex)
    w_r[0] = 1.0
    return w_s, w_r, float(np.linalg.norm(h_r1))


def zf_basis(h_e_bar):
    return nullspace_basis(h_e_bar)


def _unit(x):
    return phase_normalize(x / np.linalg.norm(x))


def wt_interior(h_d, B):
    """
    Null-space beamformer maximizing ``|h_d^H B v|^2 / ||B v||^2``.

    When ``h_d`` has no component in the null space the first basis
    column is returned.
    """
    h_t = B.conj().T @ h_d
    if np.linalg.norm(h_t) <= 1e-12 * max(np.linalg.norm(h_d), 1e-300):
        return B[:, 0].copy()
    res = max_gen_eigvec(np.outer(h_t, h_t.conj()), B.conj().T @ B)
    return _unit(B @ res.vector)


def _scalars(cfg, channels, g):
    K = cfg.eta * cfg.Ps * float(np.vdot(channels.h_r1, channels.h_r1).real)
    c = cfg.N0 * cfg.Ps * g + cfg.N0 ** 2
    return K, c


def build_saturated_matrices(cfg, channels, g, B):
    """
    Quadratic forms of the all-power (delta = 1) objective on the
    null-space coordinates. ``g = |w_r^H H_r^H w_s|^2``; ``w_H`` is MRT
    so ``|h_r1^H w_H|^2 = ||h_r1||^2``.
    """
    K, c = _scalars(cfg, channels, g)
    BB = B.conj().T @ B
    h_t = B.conj().T @ channels.h_d
    f_t = B.conj().T @ channels.f
    Hd = np.outer(h_t, h_t.conj())
    F = np.outer(f_t, f_t.conj())
    eps2 = cfg.eps ** 2
    R_RD = cfg.Ps * K * g * Hd
    Rt_fD = c * (BB - cfg.eta * F) + K * cfg.N0 * Hd
    R_RE = cfg.Ps * K * g * eps2 * BB
    Rt_fE = c * (BB - cfg.eta * F) + K * cfg.N0 * eps2 * BB
    return SaturatedMatrices(R_RD=R_RD, Rt_fD=Rt_fD, Rt_RD=R_RD + Rt_fD,
                             R_RE=R_RE, Rt_fE=Rt_fE, Rt_RE=R_RE + Rt_fE)


def lambda_bounds(cfg, channels, g):
    """
    Per-antenna ratio bounds ``(lambda_min, lambda_max)`` on
    ``v^H Rt_fE v / v^H Rt_fD v``, treating both forms as diagonal in the
    antenna coordinates.
    """
    K = cfg.eta * cfg.Ps * float(np.vdot(channels.h_r1, channels.h_r1).real)
    one_m = 1.0 - cfg.eta * np.abs(channels.f) ** 2
    if np.any(one_m <= 0.0):
        raise InfeasibleRecycling("1 - eta |f(i)|^2 <= 0 for some antenna")
    base = (cfg.Ps * g + cfg.N0) * one_m
    ratios = (K * cfg.eps ** 2 + base) / (K * np.abs(channels.h_d) ** 2 + base)
    return float(ratios.min()), float(ratios.max())


def wt_saturated_bounds(mats, B):
    """Maximize the bound-surrogate ``v^H Rt_RD v / v^H Rt_RE v``."""
    res = max_gen_eigvec(mats.Rt_RD, mats.Rt_RE)
    return _unit(B @ res.vector)


def leakage_budget(cfg, channels, g):
    """
    Largest ``|f^H w_t|^2`` that keeps the worst-case leakage rate at
    or below ``gamma0`` when all harvested power is relayed.
    """
    h = float(np.vdot(channels.h_r1, channels.h_r1).real)
    gam = 2.0 ** (2.0 * cfg.gamma0) - 1.0
    psg = cfg.Ps * g
    return (1.0 / cfg.eta
            - cfg.Ps * h * cfg.eps ** 2 / (psg + cfg.N0) * (psg / (cfg.N0 * gam) - 1.0))


def leakage_pinned_beam(h_t, f_t, t):
    """
    Unit ``v`` maximizing ``|h_t^H v|^2`` subject to ``|f_t^H v|^2 = t``.

    Both forms are rank one, so the optimum mixes the unit vector along
    ``f_t`` with the part of ``h_t`` orthogonal to it, phases aligned.
    """
    fn = np.linalg.norm(f_t)
    if fn == 0.0:
        return h_t / np.linalg.norm(h_t)
    p = f_t / fn
    ph = np.vdot(p, h_t)
    h_perp = h_t - ph * p
    hp = np.linalg.norm(h_perp)
    s = min(max(t / fn ** 2, 0.0), 1.0)
    a_par = math.sqrt(s)
    a_perp = math.sqrt(1.0 - s)
    rot = ph / abs(ph) if abs(ph) > 0 else 1.0
    if hp > 0:
        v = a_par * rot * p + a_perp * h_perp / hp
    else:
        # h_t is parallel to f_t: any unit vector orthogonal to p will do
        q = np.zeros_like(p)
        q[int(np.argmin(np.abs(p)))] = 1.0
        q = q - np.vdot(p, q) * p
        v = a_par * rot * p + a_perp * q / np.linalg.norm(q)
    return v


def wt_saturated_leakage(cfg, channels, g, B, gamma0=None):
    """
    Leakage-constrained beamformer for delta = 1.

    For each ``zeta`` in [0, 1] the loopback gain is pinned to
    ``|f^H w_t|^2 = zeta * g(eps)`` (capped at the largest reachable
    value) and the destination gain maximized on that set; ``zeta`` is
    then chosen by golden-section search on the end-to-end rate, with a
    grid fallback if the search and a 101-point grid disagree.

    Returns
    -------
    (w_t, zeta)

    Raises
    ------
    LeakageInfeasible
        If the leakage budget ``g(eps)`` is not positive.
    """
    if gamma0 is not None and gamma0 != cfg.gamma0:
        cfg = cfg.with_(gamma0=gamma0)
    budget = leakage_budget(cfg, channels, g)
    if not budget > 0.0:
        raise LeakageInfeasible(f"leakage budget g(eps) = {budget:.6g} <= 0")
    h_t = B.conj().T @ channels.h_d
    if np.linalg.norm(h_t) == 0.0:
        raise LeakageInfeasible("destination channel has no null-space component")
    f_t = B.conj().T @ channels.f
    t_max = min(budget, float(np.vdot(f_t, f_t).real))
    # delta = 1 must stay feasible
    t_max = min(t_max, (1.0 - 1e-12) / cfg.eta)
    h_gain = float(np.vdot(channels.h_r1, channels.h_r1).real)
    eps2 = cfg.eps ** 2

    def beam(zeta):
        return B @ leakage_pinned_beam(h_t, f_t, zeta * t_max)

    def score(zeta):
        w = beam(zeta)
        gains = _gains(h_gain, g, w, channels, eps2)
        try:
            return wcsr_from_gains(cfg, gains, 1.0)
        except InfeasibleRecycling:
            return -1.0

    z_gs, r_gs = golden_section_max(score, 0.0, 1.0, ZETA_TOL)
    grid = np.linspace(0.0, 1.0, _ZETA_GRID)
    vals = [score(z) for z in grid]
    k = int(np.argmax(vals))
    zeta = z_gs
    if vals[k] > r_gs + 1e-6:
        # not unimodal: refine around the grid winner instead
        step = 1.0 / (_ZETA_GRID - 1)
        zeta, _ = golden_section_max(score, max(0.0, grid[k] - step),
                                     min(1.0, grid[k] + step), ZETA_TOL)
    return _unit(beam(zeta)), zeta


def _gains(h_gain, g, w_t, channels, eps2):
    return LinkGains(h_gain=h_gain, g=g,
                     hd_gain=float(abs(np.vdot(channels.h_d, w_t)) ** 2),
                     he_wc_gain=(abs(np.vdot(channels.h_e_bar, w_t))
                                 + math.sqrt(eps2) * np.linalg.norm(w_t)) ** 2,
                     f_gain=float(abs(np.vdot(channels.f, w_t)) ** 2))


def _candidate(cfg, channels, beams, method):
    gains = link_gains(cfg, channels, beams)
    power = _power_from_gains(cfg, gains)
    ev = evaluate(cfg, channels, beams, power.delta)
    return SerSolution(beams=beams, power=power, eval=ev, wt_method=method)


def run_algorithm1(cfg, channels, receive_mode='reuse'):
    """
    One pass of the worst-case secrecy-rate optimizer.

    1. ``(w_s, w_r)`` from the top singular pair of ``H_r^H`` (or the
       dedicated antenna alone when ``receive_mode='single'``).
    2. Candidate ``w_t`` from the null-space eigenproblem.
    3. If the allocation analysis lands on an interior branch, stop with
       ``delta* = 1/(eta |f^H w_t|^2 + Q)``.
    4. Otherwise build the two all-power beamformers (bound surrogate and
       leakage-constrained), evaluate every candidate at its own optimal
       allocation, and keep the best.
    """
    w_H = mrt_energy_beamformer(channels.h_r1)
    if receive_mode in ('reuse', 'antenna_reuse'):
        w_s, w_r, _ = source_relay_beamformers(channels.H_r)
    elif receive_mode == 'single':
        w_s, w_r, _ = single_receive_beamformers(channels.h_r1, channels.M)
    else:
        raise ValueError(f"unknown receive_mode {receive_mode!r}")
    B = zf_basis(channels.h_e_bar)
    w_t0 = wt_interior(channels.h_d, B)
    beams0 = BeamformerSet(w_s=w_s, w_H=w_H, w_r=w_r, w_t=w_t0)
    best = _candidate(cfg, channels, beams0, WtMethod.INTERIOR)
    if best.power.branch.interior:
        return best

    g = link_gains(cfg, channels, beams0).g
    builders = [
        (WtMethod.SATURATED_BOUNDS,
         lambda: wt_saturated_bounds(build_saturated_matrices(cfg, channels, g, B), B)),
        (WtMethod.SATURATED_LEAKAGE,
         lambda: wt_saturated_leakage(cfg, channels, g, B)[0]),
    ]
    for method, build in builders:
        try:
            cand = _candidate(cfg, channels, beams0.with_wt(build()), method)
        except (NotPositiveDefinite, DecompositionFailure, LeakageInfeasible,
                InfeasibleRecycling):
            continue
        if cand.eval.rwc > best.eval.rwc:
            best = cand
    return best
