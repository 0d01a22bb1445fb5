"""
Brute-force validators for the closed forms.

Nothing here calls the optimizers it checks: grids and random sampling
only, evaluated through the direct formulas of :mod:`serelay.ser_model`.
"""
import math

import numpy as np

from .channel import sample_uncertainty
from .errors import InfeasibleRecycling
from .numerics import random_unit_vectors
from .ser_model import link_gains, wcsr_from_gains

__all__ = ['delta_grid_oracle', 'wcsr_on_delta_grid', 'alpha_delta_grid_oracle',
           'beamformer_sampling_oracle', 'uncertainty_ball_oracle',
           'monotonicity_probe', 'sign_changes']


def wcsr_on_delta_grid(cfg, gains, deltas):
    """WCSR over ``deltas``; infeasible points come back as NaN."""
    deltas = np.asarray(deltas, dtype=float)
    feasible = deltas * cfg.eta * gains.f_gain < 1.0
    out = np.full(deltas.shape, np.nan)
    if np.any(feasible):
        out[feasible] = wcsr_from_gains(cfg, gains, deltas[feasible])
    return out


def delta_grid_oracle(cfg, channels, beams, grid_points=10**6):
    """
    Exhaustive maximization of the WCSR over a uniform grid on [0, 1].

    Returns ``(delta_best, rwc_best)``; grid points with an infeasible
    recycling loop are skipped.
    """
    if grid_points < 1000:
        raise ValueError("grid_points must be >= 1000")
    gains = link_gains(cfg, channels, beams)
    deltas = np.linspace(0.0, 1.0, int(grid_points))
    vals = wcsr_on_delta_grid(cfg, gains, deltas)
    k = int(np.nanargmax(vals))
    return float(deltas[k]), float(vals[k])


def alpha_delta_grid_oracle(cfg, channels, w_t, n_alpha=200, n_delta=200):
    """
    Exhaustive TSR rate maximization over ``alpha`` in (0, 1) (interior
    grid, endpoints excluded) and ``delta`` in [0, 1].
    """
    g = float(np.vdot(channels.h_r1, channels.h_r1).real)
    a = abs(np.vdot(channels.h_d, w_t)) ** 2
    b = (abs(np.vdot(channels.h_e_bar, w_t)) + cfg.eps * np.linalg.norm(w_t)) ** 2
    alphas = np.linspace(0.0, 1.0, n_alpha + 2)[1:-1]
    deltas = np.linspace(0.0, 1.0, n_delta)
    A, D = np.meshgrid(alphas, deltas, indexing='ij')
    Pr = 2.0 * D * cfg.Ps * cfg.eta * A / (1.0 - A) * g
    tail = cfg.Ps * cfg.N0 * g + cfg.N0 ** 2
    gd = cfg.Ps * Pr * a * g / (Pr * cfg.N0 * a + tail)
    ge = cfg.Ps * Pr * b * g / (Pr * cfg.N0 * b + tail)
    R = 0.5 * (1.0 - A) * np.maximum(np.log2(1 + gd) - np.log2(1 + ge), 0.0)
    i, j = np.unravel_index(int(np.argmax(R)), R.shape)
    return float(alphas[i]), float(deltas[j]), float(R[i, j])


def beamformer_sampling_oracle(objective, dim, samples, rng, basis=None,
                               batch=10_000):
    """
    Largest value of ``objective`` over random unit vectors.

    ``objective`` maps an array of shape (k, dim) of unit vectors (rows)
    to k values. With ``basis`` (dim x r, orthonormal columns) the
    vectors are drawn isotropically inside its span instead.
    """
    best = -math.inf
    left = int(samples)
    while left > 0:
        k = min(batch, left)
        if basis is None:
            V = random_unit_vectors(rng, k, dim)
        else:
            V = random_unit_vectors(rng, k, basis.shape[1]) @ basis.T
        best = max(best, float(np.max(objective(V))))
        left -= k
    return best


def uncertainty_ball_oracle(channels, eps, w_t, samples, rng, aligned_fraction=0.25):
    """
    Largest sampled ``|(h_e_bar + dh)^H w_t|`` over ``||dh|| <= eps``.

    Draws are split among interior points, boundary points, and boundary
    points concentrated around the direction aligned with ``w_t`` (the
    maximizer), so the sample maximum approaches the bound from below.
    """
    h = np.asarray(channels.h_e_bar)
    w = np.asarray(w_t)
    dim = w.size
    n_al = int(samples * aligned_fraction)
    n_bd = (samples - n_al) // 2
    n_in = samples - n_al - n_bd
    parts = [sample_uncertainty(eps, dim, rng, size=n_in),
             sample_uncertainty(eps, dim, rng, size=n_bd, boundary=True)]
    if n_al > 0:
        inner = np.vdot(h, w)
        # dh = c w_hat gives dh^H w = conj(c) ||w||, in phase with h^H w for c = conj(rot)
        rot = np.conj(inner) / abs(inner) if abs(inner) > 0 else 1.0
        w_hat = w / np.linalg.norm(w)
        spread = 10.0 ** rng.uniform(-6, 0, size=(n_al, 1))
        z = rng.standard_normal((n_al, dim)) + 1j * rng.standard_normal((n_al, dim))
        d = w_hat * rot + spread * z / np.linalg.norm(z, axis=1, keepdims=True)
        parts.append(eps * d / np.linalg.norm(d, axis=1, keepdims=True))
    dh = np.vstack(parts)
    return float(np.max(np.abs((h + dh).conj() @ w)))


def monotonicity_probe(f, grid, atol=0.0):
    """
    Signs (+1, 0, -1) of successive finite differences of ``f`` on ``grid``.

    Differences within ``atol`` of zero count as 0. ``f`` may be
    vectorized or scalar; NaN values are dropped before differencing.
    """
    grid = np.asarray(grid, dtype=float)
    try:
        vals = np.asarray(f(grid), dtype=float)
        if vals.shape != grid.shape:
            raise ValueError
    except (TypeError, ValueError, InfeasibleRecycling):
        vals = np.array([_safe(f, x) for x in grid])
    vals = vals[np.isfinite(vals)]
    d = np.diff(vals)
    s = np.sign(d)
    s[np.abs(d) <= atol] = 0
    return s.astype(int)


def _safe(f, x):
    try:
        return float(f(x))
    except InfeasibleRecycling:
        return math.nan


def sign_changes(signs):
    """Number of sign flips in a sign pattern, zeros ignored."""
    nz = [s for s in signs if s != 0]
    return sum(1 for p, q in zip(nz, nz[1:]) if p != q)
