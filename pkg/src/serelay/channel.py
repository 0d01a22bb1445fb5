"""
Rayleigh-fading channel draws and the bounded-uncertainty eavesdropper model.

Every Monte Carlo trial gets its own generator derived from
``(seed, trial_index)`` through :class:`numpy.random.SeedSequence`, so
results never depend on trial order or on how trials are spread over
workers. Channels are drawn as unit-variance circularly-symmetric
Gaussians and then scaled, which keeps draws paired across parameter
values that only change variances.
"""
from dataclasses import dataclass, fields, replace
import math

import numpy as np

from .errors import ConfigError, InvalidDistance

__all__ = ['SystemConfig', 'ChannelSet', 'variance_from_distance',
           'trial_rng', 'sample_channels', 'worst_case_effective_gain',
           'sample_uncertainty']


@dataclass(frozen=True)
class SystemConfig:
    """
    Scalar parameters of one scenario.

    Powers are linear (watts), distances are normalized, ``gamma0`` is
    in bits/s/Hz. The block duration ``T`` is fixed to 1.
    """
    N: int = 5
    M: int = 3
    Ps: float = 1.0
    N0: float = 0.01
    eta: float = 0.8
    lambda_f: float = 0.2
    eps: float = 0.05
    m_exp: float = 3.0
    d_sr: float = 1.0
    d_rd: float = 1.0
    d_re: float = 1.2
    gamma0: float = 1e-6
    trials: int = 10_000
    seed: int = 2018
    T: float = 1.0

    def __post_init__(self):
        checks = [
            ('N', self.N >= 1, "must be >= 1"),
            ('M', self.M >= 2, "must be >= 2 for zero-forcing"),
            ('Ps', self.Ps > 0, "must be positive"),
            ('N0', self.N0 > 0, "must be positive"),
            ('eta', 0 < self.eta <= 1, "must lie in (0, 1]"),
            ('lambda_f', self.lambda_f >= 0, "must be >= 0"),
            ('eps', self.eps >= 0, "must be >= 0"),
            ('d_sr', self.d_sr > 0, "must be positive"),
            ('d_rd', self.d_rd > 0, "must be positive"),
            ('d_re', self.d_re > 0, "must be positive"),
            ('gamma0', self.gamma0 > 0, "must be positive"),
            ('trials', self.trials >= 1, "must be >= 1"),
            ('seed', 0 <= self.seed < 2**64, "must be an unsigned 64-bit integer"),
            ('T', self.T == 1.0, "block duration is fixed to 1"),
        ]
        for key, ok, msg in checks:
            if not ok:
                raise ConfigError(key, f"{msg} (got {getattr(self, key)!r})")

    def with_(self, **changes):
        return replace(self, **changes)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class ChannelSet:
    """One realization of every channel in the link."""
    h_r1: np.ndarray    # (N,)   source -> relay receive antenna
    H_r2: np.ndarray    # (N, M) source -> reused transmit antennas
    f: np.ndarray       # (M,)   loopback (LI) channel
    h_d: np.ndarray     # (M,)   relay -> destination
    h_e_bar: np.ndarray  # (M,)  estimated relay -> eavesdropper

    @property
    def H_r(self):
        """Composite ``[h_r1, H_r2]`` of shape (N, M+1)."""
        return np.column_stack([self.h_r1, self.H_r2])

    @property
    def N(self):
        return self.h_r1.size

    @property
    def M(self):
        return self.h_d.size

    def replace(self, **changes):
        return replace(self, **changes)


def variance_from_distance(d, m_exp):
    """Large-scale power gain ``d ** -m_exp``."""
    if not d > 0:
        raise InvalidDistance(f"distance must be positive, got {d}")
    return float(d) ** (-float(m_exp))


def trial_rng(seed, trial):
    """Independent generator for Monte Carlo trial ``trial`` under root ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


def _cn(rng, shape):
    # CN(0, 1): (g1 + i g2) / sqrt(2)
    g = rng.standard_normal(shape + (2,))
    return (g[..., 0] + 1j * g[..., 1]) / math.sqrt(2.0)


def sample_channels(cfg, rng):
    """
    Draw a :class:`ChannelSet` with i.i.d. CN(0, sigma^2) entries.

    Variances: ``d_sr^-m`` for ``h_r1`` and ``H_r2``, ``d_rd^-m`` for
    ``h_d``, ``d_re^-m`` for ``h_e_bar`` and ``lambda_f`` for each entry
    of ``f``. The draw order is fixed: h_r1, H_r2, f, h_d, h_e_bar.
    """
    N, M = cfg.N, cfg.M
    s_s = math.sqrt(variance_from_distance(cfg.d_sr, cfg.m_exp))
    s_d = math.sqrt(variance_from_distance(cfg.d_rd, cfg.m_exp))
    s_e = math.sqrt(variance_from_distance(cfg.d_re, cfg.m_exp))
    h_r1 = s_s * _cn(rng, (N,))
    H_r2 = s_s * _cn(rng, (N, M))
    f = math.sqrt(cfg.lambda_f) * _cn(rng, (M,))
    h_d = s_d * _cn(rng, (M,))
    h_e_bar = s_e * _cn(rng, (M,))
    return ChannelSet(h_r1=h_r1, H_r2=H_r2, f=f, h_d=h_d, h_e_bar=h_e_bar)


def worst_case_effective_gain(h_e_bar, eps, w_t):
    """
    ``|h_e_bar^H w_t| + eps * ||w_t||``: the largest eavesdropper
    amplitude gain over all ``||dh|| <= eps``.
    """
    w_t = np.asarray(w_t)
    return float(abs(np.vdot(h_e_bar, w_t)) + eps * np.linalg.norm(w_t))


def sample_uncertainty(eps, dim, rng, size=None, boundary=False):
    """
    Draw perturbations ``dh`` with ``||dh|| <= eps``.

    Directions are uniform on the complex unit sphere. Interior draws use
    radius ``eps * u ** (1 / (2 dim))`` (uniform in the ball); with
    ``boundary=True`` the radius is exactly ``eps``. ``size=None`` returns
    one vector, otherwise an array of shape ``(size, dim)``.
    """
    n = 1 if size is None else int(size)
    z = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    if boundary:
        r = np.full((n, 1), float(eps))
    else:
        r = eps * rng.random((n, 1)) ** (1.0 / (2 * dim))
    out = r * z
    return out[0] if size is None else out
