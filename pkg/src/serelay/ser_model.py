"""
Analytic link quantities of the self-energy-recycling full-duplex relay.

Symbols are never simulated; only their powers enter. The SINR helpers
broadcast over numpy arrays so a whole power-allocation grid can be
evaluated in one call.
"""
from dataclasses import dataclass
import math

import numpy as np

from .channel import worst_case_effective_gain
from .errors import InfeasibleRecycling, ZeroChannel

__all__ = ['BeamformerSet', 'SecrecyEvaluation', 'LinkGains',
           'mrt_energy_beamformer', 'harvested_power', 'relay_power',
           'amplify_factor', 'sinr_destination', 'sinr_eavesdropper_worst',
           'wcsr', 'positive_wcsr_condition', 'link_gains', 'evaluate',
           'wcsr_from_gains']

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class BeamformerSet:
    w_s: np.ndarray  # (N,)   source information beamformer
    w_H: np.ndarray  # (N,)   source energy beamformer (MRT)
    w_r: np.ndarray  # (M+1,) relay receive combiner
    w_t: np.ndarray  # (M,)   relay transmit beamformer

    def with_wt(self, w_t):
        return BeamformerSet(self.w_s, self.w_H, self.w_r, np.asarray(w_t))


@dataclass(frozen=True)
class SecrecyEvaluation:
    gamma_d: float
    gamma_ewc: float
    rwc: float


@dataclass(frozen=True)
class LinkGains:
    """Scalar gains every closed form is written in."""
    h_gain: float      # |h_r1^H w_H|^2
    g: float           # |w_r^H H_r^H w_s|^2
    hd_gain: float     # |h_d^H w_t|^2
    he_wc_gain: float  # (|h_e_bar^H w_t| + eps ||w_t||)^2
    f_gain: float      # |f^H w_t|^2


def mrt_energy_beamformer(h_r1):
    """``h_r1 / ||h_r1||``."""
    h_r1 = np.asarray(h_r1, dtype=complex)
    nrm = np.linalg.norm(h_r1)
    if nrm == 0.0:
        raise ZeroChannel("source-relay channel h_r1 is zero")
    return h_r1 / nrm


def harvested_power(cfg, channels, w_H, w_t, Pr):
    """Harvested power ``eta (|h_r1^H w_H|^2 Ps + |f^H w_t|^2 Pr)`` with T = 1."""
    h_gain = abs(np.vdot(channels.h_r1, w_H)) ** 2
    f_gain = abs(np.vdot(channels.f, w_t)) ** 2
    return cfg.eta * (h_gain * cfg.Ps + f_gain * Pr)


def _relay_power(delta, eta, Ps, h_gain, f_gain):
    delta = np.asarray(delta, dtype=float)
    denom = 1.0 - delta * eta * f_gain
    if np.any(denom <= 0.0):
        raise InfeasibleRecycling(
            f"delta*eta*|f^H w_t|^2 = {np.max(delta * eta * f_gain):.6g} >= 1")
    out = delta * eta * Ps * h_gain / denom
    return float(out) if out.ndim == 0 else out


def relay_power(delta, cfg, channels, w_H, w_t):
    """
    Relay transmit power for allocation ratio ``delta``.

    ``delta eta Ps |h_r1^H w_H|^2 / (1 - delta eta |f^H w_t|^2)``.

    Raises
    ------
    InfeasibleRecycling
        When the denominator is not positive.
    """
    h_gain = abs(np.vdot(channels.h_r1, w_H)) ** 2
    f_gain = abs(np.vdot(channels.f, w_t)) ** 2
    return _relay_power(delta, cfg.eta, cfg.Ps, h_gain, f_gain)


def amplify_factor(Pr, Ps, g, N0):
    """AF gain ``sqrt(Pr / (Ps g + N0))``."""
    return math.sqrt(Pr / (Ps * g + N0))


def sinr_destination(Ps, Pr, N0, g, hd_gain):
    """End-to-end AF SINR at the destination."""
    return Ps * Pr * hd_gain * g / (Pr * N0 * hd_gain + N0 * Ps * g + N0 * N0)


def sinr_eavesdropper_worst(Ps, Pr, N0, g, he_wc_gain):
    """Worst-case eavesdropper SINR; same form with the worst-case gain."""
    return Ps * Pr * he_wc_gain * g / (Pr * N0 * he_wc_gain + N0 * Ps * g + N0 * N0)


def wcsr(gamma_d, gamma_ewc):
    """``max(0, 0.5 log2((1 + gamma_d) / (1 + gamma_ewc)))`` in bits/s/Hz."""
    r = 0.5 * (np.log1p(gamma_d) - np.log1p(gamma_ewc)) / _LN2
    r = np.maximum(r, 0.0)
    return float(r) if np.ndim(r) == 0 else r


def positive_wcsr_condition(hd_gain, he_wc_gain):
    return bool(hd_gain > he_wc_gain)


def link_gains(cfg, channels, beams):
    H_r = channels.H_r
    g = abs(np.vdot(beams.w_r, H_r.conj().T @ beams.w_s)) ** 2
    return LinkGains(
        h_gain=float(abs(np.vdot(channels.h_r1, beams.w_H)) ** 2),
        g=float(g),
        hd_gain=float(abs(np.vdot(channels.h_d, beams.w_t)) ** 2),
        he_wc_gain=worst_case_effective_gain(channels.h_e_bar, cfg.eps, beams.w_t) ** 2,
        f_gain=float(abs(np.vdot(channels.f, beams.w_t)) ** 2),
    )


def wcsr_from_gains(cfg, gains, delta):
    """WCSR at allocation ``delta`` (scalar or array) from precomputed gains."""
    Pr = _relay_power(delta, cfg.eta, cfg.Ps, gains.h_gain, gains.f_gain)
    gd = sinr_destination(cfg.Ps, Pr, cfg.N0, gains.g, gains.hd_gain)
    ge = sinr_eavesdropper_worst(cfg.Ps, Pr, cfg.N0, gains.g, gains.he_wc_gain)
    return wcsr(gd, ge)


def evaluate(cfg, channels, beams, delta):
    """
    Compose relay power, both SINRs and the worst-case secrecy rate.

    Raises
    ------
    InfeasibleRecycling
        Propagated from :func:`relay_power`.
    """
    gains = link_gains(cfg, channels, beams)
    Pr = _relay_power(delta, cfg.eta, cfg.Ps, gains.h_gain, gains.f_gain)
    gd = sinr_destination(cfg.Ps, Pr, cfg.N0, gains.g, gains.hd_gain)
    ge = sinr_eavesdropper_worst(cfg.Ps, Pr, cfg.N0, gains.g, gains.he_wc_gain)
    return SecrecyEvaluation(gamma_d=float(gd), gamma_ewc=float(ge),
                             rwc=wcsr(gd, ge))
