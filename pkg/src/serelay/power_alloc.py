"""
Closed-form relay power-allocation ratio.

For fixed beamformers the worst-case secrecy rate is unimodal in the
relay power, peaking at ``Pr* = sqrt((N0 Ps g + N0^2) / (a b))`` with
``a = |h_d^H w_t|^2`` and ``b`` the worst-case eavesdropper gain.
Mapping ``Pr*`` back through the recycling relation gives
``delta* = 1 / (eta |f^H w_t|^2 + Q)``; the branch labels record which
case of the analysis applies.
"""
from dataclasses import dataclass
import enum
import math

from .errors import InfeasibleRecycling
from .ser_model import link_gains

__all__ = ['Branch', 'PowerSolution', 'AppendixBCoefficients', 'compute_Q',
           'q_from_gains', 'classify_branch', 'optimal_delta',
           'optimal_relay_power', 'solve_power', 'appendix_b_machinery',
           'appendix_b_coefficients']

C3_RTOL = 1e-12
# back-off from the recycling pole when no leakage term bounds Pr*
_POLE_BACKOFF = 1e-9


class Branch(str, enum.Enum):
    C1 = 'C1'
    C2 = 'C2'
    C3 = 'C3'
    SATURATED = 'Saturated'
    # Q >= 1 and eta|f^H w_t|^2 >= 1: delta = 1 has no finite Pr, the
    # stationary point 1/(li + Q) < 1 is used instead.
    RECYCLING_LIMITED = 'RecyclingLimited'

    @property
    def interior(self):
        return self in (Branch.C1, Branch.C2, Branch.C3)


@dataclass(frozen=True)
class PowerSolution:
    delta: float
    Pr: float
    branch: Branch
    Q: float = float('nan')
    li_gain: float = float('nan')


@dataclass(frozen=True)
class AppendixBCoefficients:
    a1: float
    a2: float
    a3: float
    a4: float
    A: float
    B: float
    C: float
    Delta: float

    def h(self, x):
        """Numerator polynomial of d rate / dx."""
        return self.A * x * x + self.B * x + self.C

    def rate(self, x):
        """Rate (bits/s/Hz) as a function of the allocation surrogate ``x``."""
        return 0.5 * (math.log2(1 + self.a1 * x / (self.a2 * x + 1))
                      - math.log2(1 + self.a3 * x / (self.a4 * x + 1)))


def q_from_gains(cfg, gains):
    c = cfg.N0 * cfg.Ps * gains.g + cfg.N0 ** 2
    return (cfg.eta * cfg.Ps * gains.h_gain
            * math.sqrt(gains.hd_gain * gains.he_wc_gain / c))


def compute_Q(cfg, channels, beams):
    """``Q = eta Ps |h_r1^H w_H|^2 sqrt(a b / (N0 Ps g + N0^2))``."""
    return q_from_gains(cfg, link_gains(cfg, channels, beams))


def classify_branch(Q, li_gain):
    """
    Label the case of the allocation analysis. ``li_gain`` is
    ``eta |f^H w_t|^2``. Checked in the order C1, C3, C2, so labels are
    disjoint; anything else is ``SATURATED``.
    """
    if 0 < Q < 1 and li_gain > max(Q, 1 - Q):
        return Branch.C1
    if 0.5 < Q < 1 and abs(li_gain - Q) <= C3_RTOL * Q:
        return Branch.C3
    if Q > 0.5 and 1 - Q < li_gain < min(1.0, Q):
        return Branch.C2
    return Branch.SATURATED


def optimal_delta(Q, li_gain, branch=None):
    branch = classify_branch(Q, li_gain) if branch is None else branch
    if branch.interior:
        return min(1.0, 1.0 / (li_gain + Q))
    return 1.0


def optimal_relay_power(cfg, channels, beams, sol):
    """
    Relay power at the optimum: the stationary ``Pr*`` on interior
    branches, the full recycled power on ``SATURATED``.
    """
    gains = link_gains(cfg, channels, beams)
    if sol.branch.interior or sol.branch is Branch.RECYCLING_LIMITED:
        c = cfg.N0 * cfg.Ps * gains.g + cfg.N0 ** 2
        return math.sqrt(c / (gains.hd_gain * gains.he_wc_gain))
    li = cfg.eta * gains.f_gain
    if li >= 1.0:
        raise InfeasibleRecycling(f"eta*|f^H w_t|^2 = {li:.6g} >= 1 at delta = 1")
    return cfg.eta * cfg.Ps * gains.h_gain / (1.0 - li)


def _power_from_gains(cfg, gains):
    Q = q_from_gains(cfg, gains)
    li = cfg.eta * gains.f_gain
    branch = classify_branch(Q, li)
    delta = optimal_delta(Q, li, branch)
    if branch.interior and 1.0 / (li + Q) > 1.0:
        # round-off at a branch boundary
        branch = Branch.SATURATED
    if branch is Branch.SATURATED and li >= 1.0:
        branch = Branch.RECYCLING_LIMITED
        delta = 1.0 / (li + Q) if Q > 0 else (1.0 - _POLE_BACKOFF) / li
    Pr = delta * cfg.eta * cfg.Ps * gains.h_gain / (1.0 - delta * li)
    return PowerSolution(delta=delta, Pr=Pr, branch=branch, Q=Q, li_gain=li)


def solve_power(cfg, channels, beams):
    """Optimal :class:`PowerSolution` for fixed beamformers."""
    return _power_from_gains(cfg, link_gains(cfg, channels, beams))


def appendix_b_coefficients(cfg, gains):
    c = cfg.N0 * cfg.Ps * gains.g + cfg.N0 ** 2
    li = cfg.eta * gains.f_gain
    k = cfg.eta * cfg.Ps * gains.h_gain / c
    a1 = k * cfg.Ps * gains.hd_gain * gains.g
    a2 = k * cfg.N0 * gains.hd_gain - li
    a3 = k * cfg.Ps * gains.he_wc_gain * gains.g
    a4 = k * cfg.N0 * gains.he_wc_gain - li
    A = (a1 * a4 ** 2 - a2 ** 2 * a3) + a1 * a3 * (a4 - a2)
    B = 2 * (a1 * a4 - a2 * a3)
    C = a1 - a3
    Delta = 4 * a1 * a3 * (a2 - a4) * (a1 + a2 - a3 - a4)
    return AppendixBCoefficients(a1, a2, a3, a4, A, B, C, Delta)


def appendix_b_machinery(cfg, channels, beams):
    """Rate-vs-allocation coefficients ``a1..a4`` and the quadratic ``h(x)``."""
    return appendix_b_coefficients(cfg, link_gains(cfg, channels, beams))
