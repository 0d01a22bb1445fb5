from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from serelay.beamform import run_algorithm1, wt_interior, zf_basis
from serelay.channel import ChannelSet, SystemConfig
from serelay.errors import InfeasibleRecycling, ZeroChannel
from serelay.oracle import wcsr_on_delta_grid
from serelay.ser_model import (BeamformerSet, LinkGains, amplify_factor, evaluate,
                               harvested_power, link_gains, mrt_energy_beamformer,
                               positive_wcsr_condition, relay_power,
                               sinr_destination, sinr_eavesdropper_worst, wcsr,
                               wcsr_from_gains)

from conftest import draws

# sum of squared moduli of the published h_r1 entries
FIXTURE_HR1_NORM2 = 9.15487036


def _toy_channels(h_r1=(np.sqrt(2.0), 0, 0, 0, 0), f=(0, 0, 0)):
    return ChannelSet(h_r1=np.array(h_r1, dtype=complex),
                      H_r2=np.ones((5, 3), dtype=complex),
                      f=np.array(f, dtype=complex),
                      h_d=np.array([1, 0, 0], dtype=complex),
                      h_e_bar=np.array([0, 1, 0], dtype=complex))


E1 = np.array([1, 0, 0], dtype=complex)


class TestMrt:
    def test_axis(self):
        w = mrt_energy_beamformer(np.array([2, 0, 0, 0, 0], dtype=complex))
        assert np.allclose(w, [1, 0, 0, 0, 0])

    def test_zero_channel(self):
        with pytest.raises(ZeroChannel):
            mrt_energy_beamformer(np.zeros(5))

    def test_fixture_gain(self, fixture_channels):
        h = fixture_channels.h_r1
        w = mrt_energy_beamformer(h)
        assert np.linalg.norm(w) == pytest.approx(1.0, abs=1e-12)
        assert abs(np.vdot(h, w)) ** 2 == pytest.approx(FIXTURE_HR1_NORM2, rel=1e-12)


class TestHarvestedPower:
    def test_zero_loopback(self, cfg):
        ch = _toy_channels()
        w_H = mrt_energy_beamformer(ch.h_r1)
        assert harvested_power(cfg, ch, w_H, E1, 5.0) == pytest.approx(0.8 * 2.0)

    def test_arithmetic(self, cfg):
        ch = _toy_channels(f=(np.sqrt(0.5), 0, 0))
        w_H = mrt_energy_beamformer(ch.h_r1)
        assert harvested_power(cfg, ch, w_H, E1, 1.0) == pytest.approx(2.0)

    def test_no_retransmission(self, cfg):
        ch = _toy_channels(f=(1, 0, 0))
        w_H = mrt_energy_beamformer(ch.h_r1)
        assert harvested_power(cfg, ch, w_H, E1, 0.0) == pytest.approx(1.6)


class TestRelayPower:
    def test_zero_loopback(self, cfg):
        ch = _toy_channels()
        assert relay_power(1.0, cfg, ch, mrt_energy_beamformer(ch.h_r1), E1) == pytest.approx(1.6)

    def test_zero_delta(self, cfg):
        ch = _toy_channels(f=(1, 0, 0))
        assert relay_power(0.0, cfg, ch, mrt_energy_beamformer(ch.h_r1), E1) == 0.0

    def test_singular_loop(self, cfg):
        ch = _toy_channels(f=(np.sqrt(1.25), 0, 0))  # eta |f^H w_t|^2 = 1
        with pytest.raises(InfeasibleRecycling):
            relay_power(1.0, cfg, ch, mrt_energy_beamformer(ch.h_r1), E1)

    def test_recycling_boosts_power(self, cfg):
        ch = _toy_channels(f=(np.sqrt(0.625), 0, 0))  # eta |f^H w_t|^2 = 0.5
        assert relay_power(1.0, cfg, ch, mrt_energy_beamformer(ch.h_r1), E1) == pytest.approx(3.2)


class TestAmplifyFactor:
    @pytest.mark.parametrize('Pr, Ps, g, N0, expected', [
        (1 * 3 + 0.5, 1.0, 3.0, 0.5, 1.0),
        (0.0, 1.0, 3.0, 1.0, 0.0),
        (8.0, 1.0, 3.0, 1.0, np.sqrt(2.0)),
    ])
    def test_values(self, Pr, Ps, g, N0, expected):
        assert amplify_factor(Pr, Ps, g, N0) == pytest.approx(expected)


class TestSinr:
    def test_all_ones(self):
        assert sinr_destination(1, 1, 1, 1, 1) == pytest.approx(1 / 3)

    def test_no_relay_power(self):
        assert sinr_destination(1, 0, 0.01, 2, 3) == 0.0

    def test_bounded_by_source_snr(self):
        Ps, N0, g = 1.0, 0.01, 2.0
        vals = [sinr_destination(Ps, Pr, N0, g, 0.7) for Pr in np.logspace(-3, 6, 50)]
        assert np.all(np.diff(vals) > 0)
        assert vals[-1] <= Ps * g / N0

    def test_eavesdropper_zero_gain(self):
        assert sinr_eavesdropper_worst(1, 2, 0.01, 3, 0.0) == 0.0

    def test_eavesdropper_same_form(self):
        assert sinr_eavesdropper_worst(1, 2, 0.01, 3, 0.4) == sinr_destination(1, 2, 0.01, 3, 0.4)

    def test_eavesdropper_bounds_samples(self, rng, cfg):
        from serelay.oracle import uncertainty_ball_oracle
        ch = draws(cfg, 1)[0]
        w_t = ch.h_d / np.linalg.norm(ch.h_d)  # not zero-forcing
        Pr, g = 2.0, 4.0
        b = (abs(np.vdot(ch.h_e_bar, w_t)) + cfg.eps) ** 2
        top = uncertainty_ball_oracle(ch, cfg.eps, w_t, 10**4, rng)
        assert sinr_eavesdropper_worst(cfg.Ps, Pr, cfg.N0, g, top ** 2) <= \
            sinr_eavesdropper_worst(cfg.Ps, Pr, cfg.N0, g, b) * (1 + 1e-12)


class TestWcsr:
    @pytest.mark.parametrize('gd, ge, expected', [(2.0, 2.0, 0.0), (3.0, 1.0, 0.5), (1.0, 3.0, 0.0)])
    def test_values(self, gd, ge, expected):
        assert wcsr(gd, ge) == pytest.approx(expected, abs=1e-15)

    def test_vectorized(self):
        assert np.allclose(wcsr(np.array([3.0, 1.0]), np.array([1.0, 3.0])), [0.5, 0.0])

    @pytest.mark.parametrize('hd, he, expected', [(2, 1, True), (1, 1, False), (1, 2, False)])
    def test_positive_condition(self, hd, he, expected):
        assert positive_wcsr_condition(hd, he) is expected


gains_st = st.builds(LinkGains,
                     h_gain=st.floats(0.01, 20), g=st.floats(0.01, 50),
                     hd_gain=st.floats(1e-4, 10), he_wc_gain=st.floats(1e-6, 10),
                     f_gain=st.floats(0, 1.2))


class TestRateMonotonicity:
    @settings(max_examples=200, deadline=None)
    @given(gains=gains_st, delta=st.floats(0.01, 1.0), up=st.floats(1.0001, 3.0))
    def test_in_each_gain(self, gains, delta, up):
        cfg = SystemConfig()
        if delta * cfg.eta * gains.f_gain >= 1:
            return
        r = wcsr_from_gains(cfg, gains, delta)
        assert wcsr_from_gains(cfg, replace(gains, hd_gain=gains.hd_gain * up), delta) >= r
        assert wcsr_from_gains(cfg, replace(gains, he_wc_gain=gains.he_wc_gain * up), delta) <= r
        assert wcsr_from_gains(cfg, replace(gains, g=gains.g * up), delta) >= r - 1e-15


class TestEvaluate:
    def test_perfect_zero_forcing(self, fixture_channels):
        cfg = SystemConfig(eps=0.0)
        sol = run_algorithm1(cfg, fixture_channels)
        ev = evaluate(cfg, fixture_channels, sol.beams, 0.5)
        assert ev.gamma_ewc <= 1e-20
        assert ev.rwc == pytest.approx(0.5 * np.log2(1 + ev.gamma_d), rel=1e-12)

    def test_zero_delta(self, cfg, fixture_channels):
        sol = run_algorithm1(cfg, fixture_channels)
        assert evaluate(cfg, fixture_channels, sol.beams, 0.0).rwc == 0.0

    def test_matches_grid_evaluation(self, fixture_channels):
        cfg = SystemConfig(eps=0.05)
        sol = run_algorithm1(cfg, fixture_channels)
        d = sol.power.delta
        grid_val = wcsr_on_delta_grid(cfg, link_gains(cfg, fixture_channels, sol.beams), [d])[0]
        assert evaluate(cfg, fixture_channels, sol.beams, d).rwc == pytest.approx(grid_val, abs=1e-9)

    def test_propagates_infeasible(self, cfg):
        ch = _toy_channels(f=(2.0, 0, 0))
        beams = BeamformerSet(w_s=mrt_energy_beamformer(ch.h_r1),
                              w_H=mrt_energy_beamformer(ch.h_r1),
                              w_r=np.array([1, 0, 0, 0], dtype=complex), w_t=E1)
        with pytest.raises(InfeasibleRecycling):
            evaluate(cfg, ch, beams, 1.0)

    def test_positive_iff_condition(self, cfg, rng):
        for ch in draws(cfg, 50):
            B = zf_basis(ch.h_e_bar)
            for w_t in (wt_interior(ch.h_d, B), rng.standard_normal(3) + 0j):
                w_t = w_t / np.linalg.norm(w_t)
                sol = run_algorithm1(cfg, ch)
                beams = sol.beams.with_wt(w_t)
                gains = link_gains(cfg, ch, beams)
                if cfg.eta * gains.f_gain >= 1:
                    continue
                ev = evaluate(cfg, ch, beams, 0.7)
                assert (ev.rwc > 0) == positive_wcsr_condition(gains.hd_gain, gains.he_wc_gain)
