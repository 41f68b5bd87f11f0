import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tunneltime import BarrierSystem, compose_two_barrier, find_resonances, one_barrier_params, times
from tunneltime.chartimes import (buttiker_dwell, derivatives, dwell_quadrature, dwell_times,
                                  opaque_asymptotes, opaque_limit_report, phase_and_group_times,
                                  rect_derivatives_kappa, tau_as_closed, tau_as_extrema, x_start_closed)

THICK = BarrierSystem(V0=1.0, d=1.5 * np.pi, L=0.0, a1=1.0)       # kappa0 D = 3 pi
GAPPED = BarrierSystem(V0=1.0, d=1.0, L=2.0, a1=1.0)


def nonresonant(sys, k):
    return k[~derivatives(sys, k).near_resonance]


class TestIdentities:
    @settings(max_examples=100, deadline=None)
    @given(k=st.floats(0.05, 3.0), d=st.floats(0.1, 3.0), L=st.floats(0.0, 5.0))
    def test_group_time_is_phase_time_minus_departure(self, k, d, L):
        sys = BarrierSystem(V0=1.0, d=d, L=L, a1=1.0)
        tau_ph, tau_as, t_dep, _ = phase_and_group_times(sys, k)
        assert abs(tau_as - (tau_ph - t_dep)) <= 1e-12 * max(abs(tau_ph), abs(t_dep), 1.0)

    @pytest.mark.parametrize("sys", [THICK, GAPPED])
    def test_barrier_parts_of_transmission_dwell_are_equal(self, sys):
        tr, _ = dwell_times(sys, np.linspace(0.05, 3.0, 60))
        assert np.array_equal(tr.tau1, tr.tau2)
        np.testing.assert_allclose(tr.left, tr.right, rtol=1e-15)
        np.testing.assert_allclose(tr.left, 0.5 * tr.total, rtol=1e-15)

    @pytest.mark.parametrize("sys", [THICK, GAPPED])
    def test_right_barrier_of_total_state_scales_with_transmission(self, sys):
        k = np.linspace(0.05, 3.0, 60)
        tot = buttiker_dwell(sys, k)
        tr, _ = dwell_times(sys, k)
        np.testing.assert_allclose(tot.tau2, tr.tau2 * compose_two_barrier(sys, k).T_two, rtol=1e-12)

    def test_x_start_is_minus_lambda_prime(self):
        k = np.linspace(0.1, 2.0, 40)
        rep = times(GAPPED, k)
        np.testing.assert_array_equal(rep.x_start, -derivatives(GAPPED, k).lambda_p)


class TestClosedFormsAgainstQuadrature:
    @pytest.mark.parametrize("sys", [GAPPED, BarrierSystem(V0=1.0, d=0.8, L=0.0, a1=2.0),
                                     BarrierSystem(V0=-0.8, d=0.7, L=1.3, a1=1.0)])
    def test_fifty_point_grid(self, sys):
        ks = np.linspace(0.15, 2.2, 50)
        tr, ref = dwell_times(sys, ks)
        tot = buttiker_dwell(sys, ks)
        closed = {"tr1": tr.tau1, "tr2": tr.tau2, "tr_gap": tr.tau_gap, "tr_left": tr.left, "tr_right": tr.right,
                  "ref1": ref.tau1, "ref_gap": ref.tau_gap, "tot1": tot.tau1, "tot_gap": tot.tau_gap, "tot2": tot.tau2}
        worst = 0.0
        for i, k in enumerate(ks):
            quad = dwell_quadrature(sys, k)
            scale = float(tr.total[i])
            for key, vals in closed.items():
                if np.isnan(quad[key]):
                    continue
                ref_scale = scale if key.startswith("tr") else max(abs(quad[key]), float(tot.total[i]))
                worst = max(worst, abs(vals[i] - quad[key]) / ref_scale)
        assert worst < 1e-8

    def test_total_dwell_equals_density_integral(self):
        k = 0.83
        tot = buttiker_dwell(GAPPED, k)
        q = dwell_quadrature(GAPPED, k)
        assert float(tot.total) == pytest.approx(q["tot1"] + q["tot_gap"] + q["tot2"], rel=1e-9)


class TestSingleBarrierClosedForms:
    @pytest.mark.parametrize("V0", [1.0, -1.0, 0.4])
    def test_start_position_and_group_time_match_general_path(self, V0):
        sys = BarrierSystem(V0=V0, d=0.9, L=0.0, a1=1.0)
        k = nonresonant(sys, np.linspace(0.1, 2.5, 60))
        rep = times(sys, k)
        np.testing.assert_allclose(x_start_closed(sys, k), rep.x_start, rtol=1e-10, atol=1e-12 * sys.D)
        np.testing.assert_allclose(tau_as_closed(sys, k), rep.tau_as, rtol=1e-10)

    def test_well_start_position_is_finite_and_real(self):
        sys = BarrierSystem(V0=-2.0, d=1.0, L=0.0, a1=1.0)
        x = x_start_closed(sys, np.linspace(0.05, 3.0, 30))
        assert np.isrealobj(x) and np.all(np.isfinite(x))

    def test_gap_is_rejected(self):
        with pytest.raises(ValueError):
            x_start_closed(GAPPED, 0.5)
        with pytest.raises(ValueError):
            tau_as_closed(GAPPED, 0.5)


class TestOpaqueLimit:
    def test_group_time_tends_to_two_over_k_kappa(self):
        k = 0.6
        kappa = np.sqrt(1.0 - k * k)
        sys = BarrierSystem(V0=1.0, d=12.5 / kappa, L=0.0, a1=1.0)        # kappa D = 25
        rep = times(sys, k)
        assert float(rep.tau_as) == pytest.approx(2 * sys.mass / (sys.hbar * k * kappa), rel=1e-2)
        assert abs(float(rep.x_start)) < 1e-6 * sys.D
        assert abs(float(x_start_closed(sys, k))) < 1e-6 * sys.D

    def test_barrier_dwell_approaches_asymptote(self):
        k = 0.7
        kappa = np.sqrt(1.0 - k * k)
        sys = BarrierSystem(V0=1.0, d=15.0 / kappa, L=1.3, a1=1.0)
        assert opaque_limit_report(sys, k).ratios["tau_bar_tr"] == pytest.approx(1.0, abs=1e-4)

    def test_reflection_dwell_saturates(self):
        k, L = 0.7, 1.3
        kappa = np.sqrt(1.0 - k * k)
        vals = [opaque_limit_report(BarrierSystem(V0=1.0, d=kd / kappa, L=L, a1=1.0), k) for kd in (15.0, 20.0)]
        assert vals[0].tau_ref == pytest.approx(vals[1].tau_ref, rel=1e-6)
        assert vals[1].ratios["tau_ref"] == pytest.approx(1.0, abs=1e-6)

    def test_gap_dwell_asymptote_depends_on_gap(self):
        k = 0.7
        kappa = np.sqrt(1.0 - k * k)
        d = 15.0 / kappa
        gaps = [opaque_asymptotes(BarrierSystem(V0=1.0, d=d, L=L, a1=1.0), k)[1] for L in (1.0, 1.0 + 1e-4)]
        slope = (gaps[1] - gaps[0]) / 1e-4
        assert abs(slope) > 1e-3 * abs(gaps[0])
        assert opaque_limit_report(BarrierSystem(V0=1.0, d=d, L=1.0, a1=1.0), k).ratios["tau_gap_tr"] \
            == pytest.approx(1.0, abs=1e-4)

    def test_total_dwell_saturates(self):
        k = 0.5
        kappa = np.sqrt(1.0 - k * k)
        vals = [buttiker_dwell(BarrierSystem(V0=1.0, d=kd / kappa, L=0.0, a1=1.0), k) for kd in (10.0, 14.0, 18.0)]
        assert float(vals[1].total) == pytest.approx(float(vals[2].total), rel=1e-10)
        assert float(vals[2].tau1) == pytest.approx(float(vals[2].total), rel=1e-10)

    @pytest.mark.parametrize("kd", [0.5, 0.999, 1.001, 2.0, 6.0])
    @pytest.mark.parametrize("L", [0.0, 1.3])
    def test_total_dwell_matches_quadrature_either_side_of_the_opaque_form(self, kd, L):
        k = 0.8
        sys = BarrierSystem(V0=1.0, d=kd / np.sqrt(1.0 - k * k), L=L, a1=1.0)
        q = dwell_quadrature(sys, k)
        assert float(buttiker_dwell(sys, k).tau1) == pytest.approx(q["tot1"], rel=1e-10)

    def test_hartman_saturation(self):
        k = 0.5
        kappa = np.sqrt(1.0 - k * k)
        tas = [float(times(BarrierSystem(V0=1.0, d=kD / (2 * kappa), L=0.0, a1=1.0), k).tau_as) for kD in (20.0, 30.0)]
        assert abs(tas[0] - tas[1]) / tas[1] < 1e-3

    def test_transmission_dwell_grows_at_twice_kappa(self):
        k = 0.5
        kappa = np.sqrt(1.0 - k * k)
        kd = np.linspace(10.0, 15.0, 11)
        log_tau = [np.log(float(dwell_times(BarrierSystem(V0=1.0, d=x / kappa, L=0.0, a1=1.0), k)[0].total))
                   for x in kd]
        slope = np.polyfit(kd / kappa, log_tau, 1)[0]
        assert slope == pytest.approx(2 * kappa, rel=1e-2)

    def test_above_barrier_is_rejected(self):
        with pytest.raises(ValueError):
            opaque_asymptotes(THICK, 1.2)


class TestDerivatives:
    def test_phase_and_transmission_slopes_vanish_with_width(self):
        k = np.linspace(0.2, 2.0, 10)
        slopes = [derivatives(BarrierSystem(V0=1.0, d=d, L=0.0, a1=1.0), k) for d in (1e-6, 1e-9)]
        # J' is linear in d, T' quadratic
        np.testing.assert_allclose(slopes[1].Jp / slopes[0].Jp, 1e-3, rtol=1e-5)
        assert np.max(np.abs(slopes[1].Tp)) < 1e-15

    def test_gap_free_system_is_one_wide_barrier(self):
        k = np.linspace(0.1, 2.0, 41)
        two = derivatives(BarrierSystem(V0=1.0, d=0.7, L=0.0, a1=1.0), k)
        wide = derivatives(BarrierSystem(V0=1.0, d=1.4, L=0.0, a1=1.0), k)
        np.testing.assert_allclose(two.J_two_p, wide.Jp, rtol=1e-10)

    def test_hyperbolic_forms_agree_away_from_barrier_top(self):
        k = np.r_[np.linspace(0.1, 0.9, 9), np.linspace(1.1, 2.5, 8)]
        dv = derivatives(GAPPED, k)
        Jp, Tp = rect_derivatives_kappa(GAPPED, k)
        np.testing.assert_allclose(dv.Jp, Jp, rtol=1e-9)
        np.testing.assert_allclose(dv.Tp, Tp, rtol=1e-9, atol=1e-12)

    def test_lambda_prime_is_finite_at_resonance(self):
        kr = find_resonances(GAPPED, 0.1, 0.99)[0]
        dv = derivatives(GAPPED, kr)
        assert bool(dv.near_resonance) and np.isfinite(float(dv.lambda_p))
        side = derivatives(GAPPED, np.array([kr - 1e-7, kr + 1e-7])).lambda_p
        assert float(dv.lambda_p) == pytest.approx(float(np.mean(side)), rel=1e-5)


class TestReport:
    def test_reflection_dwell_marks_empty_subensemble_at_resonance(self):
        kr = find_resonances(GAPPED, 0.1, 0.99)[0]
        _, ref = dwell_times(GAPPED, np.array([0.5, kr]))
        assert list(ref.empty) == [False, True]
        assert np.isfinite(ref.total[0]) and np.isnan(ref.total[1])

    def test_scaled_divides_by_tau0(self):
        k = np.linspace(0.2, 1.5, 7)
        rep = times(GAPPED, k)
        tau0 = GAPPED.mass * GAPPED.D / (GAPPED.hbar * 1.0)
        assert rep.tau0 == pytest.approx(tau0, rel=1e-15)
        np.testing.assert_allclose(rep.scaled("tau_as"), rep.tau_as / tau0, rtol=1e-15)
        np.testing.assert_allclose(rep.scaled("dwell_tr"), rep.dwell_tr.total / tau0, rtol=1e-15)
        np.testing.assert_allclose(rep.tau_free, GAPPED.mass * GAPPED.D / (GAPPED.hbar * k), rtol=1e-15)

    def test_extrema_cover_every_resonance_in_range(self):
        marks = tau_as_extrema(THICK, 0.5, 3.0)
        res = find_resonances(THICK, 0.5, 3.0)
        assert [m["k"] for m in marks] == list(res)
        assert all(isinstance(m["tau_as_max"], bool) for m in marks)

    def test_one_barrier_transmission_slope_matches_difference(self):
        k, h = 0.63, 1e-6
        Tp = float(derivatives(GAPPED, k).Tp)
        fd = (float(one_barrier_params(GAPPED, k + h).T) - float(one_barrier_params(GAPPED, k - h).T)) / (2 * h)
        assert Tp == pytest.approx(fd, rel=1e-6)
