import numpy as np
import pytest
from hypothesis import given, settings

from tunneltime import BarrierSystem, compose_two_barrier, eval_total, find_resonances, total_field
from tunneltime.swf import current, eval_swf, evaluator, incident_ref_alt, ref_field

from invariants import TOLERANCES, invariant_errors, stationary_cases

GENERIC = [
    (BarrierSystem(V0=1.0, d=1.0, L=2.0, a1=3.0), 0.7),
    (BarrierSystem(V0=2.0, d=0.6, L=0.0, a1=1.0), 1.1),
    (BarrierSystem(V0=1.0, d=1.2, L=1.5, a1=0.5), 1.6),       # above the barrier
    (BarrierSystem(V0=-1.5, d=0.8, L=1.0, a1=2.0), 0.9),      # wells
    (BarrierSystem(V0=0.3, d=2.0, L=0.7, a1=1.0, mass=1.3, hbar=0.8), 0.5),
]


def fields(sys, k):
    two = compose_two_barrier(sys, k)
    total = total_field(sys, k, two)
    return two, total, ref_field(sys, k, total, two)


def resonant_point():
    sys = BarrierSystem(V0=1.0, d=1.0, L=2.0, a1=1.0)
    return sys, find_resonances(sys, 0.1, 0.99)[0]


class TestIncidentAmplitudes:
    @pytest.mark.parametrize("sys,k", GENERIC)
    def test_both_closed_forms_agree(self, sys, k):
        two, _, swf = fields(sys, k)
        assert abs(complex(swf.A_in_ref) - complex(incident_ref_alt(two))) < 1e-10

    @pytest.mark.parametrize("sys,k", GENERIC)
    def test_norms_split_between_channels(self, sys, k):
        two, _, swf = fields(sys, k)
        assert abs(swf.A_in_ref) ** 2 == pytest.approx(float(two.R_two), abs=1e-12)
        assert abs(swf.A_in_tr) ** 2 == pytest.approx(float(two.T_two), abs=1e-12)
        assert abs(swf.A_in_tr + swf.A_in_ref - 1) < 1e-12

    @pytest.mark.parametrize("sys,k", GENERIC)
    def test_lambda_follows_eta(self, sys, k):
        two, _, swf = fields(sys, k)
        expect = float(two.eta_two) * np.arctan(np.sqrt(float(two.T_two) / float(two.R_two)))
        assert float(swf.lam) == pytest.approx(expect, abs=1e-13)

    def test_vectorised_over_k(self):
        sys = GENERIC[0][0]
        k = np.linspace(0.3, 2.0, 17)
        _, _, swf = fields(sys, k)
        for i, ki in enumerate(k):
            _, _, one = fields(sys, ki)
            assert swf.A_in_ref[i] == pytest.approx(complex(one.A_in_ref), abs=1e-15)


class TestResonance:
    def test_reflection_field_is_zero(self):
        sys, kr = resonant_point()
        two, total, swf = fields(sys, kr)
        assert float(two.R_two) < 1e-14
        for name in ("A_in_ref", "a_ref_gap", "alpha_ref1", "b_ref1", "b_out"):
            assert complex(getattr(swf, name)) == 0
        x = np.linspace(sys.a1 - 3, sys.b2 + 3, 101)
        assert np.all(eval_swf("ref", sys, swf, total, x) == 0)
        np.testing.assert_allclose(eval_swf("tr", sys, swf, total, x), eval_total(total, sys, x), atol=1e-12)

    def test_lambda_reaches_its_limit(self):
        sys, kr = resonant_point()
        two, _, swf = fields(sys, kr)
        assert float(swf.lam) == pytest.approx(float(two.eta_two) * np.pi / 2, abs=1e-7)


class TestFieldShape:
    @pytest.mark.parametrize("sys,k", GENERIC)
    def test_node_at_midpoint(self, sys, k):
        _, total, swf = fields(sys, k)
        delta = np.array([1e-3, 1e-6, 1e-9]) * sys.D
        near = eval_swf("ref", sys, swf, total, sys.xc - delta)
        expect = swf.a_ref_gap * np.sin(-k * delta) if sys.L > 0 else near
        np.testing.assert_allclose(near, expect, rtol=1e-9, atol=1e-15)
        assert np.all(np.abs(near[1:]) <= np.abs(near[:-1]))
        assert np.abs(near[-1]) < 1e-8 * np.max(np.abs(near[0]) + 1)

    @pytest.mark.parametrize("sys,k", GENERIC)
    def test_right_half_is_the_total_state(self, sys, k):
        _, total, swf = fields(sys, k)
        x = np.linspace(sys.xc, sys.b2 + 5.0, 80)
        assert np.all(eval_swf("ref", sys, swf, total, x) == 0)
        assert np.array_equal(eval_swf("tr", sys, swf, total, x), eval_total(total, sys, x))

    @pytest.mark.parametrize("sys,k", GENERIC)
    def test_pieces_sum_to_total(self, sys, k):
        _, total, swf = fields(sys, k)
        x = np.linspace(sys.a1 - 4.0, sys.b2 + 4.0, 301)
        tot = eval_total(total, sys, x)
        parts = eval_swf("tr", sys, swf, total, x) + eval_swf("ref", sys, swf, total, x)
        assert np.max(np.abs(parts - tot)) < 1e-10 * np.max(np.abs(tot))

    @pytest.mark.parametrize("sys,k", GENERIC)
    def test_mirror_symmetry_of_transmission(self, sys, k):
        _, total, swf = fields(sys, k)
        y = np.linspace(0.0, 0.5 * sys.D, 50)
        left = np.abs(eval_swf("tr", sys, swf, total, sys.xc - y, side="left"))
        right = np.abs(eval_swf("tr", sys, swf, total, sys.xc + y, side="right"))
        assert np.max(np.abs(left - right)) < 1e-10 * np.max(right)

    @pytest.mark.parametrize("sys,k", GENERIC)
    def test_reflection_is_smooth_at_barrier_edges(self, sys, k):
        _, total, swf = fields(sys, k)
        for edge in (sys.a1, sys.b1):
            if edge >= sys.xc:
                continue
            lo, hi = np.nextafter(edge, -np.inf), np.nextafter(edge, np.inf)
            (p0, p1), (d0, d1) = [eval_swf("ref", sys, swf, total, np.array([lo, hi]), deriv=True)[i]
                                  for i in (0, 1)]
            scale = max(np.max(np.abs(eval_swf("ref", sys, swf, total, np.linspace(sys.a1, sys.xc, 50)))), 1e-300)
            assert abs(p1 - p0) < 1e-10 * scale
            assert abs(d1 - d0) < 1e-10 * scale * max(k, 1.0)

    def test_continuity_at_midpoint_with_derivative_jump(self):
        sys, k = GENERIC[0]
        _, total, swf = fields(sys, k)
        xc = np.array([sys.xc])
        pl, dl = eval_swf("tr", sys, swf, total, xc, deriv=True, side="left")
        pr, dr = eval_swf("tr", sys, swf, total, xc, deriv=True, side="right")
        assert abs(pl[0] - pr[0]) < 1e-12 * abs(pr[0])
        assert abs(dl[0] - dr[0]) > 1e-3 * abs(dr[0])
        ref_left = eval_swf("ref", sys, swf, total, np.nextafter(xc, -np.inf))
        assert abs(ref_left[0]) < 1e-12


class TestCurrents:
    @pytest.mark.parametrize("sys,k", GENERIC)
    def test_total_current_is_transmitted_flux(self, sys, k):
        two, total, _ = fields(sys, k)
        x = np.linspace(sys.a1 - 3.0, sys.b2 + 3.0, 97)
        j = current(*eval_total(total, sys, x, deriv=True), sys)
        flux = sys.hbar * k / sys.mass
        np.testing.assert_allclose(j / flux, float(two.T_two), atol=1e-12)

    @pytest.mark.parametrize("sys,k", GENERIC)
    def test_transmission_current_matches_across_midpoint(self, sys, k):
        two, total, swf = fields(sys, k)
        xc = np.array([sys.xc])
        flux = sys.hbar * k / sys.mass
        jl = current(*eval_swf("tr", sys, swf, total, xc, deriv=True, side="left"), sys)[0]
        jr = current(*eval_swf("tr", sys, swf, total, xc, deriv=True, side="right"), sys)[0]
        assert jl / flux == pytest.approx(float(two.T_two), abs=1e-12)
        assert jr / flux == pytest.approx(float(two.T_two), abs=1e-12)

    @pytest.mark.parametrize("sys,k", GENERIC)
    def test_reflection_carries_no_current(self, sys, k):
        _, total, swf = fields(sys, k)
        x = np.linspace(sys.a1 - 3.0, np.nextafter(sys.xc, -np.inf), 97)
        j = current(*eval_swf("ref", sys, swf, total, x, deriv=True), sys)
        assert np.max(np.abs(j)) / (sys.hbar * k / sys.mass) < 1e-12
        assert abs(swf.A_in_ref) == pytest.approx(abs(swf.b_out), rel=1e-12)


def test_evaluator_closures_agree_with_direct_calls():
    sys, k = GENERIC[1]
    _, total, swf = fields(sys, k)
    x = np.linspace(sys.a1 - 1, sys.b2 + 1, 33)
    assert np.array_equal(evaluator("tot", sys, k)(x), eval_total(total, sys, x))
    assert np.array_equal(evaluator("ref", sys, k)(x), eval_swf("ref", sys, swf, total, x))
    with pytest.raises(ValueError):
        eval_swf("both", sys, swf, total, x)


@settings(max_examples=150, deadline=None)
@given(stationary_cases())
def test_invariants_hold_across_random_systems(case):
    sys, k = case
    err = invariant_errors(sys, k)
    assert all(err[name] <= TOLERANCES[name] for name in err), err


def test_left_half_error_grows_like_inverse_transmission():
    """psi_tr left of xc comes from subtracting O(1) coefficients, so its
    relative error tracks eps/T; the mirror defect measures it."""
    k = 0.6
    defects, inv_T = [], []
    for d in (2.0, 4.0, 6.0, 8.0):
        sys = BarrierSystem(V0=1.0, d=d, L=0.5, a1=1.0)
        two, _, _ = fields(sys, k)
        defects.append(invariant_errors(sys, k)["mirror"])
        inv_T.append(1.0 / float(two.T_two))
    eps = np.finfo(float).eps
    assert all(dft < 1e3 * eps * t for dft, t in zip(defects, inv_T))
    assert defects[-1] > 1e-12
