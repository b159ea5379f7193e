import numpy as np
import pytest

from carbonlab.equilibria import (
    RESIDUAL_TOL,
    curve_a_n,
    curve_b_n,
    equilibrium_e1,
    equilibrium_e2,
    equilibrium_e3,
    equilibrium_e4,
)
from carbonlab.model import Parameters, eval_rhs, relative_residual
from carbonlab.sensitivity import default_parameter_space


def test_e1_baseline_closed_form(baseline):
    eq = equilibrium_e1(baseline)
    # direct arithmetic oracle
    g1 = 0.02145 / 0.0008
    c1 = (1.68 + (0.0003 - 0.0008) * g1) / 0.016
    assert eq.exists
    assert eq.state[1] == 26.8125
    assert eq.state[0] == pytest.approx(c1, rel=1e-15)
    assert eq.state[0] == pytest.approx(104.162, abs=5e-4)
    assert float(eq.state[2]) == 0.0 and float(eq.state[3]) == 0.0
    assert eq.residual_norm < RESIDUAL_TOL


def test_e1_gdp_term_cancels_when_beta_equals_epsilon(baseline):
    params = baseline.replace(beta=baseline.epsilon)
    eq = equilibrium_e1(params)
    assert eq.state[0] == baseline.alpha / baseline.p


def test_e1_nonexistent_when_closed_form_negative(baseline):
    params = baseline.replace(alpha=1e-4, beta=1e-5)
    eq = equilibrium_e1(params)
    assert eq.state[0] < 0
    assert not eq.exists


def _e2_quadratic(params, c):
    g = params.mu / params.epsilon
    a = params.eta**2 * params.sigma * params.bigK / params.omega
    b = params.eta * params.bigK + params.p
    return a * c * c + b * c - (params.alpha + (params.beta - params.epsilon) * g)


def test_e2_matches_bisection_oracle(baseline):
    eq = equilibrium_e2(baseline)
    assert eq.exists
    lo, hi = 0.0, 10.0 * baseline.alpha / baseline.p
    assert _e2_quadratic(baseline, lo) < 0 < _e2_quadratic(baseline, hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _e2_quadratic(baseline, mid) > 0:
            hi = mid
        else:
            lo = mid
    assert eq.state[0] == pytest.approx(0.5 * (lo + hi), rel=1e-12)
    assert eq.residual_norm < 1e-9
    # forest component sits on the forest nullcline
    f_expected = baseline.bigK * (
        baseline.omega + baseline.eta * baseline.sigma * eq.state[0]
    ) / baseline.omega
    assert eq.state[2] == pytest.approx(f_expected, rel=1e-14)


def test_e2_root_continuous_in_vanishing_eta(baseline):
    c1 = equilibrium_e1(baseline).state[0]
    c2_small = equilibrium_e2(baseline.replace(eta=1e-12)).state[0]
    assert c2_small == pytest.approx(c1, rel=1e-6)
    c2_mid = equilibrium_e2(baseline.replace(eta=1e-9)).state[0]
    assert abs(c2_mid - c1) < abs(equilibrium_e2(baseline).state[0] - c1)


def test_e2_nonexistent_when_constant_term_nonpositive(baseline):
    # alpha*eps + mu*(beta - eps) <= 0 makes the positive root disappear
    params = baseline.replace(alpha=0.005)
    value = params.alpha * params.epsilon + params.mu * (params.beta - params.epsilon)
    assert value <= 0
    eq = equilibrium_e2(params)
    assert not eq.exists
    assert not eq.conditions[0].satisfied


def test_e2_positive_root_across_sampling_intervals():
    space = default_parameter_space()
    rng = np.random.default_rng(7)
    lo, hi = space.lowers(), space.uppers()
    for _ in range(1000):
        params = Parameters.from_values(lo + rng.random(15) * (hi - lo))
        value = params.alpha * params.epsilon + params.mu * (params.beta - params.epsilon)
        eq = equilibrium_e2(params)
        if value > 0:
            assert eq.state[0] > 0


def test_e3_baseline_against_substitution_oracle(baseline):
    eq = equilibrium_e3(baseline)
    assert eq.exists
    c3, g3, f3, n3 = (float(v) for v in eq.state)
    assert g3 == 26.8125 and f3 == 0.0
    # substitute back into the two reduced stationarity relations
    r_c = baseline.alpha + baseline.phi * n3 + (baseline.beta - baseline.epsilon) * g3 \
        - baseline.p * c3
    r_n = baseline.s - (baseline.s / baseline.bigM) * n3 - baseline.pi * c3
    assert abs(r_c) < 1e-12 * max(1.0, c3)
    assert abs(r_n) < 1e-15
    assert c3 == pytest.approx(105.62057483109858, rel=1e-13)
    assert n3 == pytest.approx(2.916930912196878, rel=1e-13)


def test_e3_nonexistent_when_mortality_large(baseline):
    eq = equilibrium_e3(baseline.replace(pi=0.001))
    assert eq.state[3] < 0
    assert not eq.exists


def test_e3_decoupled_closed_form(baseline):
    # phi = 0 with beta = epsilon decouples C from N entirely
    params = baseline.replace(phi=0.0, beta=baseline.epsilon)
    eq = equilibrium_e3(params)
    assert eq.state[0] == pytest.approx(params.alpha / params.p, rel=1e-14)
    expected_n = params.bigM * (1.0 - params.pi * params.alpha / (params.p * params.s))
    assert eq.state[3] == pytest.approx(expected_n, rel=1e-14)


def test_e4_baseline_certified(baseline, e4):
    assert e4.exists
    assert e4.residual_norm < 1e-9
    assert e4.state[1] == 26.8125
    assert np.all(e4.state > 0)
    assert np.max(np.abs(eval_rhs(baseline, e4.state))) < 1e-9


def test_e4_on_both_nullclines(baseline, e4):
    f4, n4 = float(e4.state[2]), float(e4.state[3])
    assert curve_a_n(baseline, f4) == pytest.approx(n4, rel=1e-10)
    assert curve_b_n(baseline, f4) == pytest.approx(n4, rel=1e-10)


def test_e4_coarse_grid_scan_brackets_root(baseline, e4):
    m = 400
    f = np.linspace(0.0, baseline.bigK, m + 1)
    n = np.linspace(0.0, baseline.bigM, m + 1)
    ff, nn = np.meshgrid(f, n, indexing="ij")
    a0 = baseline.alpha + (baseline.beta - baseline.epsilon) * (baseline.mu / baseline.epsilon)
    cc = (a0 + baseline.phi * nn) / (baseline.p + baseline.eta * ff)
    ra = baseline.omega - (baseline.omega / baseline.bigK) * ff - baseline.theta * nn \
        + baseline.eta * baseline.sigma * cc
    rb = baseline.s - (baseline.s / baseline.bigM) * nn + baseline.theta * baseline.nu * ff \
        - baseline.pi * cc

    def sign_change(r):
        pos = (r > 0).astype(np.int8)
        corners = pos[:-1, :-1] + pos[1:, :-1] + pos[:-1, 1:] + pos[1:, 1:]
        return (corners > 0) & (corners < 4)

    cells = np.argwhere(sign_change(ra) & sign_change(rb))
    assert len(cells) > 0
    df, dn = baseline.bigK / m, baseline.bigM / m
    # nearest flagged cell center within one cell diagonal of the solver root
    dist_cells = np.hypot(
        (cells[:, 0] + 0.5) - e4.state[2] / df, (cells[:, 1] + 0.5) - e4.state[3] / dn
    )
    assert dist_cells.min() <= np.sqrt(2.0)


def test_e4_decoupled_population(baseline):
    # removing deforestation, mortality and per-capita emissions reduces the
    # population equation to a bare logistic with fixed point M
    params = baseline.replace(theta=0.0, pi=0.0, phi=0.0)
    eq = equilibrium_e4(params)
    assert eq.state[3] == pytest.approx(params.bigM, rel=1e-12)
    assert relative_residual(params, eq.state) < 1e-9


def test_e4_curve_slopes_at_root(baseline, e4):
    # uniqueness argument: curve a falls and curve b rises at the intersection
    # whenever the axis-intercept conditions and the negative-root condition hold
    by_name = {c.name: c for c in e4.conditions}
    v32 = baseline.epsilon * (baseline.s * baseline.p - baseline.alpha) \
        - (baseline.beta - baseline.epsilon)
    assert by_name["curve_a_axis_intercept_positive"].satisfied
    assert by_name["curve_b_axis_intercept_positive"].satisfied
    assert v32 < 0
    f4 = float(e4.state[2])
    h = 1e-3 * f4
    slope_a = (curve_a_n(baseline, f4 + h) - curve_a_n(baseline, f4 - h)) / (2.0 * h)
    slope_b = (curve_b_n(baseline, f4 + h) - curve_b_n(baseline, f4 - h)) / (2.0 * h)
    assert slope_a < 0
    assert slope_b > 0


def test_all_existing_equilibria_have_small_residual(equilibria_baseline):
    kinds = [eq.kind for eq in equilibria_baseline]
    assert kinds == ["E1", "E2", "E3", "E4"]
    for eq in equilibria_baseline:
        assert eq.exists
        assert eq.residual_norm < 1e-9
        assert eq.state[1] == 26.8125
