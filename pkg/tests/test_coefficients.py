import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbmlab import coefficients as co
from qbmlab.errors import DomainError, OutOfGrid, ResonantCutoff, ValidationError

# Matsubara series summed to N -> infinity by Richardson extrapolation, frozen.
# (r, theta, t) -> delta at alpha = 0.1
EXACT_DELTA = {
    (1.0, 1.0, 1.0): 0.011833030377680262,
    (1.0, 1.0, 5.0): 0.01074313844383994,
    (0.1, 10.0, 5.0): -0.009875913753174788,
    (1.0, 0.01, 2.0): 0.003981299080969626,
    (20.0, 10.0, 0.2): 0.19739118857434643,
    (0.05, 0.01, 30.0): 2.556810210113887e-05,
}
COTH_005 = 20.016663889550099248


def spec(r, theta, alpha=0.1):
    return co.ReservoirSpec(alpha, r, theta)


# ---------------------------------------------------------------- spec object
def test_spec_validation():
    with pytest.raises(ValidationError):
        co.ReservoirSpec(-0.1, 1.0, 1.0)
    with pytest.raises(ValidationError):
        co.ReservoirSpec(0.1, 0.0, 1.0)
    with pytest.raises(ValidationError):
        co.ReservoirSpec(0.1, 1.0, -1.0)
    with pytest.raises(ValidationError):
        co.ReservoirSpec(0.1, float("nan"), 1.0)


def test_strong_coupling_warns():
    with pytest.warns(co.WeakCouplingWarning):
        co.ReservoirSpec(0.3, 1.0, 1.0)


def test_temperature_conventions():
    a = co.ReservoirSpec.from_r0(0.1, 1.0, 2.0, convention="appendix")
    assert a.theta == pytest.approx(1.0 / (4.0 * math.pi))
    assert a.r0 == pytest.approx(2.0)
    b = co.ReservoirSpec.from_r0(0.1, 1.0, 2.0, convention="fig1")
    assert b.theta == pytest.approx(0.5)
    c = co.ReservoirSpec.from_rc(0.1, 3.0, 0.5)
    assert c.rc == pytest.approx(0.5)
    with pytest.raises(ValidationError):
        co.ReservoirSpec.from_r0(0.1, 1.0, 2.0, convention="other")


# ---------------------------------------------------------------- closed forms
def test_gamma_zero_at_origin():
    assert co.gamma_at(spec(0.3, 2.0), 0.0) == 0.0


def test_gamma_stationary_value():
    s = spec(20.0, 10.0)
    assert co.gamma_at(s, 40.0 / 20.0 * 5) == pytest.approx(0.00997506, abs=1e-8)


def test_gamma_small_time_is_positive():
    # second-order expansion alpha^2 r^2 t^2 / 2 (see ledger on the sign)
    s = spec(0.05, 1.0, alpha=0.01)
    g = co.gamma_at(s, 0.01)
    assert g > 0
    assert g == pytest.approx(s.alpha**2 * s.r**2 * 0.01**2 / 2, rel=2e-2)


def test_markov_limits():
    dm, gm = co.markov_limits(spec(20.0, 10.0))
    assert gm == pytest.approx(0.00997506, abs=1e-8)
    assert dm == pytest.approx(gm * COTH_005, rel=1e-14)
    # quoted 7-digit value carries a rounding slip of ~2e-6 relative
    assert dm == pytest.approx(0.1996678, rel=1e-5)
    assert dm == pytest.approx(0.19966747021995, rel=1e-12)
    assert dm / gm == pytest.approx(20.0167, abs=1e-4)
    dm, gm = co.markov_limits(spec(1.0, 1e-3))
    assert dm / gm == pytest.approx(1.0, abs=1e-12)


def test_high_t_limit():
    s = spec(20.0, 10.0)
    assert co.delta_high_t_at(s, 0.0) == 0.0
    assert co.delta_high_t_at(s, 2.0) == pytest.approx(0.1995012, abs=1e-7)


@pytest.mark.parametrize("key", sorted(EXACT_DELTA))
def test_closed_form_against_exact_series(key):
    r, theta, t = key
    ref = EXACT_DELTA[key]
    assert co.delta_closed_at(spec(r, theta), t) == pytest.approx(ref, rel=1e-9, abs=1e-14)


@pytest.mark.parametrize("key", sorted(EXACT_DELTA))
def test_quadrature_against_exact_series(key):
    r, theta, t = key
    ref = EXACT_DELTA[key]
    assert co.delta_quad_at(spec(r, theta), t) == pytest.approx(ref, rel=1e-8, abs=1e-13)


def test_closed_form_stationary_value():
    s = spec(20.0, 10.0)
    dm, _ = co.markov_limits(s)
    assert co.delta_closed_at(s, 3.0) == pytest.approx(dm, rel=1e-6)


def test_closed_form_negative_region_for_small_cutoff():
    # negative window sits near t in (3.4, 6.2) in units of 1/omega_0
    s = spec(0.1, 10.0)
    t = np.linspace(2.0, 6.0, 41)
    assert np.min(co.delta_closed_at(s, t)) < 0


def test_closed_form_domain_near_origin():
    s = spec(1.0, 1.0)
    with pytest.raises(DomainError):
        co.delta_closed_at(s, 1e-5)


def test_closed_form_rejects_resonance():
    s = co.ReservoirSpec.from_rc(0.1, 1.0, 1.0)
    with pytest.raises(ResonantCutoff):
        co.delta_closed_at(s, 1.0)


# ---------------------------------------------------------------- kernels
def test_kernel_mu_origin():
    assert co.kernel_mu(spec(2.0, 1.0), 0.0) == pytest.approx(0.08)


def test_kernel_kappa_decays():
    s = spec(1.0, 1.0)
    tau = np.linspace(5.0, 60.0, 200)
    k = np.abs(co.kernel_kappa(s, tau))
    assert k[-1] < 1e-12
    assert np.all(np.diff(np.maximum.accumulate(k[::-1])) >= 0)


def test_kernel_kappa_resonance():
    s = co.ReservoirSpec.from_rc(0.1, 1.0, 1.0)
    with pytest.raises(ResonantCutoff):
        co.kernel_kappa(s, 0.5)
    v = co.kernel_kappa(s, 0.5, at_resonance="limit")
    near = co.ReservoirSpec.from_rc(0.1, 1.0, 1.0 + 1e-6)
    assert v == pytest.approx(co.kernel_kappa(near, 0.5), rel=1e-4)


# ---------------------------------------------------------------- quadrature
def test_quad_at_zero():
    s = spec(1.0, 1.0)
    assert co.delta_quad_at(s, 0.0) == 0.0
    assert co.pi_at(s, 0.0) == 0.0
    assert co.rshift_at(s, 0.0) == 0.0


def test_truncation_self_convergence():
    s = spec(1.0, 10.0)
    t = np.array([0.5, 3.0, 10.0])
    a = co.delta_quad_at(s, t, n_matsubara=50)
    b = co.delta_quad_at(s, t, n_matsubara=100)
    assert np.max(np.abs(a - b) / np.abs(b)) < 1e-8


def test_quadrature_matches_high_t():
    s = spec(20.0, 10.0)
    assert co.delta_quad_at(s, 2.0) == pytest.approx(co.delta_high_t_at(s, 2.0), rel=1e-2)


def test_rshift_stationary():
    s = spec(1.0, 1.0)
    ref = 2.0 * s.alpha**2 * s.r**2 * s.r / (s.r**2 + 1.0)
    assert co.rshift_at(s, 40.0) == pytest.approx(ref, rel=1e-8)


def test_quad_full_output():
    val, err, trunc = co.delta_quad_at(spec(1.0, 1.0), np.array([1.0, 2.0]), full_output=True)
    assert val.shape == err.shape == (2,)
    assert np.all(err >= 0)
    assert trunc > 0.0
    # the estimate shrinks as more Matsubara terms are kept
    _, _, trunc4 = co.delta_quad_at(spec(1.0, 1.0), np.array([1.0, 2.0]),
                                    n_matsubara=400, full_output=True)
    assert trunc4 < trunc / 10


# ---------------------------------------------------------------- dispatch
def test_delta_at_zero_coupling():
    s = co.ReservoirSpec(0.0, 1.0, 1.0)
    assert np.all(co.delta_at(s, np.linspace(0, 5, 11)) == 0.0)


def test_delta_at_resonant_falls_back():
    s = co.ReservoirSpec.from_rc(0.1, 1.0, 1.0)
    with pytest.warns(co.ResonanceWarning):
        v = co.delta_at(s, np.array([0.0, 1.0, 3.0]))
    assert v[0] == 0.0 and np.all(np.isfinite(v))
    near = co.ReservoirSpec.from_rc(0.1, 1.0, 1.0 + 2e-3)
    assert v[1] == pytest.approx(co.delta_at(near, 1.0), rel=1e-2)


def test_delta_at_switches_route_continuously():
    s = spec(1.0, 0.05)
    t_sw = -math.log(co.Z_SWITCH) / s.nu1
    lo, hi = co.delta_at(s, t_sw * (1 - 1e-9)), co.delta_at(s, t_sw * (1 + 1e-9))
    assert hi == pytest.approx(lo, rel=1e-7)


# ---------------------------------------------------------------- grid
def test_build_grid_integrals():
    s = spec(1.0, 1.0)
    t = np.linspace(0.0, 20.0, 801)
    g = co.build_grid(s, t)
    assert g.delta[0] == 0.0 and g.big_gamma[0] == 0.0
    assert g.i_plus[-1] == pytest.approx(np.trapezoid(g.delta + g.gamma, t), rel=1e-5)
    with pytest.raises(ValueError):
        g.delta[3] = 1.0


def test_build_grid_validation_and_warning():
    s = spec(1.0, 1.0)
    with pytest.raises(ValidationError):
        co.build_grid(s, [0.1, 0.2])
    with pytest.raises(ValidationError):
        co.build_grid(s, [0.0, 0.2, 0.1])
    with pytest.warns(co.GridResolutionWarning):
        co.build_grid(s, np.linspace(0, 10, 11))


def test_grid_interp_out_of_range():
    g = co.CoefficientGrid.free(np.linspace(0, 1, 5))
    assert g.interp("delta", 0.5) == 0.0
    with pytest.raises(OutOfGrid):
        g.interp("delta", 1.5)


def test_grid_csv_round_trip(tmp_path):
    s = spec(0.1, 10.0)
    g = co.build_grid(s, np.linspace(0.0, 10.0, 401), diagnostics=True)
    p = tmp_path / "grid.csv"
    g.to_csv(p)
    h = co.CoefficientGrid.from_csv(p)
    for name in co.CSV_COLUMNS:
        key = "pi_coef" if name == "pi" else name
        assert np.array_equal(getattr(g, key), getattr(h, key))


def test_time_grid():
    assert np.allclose(co.time_grid(1.0, 3), [0.0, 0.5, 1.0])
    t = co.time_grid(10.0, 5, spacing="log")
    assert t[0] == 0.0 and t[-1] == pytest.approx(10.0) and np.all(np.diff(t) > 0)


# ---------------------------------------------------------------- properties
@settings(max_examples=25, deadline=None)
@given(r=st.floats(0.05, 20.0), theta=st.floats(0.01, 10.0), t=st.floats(0.5, 40.0))
def test_closed_form_matches_quadrature(r, theta, t):
    s = spec(r, theta)
    if s.is_resonant(1e-2) or math.exp(-s.nu1 * t) > co.Z_SWITCH:
        return
    dm, _ = co.markov_limits(s)
    a = co.delta_closed_at(s, t)
    b = co.delta_quad_at(s, t)
    assert abs(a - b) <= 1e-7 * dm


@settings(max_examples=30, deadline=None)
@given(r=st.floats(0.05, 20.0), theta=st.floats(0.01, 10.0),
       alpha=st.floats(0.0, 0.1), t=st.floats(0.0, 100.0))
def test_gamma_bounded_by_twice_markov(r, theta, alpha, t):
    s = spec(r, theta, alpha)
    _, gm = co.markov_limits(s)
    assert -1e-15 <= co.gamma_at(s, t) <= 2.0 * gm + 1e-15


@settings(max_examples=20, deadline=None)
@given(r=st.floats(0.05, 20.0), theta=st.floats(0.01, 10.0), alpha=st.floats(0.001, 0.1))
def test_coefficients_scale_with_alpha_squared(r, theta, alpha):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        a = co.delta_at(spec(r, theta, alpha), 3.0)
        b = co.delta_at(spec(r, theta, 0.1), 3.0)
    assert a == pytest.approx(b * (alpha / 0.1) ** 2, rel=1e-9, abs=1e-300)
