"""Stationary phase and mollification against closed-form oracles."""

import math

import numpy as np
import pytest
from scipy.special import j0

from sunada_zeta import statphase as sp


# ---------------------------------------------------------------------------
# oscillatory integrals
# ---------------------------------------------------------------------------


def test_zero_amplitude():
    base = sp.builtin_problem("cos_x")
    p = sp.PhaseProblem(
        "zero", 1, base.phi, base.grad_phi, base.hess_phi,
        lambda u: np.zeros(np.shape(u[0])), base.components,
    )
    assert sp.oscillatory_integral(p, 30.0) == 0


def test_constant_phase_factors_out():
    p = sp.builtin_problem("const", c=0.7)
    h = 25.0
    I = sp.oscillatory_integral(p, h)
    mass = p.components[0].density_integral
    assert I == pytest.approx(np.exp(1j * h * 0.7) * mass, abs=1e-10)


def test_bessel_oracle():
    p = sp.builtin_problem("cos_x")
    for h in (50.0, 120.0):
        I = sp.oscillatory_integral(p, h)
        assert abs(I - 2 * math.pi * j0(h)) <= 1e-6


def test_under_resolved_grid_rejected():
    p = sp.builtin_problem("cos_x")
    with pytest.raises(sp.GridError):
        sp.oscillatory_integral(p, 100.0, n_grid=128)


def test_linearity_in_amplitude():
    rng = np.random.default_rng(3)
    base = sp.builtin_problem("cos_x")
    c1, c2 = rng.standard_normal(2)
    a1 = lambda u: np.cos(u[0]) + 1.5
    a2 = lambda u: np.sin(2 * u[0]) + 2.0
    combo = lambda u: c1 * a1(u) + c2 * a2(u)
    mk = lambda amp: sp.PhaseProblem(
        "lin", 1, base.phi, base.grad_phi, base.hess_phi, amp, base.components
    )
    h = 40.0
    lhs = sp.oscillatory_integral(mk(combo), h)
    rhs = c1 * sp.oscillatory_integral(mk(a1), h) + c2 * sp.oscillatory_integral(mk(a2), h)
    assert abs(lhs - rhs) <= 1e-10


# ---------------------------------------------------------------------------
# stationary phase predictions
# ---------------------------------------------------------------------------


def test_prediction_cos_x_closed_form():
    p = sp.builtin_problem("cos_x")
    h = 37.0
    got = sp.stationary_phase_prediction(p, h)
    expect = math.sqrt(2 * math.pi / h) * (
        np.exp(-0.25j * math.pi) * np.exp(1j * h)
        + np.exp(0.25j * math.pi) * np.exp(-1j * h)
    )
    assert got == pytest.approx(expect, rel=1e-12)


def test_prediction_cos_y_2d_closed_form():
    p = sp.builtin_problem("cos_y_2d")
    h = 37.0
    got = sp.stationary_phase_prediction(p, h)
    expect = (
        math.sqrt(2 * math.pi / h)
        * 2
        * math.pi
        * (
            np.exp(0.25j * math.pi) * np.exp(-1j * h)
            + np.exp(-0.25j * math.pi) * np.exp(1j * h)
        )
    )
    assert got == pytest.approx(expect, rel=1e-12)


def test_validate_slope_cos_x():
    rep = sp.validate_stationary_phase(sp.builtin_problem("cos_x"), [50, 100, 200, 400])
    assert rep.slope is not None and rep.slope <= -0.8
    assert rep.passes


def test_validate_slope_cos_y_2d():
    rep = sp.validate_stationary_phase(sp.builtin_problem("cos_y_2d"), [50, 100, 200, 400])
    assert rep.passes


def test_validate_const_exact():
    rep = sp.validate_stationary_phase(sp.builtin_problem("const"), [10, 20, 40, 80])
    assert max(rep.scaled_residuals) <= 1e-8
    assert rep.passes


def test_validate_needs_four_points():
    with pytest.raises(ValueError):
        sp.validate_stationary_phase(sp.builtin_problem("cos_x"), [50, 100, 200])


def test_fresnel_closed_form_at_floor():
    p = sp.builtin_problem("fresnel")
    for h in (30.0, 90.0):
        I = sp.oscillatory_integral(p, h)
        assert abs(I - sp.fresnel_closed_form(h)) <= 1e-10


def test_transverse_weight_extraction():
    w = sp.transverse_weight_from_phase(1.0, h_list=(100.0, 200.0, 400.0))
    assert w == pytest.approx(1.0, abs=1e-5)
    w2 = sp.transverse_weight_from_phase(2.0, h_list=(100.0, 200.0, 400.0))
    assert w2 == pytest.approx(0.5, abs=1e-5)


# ---------------------------------------------------------------------------
# mollification
# ---------------------------------------------------------------------------


def test_bump_support_and_mass():
    ts = np.linspace(-2, 2, 2001)
    vals = sp.bump_profile(ts, 1)
    assert (vals[np.abs(ts) >= 1.0] == 0).all()
    assert (vals[np.abs(ts) < 0.999] > 0).all()
    cfg = sp.mollifier_config(5.0, 1)
    assert cfg.mass_residual <= 1e-8
    cfg2 = sp.mollifier_config(5.0, 2)
    assert cfg2.mass_residual <= 1e-8


def test_mollifier_scale_precondition():
    with pytest.raises(sp.GridError):
        sp.mollifier_config(1.0, 1)


def test_mollify_constant_exact():
    f = np.full(4096, 3.25)
    out = sp.mollify(f, 20.0)
    assert np.abs(out - 3.25).max() <= 1e-12


def test_mollify_sin_error_scale():
    n = 8192
    xs = -math.pi + 2 * math.pi * np.arange(n) / n
    f = np.sin(xs)
    err = np.abs(sp.mollify(f, 100.0) - f).max()
    assert 1e-8 < err < 1e-4


def test_mollify_error_decreases_with_h():
    n = 8192
    xs = -math.pi + 2 * math.pi * np.arange(n) / n
    f = np.sin(xs)
    errs = [np.abs(sp.mollify(f, h) - f).max() for h in (20.0, 40.0, 80.0)]
    assert errs[0] > errs[1] > errs[2]


def test_mollify_grid_too_coarse():
    with pytest.raises(sp.GridError):
        sp.mollify(np.ones(64), 100.0)


def test_mollify_2d_mass():
    n = 512
    f = np.full((n, n), 2.0)
    out = sp.mollify(f, 4.0, box=2 * math.pi)
    assert np.abs(out - 2.0).max() <= 1e-12


def test_mollification_slope_sin():
    rep = sp.mollification_error_order(np.sin, [10, 16, 25, 40, 63, 100])
    assert not rep.at_floor
    assert -2.3 <= rep.slope <= -1.7
    assert rep.passes


def test_mollification_slope_sin3x_constant():
    rep1 = sp.mollification_error_order(np.sin, [10, 16, 25, 40, 63, 100])
    rep3 = sp.mollification_error_order(lambda x: np.sin(3 * x), [10, 16, 25, 40, 63, 100])
    assert -2.3 <= rep3.slope <= -1.7
    # second-derivative scaling: constant larger by about 3^2
    ratio = rep3.sup_errors[0] / rep1.sup_errors[0]
    assert ratio == pytest.approx(9.0, rel=0.05)


def test_mollification_constant_floor():
    rep = sp.mollification_error_order(
        lambda x: np.full_like(x, 2.0), [10, 16, 25, 40, 63, 100]
    )
    assert rep.at_floor and rep.passes and rep.slope is None


def test_mollification_decade_required():
    with pytest.raises(ValueError):
        sp.mollification_error_order(np.sin, [10, 20, 50])


def test_problem_validation_rejects_bad_declaration():
    base = sp.builtin_problem("cos_x")
    bad = sp.CriticalComponent("wrong", 0, 1, 0.5, 1.0, np.array([[0.5]]))
    with pytest.raises(ValueError):
        sp.PhaseProblem(
            "bad", 1, base.phi, base.grad_phi, base.hess_phi, base.amplitude, (bad,)
        ).validate()
