import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsteady.errors import InputError
from gsteady.restitution import (RestitutionModel, beta, constant, elastic,
                                 ell_gamma, eval_e, implicit_residual,
                                 log_grid, power_law, rescale, theta,
                                 viscoelastic)

# Frozen root of e + e^{3/5} = 1 (independent bracketed bisection oracle).
E_VISC_AT_1 = 0.4123201971422618
# Frozen root of e + 4^{1/5} e^{3/5} = 1.
E_VISC_AT_4 = 0.32621983874569727


def test_viscoelastic_at_zero_is_elastic():
    assert eval_e(viscoelastic(1.0), 0.0) == 1.0
    assert eval_e(power_law(1.0, 0.2), 0.0) == 1.0


def test_viscoelastic_frozen_roots():
    m = viscoelastic(1.0)
    assert eval_e(m, 1.0) == pytest.approx(E_VISC_AT_1, abs=1e-12)
    assert eval_e(m, 4.0) == pytest.approx(E_VISC_AT_4, abs=1e-12)
    assert beta(m, 1.0) == pytest.approx(0.5 * (1.0 + E_VISC_AT_1), abs=1e-12)


def test_power_law_closed_form():
    assert eval_e(power_law(1.0, 0.5), 4.0) == pytest.approx(1.0 / 3.0, rel=1e-14)


def test_constant_beta():
    assert beta(constant(0.5), 7.3) == 0.75


def test_implicit_residual_tight():
    m = viscoelastic(1.0)
    res = implicit_residual(m, log_grid())
    assert np.max(np.abs(res)) < 1e-10


def test_implicit_residual_wrong_kind():
    with pytest.raises(InputError):
        implicit_residual(power_law(1.0, 0.2), 1.0)


def test_monotone_and_theta_increasing(models, rng):
    r = np.sort(rng.uniform(0.0, 50.0, size=2000))
    for m in models.values():
        e = eval_e(m, r)
        assert np.all(np.diff(e) <= 1e-15)
        assert np.all((0.0 < e) & (e <= 1.0))
        th = theta(m, r)
        assert np.all(np.diff(th) > 0.0)


def test_small_r_expansion(models):
    r = np.logspace(-6, -2, 400)
    for name in ("power_law", "viscoelastic"):
        m = models[name]
        gap = np.abs(eval_e(m, r) - (1.0 - m.a * r ** m.gamma))
        assert np.max(gap / r ** m.gamma_bar) < 10.0


def test_rescale_composition():
    m = viscoelastic(1.0)
    r = np.linspace(0.1, 10.0, 50)
    twice = rescale(rescale(m, 0.5), 0.5)
    np.testing.assert_allclose(eval_e(twice, r), eval_e(m, 0.25 * r), rtol=1e-13)
    np.testing.assert_array_equal(eval_e(rescale(m, 1.0), r), eval_e(m, r))


def test_rescale_power_law_closed_form():
    m = power_law(2.0, 0.4)
    r = np.linspace(0.01, 5.0, 40)
    lam = 0.3
    expect = 1.0 / (1.0 + 2.0 * (lam * r) ** 0.4)
    np.testing.assert_allclose(eval_e(rescale(m, lam), r), expect, rtol=1e-13)


def test_ell_gamma():
    grid = log_grid()
    assert ell_gamma(elastic(), grid) == 0.0
    assert ell_gamma(power_law(1.0, 0.2), grid) <= 1.0
    # Small-r limit of (1 - e)/r^gamma is a = 1; approach rate is O(r^gamma).
    assert ell_gamma(power_law(1.0, 0.2), np.array([1e-15])) == pytest.approx(
        1.0, rel=1e-2)


def test_ell_gamma_rescale_bound():
    """ell(e_lam) <= lam^gamma ell(e) holds for true suprema; on a finite grid
    the left side can exceed by O(r_min^gamma), so the grid must reach low r."""
    m = viscoelastic(1.0)
    grid = log_grid(lo=1e-30)
    lam = 0.2
    ratio = ell_gamma(rescale(m, lam), grid) / ell_gamma(m, grid)
    assert ratio <= lam ** m.gamma * (1.0 + 1e-5)


def test_input_validation():
    with pytest.raises(InputError):
        eval_e(viscoelastic(1.0), -1.0)
    with pytest.raises(InputError):
        eval_e(viscoelastic(1.0), np.inf)
    with pytest.raises(InputError):
        RestitutionModel(kind="bogus")
    with pytest.raises(InputError):
        constant(0.0)
    with pytest.raises(InputError):
        constant(1.5)
    with pytest.raises(InputError):
        power_law(1.0, 1.5)
    with pytest.raises(InputError):
        power_law(-1.0, 0.2)
    with pytest.raises(InputError):
        rescale(viscoelastic(1.0), 1.5)
    with pytest.raises(InputError):
        ell_gamma(viscoelastic(1.0), np.array([]))
    with pytest.raises(InputError):
        ell_gamma(viscoelastic(1.0), np.array([0.0, 1.0]))


def test_gamma_bar_defaults():
    assert power_law(1.0, 0.3).gamma_bar == pytest.approx(0.6)
    assert viscoelastic(1.0).gamma_bar == pytest.approx(0.4)
    with pytest.raises(InputError):
        RestitutionModel(kind="power_law", a=1.0, gamma=0.5, gamma_bar=0.4)


@settings(max_examples=200, deadline=None)
@given(r1=st.floats(0.0, 1e6), r2=st.floats(0.0, 1e6),
       kind=st.sampled_from(["power_law", "viscoelastic"]))
def test_monotone_property(r1, r2, kind):
    m = power_law(1.0, 0.2) if kind == "power_law" else viscoelastic(1.0)
    lo, hi = sorted((r1, r2))
    assert eval_e(m, lo) >= eval_e(m, hi)
    assert theta(m, lo) <= theta(m, hi)
