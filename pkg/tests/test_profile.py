import numpy as np
import pytest
from scipy.optimize import brentq

from solitonlab.errors import DomainTooSmallError, InvalidParamsError
from solitonlab.grid import GridSpec
from solitonlab.profile import (NonlinearityParams, eta1, eta1_closed_form, eta_mu, mass,
                                mass_derivative)

MUS = (0.5, 1.0, 2.0, 4.0)


@pytest.mark.parametrize("s", [0.5, 1.0])
@pytest.mark.parametrize("mu", MUS)
def test_residual(grid, s, mu):
    prof = eta_mu(grid, NonlinearityParams(s), mu)
    assert np.max(np.abs(prof.residual())) < 1e-8


def test_peak_values(grid, cubic):
    assert eta1(np.array([0.0]), cubic)[0] == pytest.approx(np.sqrt(2), abs=1e-14)
    assert eta_mu(grid, cubic, 4.0).values.max() == pytest.approx(2 * np.sqrt(2), abs=1e-12)


def test_mu_one_matches_closed_form(grid, cubic):
    np.testing.assert_array_equal(eta_mu(grid, cubic, 1.0).values, eta1_closed_form(grid, cubic).values)


@pytest.mark.parametrize("s", [0.5, 1.0, 1.5])
def test_evenness(grid, s):
    x = np.linspace(0, 30, 301)
    p = NonlinearityParams(s)
    np.testing.assert_array_equal(eta1(x, p), eta1(-x, p))


def test_exponential_decay(cubic):
    x = np.array([20.0, 40.0])
    np.testing.assert_allclose(eta1(x, cubic) * np.exp(x), 2 * np.sqrt(2), rtol=1e-12)


def test_half_width_scales(cubic):
    def half_width(mu):
        f = lambda x: eta1(np.sqrt(mu) * np.array([x]), cubic)[0] - eta1(np.array([0.0]), cubic)[0] / 2
        return brentq(f, 0, 10, xtol=1e-14)
    assert half_width(4.0) == pytest.approx(half_width(1.0) / 2, rel=1e-12)


@pytest.mark.parametrize("mu", MUS)
def test_loose_decay_bound(grid, cubic, mu):
    vals = eta_mu(grid, cubic, mu).values
    x = grid.x
    far = np.abs(x) > 2 * 0.8814 / np.sqrt(mu) * 2
    assert np.all(vals[far] <= 2 * vals.max() * np.exp(-np.sqrt(mu) * np.abs(x[far]) / 2))


def test_mass_value(grid, cubic):
    assert mass(eta1_closed_form(grid, cubic)) == pytest.approx(2.0, abs=1e-10)


@pytest.mark.parametrize("s", [0.5, 1.0])
@pytest.mark.parametrize("mu", MUS)
def test_mass_scaling(grid, s, mu):
    p = NonlinearityParams(s)
    ratio = mass(eta_mu(grid, p, mu)) / mass(eta_mu(grid, p, 1.0))
    assert ratio == pytest.approx(mu ** (1 / s - 0.5), rel=1e-8)


def test_mass_derivative(grid, cubic):
    assert mass_derivative(cubic, 1.0, grid) == pytest.approx(1.0, abs=1e-6)
    a = mass_derivative(cubic, 1.0, grid, rel_step=1e-5)
    b = mass_derivative(cubic, 1.0, grid, rel_step=1e-6)
    assert a == pytest.approx(b, rel=1e-5)


@pytest.mark.parametrize("s", [0.3, 1.0, 1.9])
@pytest.mark.parametrize("mu", [0.3, 1.0, 3.0])
def test_mass_derivative_positive(grid, s, mu):
    assert mass_derivative(NonlinearityParams(s), mu, grid) > 0


def test_profile_properties(grid, cubic):
    vals = eta_mu(grid, cubic, 2.0).values
    half = vals[grid.n // 2:]
    assert np.all(vals > 0)
    assert np.all(np.diff(half) <= 0)


def test_domain_too_small(cubic):
    with pytest.raises(DomainTooSmallError):
        eta1_closed_form(GridSpec(L=5.0, n=256), cubic)


@pytest.mark.parametrize("kw", [dict(s=0.0), dict(s=2.0), dict(s=1.0, s_tilde=-1), dict(s=1.0, N=2)])
def test_invalid_params(kw):
    with pytest.raises(InvalidParamsError):
        NonlinearityParams(**kw)
