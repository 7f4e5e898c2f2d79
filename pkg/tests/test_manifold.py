import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gaussian
from solitonlab.errors import GridMismatchError, InvalidParamsError, SupportOverflowError
from solitonlab.manifold import (BOOST, DIM, GAUGE, SCALING, STRUCTURE, TRANSLATION, LieCoeffs, SolitonParams,
                                 apply_T_sigma, commutator_apply, generator_apply, group_compose, group_inverse,
                                 hessian_apply, lie_apply, ls_project, omega_inverse_matrix, phase_distance,
                                 skew_orthogonalize, soliton_field, symplectic_form, tangent_basis,
                                 transformed_tangents)
from solitonlab.profile import NonlinearityParams, eta1_closed_form, eta_mu, mass, mass_derivative
from solitonlab.solver import peak_position

finite = dict(allow_nan=False, allow_infinity=False)
sigmas = st.builds(SolitonParams,
                   a=st.floats(-3, 3, **finite), v=st.floats(-1, 1, **finite),
                   gamma=st.floats(0, 2 * np.pi, **finite), mu=st.floats(0.5, 2, **finite))


def close_params(s1, s2, tol):
    assert s1.a == pytest.approx(s2.a, abs=tol)
    assert s1.v == pytest.approx(s2.v, abs=tol)
    assert s1.mu == pytest.approx(s2.mu, rel=tol)
    assert phase_distance(s1.gamma, s2.gamma) < tol


# --- group law ---------------------------------------------------------------

def test_compose_example():
    out = group_compose(SolitonParams(1, 0, 0, 4), SolitonParams(2, 0, 0, 1))
    close_params(out, SolitonParams(2, 0, 0, 4), 1e-15)


@given(sigmas)
def test_identity_element(s):
    e = SolitonParams.identity()
    close_params(group_compose(e, s), s, 1e-14)
    close_params(group_compose(s, e), s, 1e-14)


@given(sigmas, sigmas, sigmas)
def test_associativity(s1, s2, s3):
    close_params(group_compose(group_compose(s1, s2), s3), group_compose(s1, group_compose(s2, s3)), 1e-12)


@given(sigmas)
def test_inverse(s):
    e = SolitonParams.identity()
    close_params(group_compose(group_inverse(s), s), e, 1e-12)
    close_params(group_compose(s, group_inverse(s)), e, 1e-12)


def test_gamma_stored_mod_two_pi():
    assert SolitonParams(0, 0, 7.0, 1).gamma == pytest.approx(7.0 - 2 * np.pi)
    assert 0 <= SolitonParams(0, 0, -0.1, 1).gamma < 2 * np.pi
    with pytest.raises(InvalidParamsError):
        SolitonParams(0, 0, 0, 0.0)


# --- group action ------------------------------------------------------------

def test_apply_identity(grid, cubic):
    u = gaussian(grid)
    np.testing.assert_allclose(apply_T_sigma(SolitonParams.identity(), u, cubic, grid), u, atol=1e-13)


def test_translation_moves_peak(grid, cubic):
    eta = eta1_closed_form(grid, cubic).values.astype(complex)
    out = apply_T_sigma(SolitonParams(1.37, 0, 0, 1), eta, cubic, grid)
    assert peak_position(out, grid) == pytest.approx(1.37, abs=1e-8)
    np.testing.assert_allclose(out, soliton_field(SolitonParams(1.37, 0, 0, 1), grid, cubic), atol=1e-11)


@pytest.mark.parametrize("s", [0.5, 1.0])
def test_norm_scaling(grid, s):
    p = NonlinearityParams(s)
    u = gaussian(grid)
    sig = SolitonParams(0.7, 0.4, 1.0, 1.8)
    ratio = symplectic_form(apply_T_sigma(sig, u, p, grid), 1j * apply_T_sigma(sig, u, p, grid), grid) \
        / symplectic_form(u, 1j * u, grid)
    assert ratio == pytest.approx(sig.mu ** (1 / s - 0.5), rel=1e-8)


@settings(max_examples=25, deadline=None)
@given(sigmas, sigmas)
def test_homomorphism(grid, cubic, s1, s2):
    u = gaussian(grid, width=1.5)
    lhs = apply_T_sigma(s1, apply_T_sigma(s2, u, cubic, grid), cubic, grid)
    rhs = apply_T_sigma(group_compose(s1, s2), u, cubic, grid)
    assert np.max(np.abs(lhs - rhs)) < 1e-7


def test_closed_form_soliton_matches_action(grid, cubic):
    sig = SolitonParams(-2.0, 0.3, 4.0, 1.6)
    eta = eta1_closed_form(grid, cubic).values.astype(complex)
    np.testing.assert_allclose(soliton_field(sig, grid, cubic), apply_T_sigma(sig, eta, cubic, grid), atol=1e-11)


def test_support_overflow(grid, cubic):
    u = gaussian(grid, center=100.0, width=3.0, k=0)
    with pytest.raises(SupportOverflowError):
        apply_T_sigma(SolitonParams(30.0, 0, 0, 1), u, cubic, grid)
    with pytest.raises(SupportOverflowError):
        apply_T_sigma(SolitonParams(0, 0, 0, 0.25), u, cubic, grid)


# --- Lie algebra ---------------------------------------------------------------

def test_gauge_generator(grid, cubic):
    eta = eta1_closed_form(grid, cubic).values.astype(complex)
    np.testing.assert_array_equal(generator_apply(GAUGE, eta, cubic, grid), 1j * eta)


@pytest.mark.parametrize("s", [0.5, 1.0])
@pytest.mark.parametrize("a", range(DIM))
@pytest.mark.parametrize("b", range(DIM))
def test_commutation_relations(grid, s, a, b):
    p = NonlinearityParams(s)
    u = gaussian(grid)
    lhs = commutator_apply(a, b, u, p, grid)
    rhs = sum(STRUCTURE[a, b, c] * generator_apply(c, u, p, grid) for c in range(DIM))
    assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_named_relations(grid, cubic):
    u = gaussian(grid)
    assert np.max(np.abs(commutator_apply(TRANSLATION, BOOST, u, cubic, grid) + 1j * u)) < 1e-8
    half_e1 = 0.5 * generator_apply(TRANSLATION, u, cubic, grid)
    assert np.max(np.abs(commutator_apply(TRANSLATION, SCALING, u, cubic, grid) - half_e1)) < 1e-8
    for a, b in [(TRANSLATION, GAUGE), (BOOST, GAUGE), (GAUGE, SCALING)]:
        assert np.max(np.abs(commutator_apply(a, b, u, cubic, grid))) < 1e-8


def test_generators_are_derivatives_of_action(grid, cubic):
    """e_alpha u is the derivative of T along the one-parameter subgroup."""
    u = gaussian(grid)
    h = 1e-5
    subgroups = [lambda t: SolitonParams(t, 0, 0, 1), lambda t: SolitonParams(0, 2 * t, 0, 1),
                 lambda t: SolitonParams(0, 0, t, 1), lambda t: SolitonParams(0, 0, 0, np.exp(t))]
    for alpha, path in enumerate(subgroups):
        fd = (apply_T_sigma(path(h), u, cubic, grid) - apply_T_sigma(path(-h), u, cubic, grid)) / (2 * h)
        assert np.max(np.abs(fd - generator_apply(alpha, u, cubic, grid))) < 1e-6, alpha


# --- symplectic structure ----------------------------------------------------

def test_symplectic_antisymmetry(grid):
    rng = np.random.default_rng(0)
    u = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
    v = rng.normal(size=grid.n) + 1j * rng.normal(size=grid.n)
    assert symplectic_form(u, u, grid) == 0.0
    assert symplectic_form(u, v, grid) == pytest.approx(-symplectic_form(v, u, grid), abs=1e-12)


def test_symplectic_mass_oracle(grid, cubic):
    eta = eta1_closed_form(grid, cubic).values.astype(complex)
    assert symplectic_form(eta, 1j * eta, grid) == pytest.approx(-4.0, abs=1e-10)


def test_symplectic_grid_mismatch(grid):
    with pytest.raises(GridMismatchError):
        symplectic_form(np.zeros(grid.n), np.zeros(grid.n // 2), grid)


@pytest.mark.parametrize("mu", [0.5, 1.0, 2.0, 4.0])
def test_omega_block_pattern(grid, cubic, mu):
    M = omega_inverse_matrix(mu, cubic, grid)
    m = mass(eta_mu(grid, cubic, mu))
    dm = mass_derivative(cubic, mu, grid)
    expected = np.zeros((DIM, DIM))
    expected[TRANSLATION, BOOST], expected[BOOST, TRANSLATION] = -m, m
    expected[GAUGE, SCALING], expected[SCALING, GAUGE] = mu * dm, -mu * dm
    np.testing.assert_allclose(M, expected, atol=1e-8)
    np.testing.assert_allclose(M, -M.T, atol=1e-12)
    assert abs(np.linalg.det(M)) > 1e-3


def test_omega_at_one(grid, cubic):
    M = omega_inverse_matrix(1.0, cubic, grid)
    assert abs(M[TRANSLATION, BOOST]) == pytest.approx(2.0, abs=1e-8)
    assert abs(M[GAUGE, SCALING]) == pytest.approx(1.0, abs=1e-8)


# --- projection ----------------------------------------------------------------

@pytest.fixture(scope="module")
def basis(grid, cubic):
    return tangent_basis(grid, cubic, 1.0)


def test_basis_gauge_vector(basis, grid, cubic):
    np.testing.assert_array_equal(basis.vectors[GAUGE], 1j * eta1_closed_form(grid, cubic).values)


def test_basis_matches_closed_form(basis, grid, cubic):
    np.testing.assert_allclose(basis.vectors, transformed_tangents(SolitonParams.identity(), grid, cubic), atol=1e-10)


@pytest.mark.parametrize("alpha", range(DIM))
def test_project_unit_vectors(basis, alpha):
    np.testing.assert_allclose(ls_project(basis.vectors[alpha], basis).coeffs, np.eye(DIM)[alpha], atol=1e-8)


@given(st.lists(st.floats(-1, 1, **finite), min_size=DIM, max_size=DIM))
def test_project_recovers_coefficients(basis, grid, cubic, coeffs):
    X = LieCoeffs(np.array(coeffs))
    eta = eta1_closed_form(grid, cubic).values.astype(complex)
    np.testing.assert_allclose(ls_project(lie_apply(X, eta, cubic, grid), basis).coeffs, X.coeffs, atol=1e-7)


def test_skew_orthogonal_projects_to_zero(basis, grid):
    w = skew_orthogonalize(gaussian(grid, center=0.5), basis)
    for vec in basis.vectors:
        assert abs(symplectic_form(w, vec, grid)) < 1e-10
    np.testing.assert_allclose(ls_project(w, basis).coeffs, 0, atol=1e-10)


def test_lie_coeffs_norm():
    assert LieCoeffs(np.array([0.1, -0.7, 0.3, 0.0])).norm() == 0.7
    with pytest.raises(InvalidParamsError):
        LieCoeffs(np.array([np.nan, 0, 0, 0]))


# --- Hessian --------------------------------------------------------------------

@pytest.mark.parametrize("mu", [1.0, 2.0])
def test_hessian_zero_modes(basis, grid, cubic, mu):
    b = tangent_basis(grid, cubic, mu)
    L = lambda w: hessian_apply(w, cubic, grid, mu)  # noqa: E731
    zt, zb, zg, zs = b.vectors[TRANSLATION], b.vectors[BOOST], b.vectors[GAUGE], b.vectors[SCALING]
    assert np.max(np.abs(L(zt))) < 1e-7
    assert np.max(np.abs(L(zg))) < 1e-7
    assert np.max(np.abs(L(zb) - 2j * zt)) < 1e-7
    assert np.max(np.abs(L(zs) - mu * 1j * zg)) < 1e-7
