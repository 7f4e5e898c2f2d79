"""Symmetry group of the soliton manifold, its Lie algebra and symplectic geometry.

Basis indices are 0-based and ordered (translation, boost, gauge, scaling):

    e_0 = -d/dx,   e_1 = i x,   e_2 = i,   e_3 = 1/(2s) + (x/2) d/dx
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, InvalidParamsError, SupportOverflowError
from .grid import GridSpec
from .profile import NonlinearityParams, eta1, eta1_prime, eta_mu, mass, mass_derivative

TRANSLATION, BOOST, GAUGE, SCALING = range(4)
DIM = 4
TWO_PI = 2 * np.pi
SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class SolitonParams:
    """Modulation point sigma = (a, v, gamma, mu); gamma is reduced mod 2 pi."""

    a: float = 0.0
    v: float = 0.0
    gamma: float = 0.0
    mu: float = 1.0

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidParamsError(f"mu must be positive, got {self.mu}")
        object.__setattr__(self, "gamma", float(np.mod(self.gamma, TWO_PI)))

    @classmethod
    def identity(cls) -> "SolitonParams":
        return cls(0.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, arr) -> "SolitonParams":
        a, v, gamma, mu = (float(t) for t in arr)
        return cls(a, v, gamma, mu)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.v, self.gamma, self.mu])


def phase_distance(g1: float, g2: float) -> float:
    """Distance between two phases on the circle."""
    d = np.mod(g1 - g2 + np.pi, TWO_PI) - np.pi
    return abs(float(d))


@dataclass(frozen=True)
class LieCoeffs:
    """Coefficients X_alpha of ``X = sum_alpha X_alpha e_alpha``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (DIM,) or not np.all(np.isfinite(c)):
            raise InvalidParamsError(f"expected {DIM} finite coefficients, got {self.coeffs!r}")
        object.__setattr__(self, "coeffs", c)

    def norm(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __getitem__(self, alpha):
        return self.coeffs[alpha]


# --- group law -------------------------------------------------------------

def group_compose(sigma_prime: SolitonParams, sigma: SolitonParams) -> SolitonParams:
    """Parameters of ``T_{sigma'} T_{sigma}``."""
    sq = np.sqrt(sigma_prime.mu)
    return SolitonParams(
        a=sigma.a / sq + sigma_prime.a,
        v=sq * sigma.v + sigma_prime.v,
        gamma=sigma.gamma + sigma_prime.gamma + sigma_prime.v * sigma.a / (2 * sq),
        mu=sigma.mu * sigma_prime.mu,
    )


def group_inverse(sigma: SolitonParams) -> SolitonParams:
    sq = np.sqrt(sigma.mu)
    return SolitonParams(
        a=-sigma.a * sq,
        v=-sigma.v / sq,
        gamma=-sigma.gamma + sigma.v * sigma.a / 2,
        mu=1 / sigma.mu,
    )


def apply_T_sigma(sigma: SolitonParams, u: np.ndarray, params: NonlinearityParams, grid: GridSpec,
                  check_support: bool = True) -> np.ndarray:
    """``(T_sigma u)(x) = exp(i(v(x-a)/2 + gamma)) mu^{1/2s} u(sqrt(mu)(x-a))``.

    ``u`` is resampled with its band-limited interpolant and is treated as zero
    outside the box. With ``check_support`` the call fails instead of silently
    cutting off field that leaves the box.
    """
    u = grid.check(u)
    if sigma == SolitonParams.identity():
        return u.astype(complex)
    sq = np.sqrt(sigma.mu)
    y0 = sq * (-grid.L - sigma.a)
    h = sq * grid.dx
    y_hi = y0 + h * grid.n
    outside = (grid.x < y0 - 0.5 * grid.dx) | (grid.x > y_hi)
    if check_support and np.any(outside) and np.max(np.abs(u[outside])) > SUPPORT_TOL:
        raise SupportOverflowError("part of the field would be mapped outside the box")
    vals = grid.interpolate_uniform(u.astype(complex), y0, h)
    y = y0 + h * np.arange(grid.n)
    vals[(y < -grid.L) | (y >= grid.L)] = 0.0
    xa = grid.x - sigma.a
    out = np.exp(1j * (0.5 * sigma.v * xa + sigma.gamma)) * sigma.mu ** (1 / (2 * params.s)) * vals
    tail = max(abs(out[0]), abs(out[-1]))
    if check_support and tail > SUPPORT_TOL:
        raise SupportOverflowError(f"transformed field has tail {tail:.2e} at the box edge")
    return out


def _frame(sigma: SolitonParams, grid: GridSpec, params: NonlinearityParams):
    """Soliton-frame coordinate, phase and amplitude factor of T_sigma on the grid."""
    xa = grid.wrap(grid.x - sigma.a)
    y = np.sqrt(sigma.mu) * xa
    phase = np.exp(1j * (0.5 * sigma.v * xa + sigma.gamma))
    amp = sigma.mu ** (1 / (2 * params.s))
    return y, phase * amp


def soliton_field(sigma: SolitonParams, grid: GridSpec, params: NonlinearityParams) -> np.ndarray:
    """Closed-form ``T_sigma eta_1`` sampled on the grid."""
    y, fac = _frame(sigma, grid, params)
    return fac * eta1(y, params)


def tangent_closed_form(y, params: NonlinearityParams) -> np.ndarray:
    """Rows ``e_alpha eta_1`` evaluated analytically at points ``y``."""
    eta = eta1(y, params)
    deta = eta1_prime(y, params)
    return np.array([
        -deta + 0j,
        1j * y * eta,
        1j * eta,
        eta / (2 * params.s) + 0.5 * y * deta + 0j,
    ])


def transformed_tangents(sigma: SolitonParams, grid: GridSpec, params: NonlinearityParams) -> np.ndarray:
    """Closed-form ``T_sigma (e_alpha eta_1)`` for every alpha, shape (4, n)."""
    y, fac = _frame(sigma, grid, params)
    return fac * tangent_closed_form(y, params)


# --- Lie algebra -----------------------------------------------------------

def generator_apply(alpha: int, u: np.ndarray, params: NonlinearityParams, grid: GridSpec) -> np.ndarray:
    """Action of the generator ``e_alpha`` with spectral derivatives."""
    u = grid.check(u)
    if alpha == TRANSLATION:
        return -grid.derivative(u)
    if alpha == BOOST:
        return 1j * grid.x * u
    if alpha == GAUGE:
        return 1j * u
    if alpha == SCALING:
        return u / (2 * params.s) + 0.5 * grid.x * grid.derivative(u)
    raise InvalidParamsError(f"basis index must be in 0..{DIM - 1}, got {alpha}")


def lie_apply(X: LieCoeffs, u: np.ndarray, params: NonlinearityParams, grid: GridSpec) -> np.ndarray:
    return sum(X[alpha] * generator_apply(alpha, u, params, grid) for alpha in range(DIM))


def commutator_apply(alpha: int, beta: int, u, params, grid) -> np.ndarray:
    """``[e_alpha, e_beta] u``."""
    ea = lambda f: generator_apply(alpha, f, params, grid)  # noqa: E731
    eb = lambda f: generator_apply(beta, f, params, grid)  # noqa: E731
    return ea(eb(u)) - eb(ea(u))


# Structure constants: [e_a, e_b] = sum_c C[a, b, c] e_c
STRUCTURE = np.zeros((DIM, DIM, DIM))
STRUCTURE[TRANSLATION, BOOST, GAUGE] = -1.0
STRUCTURE[TRANSLATION, SCALING, TRANSLATION] = 0.5
STRUCTURE[BOOST, SCALING, BOOST] = -0.5
STRUCTURE -= STRUCTURE.transpose(1, 0, 2)


# --- symplectic structure --------------------------------------------------

def symplectic_form(u: np.ndarray, v: np.ndarray, grid: GridSpec) -> float:
    """``omega(u, v) = Im int u conj(v) dx``."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise GridMismatchError(f"fields of shapes {u.shape} and {v.shape}")
    grid.check(u)
    # Im(u conj v) written out so that omega(u, u) is exactly zero
    return float(grid.integrate(u.imag * v.real - u.real * v.imag))


def inner(u: np.ndarray, v: np.ndarray, grid: GridSpec) -> float:
    """Real inner product ``Re int u conj(v) dx``."""
    return float(np.real(grid.integrate(u * np.conj(v))))


@dataclass(frozen=True)
class TangentBasis:
    """Vectors ``e_alpha eta_mu`` plus the mass data needed by the projection."""

    grid: GridSpec
    params: NonlinearityParams
    mu: float
    vectors: np.ndarray = field(repr=False)
    m: float
    dm: float


def tangent_basis(grid: GridSpec, params: NonlinearityParams, mu: float = 1.0) -> TangentBasis:
    prof = eta_mu(grid, params, mu)
    vecs = np.array([generator_apply(alpha, prof.values.astype(complex), params, grid) for alpha in range(DIM)])
    return TangentBasis(grid, params, float(mu), vecs, mass(prof), mass_derivative(params, mu, grid))


def omega_inverse_matrix(mu: float, params: NonlinearityParams, grid: GridSpec) -> np.ndarray:
    """Matrix ``omega(e_j eta_mu, e_k eta_mu)``."""
    vecs = tangent_basis(grid, params, mu).vectors
    M = np.empty((DIM, DIM))
    for j in range(DIM):
        for k in range(DIM):
            M[j, k] = symplectic_form(vecs[j], vecs[k], grid)
    return M


def _projection_pairings(basis: TangentBasis) -> np.ndarray:
    """Rows r_alpha with ``P_alpha(u) = omega(u, r_alpha)``."""
    e = basis.vectors
    return np.array([
        -e[BOOST] / basis.m,
        e[TRANSLATION] / basis.m,
        e[SCALING] / basis.dm,
        -e[GAUGE] / basis.dm,
    ])


def ls_project(u: np.ndarray, basis: TangentBasis) -> LieCoeffs:
    """Lyapunov-Schmidt coefficients of ``u`` with respect to the tangent basis at eta_1."""
    rows = _projection_pairings(basis)
    return LieCoeffs(np.array([symplectic_form(u, r, basis.grid) for r in rows]))


def skew_orthogonalize(u: np.ndarray, basis: TangentBasis) -> np.ndarray:
    """Remove the tangent component: ``u - (P u) eta``; the result pairs to zero with every e_alpha eta."""
    X = ls_project(u, basis)
    return u - np.tensordot(X.coeffs, basis.vectors, axes=1)


def hessian_apply(w: np.ndarray, params: NonlinearityParams, grid: GridSpec, mu: float = 1.0) -> np.ndarray:
    """Linearization ``L_mu w = -w'' + mu w - g'(eta_mu) w`` (real-linear in w)."""
    w = grid.check(w).astype(complex)
    eta = eta_mu(grid, params, mu).values
    p = eta ** (2 * params.s)
    lin = (2 * params.s + 1) * p * w.real + 1j * p * w.imag
    return -grid.derivative(w, 2) + mu * w - lin
