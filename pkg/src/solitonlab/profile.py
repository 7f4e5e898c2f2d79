"""Ground-state profiles of the power-law NLS and their mass."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainTooSmallError, InvalidParamsError, SolitonLabError
from .grid import GridSpec

TAIL_TOL = 1e-10


@dataclass(frozen=True)
class NonlinearityParams:
    """Exponents of ``|psi|^{2s} psi`` and of the perturbation ``lambda |psi|^{2 s_tilde} psi``."""

    s: float = 1.0
    s_tilde: float = 1.0
    N: int = 1

    def __post_init__(self):
        if self.N != 1:
            raise InvalidParamsError("only N = 1 is supported")
        if not 0 < self.s < 2 / self.N:
            raise InvalidParamsError(f"s must lie in (0, {2 / self.N}), got {self.s}")
        if self.s_tilde < 0:
            raise InvalidParamsError(f"s_tilde must be >= 0, got {self.s_tilde}")

    @property
    def mass_exponent(self) -> float:
        """Exponent of the scaling law m(mu) ~ mu^(1/s - N/2)."""
        return 1 / self.s - self.N / 2


def eta1(y, params: NonlinearityParams) -> np.ndarray:
    """Closed-form ground state ``(1+s)^{1/2s} sech^{1/s}(s y)`` at arbitrary points."""
    s = params.s
    y = np.asarray(y, dtype=float)
    # sech computed as 2 e^{-|z|} / (1 + e^{-2|z|}) to avoid cosh overflow in the tails
    z = np.abs(s * y)
    e = np.exp(-z)
    sech = 2 * e / (1 + e * e)
    return (1 + s) ** (1 / (2 * s)) * sech ** (1 / s)


def eta1_prime(y, params: NonlinearityParams) -> np.ndarray:
    """Derivative of :func:`eta1`: ``-tanh(s y) eta1(y)``."""
    return -np.tanh(params.s * np.asarray(y, dtype=float)) * eta1(y, params)


def eta_mu_at(y, mu: float, params: NonlinearityParams) -> np.ndarray:
    return mu ** (1 / (2 * params.s)) * eta1(np.sqrt(mu) * np.asarray(y, dtype=float), params)


@dataclass(frozen=True)
class Profile:
    grid: GridSpec
    values: np.ndarray
    mu: float
    params: NonlinearityParams

    def residual(self) -> np.ndarray:
        """Pointwise ``-eta'' + mu eta - eta^{2s+1}`` with a spectral second derivative."""
        eta = self.values
        return -self.grid.derivative(eta, 2) + self.mu * eta - eta ** (2 * self.params.s + 1)


def _check_tail(grid: GridSpec, values: np.ndarray) -> None:
    tail = max(abs(values[0]), abs(values[-1]))
    if tail > TAIL_TOL:
        raise DomainTooSmallError(f"profile tail {tail:.3e} at the box edge exceeds {TAIL_TOL:g}; enlarge L")


def eta1_closed_form(grid: GridSpec, params: NonlinearityParams) -> Profile:
    values = eta1(grid.x, params)
    _check_tail(grid, values)
    return Profile(grid, values, 1.0, params)


def eta_mu(grid: GridSpec, params: NonlinearityParams, mu: float) -> Profile:
    """``eta_mu(x) = mu^{1/2s} eta_1(sqrt(mu) x)``."""
    if not mu > 0:
        raise InvalidParamsError(f"mu must be positive, got {mu}")
    values = eta_mu_at(grid.x, mu, params)
    _check_tail(grid, values)
    return Profile(grid, values, float(mu), params)


def mass(profile: Profile) -> float:
    """``m(mu) = 1/2 * integral of eta_mu^2``."""
    return 0.5 * profile.grid.integrate(profile.values ** 2)


def mass_derivative(params: NonlinearityParams, mu: float, grid: GridSpec, rel_step: float = 1e-5) -> float:
    """Central finite difference of ``mass(eta_mu(.))`` in mu."""
    h = rel_step * mu
    dm = (mass(eta_mu(grid, params, mu + h)) - mass(eta_mu(grid, params, mu - h))) / (2 * h)
    if not dm > 0:
        raise SolitonLabError(f"m'({mu}) = {dm} is not positive; profile or quadrature is broken")
    return dm
