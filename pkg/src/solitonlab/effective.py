"""Effective potentials and the modulation ODEs for the soliton parameters."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParamsError, StepSizeError
from .grid import GridSpec
from .manifold import SolitonParams, soliton_field
from .profile import NonlinearityParams, eta1, eta1_prime, eta_mu, mass, eta1_closed_form
from .solver import RoughCoefficient, nonlinear_potential, perturbation_potential, energy

MASS_NORMS = ("unit", "profile")


@dataclass(frozen=True)
class EffectivePotentials:
    v_eff: float
    grad_v_eff: float
    b_eff: float


@dataclass(frozen=True)
class EffectiveODEState:
    sigma: SolitonParams
    t: float
    phase: float  # gamma without the mod-2pi reduction


def _prefactor(mu, eps, params: NonlinearityParams) -> float:
    st = params.s_tilde
    return eps * mu ** (st / params.s) / (2 + 2 * st)


def _lam_shifted(a, mu, lam: RoughCoefficient, grid: GridSpec) -> np.ndarray:
    return lam((grid.x + a) / np.sqrt(mu))


def v_eff(a, mu, eps, lam: RoughCoefficient, params: NonlinearityParams, grid: GridSpec) -> float:
    """``eps mu^{s~/s}/(2+2s~) * int lambda((x+a)/sqrt(mu)) eta_1^{2s~+2}(x) dx``."""
    p = 2 * params.s_tilde + 2
    integrand = _lam_shifted(a, mu, lam, grid) * eta1(grid.x, params) ** p
    return _prefactor(mu, eps, params) * grid.integrate(integrand)


def grad_v_eff(a, mu, eps, lam: RoughCoefficient, params: NonlinearityParams, grid: GridSpec) -> float:
    """d/da of :func:`v_eff` with the derivative moved onto the profile by parts.

    Only lambda itself is evaluated, so rough (discontinuous) coefficients are fine.
    """
    p = 2 * params.s_tilde + 2
    eta = eta1(grid.x, params)
    d_eta_p = p * eta ** (p - 1) * eta1_prime(grid.x, params)
    return -_prefactor(mu, eps, params) * grid.integrate(_lam_shifted(a, mu, lam, grid) * d_eta_p)


def b_eff(a, mu, eps, lam: RoughCoefficient, params: NonlinearityParams, grid: GridSpec) -> float:
    """d/da of ``eps mu^{s~/s}/(2+2s~) * int lambda((x+a)/sqrt(mu)) eta_1^{2s~+2}(x) x dx``, by parts."""
    p = 2 * params.s_tilde + 2
    x = grid.x
    eta = eta1(x, params)
    d_x_eta_p = eta ** p + x * p * eta ** (p - 1) * eta1_prime(x, params)
    return -_prefactor(mu, eps, params) * grid.integrate(_lam_shifted(a, mu, lam, grid) * d_x_eta_p)


def effective_potentials(a, mu, eps, lam, params, grid) -> EffectivePotentials:
    return EffectivePotentials(
        v_eff(a, mu, eps, lam, params, grid),
        grad_v_eff(a, mu, eps, lam, params, grid),
        b_eff(a, mu, eps, lam, params, grid),
    )


def modulation_rhs(y, eps, lam, params: NonlinearityParams, grid, force_scale: float = 1.0) -> np.ndarray:
    """Right-hand side for ``y = (a, v, gamma, mu)`` at leading order.

    ``force_scale`` multiplies every lambda-driven term; 1 reproduces the
    textbook normalization m(1) = 1, ``1/m(1)`` matches the actual profile.
    """
    a, v, _, mu = y
    N, s, st = params.N, params.s, params.s_tilde
    if eps:
        pots = effective_potentials(a, mu, eps, lam, params, grid)
    else:
        pots = EffectivePotentials(0.0, 0.0, 0.0)
    c_v = (2 - N * s + 2 * st) / (2 - N * s)
    c_b = s / (2 - N * s)
    return np.array([
        v,
        -2 * np.sqrt(mu) * pots.grad_v_eff * force_scale,
        mu + 0.25 * v * v + force_scale * (-c_v * pots.v_eff + c_b * pots.b_eff),
        0.0,
    ])


def force_scale_for(mass_norm: str, params: NonlinearityParams, grid: GridSpec) -> float:
    if mass_norm == "unit":
        return 1.0
    if mass_norm == "profile":
        return 1.0 / mass(eta1_closed_form(grid, params))
    raise InvalidParamsError(f"mass_norm must be one of {MASS_NORMS}, got {mass_norm!r}")


def integrate_modulation(sigma0: SolitonParams, T: float, dt_ode: float, eps, lam: RoughCoefficient,
                         params: NonlinearityParams, grid: GridSpec, t_eval=None,
                         mass_norm: str = "unit", phase0: float | None = None) -> list[EffectiveODEState]:
    """Classical RK4 for the modulation equations from ``sigma0`` over ``[0, T]``.

    Output is at ``t_eval`` when given, otherwise at every RK4 step. Between
    output times the step is shrunk so output times are hit exactly.
    """
    if not 0 < dt_ode <= 0.1:
        raise StepSizeError(f"dt_ode must lie in (0, 0.1], got {dt_ode}")
    if not 2 - params.N * params.s > 0:
        raise InvalidParamsError("need 2 - N s > 0")
    scale = force_scale_for(mass_norm, params, grid)
    if t_eval is None:
        nsteps = int(np.ceil(T / dt_ode - 1e-12))
        t_eval = np.linspace(0.0, T, nsteps + 1)
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval[0] < 0 or np.any(np.diff(t_eval) < 0):
        raise InvalidParamsError("t_eval must be nonnegative and nondecreasing")

    f = lambda y: modulation_rhs(y, eps, lam, params, grid, scale)  # noqa: E731
    y = sigma0.as_array()
    if phase0 is not None:
        y[2] = phase0
    t = 0.0
    out = []
    for te in t_eval:
        span = te - t
        if span > 0:
            n = int(np.ceil(span / dt_ode - 1e-12))
            h = span / n
            for _ in range(n):
                k1 = f(y)
                k2 = f(y + 0.5 * h * k1)
                k3 = f(y + 0.5 * h * k2)
                k4 = f(y + h * k3)
                y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t = te
        out.append(EffectiveODEState(SolitonParams.from_array(y), float(te), float(y[2])))
    return out


# --- Lyapunov functional ----------------------------------------------------

def frame_energy(u: np.ndarray, mu: float, params: NonlinearityParams, grid: GridSpec) -> float:
    """``E_mu(u) = 1/2 int (|u_x|^2 + mu |u|^2) - G(u)``."""
    quad = 0.5 * grid.integrate(np.abs(grid.derivative(u)) ** 2 + mu * np.abs(u) ** 2)
    return quad - nonlinear_potential(u, params, grid)


def moving_frame_energy(psi, sigma: SolitonParams, params, grid) -> float:
    """``E_mu(u')`` for ``u' = T_{a,v,gamma}^{-1} psi``, evaluated without resampling."""
    dpsi = grid.derivative(psi) - 0.5j * sigma.v * psi
    quad = 0.5 * grid.integrate(np.abs(dpsi) ** 2 + sigma.mu * np.abs(psi) ** 2)
    return quad - nonlinear_potential(psi, params, grid)


def energy_shift_rhs(psi, sigma: SolitonParams, eps, lam, params) -> float:
    """``H_eps(psi) + 1/2 (v^2/4 + mu) |psi|^2 - v/2 <i psi, psi_x> - eps F(psi)``."""
    grid = lam.grid
    v, mu = sigma.v, sigma.mu
    norm2 = grid.integrate(np.abs(psi) ** 2)
    ipsi_dpsi = np.real(grid.integrate(1j * psi * np.conj(grid.derivative(psi))))
    return (energy(psi, eps, params, lam) + 0.5 * (0.25 * v * v + mu) * norm2
            - 0.5 * v * ipsi_dpsi - eps * perturbation_potential(psi, params, lam))


def lyapunov_functional(psi, decomposition, eps, lam: RoughCoefficient, params: NonlinearityParams) -> float:
    """``E_mu(u') + eps F(psi) - (E_mu(eta_mu) + eps F(eta_mu(x - a)))``."""
    grid = lam.grid
    sigma = decomposition.sigma
    mu = sigma.mu
    e_u = moving_frame_energy(psi, sigma, params, grid)
    e_eta = frame_energy(eta_mu(grid, params, mu).values, mu, params, grid)
    c = e_u - e_eta
    if eps:
        centred = np.abs(soliton_field(SolitonParams(sigma.a, 0.0, 0.0, mu), grid, params))
        c += eps * (perturbation_potential(psi, params, lam) - perturbation_potential(centred, params, lam))
    return float(c)
