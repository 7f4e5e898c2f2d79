"""Skew-orthogonal decomposition psi = T_sigma(eta + w) and modulation tracking."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ExtractionError, NoConvergenceError, NonPositiveScalingError
from .grid import GridSpec
from .manifold import (SolitonParams, apply_T_sigma, group_inverse, soliton_field,
                       transformed_tangents)
from .profile import NonlinearityParams, eta1

MAX_ITER = 50
FD_STEP = 1e-6


@dataclass(frozen=True)
class Decomposition:
    sigma: SolitonParams
    w: np.ndarray = field(repr=False)
    residual: float
    h1_norm_w: float
    h1_norm_wp: float  # ||w'||_{H^1}, w' = T^s_mu w
    iterations: int
    phase: float  # gamma before reduction mod 2 pi


def h1_norm(u: np.ndarray, grid: GridSpec) -> float:
    """``(int |u_x|^2 + |u|^2)^{1/2}`` with a spectral derivative."""
    u = grid.check(u)
    return float(np.sqrt(grid.integrate(np.abs(grid.derivative(u)) ** 2 + np.abs(u) ** 2)))


def orthogonality_residuals(psi, z, params: NonlinearityParams, grid: GridSpec) -> np.ndarray:
    """``omega(T_z^{-1} psi - eta, e_alpha eta)`` for ``z = (a, v, gamma, mu)``.

    Evaluated in the lab frame as ``mu^{-(1/s - N/2)} omega(psi - T_z eta, T_z e_alpha eta)``
    with closed-form transformed profiles, so psi is never resampled.
    """
    sigma = SolitonParams.from_array(z)
    r = psi - soliton_field(sigma, grid, params)
    tang = transformed_tangents(sigma, grid, params)
    scale = sigma.mu ** (-params.mass_exponent)
    return scale * np.imag(grid.dx * (tang.conj() @ r))


def _wprime_h1(psi, sigma: SolitonParams, params, grid) -> float:
    r = psi - soliton_field(sigma, grid, params)
    dr = grid.derivative(r) - 0.5j * sigma.v * r
    return float(np.sqrt(grid.integrate(np.abs(dr) ** 2 + np.abs(r) ** 2)))


def decompose(psi: np.ndarray, sigma_guess: SolitonParams, tol: float = 1e-10, *,
              params: NonlinearityParams, grid: GridSpec, phase_guess: float | None = None) -> Decomposition:
    """Solve the four skew-orthogonality conditions for sigma by damped Newton.

    The Jacobian is a forward difference with step ``FD_STEP`` per parameter.
    Raises :class:`NoConvergenceError` after ``MAX_ITER`` iterations and
    :class:`NonPositiveScalingError` if the iteration is pushed to mu <= 0.
    """
    psi = grid.check(psi)
    z = sigma_guess.as_array()
    if phase_guess is not None:
        z[2] = phase_guess
    F = orthogonality_residuals(psi, z, params, grid)
    it = 0
    while np.max(np.abs(F)) >= tol:
        if it >= MAX_ITER:
            raise NoConvergenceError(f"no convergence after {MAX_ITER} iterations (residual {np.max(np.abs(F)):.2e})")
        it += 1
        J = np.empty((4, 4))
        for b in range(4):
            zb = z.copy()
            zb[b] += FD_STEP
            J[:, b] = (orthogonality_residuals(psi, zb, params, grid) - F) / FD_STEP
        try:
            dz = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError as exc:
            raise NoConvergenceError("singular Jacobian") from exc
        if not np.all(np.isfinite(dz)):
            raise NoConvergenceError("non-finite Newton step")
        lam = 1.0
        norm0 = np.linalg.norm(F)
        for _ in range(30):
            trial = z + lam * dz
            if trial[3] > 0:
                F_trial = orthogonality_residuals(psi, trial, params, grid)
                if np.linalg.norm(F_trial) < norm0 or lam < 1e-3:
                    break
            lam *= 0.5
        else:
            raise NonPositiveScalingError("Newton iterate left mu > 0")
        if trial[3] <= 0:
            raise NonPositiveScalingError("Newton iterate left mu > 0")
        z, F = trial, F_trial
    sigma = SolitonParams.from_array(z)
    w = apply_T_sigma(group_inverse(sigma), psi, params, grid, check_support=False) - eta1(grid.x, params)
    return Decomposition(
        sigma=sigma,
        w=w,
        residual=float(np.max(np.abs(F))),
        h1_norm_w=h1_norm(w, grid),
        h1_norm_wp=_wprime_h1(psi, sigma, params, grid),
        iterations=it,
        phase=float(z[2]),
    )


@dataclass
class ModulationTrajectory:
    t: np.ndarray
    a: np.ndarray
    v: np.ndarray
    gamma: np.ndarray  # unwrapped
    mu: np.ndarray
    h1_w: np.ndarray  # ||w'||_{H^1}
    residual: np.ndarray
    lyapunov: np.ndarray
    iterations: np.ndarray
    truncated: bool = False
    truncation_time: float | None = None

    def __len__(self):
        return len(self.t)

    @property
    def sigma0(self) -> SolitonParams:
        return SolitonParams(self.a[0], self.v[0], self.gamma[0], self.mu[0])

    def rows(self):
        """CSV rows ``t, a, v, gamma (mod 2 pi), mu, h1_w, residual, lyapunov``."""
        g = np.mod(self.gamma, 2 * np.pi)
        return np.column_stack([self.t, self.a, self.v, g, self.mu, self.h1_w, self.residual, self.lyapunov])


class Tracker:
    """Warm-started sequential decomposition of a stream of PDE samples."""

    def __init__(self, sigma0: SolitonParams, tol, params, grid, eps=0.0, lam=None, phase0=None):
        self.tol, self.params, self.grid, self.eps, self.lam = tol, params, grid, eps, lam
        self.sigma = sigma0
        self.phase = sigma0.gamma if phase0 is None else phase0
        self.t_prev = None
        self.records = []
        self.truncated = False
        self.truncation_time = None

    def push(self, t: float, psi: np.ndarray) -> Decomposition | None:
        """Decompose one sample; returns None (and marks truncation) on failure."""
        from .effective import lyapunov_functional

        if self.truncated:
            return None
        guess, phase = self.sigma, self.phase
        if self.t_prev is not None:
            dt = t - self.t_prev
            s = self.sigma
            guess = SolitonParams(s.a + s.v * dt, s.v, s.gamma, s.mu)
            phase = self.phase + (s.mu + 0.25 * s.v ** 2) * dt
        try:
            dec = decompose(psi, guess, self.tol, params=self.params, grid=self.grid, phase_guess=phase)
        except ExtractionError:
            self.truncated = True
            self.truncation_time = t
            return None
        lyap = np.nan
        if self.lam is not None:
            lyap = lyapunov_functional(psi, dec, self.eps, self.lam, self.params)
        self.sigma, self.phase, self.t_prev = dec.sigma, dec.phase, t
        self.records.append((t, dec, lyap))
        return dec

    def trajectory(self) -> ModulationTrajectory:
        recs = self.records
        col = lambda f: np.array([f(r) for r in recs], dtype=float)  # noqa: E731
        return ModulationTrajectory(
            t=col(lambda r: r[0]),
            a=col(lambda r: r[1].sigma.a),
            v=col(lambda r: r[1].sigma.v),
            gamma=col(lambda r: r[1].phase),
            mu=col(lambda r: r[1].sigma.mu),
            h1_w=col(lambda r: r[1].h1_norm_wp),
            residual=col(lambda r: r[1].residual),
            lyapunov=col(lambda r: r[2]),
            iterations=np.array([r[1].iterations for r in recs], dtype=int),
            truncated=self.truncated,
            truncation_time=self.truncation_time,
        )


def track(samples, sigma0: SolitonParams, tol: float = 1e-10, *, params: NonlinearityParams, grid: GridSpec,
          eps: float = 0.0, lam=None) -> ModulationTrajectory:
    """Decompose each ``(t, psi)`` sample, warm-starting from the previous one.

    The trajectory stops at the first sample where the decomposition fails.
    """
    tracker = Tracker(sigma0, tol, params, grid, eps, lam)
    for t, psi in samples:
        if tracker.push(t, psi) is None:
            break
    return tracker.trajectory()
