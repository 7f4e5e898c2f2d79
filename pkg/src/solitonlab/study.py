"""End-to-end studies: PDE run, modulation tracking, effective-ODE comparison, scaling fits."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import StudyConfig
from .effective import integrate_modulation
from .errors import (ConstraintViolationError, DegenerateDataError, InvalidParamsError,
                     SolitonLabError)
from .extractor import ModulationTrajectory, Tracker, h1_norm
from .grid import GridSpec
from .manifold import SolitonParams, apply_T_sigma, skew_orthogonalize, tangent_basis
from .profile import NonlinearityParams, eta1
from .solver import (SolverState, boundary_tail, constant_lambda, diagnostics, random_fourier_lambda,
                     random_step_lambda, smooth_bump_lambda, step)

log = logging.getLogger(__name__)

RETUNE_ITERATIONS = 10


def build_grid(cfg: StudyConfig) -> GridSpec:
    return GridSpec(cfg.L, cfg.n)


def build_params(cfg: StudyConfig) -> NonlinearityParams:
    return NonlinearityParams(cfg.s, cfg.s_tilde)


def build_lambda(cfg: StudyConfig, grid: GridSpec):
    kind = cfg.lambda_kind
    if kind == "constant":
        return constant_lambda(grid, cfg.lambda_amplitude)
    if kind == "smooth_bump":
        return smooth_bump_lambda(grid, cfg.lambda_amplitude, cfg.lambda_center, cfg.lambda_width)
    if kind == "random_fourier":
        return random_fourier_lambda(grid, cfg.seed, cfg.lambda_amplitude, cfg.lambda_kmax)
    if kind == "random_step":
        return random_step_lambda(grid, cfg.seed, cfg.lambda_amplitude, cfg.lambda_cell)
    raise InvalidParamsError(f"unknown lambda_kind {kind!r}")


def initial_sigma(cfg: StudyConfig) -> SolitonParams:
    return SolitonParams(cfg.a0, cfg.v0, cfg.gamma0, cfg.mu0)


def horizon(cfg: StudyConfig, eps: float) -> float:
    """``prefactor * nu |log eps| / eps^{min(beta - nu, 1 - alpha)}``, or ``T_fixed``."""
    if cfg.horizon_rule == "fixed_T" or eps == 0:
        return cfg.T_fixed
    return cfg.prefactor * cfg.nu * abs(np.log(eps)) / eps ** cfg.window_exponent


def bump_fluctuation(grid: GridSpec) -> np.ndarray:
    """Fixed smooth complex bump used as the raw initial fluctuation shape."""
    x = grid.x
    return (1.0 + 0.5j) * np.exp(-(x - 0.5) ** 2) + 0.3 * x * np.exp(-0.5 * x ** 2)


def make_initial_data(sigma0: SolitonParams, eps: float, alpha: float, fluct_spec: str, grid: GridSpec,
                      params: NonlinearityParams, c: float = 1.0) -> np.ndarray:
    """``T_sigma0(eta + w0)`` with ``||w0||_{H^1} = c eps^{(1+alpha)/2}`` and w0 skew-orthogonal."""
    if abs(sigma0.v) > c * eps ** alpha:
        raise ConstraintViolationError(f"|v0| = {abs(sigma0.v)} exceeds c eps^alpha = {c * eps ** alpha}")
    u = eta1(grid.x, params).astype(complex)
    if fluct_spec != "none" and eps > 0:
        w0 = skew_orthogonalize(bump_fluctuation(grid), tangent_basis(grid, params, 1.0))
        u = u + w0 * (c * eps ** ((1 + alpha) / 2) / h1_norm(w0, grid))
    elif fluct_spec not in ("none", "bump"):
        raise InvalidParamsError(f"unknown fluctuation spec {fluct_spec!r}")
    return apply_T_sigma(sigma0, u, params, grid)


def fit_scaling(pairs) -> tuple[float, float, float]:
    """Least-squares line through ``(log eps, log y)``: returns (slope, intercept, slope stderr)."""
    pairs = list(pairs)
    if len(pairs) < 3:
        raise DegenerateDataError("need at least 3 (eps, y) pairs")
    x = np.log([p[0] for p in pairs])
    y = np.log([p[1] for p in pairs])
    if np.ptp(x) == 0:
        raise DegenerateDataError("all eps values are equal")
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    dof = len(x) - 2
    sigma2 = resid @ resid / dof if dof > 0 else 0.0
    stderr = float(np.sqrt(sigma2 / np.sum((x - x.mean()) ** 2)))
    return float(coef[0]), float(coef[1]), stderr


@dataclass
class EpsRun:
    """Everything produced for one value of eps."""

    eps: float
    horizon: float
    modulation: ModulationTrajectory
    ode: np.ndarray  # rows t, a, v, gamma, mu, v_eff, grad_v_eff, b_eff
    diagnostics: np.ndarray  # rows t, energy, charge, momentum
    failure: str | None = None
    dt: float | None = None
    refine_change: float | None = None  # relative observable change at the last dt halving

    @property
    def truncated(self) -> bool:
        return self.modulation.truncated or self.failure is not None

    @property
    def y_T(self) -> float:
        return float(np.max(self.modulation.h1_w)) if len(self.modulation) else float("nan")

    @property
    def z_T(self) -> float:
        return float(np.max(np.abs(self.modulation.v))) if len(self.modulation) else float("nan")

    @property
    def a_gap_max(self) -> float:
        if not len(self.modulation):
            return float("nan")
        return float(np.max(np.abs(self.modulation.a - self.ode[:, 1])))

    def observables(self) -> np.ndarray:
        m = self.modulation
        return np.array([self.y_T, self.z_T, m.a[-1], m.mu[-1]])

    def mu_gap_max(self, mu0: float) -> float:
        return float(np.max(np.abs(self.modulation.mu - mu0))) if len(self.modulation) else float("nan")


def simulate_and_track(cfg: StudyConfig, eps: float, keep_fields: bool = False):
    """Evolve the PDE to the horizon while tracking the modulation parameters.

    The sampling interval halves whenever a warm-started Newton solve needs
    more than ``RETUNE_ITERATIONS`` iterations. Returns the tracker, the
    diagnostics rows, optional ``(t, psi)`` samples and a failure message.
    """
    grid, params = build_grid(cfg), build_params(cfg)
    lam = build_lambda(cfg, grid)
    sigma0 = initial_sigma(cfg)
    T = horizon(cfg, eps)
    psi0 = make_initial_data(sigma0, eps, cfg.alpha, cfg.fluct, grid, params, cfg.c)
    state = SolverState(psi0, 0.0, eps, params, lam)
    tracker = Tracker(sigma0, cfg.tol, params, grid, eps, lam)
    diag_rows, fields_out = [], []
    nsteps = max(1, int(round(T / cfg.dt)))
    every = max(1, int(round(cfg.sample_dt / cfg.dt)))
    min_every = max(1, int(round(cfg.min_sample_dt / cfg.dt)))
    done = 0
    failure = None

    def record(st):
        d = diagnostics(st)
        diag_rows.append((st.t, d.energy, d.charge, d.momentum))
        if keep_fields:
            fields_out.append((st.t, st.psi.copy()))
        return tracker.push(st.t, st.psi)

    dec = record(state)
    while done < nsteps and dec is not None:
        for _ in range(min(every, nsteps - done)):
            state = step(state, cfg.dt, cfg.scheme)
            done += 1
        tail = boundary_tail(state.psi)
        if tail > cfg.tail_tol:
            failure = f"tail overflow {tail:.2e} at t = {state.t:.4g}"
            tracker.truncated, tracker.truncation_time = True, state.t
            break
        dec = record(state)
        if dec is not None and dec.iterations > RETUNE_ITERATIONS and every > min_every:
            every = max(min_every, every // 2)
            log.info("eps=%g: Newton took %d iterations at t=%.3f, sampling every %d steps",
                     eps, dec.iterations, state.t, every)
    if tracker.truncated and failure is None:
        failure = f"decomposition failed at t = {tracker.truncation_time:.4g}"
    return tracker, np.array(diag_rows), fields_out, failure, T


def ode_rows(cfg: StudyConfig, eps: float, traj: ModulationTrajectory) -> np.ndarray:
    from .effective import effective_potentials

    grid, params = build_grid(cfg), build_params(cfg)
    lam = build_lambda(cfg, grid)
    if not len(traj):
        return np.empty((0, 8))
    states = integrate_modulation(traj.sigma0, float(traj.t[-1]), cfg.dt_ode, eps, lam, params, grid,
                                  t_eval=traj.t, mass_norm=cfg.mass_norm, phase0=float(traj.gamma[0]))
    rows = []
    for st in states:
        pots = effective_potentials(st.sigma.a, st.sigma.mu, eps, lam, params, grid)
        rows.append((st.t, st.sigma.a, st.sigma.v, st.sigma.gamma, st.sigma.mu,
                     pots.v_eff, pots.grad_v_eff, pots.b_eff))
    return np.array(rows)


def _run_eps_once(cfg: StudyConfig, eps: float) -> EpsRun:
    try:
        tracker, diag, _, failure, T = simulate_and_track(cfg, eps)
    except SolitonLabError as exc:  # e.g. support overflow while building initial data
        empty = Tracker(initial_sigma(cfg), cfg.tol, None, None).trajectory()
        return EpsRun(eps, horizon(cfg, eps), empty, np.empty((0, 8)), np.empty((0, 4)), str(exc), cfg.dt)
    traj = tracker.trajectory()
    return EpsRun(eps, T, traj, ode_rows(cfg, eps, traj), diag, failure, cfg.dt)


def run_eps(cfg: StudyConfig, eps: float) -> EpsRun:
    """One eps of the sweep, halving dt until the modulation observables settle.

    Observables are sup ||w'||, sup |v|, and the final a and mu. The finest
    run is returned; refinement stops early on failure or once the relative
    change drops below ``refine_tol``.
    """
    run = _run_eps_once(cfg, eps)
    dt = cfg.dt
    for _ in range(cfg.refine_max):
        if run.failure or not len(run.modulation):
            break
        dt /= 2
        finer = _run_eps_once(cfg.with_(dt=dt), eps)
        if finer.failure or len(finer.modulation) != len(run.modulation):
            return finer
        old, new = run.observables(), finer.observables()
        finer.refine_change = float(np.max(np.abs(new - old) / np.maximum(np.abs(new), 1e-300)))
        run = finer
        if run.refine_change < cfg.refine_tol:
            break
    return run


@dataclass
class StudyResult:
    config: StudyConfig
    runs: list[EpsRun]
    slope: float | None = None
    intercept: float | None = None
    stderr: float | None = None
    fit_error: str | None = field(default=None)

    @property
    def epsilons(self):
        return [r.eps for r in self.runs]

    def summary(self) -> dict:
        """Summary JSON payload."""
        return {
            "epsilons": self.epsilons,
            "y_T": [r.y_T for r in self.runs],
            "z_T": [r.z_T for r in self.runs],
            "a_gap_max": [r.a_gap_max for r in self.runs],
            "slope": self.slope,
            "stderr": self.stderr,
            "horizon": [r.horizon for r in self.runs],
            "truncated": [r.truncated for r in self.runs],
        }


def run_study(cfg: StudyConfig) -> StudyResult:
    """Run every eps of the sweep (concurrently when ``workers > 1``) and fit the fluctuation scaling."""
    eps_list = sorted(cfg.epsilons)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            runs = list(pool.map(run_eps, [cfg] * len(eps_list), eps_list))
    else:
        runs = [run_eps(cfg, e) for e in eps_list]
    runs.sort(key=lambda r: r.eps)
    result = StudyResult(cfg, runs)
    pairs = [(r.eps, r.y_T) for r in runs if r.eps > 0 and not r.truncated and r.y_T > 0]
    try:
        result.slope, result.intercept, result.stderr = fit_scaling(pairs)
    except DegenerateDataError as exc:
        result.fit_error = str(exc)
    return result
