"""Flat ``key = value`` configuration files for the study harness."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields

from .errors import ConstraintViolationError, InvalidParamsError


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(",", " ").split())


@dataclass(frozen=True)
class StudyConfig:
    # perturbation sweep and regime exponents
    epsilons: tuple[float, ...] = (0.05, 0.025, 0.0125)
    eps: float = 0.05  # single-run commands (simulate / extract / effective)
    alpha: float = 1.0
    beta: float = 0.5
    nu: float = 0.2
    c: float = 1.0
    # horizon
    horizon_rule: str = "theorem_window"  # or fixed_T
    prefactor: float = 1.0
    T_fixed: float = 10.0
    # nonlinearity
    s: float = 1.0
    s_tilde: float = 1.0
    # rough coefficient
    lambda_kind: str = "smooth_bump"
    lambda_amplitude: float = 1.0
    lambda_center: float = 0.0
    lambda_width: float = 1.0
    lambda_kmax: float = 5.0
    lambda_cell: float = 0.5
    seed: int = 12345
    # grid and time stepping
    L: float = 40 * 3.141592653589793
    n: int = 4096
    dt: float = 1e-3
    scheme: str = "mclachlan"
    refine_max: int = 2  # dt halvings allowed by the study's refinement loop (0 disables)
    refine_tol: float = 0.01  # relative change of modulation observables accepted between refinements
    # initial soliton and fluctuation
    a0: float = 1.0
    v0: float = 0.0
    gamma0: float = 0.0
    mu0: float = 1.0
    fluct: str = "bump"  # or none
    # tracking and effective dynamics
    sample_dt: float = 0.1
    min_sample_dt: float = 0.0125
    tol: float = 1e-10
    dt_ode: float = 0.01
    mass_norm: str = "profile"  # or unit
    tail_tol: float = 1e-6
    workers: int = 1

    def __post_init__(self):
        a, b, nu = self.alpha, self.beta, self.nu
        if not (0 < nu < min(b, a - b) and 0 < a <= 1):
            raise ConstraintViolationError(
                f"need 0 < nu < min(beta, alpha - beta) and 0 < alpha <= 1 (alpha={a}, beta={b}, nu={nu})")
        if any(not 0 <= e < 1 for e in self.epsilons) or not 0 <= self.eps < 1:
            raise ConstraintViolationError("every eps must lie in [0, 1)")
        if self.horizon_rule not in ("theorem_window", "fixed_T"):
            raise InvalidParamsError(f"unknown horizon_rule {self.horizon_rule!r}")
        if self.fluct not in ("bump", "none"):
            raise InvalidParamsError(f"unknown fluct {self.fluct!r}")
        if self.sample_dt < self.dt:
            raise InvalidParamsError("sample_dt must be at least dt")

    @property
    def alpha_tilde(self) -> float:
        return self.alpha - self.beta - self.nu

    @property
    def window_exponent(self) -> float:
        return min(self.beta - self.nu, 1 - self.alpha)

    def with_(self, **kw) -> "StudyConfig":
        return dataclasses.replace(self, **kw)


_PARSERS = {"tuple[float, ...]": _floats, "float": float, "int": int, "str": str}


def parse_config(text: str, base: StudyConfig | None = None) -> StudyConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment. Unknown keys are errors."""
    types = {f.name: f.type for f in fields(StudyConfig)}
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParamsError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (t.strip() for t in line.split("=", 1))
        if key not in types:
            raise InvalidParamsError(f"line {lineno}: unknown key {key!r}")
        try:
            updates[key] = _PARSERS[types[key]](value)
        except ValueError as exc:
            raise InvalidParamsError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return (base or StudyConfig()).with_(**updates)


def load_config(path) -> StudyConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def dump_config(cfg: StudyConfig) -> str:
    lines = []
    for f in fields(cfg):
        val = getattr(cfg, f.name)
        if isinstance(val, tuple):
            val = ", ".join(repr(v) for v in val)
        lines.append(f"{f.name} = {val}")
    return "\n".join(lines) + "\n"
