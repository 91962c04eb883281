"""Brute-force references: a scaling-and-squaring matrix exponential and a
fixed-step RK4 integrator.  Neither shares code with the closed forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .core import GammaMatrix, gamma_from_params
from .errors import NegativeTimeError, NonFiniteInputError, StepTooLargeError
from .propagator import propagator
from .solution import Magnetization


@dataclass(frozen=True)
class OracleConfig:
    """Knobs for the reference computations.

    ``dps`` switches expm_reference to mpmath arithmetic with that many
    decimal digits for arguments whose norm exceeds ``extended_above``;
    None keeps everything in float64.  Rounding m*t to float64 alone costs
    about ||m t|| * eps of relative accuracy, so huge phases need the switch.
    """

    taylor_tolerance: float = 1e-20
    scaling_threshold: float = 0.5
    rk4_step: float = 1e-4
    dps: int | None = None
    extended_above: float = 0.0

    def __post_init__(self):
        for name in ("taylor_tolerance", "scaling_threshold", "rk4_step"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v}")
        if self.dps is not None and self.dps < 16:
            raise ValueError("dps below 16 is less precise than float64")


DEFAULT_CONFIG = OracleConfig()


def _inf_norm(a: np.ndarray):
    return max(sum(abs(x) for x in row) for row in a)


def _expm_series(a: np.ndarray, cfg: OracleConfig, one, zero) -> np.ndarray:
    # Backward error: after scaling, ||A/2^k|| <= theta (0.5 by default), so
    # Taylor terms shrink at least geometrically by theta/(n+1).  Stopping when
    # a term drops below tol * ||partial sum|| leaves a truncation error of
    # roughly the same size, and k squarings amplify it by at most ~2^k * ||A||
    # in relative terms; tol = 1e-20 keeps that far below float64 resolution
    # for every norm the tests use.
    norm = _inf_norm(a)
    k = 0
    if norm > cfg.scaling_threshold:
        k = int(math.ceil(math.log2(float(norm) / cfg.scaling_threshold)))
    a = a / (2**k)
    n = a.shape[0]
    eye = np.array([[one if i == j else zero for j in range(n)] for i in range(n)], dtype=a.dtype)
    total = eye.copy()
    term = eye.copy()
    for j in range(1, 200):
        term = (term @ a) / j
        total = total + term
        if _inf_norm(term) <= cfg.taylor_tolerance * _inf_norm(total):
            break
    for _ in range(k):
        total = total @ total
    return total


def expm_reference(m, cfg: OracleConfig = DEFAULT_CONFIG, t: float = 1.0) -> np.ndarray:
    """exp(m * t) by scaling and squaring a truncated Taylor series.

    The product m * t is formed at the working precision, which matters in
    extended-precision mode when m * t has huge entries.
    """
    m = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(m)) or not math.isfinite(t):
        raise NonFiniteInputError("expm_reference needs finite input")
    if cfg.dps is None or _inf_norm(m) * abs(t) <= cfg.extended_above:
        return _expm_series(m * t, cfg, 1.0, 0.0)
    with mpmath.workdps(cfg.dps):
        tt = mpmath.mpf(t)
        a = np.array([[mpmath.mpf(float(x)) * tt for x in row] for row in m], dtype=object)
        out = _expm_series(a, cfg, mpmath.mpf(1), mpmath.mpf(0))
        return np.array([[float(x) for x in row] for row in out])


def max_stable_step(g: GammaMatrix) -> float:
    return 0.1 / max(float(np.max(np.sum(np.abs(g.m), axis=1))), g.field.omegaE, np.finfo(float).tiny)


def _rk4_run(gm: np.ndarray, drive: np.ndarray, y: np.ndarray, t_span: float, step: float) -> np.ndarray:
    if t_span <= 0.0:
        return y
    n = int(math.ceil(t_span / step - 1e-9))
    h = t_span / n
    for _ in range(n):
        k1 = drive - gm @ y
        k2 = drive - gm @ (y + 0.5 * h * k1)
        k3 = drive - gm @ (y + 0.5 * h * k2)
        k4 = drive - gm @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def _check_step(g: GammaMatrix, cfg: OracleConfig) -> None:
    limit = max_stable_step(g)
    if cfg.rk4_step > limit:
        raise StepTooLargeError(f"rk4 step {cfg.rk4_step} exceeds stability bound {limit:.3g}")


def integrate_reference(g: GammaMatrix, m_init, m0: float, t_end: float,
                        cfg: OracleConfig = DEFAULT_CONFIG) -> Magnetization:
    """Integrate dM/dt = -Gamma M + m0 R3 z with classical fixed-step RK4.

    The step is shrunk to divide t_end evenly, so it never exceeds rk4_step.
    """
    if not math.isfinite(t_end) or t_end < 0:
        raise NegativeTimeError(f"t_end must be finite and >= 0, got {t_end}")
    _check_step(g, cfg)
    y = Magnetization.coerce(m_init).as_array()
    drive = np.array([0.0, 0.0, m0 * g.rates.r3])
    return Magnetization.from_array(_rk4_run(np.asarray(g.m), drive, y, t_end, cfg.rk4_step))


def integrate_path(g: GammaMatrix, m_init, m0: float, t_grid,
                   cfg: OracleConfig = DEFAULT_CONFIG) -> list[Magnetization]:
    """RK4 states at every time of a nondecreasing grid, in one chained sweep."""
    _check_step(g, cfg)
    times = [float(t) for t in t_grid]
    if any(b < a for a, b in zip(times, times[1:])) or (times and times[0] < 0):
        raise NegativeTimeError("time grid must be nonnegative and nondecreasing")
    gm = np.asarray(g.m)
    drive = np.array([0.0, 0.0, m0 * g.rates.r3])
    y = Magnetization.coerce(m_init).as_array()
    y = _rk4_run(gm, drive, y, times[0] if times else 0.0, cfg.rk4_step)
    out = []
    prev = times[0] if times else 0.0
    for t in times:
        y = _rk4_run(gm, drive, y, t - prev, cfg.rk4_step)
        prev = t
        out.append(Magnetization.from_array(y))
    return out


# Extended precision above ||Gamma t|| = 1e4, where float64 expm loses ~1e-12.
VERIFY_CONFIG = OracleConfig(dps=30, extended_above=1e4)


def sample_system(rng: np.random.Generator) -> GammaMatrix:
    """Random system: rates log-uniform on [1e-2, 1e4], field components
    log-uniform on [1e-2, 1e5] in magnitude with random signs."""
    rates = 10.0 ** rng.uniform(-2.0, 4.0, 3)
    field = 10.0 ** rng.uniform(-2.0, 5.0, 3) * rng.choice([-1.0, 1.0], 3)
    return gamma_from_params(field, rates)


def propagator_error(g: GammaMatrix, t: float, cfg: OracleConfig = VERIFY_CONFIG) -> float:
    """max|P - P_ref| / max|P_ref| for the closed-form propagator at time t."""
    ref = expm_reference(-np.asarray(g.m), cfg, t)
    return float(np.max(np.abs(propagator(g, t).m - ref)) / np.max(np.abs(ref)))


@dataclass(frozen=True)
class VerifyReport:
    samples: int
    evaluations: int
    max_error: float
    worst_field: tuple[float, float, float]
    worst_rates: tuple[float, float, float]
    worst_time: float


def verify_random(samples: int, seed: int, times_per_system: int = 5,
                  cfg: OracleConfig = VERIFY_CONFIG) -> VerifyReport:
    """Closed form against expm_reference on seeded random systems, t uniform on [0, 5/rbar]."""
    rng = np.random.default_rng(seed)
    worst = (-1.0, None, 0.0)
    for _ in range(samples):
        g = sample_system(rng)
        for t in rng.uniform(0.0, 5.0 / g.rates.rbar, times_per_system):
            err = propagator_error(g, float(t), cfg)
            if err > worst[0]:
                worst = (err, g, float(t))
    err, g, t = worst
    if g is None:
        return VerifyReport(0, 0, 0.0, (0.0, 0.0, 0.0), (0.0, 0.0, 0.0), 0.0)
    field = (g.field.omega1, g.field.omega2, g.field.omega3)
    return VerifyReport(samples, samples * times_per_system, err, field, g.rates.as_tuple(), t)
