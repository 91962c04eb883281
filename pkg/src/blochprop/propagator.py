"""Closed-form propagator exp(-Gamma t).

With Gamma = rbar*I + Gp the propagator factors as exp(-rbar t) exp(-Gp t),
and Cayley-Hamilton reduces the second factor to

    exp(-Gp t) = a0(t) I + a1(t) Gp + a2(t) Gp^2

whose scalar weights come from the residues of adj(zI + Gp) e^{zt} / q(z) at
the roots of q.  The weights are evaluated with the decay exp(-rbar t) folded
into every exponential, so nothing overflows at long times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import mpmath
import numpy as np

from .core import GammaMatrix, PartitionedSystem, partition
from .cubic import DEFAULT_TOL_REL, CanonicalCoeffs, CubicSolution, RootClass, analyse, solve_roots
from .errors import BranchMismatchError, NegativeTimeError, ZeroRootInDoubleBranchError

SERIES_CUTOFF = 1e-4  # |varpi t| below which sin/sinh ratios use a series
REROUTE_FRACTION = 1e-6  # distinct branch gives way when |3 z1^2 + a| is this small
# Above this many radians, one ulp of varpi t is no longer negligible, so the
# oscillating factor is evaluated with extended-precision argument handling.
PHASE_EXTENDED = 1e4
_PHASE_DPS = 40
# A degenerate class ignores a root splitting of up to ~sqrt(tol) * scale; once
# splitting * t exceeds this, the unforced roots and the distinct form are used.
SPLIT_PHASE = 1e-6
_IDENTITY = np.eye(3)


@dataclass(frozen=True)
class AdjugateCoeffs:
    """adj(z I + Gp) = a0p + a1p z + I z^2."""

    a0p: np.ndarray
    a1p: np.ndarray

    def __call__(self, z) -> np.ndarray:
        return self.a0p + self.a1p * z + _IDENTITY * z * z


@dataclass(frozen=True)
class Propagator:
    m: np.ndarray = field(repr=False)
    t: float
    branch: RootClass
    roots: CubicSolution
    coefficients: tuple[float, float, float]  # weights of (I, Gp, Gp^2), decay included

    @property
    def partitioned(self) -> np.ndarray:
        """exp(-Gp t), i.e. the propagator with the mean decay removed."""
        return self.m * math.exp(self.roots.rbar * self.t)

    def apply(self, v) -> np.ndarray:
        return self.m @ np.asarray(v, dtype=float)


def adjugate_coeffs(p: PartitionedSystem, a: float) -> AdjugateCoeffs:
    gp = p.gamma_p
    a0p = gp @ gp + a * _IDENTITY
    return AdjugateCoeffs(a0p, -np.array(gp))


def w1_matrix(z1: float, a: float) -> np.ndarray:
    """Weights of (I, Gp, Gp^2) against (e^{z1 t}, e^{-z1 t/2} cos, e^{-z1 t/2} sin/varpi)."""
    return np.array(
        [
            [z1 * z1 + a, 2.0 * z1 * z1, -a * z1],
            [-z1, z1, -(1.5 * z1 * z1 + a)],
            [1.0, -1.0, -1.5 * z1],
        ]
    ) / (3.0 * z1 * z1 + a)


def u1_vector(z1: float, varpi_sq: float, t: float) -> np.ndarray:
    w = math.sqrt(abs(varpi_sq))
    e2 = math.exp(-0.5 * z1 * t)
    if varpi_sq >= 0:
        c, s = math.cos(w * t), (math.sin(w * t) / w if w else t)
    else:
        c, s = math.cosh(w * t), math.sinh(w * t) / w
    return np.array([math.exp(z1 * t), e2 * c, e2 * s])


def w2_matrix(z1: float) -> np.ndarray:
    """Weights of (I, Gp, Gp^2) against (e^{z1 t}, e^{-z1 t/2}, t e^{-z1 t/2})."""
    return np.array(
        [
            [1.0 / 9.0, 8.0 / 9.0, z1 / 3.0],
            [-4.0 / (9.0 * z1), 4.0 / (9.0 * z1), -1.0 / 3.0],
            [4.0 / (9.0 * z1 * z1), -4.0 / (9.0 * z1 * z1), -2.0 / (3.0 * z1)],
        ]
    )


def u2_vector(z1: float, t: float) -> np.ndarray:
    e2 = math.exp(-0.5 * z1 * t)
    return np.array([math.exp(z1 * t), e2, t * e2])


def _sinc_like(w: float, t: float, hyperbolic: bool) -> tuple[float, float]:
    """(cos wt, sin(wt)/w) or the hyperbolic pair, with a series for small wt."""
    x = w * t
    if abs(x) < SERIES_CUTOFF:
        x2 = x * x
        if hyperbolic:
            return 1.0 + 0.5 * x2, t * (1.0 + x2 / 6.0)
        return 1.0 - 0.5 * x2, t * (1.0 - x2 / 6.0)
    if hyperbolic:
        return math.cosh(x), math.sinh(x) / w
    return math.cos(x), math.sin(x) / w


def _extended_trig(p: PartitionedSystem, z1: float, t: float) -> tuple[float, float]:
    """(cos varpi t, sin(varpi t)/varpi) with a, b, z1 and the phase carried at high precision.

    The float entries of Gp are taken as exact; a and b are rebuilt from them,
    z1 is polished by Newton steps and varpi t is formed without rounding.
    """
    with mpmath.workdps(_PHASE_DPS):
        gp = [[mpmath.mpf(float(x)) for x in row] for row in p.gamma_p]
        r = [gp[i][i] for i in range(3)]
        w = [gp[1][2], gp[2][0], gp[0][1]]
        a = sum(x * x for x in w) + r[0] * r[1] + r[0] * r[2] + r[1] * r[2]
        b = r[0] * r[1] * r[2] + sum(r[i] * w[i] ** 2 for i in range(3))
        z = mpmath.mpf(z1)
        for _ in range(3):
            z -= (z**3 + a * z + b) / (3 * z * z + a)
        varpi = mpmath.sqrt(0.75 * z * z + a)
        x = varpi * mpmath.mpf(t)
        return float(mpmath.cos(x)), float(mpmath.sin(x) / varpi)


def _distinct_weights(z1: float, a: float, varpi_sq: float, t: float, decay: float,
                      trig: tuple[float, float] | None = None) -> np.ndarray:
    e1 = math.exp((z1 - decay) * t)
    lead = (-0.5 * z1 - decay) * t
    w = math.sqrt(abs(varpi_sq))
    if varpi_sq >= 0.0:
        c, s = trig if trig is not None else _sinc_like(w, t, hyperbolic=False)
        e2 = math.exp(lead)
        u2, u3 = e2 * c, e2 * s
    elif w * t < 1.0:
        c, s = _sinc_like(w, t, hyperbolic=True)
        e2 = math.exp(lead)
        u2, u3 = e2 * c, e2 * s
    else:
        ep = math.exp(lead + w * t)
        em = math.exp(lead - w * t)
        u2, u3 = 0.5 * (ep + em), 0.5 * (ep - em) / w
    z1sq = z1 * z1
    den = 3.0 * z1sq + a
    return np.array(
        [
            ((z1sq + a) * e1 + 2.0 * z1sq * u2 - a * z1 * u3) / den,
            (-z1 * e1 + z1 * u2 - (1.5 * z1sq + a) * u3) / den,
            (e1 - u2 - 1.5 * z1 * u3) / den,
        ]
    )


def _expm1_ratio_series(y: float, offset: int) -> float:
    # sum_k y^k / (k + offset)!
    term = 1.0 / math.factorial(offset)
    total = term
    for k in range(1, 25):
        term *= y / (k + offset)
        total += term
    return total


def _double_weights(z1: float, t: float, decay: float) -> np.ndarray:
    # W2 u2 regrouped so the 1/z1 and 1/z1^2 poles cancel analytically
    e1 = math.exp((z1 - decay) * t)
    e2 = math.exp((-0.5 * z1 - decay) * t)
    y = 1.5 * z1 * t
    a0 = e1 / 9.0 + e2 * (8.0 / 9.0 + y * (2.0 / 9.0))
    if abs(y) < 0.5:
        h1 = _expm1_ratio_series(y, 1)
        h2 = _expm1_ratio_series(y, 2)
        a1 = -e2 * t * (2.0 / 3.0 * h1 + 1.0 / 3.0)
        a2 = e2 * t * t * h2
    else:
        a1 = -t * (2.0 / 3.0 * (e1 - e2) / y + e2 / 3.0)
        a2 = t * t * (e1 - e2 - e2 * y) / (y * y)
    return np.array([a0, a1, a2])


def _triple_weights(t: float, decay: float) -> np.ndarray:
    e = math.exp(-decay * t)
    return np.array([e, -t * e, 0.5 * t * t * e])


def _weights(sol: CubicSolution, a: float, t: float, decay: float) -> np.ndarray:
    cls = sol.root_class
    if cls.distinct:
        return _distinct_weights(sol.z1, a, sol.varpi_sq, t, decay)
    if cls is RootClass.CRITICAL_DOUBLE:
        return _double_weights(sol.z1, t, decay)
    return _triple_weights(t, decay)


def ch_coefficients(sol: CubicSolution, a: float, t: float) -> tuple[float, float, float]:
    """(a0, a1, a2) with exp(-Gp t) = a0 I + a1 Gp + a2 Gp^2."""
    return tuple(float(x) for x in _weights(sol, a, t, 0.0))


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t):
        raise NegativeTimeError(f"time must be finite, got {t}")
    if t < 0:
        raise NegativeTimeError(f"propagation time must be >= 0, got {t}")
    return t


def _assemble(p: PartitionedSystem, sol: CubicSolution, t: float, weights, branch) -> Propagator:
    gp = p.gamma_p
    m = weights[0] * _IDENTITY + weights[1] * gp + weights[2] * (gp @ gp)
    return Propagator(m, t, branch, sol, tuple(float(x) for x in weights))


def _identity(sol: CubicSolution, branch: RootClass) -> Propagator:
    return Propagator(np.eye(3), 0.0, branch, sol, (1.0, 0.0, 0.0))


def propagator_distinct(p: PartitionedSystem, sol: CubicSolution, t: float) -> Propagator:
    if not sol.root_class.distinct:
        raise BranchMismatchError(f"distinct-root formula needs distinct roots, got {sol.root_class.value}")
    t = _check_time(t)
    if t == 0.0:
        return _identity(sol, sol.root_class)
    trig = None
    if sol.varpi_sq > 0.0 and sol.varpi * t > PHASE_EXTENDED:
        trig = _extended_trig(p, sol.z1, t)
    w = _distinct_weights(sol.z1, sol.a, sol.varpi_sq, t, p.rbar, trig)
    return _assemble(p, sol, t, w, sol.root_class)


def propagator_double(p: PartitionedSystem, sol: CubicSolution, t: float) -> Propagator:
    if sol.root_class is not RootClass.CRITICAL_DOUBLE:
        raise BranchMismatchError(f"double-pole formula needs a double root, got {sol.root_class.value}")
    if sol.z1 == 0.0:
        raise ZeroRootInDoubleBranchError("z1 == 0 is the triple root; use the triple-pole formula")
    t = _check_time(t)
    if t == 0.0:
        return _identity(sol, sol.root_class)
    return _assemble(p, sol, t, _double_weights(sol.z1, t, p.rbar), sol.root_class)


def propagator_triple(p: PartitionedSystem, t: float, sol: CubicSolution | None = None) -> Propagator:
    if sol is None:
        sol = CubicSolution(0.0, 0.0, RootClass.CRITICAL_TRIPLE, 0.0, 0.0, p.rbar)
    elif sol.root_class is not RootClass.CRITICAL_TRIPLE:
        raise BranchMismatchError(f"triple-pole formula needs a triple root, got {sol.root_class.value}")
    t = _check_time(t)
    if t == 0.0:
        return _identity(sol, RootClass.CRITICAL_TRIPLE)
    return _assemble(p, sol, t, _triple_weights(t, p.rbar), RootClass.CRITICAL_TRIPLE)


def _route(p: PartitionedSystem, sol: CubicSolution, t: float, tol_rel: float) -> CubicSolution:
    cls = sol.root_class
    if not cls.distinct:
        raw = solve_roots(CanonicalCoeffs(sol.a, sol.b, p.scale), sol.rbar, 0.0)
        if cls is RootClass.CRITICAL_DOUBLE:
            neglected = max(abs(raw.z1 - sol.z1), raw.varpi) * t
        else:
            # the triple form drops t^3 (a Gp + b I)/6 and everything after it
            neglected = (abs(sol.a) * t * t * p.scale * t + abs(sol.b) * t**3) / 6.0
        if raw.root_class.distinct and neglected > SPLIT_PHASE:
            sol, cls = raw, raw.root_class
    z1, a = sol.z1, sol.a
    if cls.distinct and abs(3.0 * z1 * z1 + a) < REROUTE_FRACTION * max(z1 * z1, abs(a)):
        # z1 sits on the (near) double root; the simple root is -2 z1
        return replace(sol, z1=-2.0 * z1, varpi_sq=0.0, root_class=RootClass.CRITICAL_DOUBLE)
    if cls is RootClass.CRITICAL_DOUBLE and abs(z1) <= tol_rel * p.scale:
        return replace(sol, z1=0.0, varpi_sq=0.0, root_class=RootClass.CRITICAL_TRIPLE)
    return sol


def propagate_partitioned(p: PartitionedSystem, sol: CubicSolution, t: float,
                          tol_rel: float = DEFAULT_TOL_REL) -> Propagator:
    """Dispatch on the root class of an already-solved system."""
    t = _check_time(t)
    sol = _route(p, sol, t, tol_rel)
    cls = sol.root_class
    if cls.distinct:
        return propagator_distinct(p, sol, t)
    if cls is RootClass.CRITICAL_DOUBLE:
        return propagator_double(p, sol, t)
    return propagator_triple(p, t, sol)


def propagator(g: GammaMatrix, t: float, tol_rel: float = DEFAULT_TOL_REL) -> Propagator:
    """exp(-Gamma t) for t >= 0."""
    t = _check_time(t)
    p = partition(g)
    _, sol = analyse(p, tol_rel)
    return propagate_partitioned(p, sol, t, tol_rel)


def complex_residue_sum(p: PartitionedSystem, sol: CubicSolution, t: float) -> np.ndarray:
    """exp(-Gp t) as sum_i adj(z_i I + Gp) e^{z_i t} / q'(z_i), in complex arithmetic.

    Cross-check for the real-valued distinct-root form; not used on the
    production path.
    """
    if not sol.root_class.distinct:
        raise BranchMismatchError("residue sum over simple poles needs distinct roots")
    adj = adjugate_coeffs(p, sol.a)
    z = sol.roots
    out = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        dq = 1.0 + 0j
        for j in range(3):
            if j != i:
                dq *= z[i] - z[j]
        out += adj(z[i]) * (np.exp(z[i] * t) / dq)
    return out
