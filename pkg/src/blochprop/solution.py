"""Steady state and time-domain solution M(t) = P(t) (M(0) - Minf) + Minf."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GammaMatrix, partition
from .cubic import DEFAULT_TOL_REL, analyse
from .errors import NegativeTimeError, NonFiniteInputError, SingularGammaError
from .propagator import propagate_partitioned, propagator

SINGULAR_FLOOR = 1e-14  # c0 below this times scale^3 counts as singular


@dataclass(frozen=True)
class Magnetization:
    mx: float
    my: float
    mz: float

    def __post_init__(self):
        for v in (self.mx, self.my, self.mz):
            if not math.isfinite(v):
                raise NonFiniteInputError(f"magnetization must be finite, got {(self.mx, self.my, self.mz)}")

    @classmethod
    def from_array(cls, v) -> "Magnetization":
        x, y, z = (float(c) for c in v)
        return cls(x, y, z)

    @classmethod
    def coerce(cls, v) -> "Magnetization":
        return v if isinstance(v, Magnetization) else cls.from_array(v)

    def as_array(self) -> np.ndarray:
        return np.array([self.mx, self.my, self.mz])


def steady_state(g: GammaMatrix, m0: float) -> Magnetization:
    """Solve Gamma Minf = (0, 0, m0 R3) via the third adjugate column over det(Gamma)."""
    r1, r2, r3 = g.rates.as_tuple()
    w1, w2, w3 = g.field.omega1, g.field.omega2, g.field.omega3
    c0 = r1 * r2 * r3 + r1 * w1 * w1 + r2 * w2 * w2 + r3 * w3 * w3
    if c0 <= SINGULAR_FLOOR * g.scale**3:
        raise SingularGammaError(f"Gamma is singular (det = {c0:.3g}); no unique steady state")
    col = np.array([w1 * w3 + w2 * r2, w2 * w3 - w1 * r1, w3 * w3 + r1 * r2])
    return Magnetization.from_array(m0 * r3 * col / c0)


def evolve(g: GammaMatrix, m_init, m0: float, t: float,
           tol_rel: float = DEFAULT_TOL_REL) -> Magnetization:
    m_inf = steady_state(g, m0).as_array()
    start = Magnetization.coerce(m_init)
    if t == 0:
        return start
    dev = start.as_array() - m_inf
    return Magnetization.from_array(propagator(g, t, tol_rel).m @ dev + m_inf)


def trajectory(g: GammaMatrix, m_init, m0: float, t_grid,
               tol_rel: float = DEFAULT_TOL_REL) -> list[tuple[float, Magnetization]]:
    """Closed-form state at each grid time; every sample is computed independently."""
    times = [float(t) for t in t_grid]
    if any(t < 0 or not math.isfinite(t) for t in times):
        raise NegativeTimeError("time grid must be finite and nonnegative")
    if any(b < a for a, b in zip(times, times[1:])):
        raise NegativeTimeError("time grid must be nondecreasing")
    m_inf = steady_state(g, m0).as_array()
    start = Magnetization.coerce(m_init)
    dev = start.as_array() - m_inf
    p = partition(g)
    _, sol = analyse(p, tol_rel)
    out = []
    for t in times:
        if t == 0.0:
            out.append((t, start))
            continue
        pt = propagate_partitioned(p, sol, t, tol_rel)
        out.append((t, Magnetization.from_array(pt.m @ dev + m_inf)))
    return out
