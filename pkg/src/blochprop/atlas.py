"""Regime map for equal transverse rates (r1 == r2 >= r3).

Coordinates are the squared field components in units of r_delta^2 / 3,
with r_delta = (r2 - r3)/3:

    lambda12 = 3 (omega1^2 + omega2^2) / r_delta^2,  lambda3 = 3 omega3^2 / r_delta^2

In these units the depressed cubic has a = (lambda12 + lambda3 - 9)/3 and
b = (lambda12 - 2 lambda3 - 6)/3 (times r_delta^2 and r_delta^3).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import FieldVector, RelaxationRates, build_gamma, partition
from .cubic import DEFAULT_TOL_REL, CanonicalCoeffs, RootClass, analyse, classify, solve_roots
from .errors import NegativeInputError, OutOfRangeError, RegimeDomainError, ResolutionTooLargeError

MAX_RESOLUTION = 4096
EQUAL_RATES = "EqualRates"


@dataclass(frozen=True)
class ScaledPoint:
    lambda12: float
    lambda3: float

    def __post_init__(self):
        if not (self.lambda12 >= 0 and self.lambda3 >= 0):
            raise NegativeInputError(f"scaled coordinates must be >= 0, got {(self.lambda12, self.lambda3)}")
        if not (math.isfinite(self.lambda12) and math.isfinite(self.lambda3)):
            raise NegativeInputError("scaled coordinates must be finite")

    @classmethod
    def from_system(cls, field: FieldVector, rates: RelaxationRates) -> "ScaledPoint":
        rd = _checked_r_delta(rates)
        return cls(3.0 * field.omega12_sq / rd**2, 3.0 * field.omega3**2 / rd**2)


def scaled_coeffs(pt: ScaledPoint) -> CanonicalCoeffs:
    """Depressed-cubic coefficients at r_delta = 1."""
    l12, l3 = pt.lambda12, pt.lambda3
    # same scale a physical system gets: max(|r_i - rbar|, omega_e) = max(2, ...)
    scale = max(2.0, math.sqrt((l12 + l3) / 3.0))
    return CanonicalCoeffs((l12 + l3 - 9.0) / 3.0, (l12 - 2.0 * l3 - 6.0) / 3.0, scale)


def scaled_gamma(pt: ScaledPoint) -> float | None:
    """(9/2)|l12 - 2 l3 - 6| / |l12 + l3 - 9|^(3/2); None where a = 0."""
    den = abs(pt.lambda12 + pt.lambda3 - 9.0)
    if den == 0.0:
        return None
    return 4.5 * abs(pt.lambda12 - 2.0 * pt.lambda3 - 6.0) / den**1.5


def degeneracy_boundaries(lambda3: float) -> tuple[float, float] | None:
    """The two lambda12 values giving a repeated root, ascending; None above lambda3 = 1.

    On the boundary the repeated root u (in units of r_delta) satisfies
    lambda3 = (1 + u)^2 (1 - 2u) and lambda12 = 8 - 6u^2 + 2u^3.  Solving
    for u by the cosine rule keeps a = -3u^2 <= 0 even next to the cusp,
    where a closed form in lambda12 alone loses half its digits.
    """
    if not lambda3 >= 0:
        raise NegativeInputError(f"lambda3 must be >= 0, got {lambda3}")
    if lambda3 > 1.0:
        return None
    phi = math.acos(1.0 - 2.0 * lambda3)
    # u + 1/2 = cos((phi + 2 pi k)/3); k = 0 and k = 2 lie in [-1, 1/2]
    us = (math.cos(phi / 3.0) - 0.5, math.cos((phi + 4.0 * math.pi) / 3.0) - 0.5)
    pair = sorted(8.0 - 6.0 * u * u + 2.0 * u**3 for u in us)
    # clip round-off just below zero at lambda3 = 0
    return (max(pair[0], 0.0), pair[1])


def classify_regime(pt: ScaledPoint, tol_rel: float = DEFAULT_TOL_REL) -> RootClass:
    return classify(scaled_coeffs(pt), tol_rel)


def root_isoline(lambda_z: float) -> dict[str, float]:
    """Line lambda12 = slope * lambda3 + intercept on which z1 = lambda_z * r_delta."""
    if not (-1.0 < lambda_z <= 2.0):
        raise OutOfRangeError(f"lambda_z must lie in (-1, 2], got {lambda_z}")
    return {"slope": (2.0 - lambda_z) / (1.0 + lambda_z), "intercept": 3.0 * (2.0 - lambda_z) * (1.0 + lambda_z)}


def atlas_grid(lambda12_range: tuple[float, float], lambda3_range: tuple[float, float],
               resolution: int | tuple[int, int], tol_rel: float = DEFAULT_TOL_REL) -> list[dict]:
    """Cell-centre samples, row-major with lambda3 outer and lambda12 inner.

    Each row holds lambda12, lambda3, regime, z1_over_Rdelta and
    varpi_over_Rdelta (NaN when all roots are real).
    """
    n12, n3 = (resolution, resolution) if isinstance(resolution, int) else resolution
    if max(n12, n3) > MAX_RESOLUTION:
        raise ResolutionTooLargeError(f"resolution {max(n12, n3)} exceeds {MAX_RESOLUTION}")
    if min(n12, n3) < 1:
        raise OutOfRangeError("resolution must be >= 1")
    (l12a, l12b), (l3a, l3b) = lambda12_range, lambda3_range
    if min(l12a, l3a) < 0 or l12b < l12a or l3b < l3a:
        raise NegativeInputError("ranges must be nonnegative and ordered")
    c12 = l12a + (np.arange(n12) + 0.5) * (l12b - l12a) / n12
    c3 = l3a + (np.arange(n3) + 0.5) * (l3b - l3a) / n3
    rows = []
    for l3 in c3:
        for l12 in c12:
            c = scaled_coeffs(ScaledPoint(float(l12), float(l3)))
            sol = solve_roots(c, 0.0, tol_rel)
            varpi = sol.varpi if sol.varpi_sq >= 0 else math.nan
            rows.append({
                "lambda12": float(l12),
                "lambda3": float(l3),
                "regime": sol.root_class.value,
                "z1_over_Rdelta": sol.z1,
                "varpi_over_Rdelta": varpi,
            })
    return rows


def _checked_r_delta(rates: RelaxationRates) -> float:
    if rates.r1 != rates.r2:
        raise RegimeDomainError("regime map needs r1 == r2")
    if rates.r3 > rates.r2:
        raise RegimeDomainError("regime map needs r3 <= r2")
    return rates.r_delta


def regime_of_system(field: FieldVector, rates: RelaxationRates,
                     tol_rel: float = DEFAULT_TOL_REL) -> RootClass | str:
    """Root class of a physical system, or EQUAL_RATES when r_delta == 0."""
    rd = _checked_r_delta(rates)
    if rd == 0.0:
        return EQUAL_RATES
    _, sol = analyse(partition(build_gamma(field, rates)), tol_rel)
    return sol.root_class
