"""Characteristic polynomial of -Gamma and the roots of its depressed form.

The depressed cubic q(z) = z^3 + a z + b is solved for one guaranteed real
root z1 with trigonometric/hyperbolic closed forms; the remaining pair is
z(+/-) = -z1/2 +/- i*varpi with varpi^2 = 3[(z1/2)^2 + a/3].
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import GammaMatrix, PartitionedSystem

DEFAULT_TOL_REL = 1e-9
_TINY = np.finfo(float).tiny
_LOG_GUARD = 1e150
_GAMMA_HUGE = 1e30  # beyond this a is negligible next to b


class RootClass(str, Enum):
    UNDERDAMPED = "Underdamped"  # one real root, conjugate pair
    OVERDAMPED = "Overdamped"  # three distinct real roots
    CRITICAL_DOUBLE = "CriticalDouble"
    CRITICAL_TRIPLE = "CriticalTriple"

    @property
    def distinct(self) -> bool:
        return self in (RootClass.UNDERDAMPED, RootClass.OVERDAMPED)


def sgn(x: float) -> float:
    """Sign with sgn(0) == 0."""
    return float((x > 0) - (x < 0))


@dataclass(frozen=True)
class CharPolyCoeffs:
    """p(s) = c0 + c1 s + c2 s^2 + s^3 = det(s I + Gamma)."""

    c0: float
    c1: float
    c2: float

    def __call__(self, s):
        return self.c0 + s * (self.c1 + s * (self.c2 + s))


@dataclass(frozen=True)
class CanonicalCoeffs:
    """Depressed cubic q(z) = z^3 + a z + b.

    ``scale`` is a frequency characterising the system the coefficients came
    from; degeneracy tests compare |a| and |b| against powers of it.
    """

    a: float
    b: float
    scale: float = 0.0

    def __post_init__(self):
        if self.scale <= 0.0:
            s = max(math.sqrt(abs(self.a)), abs(self.b) ** (1.0 / 3.0))
            object.__setattr__(self, "scale", s)

    @property
    def alpha(self) -> float:
        return abs(self.a / 3.0)

    @property
    def beta(self) -> float:
        return abs(self.b / 2.0)

    @property
    def gamma(self) -> float | None:
        """beta / alpha^(3/2); None when a == 0."""
        alpha, beta = self.alpha, self.beta
        if self.a == 0.0:
            return None
        if alpha == 0.0:
            return math.inf if beta else 0.0
        if not (1.0 / _LOG_GUARD < alpha < _LOG_GUARD) or beta > _LOG_GUARD:
            if beta == 0.0:
                return 0.0
            lg = math.log(beta) - 1.5 * math.log(alpha)
            return math.exp(lg) if lg < 700.0 else math.inf
        return beta / alpha**1.5

    @property
    def discriminant(self) -> float:
        """D(a, b) = (b/2)^2 + (a/3)^3; zero on degeneracies."""
        return (self.b / 2.0) ** 2 + (self.a / 3.0) ** 3

    def __call__(self, z):
        return z**3 + self.a * z + self.b


@dataclass(frozen=True)
class CubicSolution:
    z1: float
    varpi_sq: float
    root_class: RootClass
    a: float
    b: float
    rbar: float = 0.0

    @property
    def varpi(self) -> float:
        """|varpi|; equals mu when the roots are all real."""
        return math.sqrt(abs(self.varpi_sq))

    @property
    def mu(self) -> float:
        return self.varpi

    @property
    def z_plus(self) -> complex:
        return self._pair()[0]

    @property
    def z_minus(self) -> complex:
        return self._pair()[1]

    def _pair(self) -> tuple[complex, complex]:
        h = -0.5 * self.z1
        w = self.varpi
        if self.varpi_sq >= 0.0:
            return complex(h, w), complex(h, -w)
        return complex(h + w, 0.0), complex(h - w, 0.0)

    @property
    def roots(self) -> tuple[complex, complex, complex]:
        zp, zm = self._pair()
        return (complex(self.z1), zp, zm)

    @property
    def shifted(self) -> tuple[complex, complex, complex]:
        """Eigenvalues of -Gamma, s_i = z_i - rbar."""
        return tuple(z - self.rbar for z in self.roots)


def char_poly_coeffs(g: GammaMatrix) -> CharPolyCoeffs:
    r1, r2, r3 = g.rates.as_tuple()
    w1, w2, w3 = g.field.as_array()
    c2 = r1 + r2 + r3
    c1 = g.field.omegaE_sq + r1 * r2 + r1 * r3 + r2 * r3
    c0 = r1 * r2 * r3 + r1 * w1**2 + r2 * w2**2 + r3 * w3**2
    return CharPolyCoeffs(c0, c1, c2)


def depress(c: CharPolyCoeffs) -> CanonicalCoeffs:
    """Shift s = z - c2/3 to remove the quadratic term."""
    k = c.c2 / 3.0
    a = c.c1 - c.c2**2 / 3.0
    b = 2.0 * k**3 - c.c1 * k + c.c0
    scale = max(abs(c.c2), math.sqrt(abs(c.c1)), abs(c.c0) ** (1.0 / 3.0))
    return CanonicalCoeffs(a, b, scale)


def canonical_coeffs(p: PartitionedSystem) -> CanonicalCoeffs:
    r1, r2, r3 = p.rates_p
    w = p.omega
    a = float(w @ w) + r1 * r2 + r1 * r3 + r2 * r3
    b = r1 * r2 * r3 + r1 * w[0] ** 2 + r2 * w[1] ** 2 + r3 * w[2] ** 2
    return CanonicalCoeffs(float(a), float(b), p.scale)


def classify(c: CanonicalCoeffs, tol_rel: float = DEFAULT_TOL_REL) -> RootClass:
    """Root class of q, with degeneracies judged by backward error.

    With a and b measured in units of the system scale s, a repeated root is
    reported when perturbing a by tol*s^2 and b by tol*s^3 can zero the
    discriminant; a triple root when the perturbation can zero a and b.
    """
    s = max(c.scale, _TINY ** (1.0 / 3.0))
    an, bn = c.a / (s * s), c.b / s**3
    if abs(an) <= tol_rel and abs(bn) <= tol_rel:
        return RootClass.CRITICAL_TRIPLE
    if c.a >= 0.0:
        # a == 0 with b != 0 still gives a complex pair
        return RootClass.UNDERDAMPED
    disc = (0.5 * bn) ** 2 + (an / 3.0) ** 3
    if abs(disc) <= tol_rel * (0.5 * abs(bn) + (an / 3.0) ** 2):
        return RootClass.CRITICAL_DOUBLE
    return RootClass.UNDERDAMPED if disc > 0.0 else RootClass.OVERDAMPED


def solve_roots(c: CanonicalCoeffs, rbar: float = 0.0, tol_rel: float = DEFAULT_TOL_REL) -> CubicSolution:
    """Real root z1 and discriminant varpi^2 for the class of (a, b).

    Branches (alpha = |a/3|, gamma = |b/2| / alpha^1.5):

    * a > 0: z1 = -2 sqrt(alpha) sgn(b) sinh(asinh(gamma)/3)
    * a < 0, gamma >= 1: z1 = -2 sqrt(alpha) sgn(b) cosh(acosh(gamma)/3)
    * a < 0, gamma < 1: z1 = -2 sqrt(alpha) sgn(b) cos(acos(gamma)/3), the
      real root of largest magnitude, which stays the non-degenerate root as
      gamma -> 1 and keeps q'(z1) = 3 z1^2 + a >= 6 alpha
    * a == 0: z1 = -sgn(b) |b|^(1/3)
    """
    cls = classify(c, tol_rel)
    a, b = c.a, c.b
    if cls is RootClass.CRITICAL_TRIPLE:
        return CubicSolution(0.0, 0.0, cls, a, b, rbar)

    sb = sgn(b)
    if b == 0.0:
        # z = 0 is a root and the others are +-sqrt(-a)
        return CubicSolution(0.0, a, cls, a, b, rbar)
    gam = c.gamma
    if a == 0.0 or gam > _GAMMA_HUGE:
        z1 = -sb * abs(b) ** (1.0 / 3.0)
        if a != 0.0:
            for _ in range(2):
                z1 -= (z1 * z1 * z1 + a * z1 + b) / (3.0 * z1 * z1 + a)
        return CubicSolution(z1, 0.75 * z1 * z1 + a, cls, a, b, rbar)

    alpha = c.alpha
    ra = math.sqrt(alpha)
    if a > 0.0:
        phi = math.asinh(gam) / 3.0
        z1 = -2.0 * ra * sb * math.sinh(phi)
        varpi_sq = 3.0 * alpha * math.cosh(phi) ** 2
    elif cls is RootClass.CRITICAL_DOUBLE:
        z1 = -2.0 * ra * sb
        varpi_sq = 0.0
    elif cls is RootClass.UNDERDAMPED:
        phi = math.acosh(max(gam, 1.0)) / 3.0
        z1 = -2.0 * ra * sb * math.cosh(phi)
        varpi_sq = 3.0 * alpha * math.sinh(phi) ** 2
    else:
        phi = math.acos(min(gam, 1.0)) / 3.0
        z1 = -2.0 * ra * sb * math.cos(phi)
        varpi_sq = -3.0 * alpha * math.sin(phi) ** 2
    return CubicSolution(z1, varpi_sq, cls, a, b, rbar)


def analyse(p: PartitionedSystem, tol_rel: float = DEFAULT_TOL_REL) -> tuple[CanonicalCoeffs, CubicSolution]:
    c = canonical_coeffs(p)
    return c, solve_roots(c, p.rbar, tol_rel)
