"""Field and relaxation types, the Gamma generator and its trace-free part.

All quantities are angular frequencies or rates in consistent units (1/s);
no unit conversion happens here.  Matrices are dense row-major 3x3 float64
arrays, marked read-only once built.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NegativeRateError, NonFiniteInputError

# Levi-Civita symbol, eps[i, j, k]
LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _check_finite(name: str, values) -> None:
    for v in values:
        if not math.isfinite(v):
            raise NonFiniteInputError(f"{name} has a non-finite component: {values!r}")


@dataclass(frozen=True)
class FieldVector:
    """Effective field (omega1, omega2, omega3) in rad/s."""

    omega1: float
    omega2: float
    omega3: float

    def __post_init__(self):
        _check_finite("field", (self.omega1, self.omega2, self.omega3))

    @classmethod
    def from_sequence(cls, values) -> "FieldVector":
        w1, w2, w3 = (float(v) for v in values)
        return cls(w1, w2, w3)

    @property
    def omega12_sq(self) -> float:
        return self.omega1**2 + self.omega2**2

    @property
    def omegaE_sq(self) -> float:
        return self.omega12_sq + self.omega3**2

    @property
    def omega12(self) -> float:
        return math.hypot(self.omega1, self.omega2)

    @property
    def omegaE(self) -> float:
        return math.sqrt(self.omegaE_sq)

    @property
    def phase(self) -> float:
        """Transverse phase, atan2(omega2, omega1)."""
        return math.atan2(self.omega2, self.omega1)

    def as_array(self) -> np.ndarray:
        return np.array([self.omega1, self.omega2, self.omega3])


@dataclass(frozen=True)
class RelaxationRates:
    """Relaxation rates (r1, r2, r3) in 1/s; r3 is the longitudinal rate."""

    r1: float
    r2: float
    r3: float

    def __post_init__(self):
        _check_finite("rates", (self.r1, self.r2, self.r3))
        if min(self.r1, self.r2, self.r3) < 0:
            raise NegativeRateError(f"relaxation rates must be >= 0, got {self.as_tuple()}")

    @classmethod
    def from_sequence(cls, values) -> "RelaxationRates":
        r1, r2, r3 = (float(v) for v in values)
        return cls(r1, r2, r3)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r1, self.r2, self.r3)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple())

    @property
    def rbar(self) -> float:
        return (self.r1 + self.r2 + self.r3) / 3.0

    @property
    def partitioned(self) -> tuple[float, float, float]:
        """Rates relative to their mean, r_i - rbar (they sum to zero)."""
        rb = self.rbar
        return (self.r1 - rb, self.r2 - rb, self.r3 - rb)

    @property
    def transverse_equal(self) -> bool:
        return self.r1 == self.r2

    @property
    def r_delta(self) -> float:
        """(r2 - r3)/3, the natural scale when r1 == r2."""
        if not self.transverse_equal:
            raise ValueError("r_delta is only defined for r1 == r2")
        return (self.r2 - self.r3) / 3.0

    @property
    def T1(self) -> float:
        return 1.0 / self.r3

    @property
    def T2(self) -> float:
        return 1.0 / self.r2


@dataclass(frozen=True)
class GammaMatrix:
    """Bloch generator: dM/dt = -Gamma M + M0 R3."""

    m: np.ndarray = field(repr=False)
    field: FieldVector
    rates: RelaxationRates

    @property
    def trace(self) -> float:
        return float(np.trace(self.m))

    @property
    def scale(self) -> float:
        """Largest rate or field component magnitude, used for relative floors."""
        return max(np.max(np.abs(self.rates.as_array())), np.max(np.abs(self.field.as_array())))


@dataclass(frozen=True)
class PartitionedSystem:
    """Gamma split as rbar * I + gamma_p with trace(gamma_p) = 0."""

    rbar: float
    gamma_p: np.ndarray = field(repr=False)

    @property
    def rates_p(self) -> np.ndarray:
        return np.diag(self.gamma_p).copy()

    @property
    def omega(self) -> np.ndarray:
        g = self.gamma_p
        return np.array([g[1, 2], g[2, 0], g[0, 1]])

    @property
    def scale(self) -> float:
        return float(max(np.max(np.abs(self.rates_p)), np.linalg.norm(self.omega)))

    def reconstruct(self) -> np.ndarray:
        return self.gamma_p + self.rbar * np.eye(3)


@dataclass(frozen=True)
class CouplingSet:
    """Spring constants of the coupled-oscillator picture, d2M/dt2 = Gamma^2 M."""

    kappa: np.ndarray
    sigma: np.ndarray
    k_diag: np.ndarray
    gamma_sq: np.ndarray

    @property
    def k(self) -> np.ndarray:
        """Off-diagonal couplings kappa + sigma."""
        return self.kappa + self.sigma


def build_gamma(field: FieldVector, rates: RelaxationRates) -> GammaMatrix:
    w1, w2, w3 = field.omega1, field.omega2, field.omega3
    r1, r2, r3 = rates.as_tuple()
    m = np.array(
        [
            [r1, w3, -w2],
            [-w3, r2, w1],
            [w2, -w1, r3],
        ]
    )
    return GammaMatrix(_frozen(m), field, rates)


def gamma_from_params(omega, rates) -> GammaMatrix:
    """Convenience wrapper taking plain 3-sequences."""
    return build_gamma(FieldVector.from_sequence(omega), RelaxationRates.from_sequence(rates))


def partition(g: GammaMatrix) -> PartitionedSystem:
    rbar = g.trace / 3.0
    gp = np.array(g.m, dtype=float)
    gp[np.diag_indices(3)] -= rbar
    return PartitionedSystem(rbar, _frozen(gp))


def gamma_squared_couplings(g: GammaMatrix) -> CouplingSet:
    w = g.field.as_array()
    r = g.rates.as_array()
    w1, w2, w3 = w
    r1, r2, r3 = r
    gamma_sq = np.array(
        [
            [-(w2**2 + w3**2) + r1**2, w1 * w2 + w3 * (r1 + r2), w1 * w3 - w2 * (r1 + r3)],
            [w1 * w2 - w3 * (r1 + r2), -(w1**2 + w3**2) + r2**2, w2 * w3 + w1 * (r2 + r3)],
            [w1 * w3 + w2 * (r1 + r3), w2 * w3 - w1 * (r2 + r3), -(w1**2 + w2**2) + r3**2],
        ]
    )
    # springs join distinct masses only, so the diagonals stay zero
    kappa = np.outer(w, w)
    np.fill_diagonal(kappa, 0.0)
    sigma = np.zeros((3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        sigma[i, j] = (r[i] + r[j]) * w[k]
        sigma[j, i] = -sigma[i, j]
    k_off = kappa + sigma
    k_diag = -np.diag(gamma_sq) - k_off.sum(axis=1)
    return CouplingSet(_frozen(kappa), _frozen(sigma), _frozen(k_diag), _frozen(gamma_sq))
