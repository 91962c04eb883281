"""Oblique real basis in which exp(-Gamma t) splits into decay along one axis
and a decaying rotation in a plane, plus measures of how oblique it is.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import PartitionedSystem
from .cubic import CubicSolution, RootClass
from .errors import (
    BranchMismatchError,
    DegenerateEigenvalueError,
    NearSingularFrameError,
    NoFrameError,
    NotAnEigenvalueError,
    ZeroColumnError,
)
from .propagator import adjugate_coeffs

COLUMN_FLOOR = 1e-12  # relative to the squared system scale
TRIPLE_FLOOR = 1e-12
RESIDUAL_TOL = 1e-9


def adjugate(m) -> np.ndarray:
    """Transpose of the cofactor matrix of a 3x3 (real or complex) matrix."""
    m = np.asarray(m)
    c = np.empty_like(m)
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            s = [k for k in range(3) if k != j]
            minor = m[r[0], s[0]] * m[r[1], s[1]] - m[r[0], s[1]] * m[r[1], s[0]]
            c[i, j] = (-1) ** (i + j) * minor
    return c.T


def adjugate_eigenvector(m, eigenvalue) -> np.ndarray:
    """Largest-norm column of adj(eigenvalue I - m), an eigenvector of m."""
    m = np.asarray(m, dtype=complex if np.iscomplexobj(eigenvalue) else float)
    scale = max(float(np.max(np.abs(m))), abs(eigenvalue), np.finfo(float).tiny)
    adj = adjugate(eigenvalue * np.eye(3) - m)
    norms = np.linalg.norm(adj, axis=0)
    j = int(np.argmax(norms))
    if norms[j] <= COLUMN_FLOOR * scale * scale:
        raise DegenerateEigenvalueError("adjugate vanishes: eigenvalue is repeated with nullity >= 2")
    v = adj[:, j]
    resid = np.linalg.norm(m @ v - eigenvalue * v)
    if resid > RESIDUAL_TOL * scale * norms[j]:
        raise NotAnEigenvalueError(f"{eigenvalue!r} is not an eigenvalue (residual {resid:.3g})")
    return v


@dataclass(frozen=True)
class EigenFrame:
    """Columns s1, s2, s3 of p_matrix; the basis is left unnormalized.

    For a complex pair, s2 + i s3 is the eigenvector at -z1/2 + i varpi and
    (s2, s3) turn into each other under the propagator.  ``rates`` holds the
    decay rates along s1 and in the plane, or along each axis when all three
    roots are real.
    """

    s1: np.ndarray
    s2: np.ndarray
    s3: np.ndarray
    p_matrix: np.ndarray = field(repr=False)
    p_inverse: np.ndarray = field(repr=False)
    rates: tuple[float, ...]
    varpi: float
    column_used: int  # adjugate column of the plane pair (1-3), 0 when chosen per vector
    root_class: RootClass

    @property
    def vectors(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.s1, self.s2, self.s3

    def normalized(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(v / np.linalg.norm(v) for v in self.vectors)

    @property
    def plane_normal(self) -> np.ndarray:
        return np.cross(self.s2, self.s3)


def frame_inverse(s1, s2, s3) -> np.ndarray:
    """Inverse of [s1 s2 s3] from cross products over the triple product."""
    s1, s2, s3 = (np.asarray(v, dtype=float) for v in (s1, s2, s3))
    triple = float(s1 @ np.cross(s2, s3))
    size = np.linalg.norm(s1) * np.linalg.norm(s2) * np.linalg.norm(s3)
    if abs(triple) <= TRIPLE_FLOOR * size:
        raise NearSingularFrameError(f"basis is nearly dependent (triple product {triple:.3g})")
    return np.array([np.cross(s2, s3), np.cross(s3, s1), np.cross(s1, s2)]) / triple


def _complex_pair_columns(p: PartitionedSystem, sol: CubicSolution):
    adj = adjugate_coeffs(p, sol.a)
    z1, vsq = sol.z1, sol.varpi_sq
    eye = np.eye(3)
    b1 = adj.a0p + adj.a1p * z1 + eye * z1 * z1
    b2 = adj.a0p - adj.a1p * (0.5 * z1) + eye * (0.25 * z1 * z1 - vsq)
    # imaginary part of adj(z+ I + Gp) keeps its varpi so s2, s3 rotate rigidly
    b3 = sol.varpi * (adj.a1p - eye * z1)
    return b1, b2, b3


def _largest_column(block: np.ndarray, floor: float) -> np.ndarray:
    norms = np.linalg.norm(block, axis=0)
    j = int(np.argmax(norms))
    if norms[j] <= floor:
        raise ZeroColumnError("adjugate vanishes at a supposedly simple root")
    return block[:, j].copy()


def _conditioning(s1, s2, s3) -> float:
    size = np.linalg.norm(s1) * np.linalg.norm(s2) * np.linalg.norm(s3)
    return abs(float(s1 @ np.cross(s2, s3))) / size if size > 0 else 0.0


def _check_column(column: int) -> int:
    if column not in (1, 2, 3):
        raise ValueError(f"column must be 1, 2 or 3, got {column}")
    return column - 1


def real_basis(p: PartitionedSystem, sol: CubicSolution, column: int | None = None) -> EigenFrame:
    """Real basis from adjugate columns.

    An eigenvector for a simple real root is unique up to scale, so it is
    taken from its largest adjugate column.  The two vectors of the rotating
    plane must come from one shared column: ``column`` pins it, otherwise the
    best-conditioned usable column is chosen.  With three real roots the
    pinned column, if any, is used for every vector.
    """
    cls = sol.root_class
    if not cls.distinct:
        raise NoFrameError(f"{cls.value} roots have no eigenvector basis")
    floor = COLUMN_FLOOR * max(p.scale, abs(sol.z1), np.finfo(float).tiny) ** 2
    pinned = None if column is None else _check_column(column)
    rbar = sol.rbar
    if cls is RootClass.UNDERDAMPED:
        b1, b2, b3 = _complex_pair_columns(p, sol)
        s1 = _largest_column(b1, floor)
        usable = [j for j in range(3)
                  if np.linalg.norm(b2[:, j]) > floor and np.linalg.norm(b3[:, j]) > floor]
        if pinned is not None:
            if pinned not in usable:
                raise ZeroColumnError(f"column {column} gives a zero vector in the rotating plane")
            j = pinned
        elif not usable:
            raise ZeroColumnError("no adjugate column spans the rotating plane")
        else:
            j = max(usable, key=lambda k: _conditioning(s1, b2[:, k], b3[:, k]))
        s2, s3 = b2[:, j].copy(), b3[:, j].copy()
        rates = (abs(rbar - sol.z1), abs(rbar + 0.5 * sol.z1))
    else:
        zs = [sol.z1, -0.5 * sol.z1 + sol.mu, -0.5 * sol.z1 - sol.mu]
        adj = adjugate_coeffs(p, sol.a)
        blocks = [adj(z) for z in zs]
        if pinned is not None:
            if any(np.linalg.norm(b[:, pinned]) <= floor for b in blocks):
                raise ZeroColumnError(f"column {column} gives a zero eigenvector")
            s1, s2, s3 = (b[:, pinned].copy() for b in blocks)
        else:
            s1, s2, s3 = (_largest_column(b, floor) for b in blocks)
        j = pinned if pinned is not None else -1
        rates = tuple(abs(z - rbar) for z in zs)
    pm = np.column_stack([s1, s2, s3])
    return EigenFrame(s1, s2, s3, pm, frame_inverse(s1, s2, s3), rates, sol.varpi, j + 1, cls)


def transformed_evolution(frame: EigenFrame, sol: CubicSolution, rbar: float, t: float,
                          m_tilde0) -> np.ndarray:
    """Evolve coordinates in the frame basis: decay on s1, decaying rotation on (s2, s3)."""
    x = np.asarray(m_tilde0, dtype=float)
    if frame.root_class is RootClass.OVERDAMPED:
        zs = np.array([sol.z1, -0.5 * sol.z1 + sol.mu, -0.5 * sol.z1 - sol.mu])
        return np.exp((zs - rbar) * t) * x
    e1 = math.exp((sol.z1 - rbar) * t)
    e23 = math.exp(-(rbar + 0.5 * sol.z1) * t)
    c, s = math.cos(sol.varpi * t), math.sin(sol.varpi * t)
    return np.array([e1 * x[0], e23 * (c * x[1] + s * x[2]), e23 * (-s * x[1] + c * x[2])])


def _angle(u, v) -> float:
    cu = float(u @ v) / (np.linalg.norm(u) * np.linalg.norm(v))
    return math.acos(max(-1.0, min(1.0, cu)))


def obliquity(frame: EigenFrame) -> dict[str, float]:
    """Angle between s1 and the rotation-plane normal, and skew of s2, s3 from 90 degrees.

    The first is reported without regard to the normal's orientation, so it
    lies in [0, pi/2].
    """
    if frame.root_class is not RootClass.UNDERDAMPED:
        raise BranchMismatchError("obliquity is defined for a rotating (complex-pair) frame")
    a = _angle(frame.s1, frame.plane_normal)
    return {
        "angleS1Normal": min(a, math.pi - a),
        "planeSkew": abs(math.pi / 2 - _angle(frame.s2, frame.s3)),
    }
