"""Gram-matrix velocities, PSD-cone verdicts and auxetic direction search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import BudgetExhausted, DimensionMismatch, SingularMatrix
from .geometry import (
    BASIS_DET_RTOL,
    FiniteLinkage,
    InfinitesimalDeformation,
    PeriodicFramework,
    SymmetricMatrix,
    build_framework,
    lattice_matrix,
)
from .rigidity import DeformationSpace

#: Relative tolerance on the smallest eigenvalue for PSD verdicts.
PSD_RTOL = 1e-8

#: Default absolute Frobenius threshold below which a tangent is stationary.
STATIONARY_ATOL = 1e-12


class Auxeticity(Enum):
    STATIONARY = "stationary"
    STRICTLY_AUXETIC = "strictly_auxetic"
    WEAKLY_AUXETIC = "weakly_auxetic"
    NON_AUXETIC = "non_auxetic"


@dataclass(frozen=True)
class AuxeticVerdict:
    """PSD-cone classification of a Gram-matrix tangent.

    ``eigenvalues`` are sorted ascending; ``tolerance`` is the relative PSD
    tolerance and ``stationary_tolerance`` the absolute norm cutoff used.
    """

    kind: Auxeticity
    eigenvalues: np.ndarray
    tolerance: float
    stationary_tolerance: float

    @property
    def admissible(self) -> bool:
        """True for tangents inside or on the PSD cone (strict or weak)."""
        return self.kind in (Auxeticity.STRICTLY_AUXETIC, Auxeticity.WEAKLY_AUXETIC)


def gram_velocity(lattice, lattice_velocity) -> SymmetricMatrix:
    """Tangent of the Gram curve: Ldot^T L + L^T Ldot, exactly symmetric."""
    lat = np.asarray(lattice, dtype=float)
    dot = np.asarray(lattice_velocity, dtype=float)
    if lat.shape != dot.shape or lat.ndim != 2 or lat.shape[0] != lat.shape[1]:
        raise DimensionMismatch("lattice and lattice velocity must be square and congruent")
    b = lat.T @ dot
    return SymmetricMatrix(b + b.T)


def verdict(omega_dot, tol: float = PSD_RTOL,
            stationary_tol: float = STATIONARY_ATOL) -> AuxeticVerdict:
    """Classify a symmetric tangent against the PSD cone.

    Strictly auxetic when the smallest eigenvalue exceeds +tol times the
    Frobenius norm; weakly auxetic when it lies within tol of zero; a tangent
    whose norm falls below ``stationary_tol`` counts as stationary (a
    constant Gram curve certifies nothing).
    """
    m = omega_dot if isinstance(omega_dot, SymmetricMatrix) else SymmetricMatrix(omega_dot)
    eigs = m.eigenvalues()
    fro = m.frobenius()
    if fro <= stationary_tol:
        kind = Auxeticity.STATIONARY
    elif eigs[0] > tol * fro:
        kind = Auxeticity.STRICTLY_AUXETIC
    elif eigs[0] >= -tol * fro:
        kind = Auxeticity.WEAKLY_AUXETIC
    else:
        kind = Auxeticity.NON_AUXETIC
    eigs.setflags(write=False)
    return AuxeticVerdict(kind, eigs, tol, stationary_tol)


def stationary_scale(lattice) -> float:
    """Absolute stationarity cutoff adapted to a lattice: 1e-12 ||L||_F^2."""
    return STATIONARY_ATOL * float(np.linalg.norm(lattice)) ** 2


def marked_velocity_matrix(linkage: FiniteLinkage,
                           flex: InfinitesimalDeformation) -> np.ndarray:
    """Columns are the marked-pair velocity differences of a finite flex."""
    if flex.velocities.shape != linkage.positions.shape:
        raise DimensionMismatch("flex does not match the linkage vertex count")
    return np.column_stack(
        [flex.velocities[j] - flex.velocities[i] for i, j in linkage.marked_pairs])


def deformation_gram_velocity(structure, flex: InfinitesimalDeformation) -> SymmetricMatrix:
    """Gram tangent of one flex of a framework (or finite linkage).

    For frameworks this is gram_velocity(L, Ldot) with the flex's lattice
    velocity; for finite linkages the lattice velocity is assembled from the
    marked-pair velocity differences.
    """
    if isinstance(structure, PeriodicFramework):
        if flex.lattice_velocity is None:
            raise DimensionMismatch("framework flex needs a lattice velocity")
        if flex.velocities.shape != structure.positions.shape:
            raise DimensionMismatch("flex does not match the framework orbit count")
        return gram_velocity(structure.lattice, flex.lattice_velocity)
    return gram_velocity(lattice_matrix(structure), marked_velocity_matrix(structure, flex))


def basis_gram_velocities(space: DeformationSpace) -> list:
    """Gram tangents of every deformation-basis element."""
    return [deformation_gram_velocity(space.parent, x) for x in space.basis]


@dataclass(frozen=True)
class StrictDirection:
    """Outcome of the strict-direction search.

    ``found`` is True when a unit coefficient vector with a positive-definite
    Gram tangent was located; ``coefficients`` and ``lambda_min`` always
    report the best point seen.
    """

    found: bool
    coefficients: np.ndarray
    lambda_min: float


def _lambda_min_and_vector(mats, x):
    m = sum(c * mat for c, mat in zip(x, mats))
    w, v = np.linalg.eigh(m)
    return w[0], v[:, 0], m


def strict_direction(space: DeformationSpace, tol: float = PSD_RTOL,
                     budget: Optional[int] = None, restarts: int = 32,
                     iterations: int = 500, seed: int = 42) -> StrictDirection:
    """Search the deformation space for a strictly auxetic direction.

    Maximizes the smallest eigenvalue of the combined Gram tangent over unit
    coefficient vectors.  The objective is concave, so projected subgradient
    ascent with deterministic random restarts finds the global maximum; for
    one- and two-dimensional spaces a dense angular grid is cross-checked as
    a safety net.  A direction counts as found when its smallest eigenvalue
    exceeds ``tol`` times the tangent's Frobenius norm.

    Parameters
    ----------
    space : DeformationSpace
        Must have dof >= 1.
    budget : int, optional
        Maximum number of eigenvalue evaluations.  If the schedule cannot
        finish within it and no strict direction was found,
        :class:`BudgetExhausted` is raised carrying the best point.
    seed : int
        Restart r uses the deterministic stream seed + r, so results do not
        depend on scheduling.
    """
    f = space.dof
    if f < 1:
        raise ValueError("strict_direction requires at least one degree of freedom")
    mats = [m.matrix for m in basis_gram_velocities(space)]

    evaluations = 0
    best_x = None
    best_val = -np.inf

    def consider(x):
        nonlocal evaluations, best_x, best_val
        evaluations += 1
        val, vec, m = _lambda_min_and_vector(mats, x)
        if val > best_val:
            best_val, best_x = val, x.copy()
        return val, vec, m

    def out_of_budget():
        return budget is not None and evaluations >= budget

    def is_strict(x):
        val, _, m = _lambda_min_and_vector(mats, x)
        return val > tol * np.linalg.norm(m)

    exhausted = False
    # dense directional grid doubles as an oracle for low-dimensional spaces
    if f == 1:
        for x in (np.array([1.0]), np.array([-1.0])):
            consider(x)
            if out_of_budget():
                exhausted = True
                break
    elif f == 2:
        for phi in np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False):
            consider(np.array([np.cos(phi), np.sin(phi)]))
            if out_of_budget():
                exhausted = True
                break

    if not exhausted:
        for r in range(restarts):
            rng = np.random.default_rng(seed + r)
            x = rng.standard_normal(f)
            x /= np.linalg.norm(x)
            for k in range(1, iterations + 1):
                _, vec, _ = consider(x)
                if out_of_budget():
                    exhausted = True
                    break
                grad = np.array([vec @ m @ vec for m in mats])
                x = x + grad / k
                nrm = np.linalg.norm(x)
                if nrm > 1.0:
                    x /= nrm
            if exhausted:
                break
            consider(x)

    best_x = best_x / max(np.linalg.norm(best_x), 1e-300)
    val, _, m = _lambda_min_and_vector(mats, best_x)
    found = bool(val > tol * np.linalg.norm(m))
    if exhausted and not found:
        raise BudgetExhausted(
            f"direction search stopped after {evaluations} evaluations",
            best_x, float(val))
    return StrictDirection(found=found, coefficients=best_x, lambda_min=float(val))


def gauge_fix(framework: PeriodicFramework,
              flex: InfinitesimalDeformation) -> InfinitesimalDeformation:
    """Subtract the rigid motion that restores pdot_0 = 0 and a symmetric
    Ldot L^-1; the Gram tangent is unchanged."""
    if flex.lattice_velocity is None:
        raise DimensionMismatch("gauge fixing needs a lattice velocity")
    lat = framework.lattice
    m = flex.lattice_velocity @ np.linalg.inv(lat)
    s = 0.5 * (m - m.T)
    lat_dot = flex.lattice_velocity - s @ lat
    vel = flex.velocities - framework.positions @ s.T
    vel = vel - vel[0]
    return InfinitesimalDeformation(vel, lat_dot)


def _check_invertible(a: np.ndarray, d: int):
    scale = float(np.max(np.linalg.norm(a, axis=0), initial=0.0))
    if scale == 0.0 or abs(np.linalg.det(a)) < BASIS_DET_RTOL * scale**d:
        raise SingularMatrix("affine matrix is singular")


def _raw_affine_flex(a_inv_t: np.ndarray, flex: InfinitesimalDeformation):
    vel = flex.velocities @ a_inv_t.T
    lat_dot = a_inv_t @ flex.lattice_velocity
    return vel, lat_dot


def apply_affine(framework: PeriodicFramework, matrix) -> Tuple[PeriodicFramework, Callable]:
    """Transform a framework by an invertible linear map.

    Returns the transformed framework (positions A p, lattice A L, lengths
    recomputed) and a map sending a flex (pdot, Ldot) to
    ((A^T)^-1 pdot, (A^T)^-1 Ldot) with the gauge re-fixed afterwards.
    """
    a = np.asarray(matrix, dtype=float)
    d = framework.dimension
    if a.shape != (d, d):
        raise DimensionMismatch(f"expected a {d} x {d} matrix")
    _check_invertible(a, d)
    transformed = build_framework(
        d,
        framework.positions @ a.T,
        a @ framework.lattice,
        [(e.u, e.v, e.shift) for e in framework.edge_orbits],
    )
    a_inv_t = np.linalg.inv(a.T)

    def map_deformation(flex: InfinitesimalDeformation) -> InfinitesimalDeformation:
        if flex.lattice_velocity is None:
            raise DimensionMismatch("framework flex needs a lattice velocity")
        vel, lat_dot = _raw_affine_flex(a_inv_t, flex)
        return gauge_fix(transformed, InfinitesimalDeformation(vel, lat_dot))

    return transformed, map_deformation


def affine_invariance_check(framework: PeriodicFramework, matrix,
                            flex: InfinitesimalDeformation,
                            rtol: float = 1e-10) -> Tuple[bool, float]:
    """Verify that the Gram tangent is unchanged by an affine map.

    Compares Ldot1^T L1 + L1^T Ldot1 (before any gauge re-fixing) against the
    original tangent entrywise; passes when the largest deviation is at most
    ``rtol`` times the tangent's Frobenius norm.
    """
    a = np.asarray(matrix, dtype=float)
    d = framework.dimension
    if a.shape != (d, d):
        raise DimensionMismatch(f"expected a {d} x {d} matrix")
    _check_invertible(a, d)
    if flex.lattice_velocity is None:
        raise DimensionMismatch("framework flex needs a lattice velocity")
    a_inv_t = np.linalg.inv(a.T)
    _, lat_dot_1 = _raw_affine_flex(a_inv_t, flex)
    original = gram_velocity(framework.lattice, flex.lattice_velocity)
    mapped = gram_velocity(a @ framework.lattice, lat_dot_1)
    deviation = float(np.max(np.abs(mapped.matrix - original.matrix)))
    return deviation <= rtol * original.frobenius(), deviation


def integer_direction_minimum(omega_dot, max_norm: int = 3) -> Tuple[float, tuple]:
    """Smallest Rayleigh quotient of the tangent over nonzero integer vectors
    with infinity norm at most ``max_norm``.

    A PSD tangent makes every such quotient nonnegative; sampling them gives
    a necessary-condition battery for the converse direction.
    """
    m = np.asarray(omega_dot, dtype=float)
    d = m.shape[0]
    best = np.inf
    best_n = None
    for n in itertools.product(range(-max_norm, max_norm + 1), repeat=d):
        if not any(n):
            continue
        vec = np.asarray(n, dtype=float)
        val = float(vec @ m @ vec) / float(vec @ vec)
        if val < best:
            best, best_n = val, n
    return best, best_n
