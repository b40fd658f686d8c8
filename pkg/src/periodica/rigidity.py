"""Rigidity matrices, rank analysis and gauge-fixed deformation spaces."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import DegeneratePlacement, RankToleranceAmbiguous
from .geometry import FiniteLinkage, InfinitesimalDeformation, PeriodicFramework

#: Singular values below RANK_RTOL * max(shape) * sigma_max count as zero.
RANK_RTOL = 1e-9

#: Singular values within this factor of the cutoff are reported as ambiguous.
AMBIGUITY_BAND = 10.0

Structure = Union[FiniteLinkage, PeriodicFramework]


class DofCount(NamedTuple):
    f: int
    independent: bool


@dataclass(frozen=True)
class DeformationSpace:
    """Orthonormal basis of the gauge-fixed first-order deformation space.

    Basis vectors are orthonormal as flattened coordinate vectors (vertex
    velocity blocks, then the lattice velocity column-major for frameworks).
    """

    parent: Structure
    unknown_count: int
    constraint_rank: int
    dof: int
    independent: bool
    basis: tuple


def finite_rigidity_matrix(linkage: FiniteLinkage) -> np.ndarray:
    """Rows encode <p_v - p_u, pdot_v - pdot_u> = 0 for each bar (u, v)."""
    n, d = linkage.positions.shape
    rows = np.zeros((linkage.edge_count, n * d))
    for k, (u, v) in enumerate(linkage.edges):
        e = linkage.positions[v] - linkage.positions[u]
        rows[k, v * d:(v + 1) * d] += e
        rows[k, u * d:(u + 1) * d] -= e
    return rows


def periodic_rigidity_matrix(framework: PeriodicFramework) -> np.ndarray:
    """Rows encode <e, pdot_v + Ldot g - pdot_u> = 0 for each edge orbit,
    with the lattice-velocity unknowns ordered column-major."""
    n, d = framework.positions.shape
    rows = np.zeros((framework.edge_orbit_count, n * d + d * d))
    for k, orbit in enumerate(framework.edge_orbits):
        e = framework.edge_vector(k)
        rows[k, orbit.v * d:(orbit.v + 1) * d] += e
        rows[k, orbit.u * d:(orbit.u + 1) * d] -= e
        g = np.asarray(orbit.shift, dtype=float)
        rows[k, n * d:] += np.outer(e, g).ravel(order="F")
    return rows


def _skew_basis(d: int):
    out = []
    for a in range(d):
        for b in range(a + 1, d):
            s = np.zeros((d, d))
            s[a, b] = 1.0
            s[b, a] = -1.0
            out.append(s)
    return out


def finite_trivial_motions(linkage: FiniteLinkage) -> np.ndarray:
    """Columns span translations and rotations at this placement."""
    n, d = linkage.positions.shape
    cols = []
    for a in range(d):
        t = np.zeros((n, d))
        t[:, a] = 1.0
        cols.append(t.ravel())
    for s in _skew_basis(d):
        cols.append((linkage.positions @ s.T).ravel())
    return np.column_stack(cols)


def periodic_trivial_motions(framework: PeriodicFramework) -> np.ndarray:
    """Columns span translations (Ldot = 0) and rotations (Ldot = S L)."""
    n, d = framework.positions.shape
    cols = []
    for a in range(d):
        t = np.zeros(n * d + d * d)
        t[a:n * d:d] = 1.0
        cols.append(t)
    for s in _skew_basis(d):
        vel = (framework.positions @ s.T).ravel()
        lat = (s @ framework.lattice).ravel(order="F")
        cols.append(np.concatenate([vel, lat]))
    return np.column_stack(cols)


def _checked_rank(singular_values: np.ndarray, shape) -> int:
    if singular_values.size == 0:
        return 0
    cutoff = RANK_RTOL * max(shape) * singular_values[0]
    band = (singular_values > cutoff / AMBIGUITY_BAND) & (singular_values < cutoff * AMBIGUITY_BAND)
    if np.any(band):
        raise RankToleranceAmbiguous(
            f"singular value {singular_values[band][0]:.3e} is within a factor "
            f"{AMBIGUITY_BAND:g} of the rank cutoff {cutoff:.3e}")
    return int(np.sum(singular_values >= cutoff))


def matrix_rank(a: np.ndarray) -> int:
    """Numerical rank with an ambiguity guard (RankToleranceAmbiguous)."""
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    return _checked_rank(s, a.shape)


def _nullspace(a: np.ndarray, columns: int) -> np.ndarray:
    """Orthonormal basis of the numerical nullspace, columns of the result."""
    if a.shape[0] == 0:
        return np.eye(columns)
    u, s, vt = np.linalg.svd(a)
    rank = _checked_rank(s, a.shape)
    return vt[rank:].T


def _affinely_spans(positions: np.ndarray) -> bool:
    centered = positions - positions.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return False
    return int(np.sum(s >= RANK_RTOL * max(centered.shape) * s[0])) == positions.shape[1]


def finite_dof(linkage: FiniteLinkage) -> DofCount:
    """Degrees of freedom of a finite linkage modulo rigid motions.

    Requires the placement to affinely span R^d so that the rigid-motion
    space has its full dimension d(d+1)/2.
    """
    n, d = linkage.positions.shape
    if not _affinely_spans(linkage.positions):
        raise DegeneratePlacement("placement does not affinely span the ambient space")
    r = finite_rigidity_matrix(linkage)
    rank = matrix_rank(r)
    nullity = n * d - rank
    trivial = d + d * (d - 1) // 2
    f = nullity - trivial
    if f < 0:
        raise RankToleranceAmbiguous("rigidity rank exceeds the non-trivial unknown count")
    return DofCount(f, rank == linkage.edge_count)


def periodic_dof(framework: PeriodicFramework) -> DofCount:
    """Degrees of freedom of a periodic framework modulo rigid motions."""
    n, d = framework.positions.shape
    r = periodic_rigidity_matrix(framework)
    rank = matrix_rank(r)
    nullity = n * d + d * d - rank
    trivial = d + d * (d - 1) // 2
    f = nullity - trivial
    if f < 0:
        raise RankToleranceAmbiguous("rigidity rank exceeds the non-trivial unknown count")
    return DofCount(f, rank == framework.edge_orbit_count)


def _pin_rows(vertex: int, n: int, d: int, width: int) -> np.ndarray:
    rows = np.zeros((d, width))
    for a in range(d):
        rows[a, vertex * d + a] = 1.0
    return rows


def gauge_matrix(framework: PeriodicFramework) -> np.ndarray:
    """Rows enforcing pdot_0 = 0 and skew(Ldot L^-1) = 0, unit-normalized."""
    n, d = framework.positions.shape
    width = n * d + d * d
    inv = np.linalg.inv(framework.lattice)
    rows = [_pin_rows(0, n, d, width)]
    for a in range(d):
        for b in range(a + 1, d):
            row = np.zeros(width)
            for c in range(d):
                row[n * d + a + c * d] += inv[c, b]
                row[n * d + b + c * d] -= inv[c, a]
            rows.append(row[None, :])
    g = np.vstack(rows)
    norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


def _finite_basis(linkage: FiniteLinkage):
    n, d = linkage.positions.shape
    r = finite_rigidity_matrix(linkage)
    rank = matrix_rank(r)
    trivial = d + d * (d - 1) // 2
    f = (n * d - rank) - trivial

    pinned = np.vstack([r, _pin_rows(0, n, d, n * d)])
    ns = _nullspace(pinned, n * d)
    # rotations about vertex 0 survive pinning; project them out explicitly
    rot_cols = []
    rel = linkage.positions - linkage.positions[0]
    for s in _skew_basis(d):
        rot_cols.append((rel @ s.T).ravel())
    if rot_cols:
        q, _ = np.linalg.qr(np.column_stack(rot_cols))
        ns = ns - q @ (q.T @ ns)
    if ns.size:
        u, s, vt = np.linalg.svd(ns, full_matrices=False)
        # columns of ns are unit vectors, so 1.0 is the meaningful scale even
        # when the projection annihilates everything
        keep = s >= RANK_RTOL * max(ns.shape)
        basis = u[:, keep]
    else:
        basis = ns
    if basis.shape[1] != f:
        raise RankToleranceAmbiguous(
            f"gauge-fixed nullspace dimension {basis.shape[1]} disagrees with dof {f}")
    return r, rank, f, basis


def _periodic_basis(framework: PeriodicFramework):
    n, d = framework.positions.shape
    r = periodic_rigidity_matrix(framework)
    rank = matrix_rank(r)
    trivial = d + d * (d - 1) // 2
    f = (n * d + d * d - rank) - trivial

    row_scale = np.median(np.linalg.norm(r, axis=1)) if r.shape[0] else 1.0
    stacked = np.vstack([r, gauge_matrix(framework) * row_scale])
    basis = _nullspace(stacked, n * d + d * d)
    if basis.shape[1] != f:
        raise RankToleranceAmbiguous(
            f"gauge-fixed nullspace dimension {basis.shape[1]} disagrees with dof {f}")
    return r, rank, f, basis


def deformation_basis(structure: Structure) -> DeformationSpace:
    """Orthonormal basis of the gauge-fixed deformation space.

    For finite linkages vertex 0 is pinned and rotations are projected out;
    for frameworks the rows pdot_0 = 0 and skew(Ldot L^-1) = 0 are appended
    to the rigidity matrix and the joint nullspace is returned.
    """
    n, d = structure.positions.shape
    if isinstance(structure, PeriodicFramework):
        _, rank, f, basis = _periodic_basis(structure)
        unknowns = n * d + d * d
        periodic = True
        m = structure.edge_orbit_count
    else:
        if not _affinely_spans(structure.positions):
            raise DegeneratePlacement("placement does not affinely span the ambient space")
        _, rank, f, basis = _finite_basis(structure)
        unknowns = n * d
        periodic = False
        m = structure.edge_count
    flexes = tuple(
        InfinitesimalDeformation.from_vector(basis[:, k], n, d, periodic)
        for k in range(basis.shape[1])
    )
    return DeformationSpace(
        parent=structure,
        unknown_count=unknowns,
        constraint_rank=rank,
        dof=f,
        independent=bool(rank == m),
        basis=flexes,
    )


def relative_deformation_basis(linkage: FiniteLinkage, pinned: Sequence[int]) -> tuple:
    """Orthonormal flexes of a finite linkage with the given vertices held
    fixed (no rigid-motion quotient; the pins remove it when they span)."""
    n, d = linkage.positions.shape
    rows = [finite_rigidity_matrix(linkage)]
    for v in pinned:
        rows.append(_pin_rows(int(v), n, d, n * d))
    ns = _nullspace(np.vstack(rows), n * d)
    return tuple(
        InfinitesimalDeformation.from_vector(ns[:, k], n, d, periodic=False)
        for k in range(ns.shape[1])
    )


def flex_residual(structure: Structure, deformation: InfinitesimalDeformation) -> float:
    """Relative first-order constraint residual ||R x|| / (||R|| ||x||)."""
    if isinstance(structure, PeriodicFramework):
        r = periodic_rigidity_matrix(structure)
    else:
        r = finite_rigidity_matrix(structure)
    x = deformation.as_vector()
    denom = np.linalg.norm(r, 2) * np.linalg.norm(x)
    if denom == 0.0:
        return 0.0
    return float(np.linalg.norm(r @ x) / denom)
