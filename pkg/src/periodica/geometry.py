"""Core value types: finite linkages, periodic frameworks, symmetric matrices.

All types are immutable after construction (arrays are marked read-only) and
may safely be shared across threads.  Validation happens in the ``build_*``
factory functions; the dataclasses themselves are plain containers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    Disconnected,
    DuplicateEdge,
    DuplicateOrbit,
    MarkedPairsNotBasis,
    SingularMatrix,
    WrongPairCount,
    ZeroLengthEdge,
)

#: |det| of the marked-pair matrix must exceed this times (max column norm)^d.
BASIS_DET_RTOL = 1e-10

#: Stored rest lengths must match the geometry to this relative tolerance.
LENGTH_RTOL = 1e-9


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


class SymmetricMatrix:
    """A d x d matrix that is symmetric by construction.

    Only the upper triangle of the input is used; the lower triangle is its
    exact mirror, so ``m[i, j] == m[j, i]`` holds bit-for-bit.
    """

    __slots__ = ("_m",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("expected a square matrix")
        m = np.triu(m) + np.triu(m, 1).T
        m.setflags(write=False)
        self._m = m

    @property
    def matrix(self) -> np.ndarray:
        """The full (read-only) d x d array."""
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in ascending order (symmetric eigensolver)."""
        return np.linalg.eigvalsh(self._m)

    def frobenius(self) -> float:
        return float(np.linalg.norm(self._m))

    def __array__(self, dtype=None, copy=None):
        return np.array(self._m, dtype=dtype)

    def __repr__(self):
        return f"SymmetricMatrix({self._m.tolist()!r})"


@dataclass(frozen=True)
class FiniteLinkage:
    """A finite bar-and-joint linkage with d marked vertex pairs.

    Attributes
    ----------
    dimension : int
        Ambient dimension d >= 2.
    positions : (n, d) ndarray
        Joint positions.
    edges : tuple of (int, int)
        Bars as vertex index pairs, stored with u < v.
    lengths : (m,) ndarray
        Rest length of each bar, computed once at construction.
    marked_pairs : tuple of (int, int)
        Exactly d ordered pairs; the difference vectors form a basis.
    """

    dimension: int
    positions: np.ndarray
    edges: tuple
    lengths: np.ndarray
    marked_pairs: tuple

    @property
    def vertex_count(self) -> int:
        return self.positions.shape[0]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def edge_vector(self, index: int) -> np.ndarray:
        u, v = self.edges[index]
        return self.positions[v] - self.positions[u]


@dataclass(frozen=True)
class EdgeOrbit:
    """One bar orbit of a periodic framework: joins orbit ``u`` to the
    translate of orbit ``v`` by the integer lattice shift."""

    u: int
    v: int
    shift: tuple
    length: float


@dataclass(frozen=True)
class PeriodicFramework:
    """A d-periodic bar-and-joint framework given by orbit representatives.

    Attributes
    ----------
    dimension : int
        Ambient dimension d >= 2.
    positions : (n_orbits, d) ndarray
        One representative position per vertex orbit.
    lattice : (d, d) ndarray
        Invertible matrix whose columns generate the periodicity lattice.
    edge_orbits : tuple of EdgeOrbit
        Bar orbits in canonical orientation.
    """

    dimension: int
    positions: np.ndarray
    lattice: np.ndarray
    edge_orbits: tuple

    @property
    def orbit_count(self) -> int:
        return self.positions.shape[0]

    @property
    def edge_orbit_count(self) -> int:
        return len(self.edge_orbits)

    def edge_vector(self, index: int) -> np.ndarray:
        e = self.edge_orbits[index]
        return (self.positions[e.v] + self.lattice @ np.asarray(e.shift, dtype=float)
                - self.positions[e.u])


@dataclass(frozen=True)
class InfinitesimalDeformation:
    """First-order velocities of a linkage or framework.

    ``lattice_velocity`` is None for finite linkages.  Instances produced by
    :func:`periodica.rigidity.deformation_basis` are gauge fixed (vertex 0
    velocity zero; for frameworks the skew part of dL L^-1 vanishes); hand
    built instances need not be.
    """

    velocities: np.ndarray
    lattice_velocity: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "velocities", _readonly(self.velocities))
        if self.lattice_velocity is not None:
            object.__setattr__(self, "lattice_velocity", _readonly(self.lattice_velocity))

    def as_vector(self) -> np.ndarray:
        """Flatten to the coordinate vector (vertex blocks, then the lattice
        velocity in column-major order)."""
        parts = [self.velocities.ravel()]
        if self.lattice_velocity is not None:
            parts.append(self.lattice_velocity.ravel(order="F"))
        return np.concatenate(parts)

    @staticmethod
    def from_vector(vec, count: int, dimension: int, periodic: bool) -> "InfinitesimalDeformation":
        vec = np.asarray(vec, dtype=float)
        nd = count * dimension
        vel = vec[:nd].reshape(count, dimension)
        lat = None
        if periodic:
            lat = vec[nd:nd + dimension * dimension].reshape(dimension, dimension, order="F")
        return InfinitesimalDeformation(vel, lat)


def _check_positions(dimension, positions) -> np.ndarray:
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 2 or pos.shape[1] != dimension:
        raise ValueError(f"positions must be (n, {dimension})")
    if not np.all(np.isfinite(pos)):
        raise ValueError("positions must be finite")
    return pos


def _check_basis(columns: np.ndarray, what: str):
    d = columns.shape[0]
    scale = float(np.max(np.linalg.norm(columns, axis=0), initial=0.0))
    if scale == 0.0 or abs(np.linalg.det(columns)) < BASIS_DET_RTOL * scale**d:
        raise MarkedPairsNotBasis(f"{what} do not form a basis of R^{d}")


def build_linkage(dimension: int, positions, edges, marked_pairs) -> FiniteLinkage:
    """Validate and construct a :class:`FiniteLinkage`.

    Parameters
    ----------
    dimension : int
        Ambient dimension d >= 2.
    positions : array_like, shape (n, d)
        Joint positions.
    edges : sequence of (int, int)
        Bars; loops and duplicates are rejected.
    marked_pairs : sequence of (int, int)
        Exactly d ordered pairs whose difference vectors span R^d.

    Raises
    ------
    ZeroLengthEdge, DuplicateEdge, Disconnected, MarkedPairsNotBasis,
    WrongPairCount
    """
    dimension = int(dimension)
    if dimension < 2:
        raise ValueError("dimension must be >= 2")
    pos = _check_positions(dimension, positions)
    n = pos.shape[0]

    canon = []
    seen = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range")
        if u == v:
            raise ZeroLengthEdge(f"edge ({u}, {v}) is a loop")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {key} listed twice")
        seen.add(key)
        canon.append(key)

    lengths = np.array([np.linalg.norm(pos[v] - pos[u]) for u, v in canon])
    if len(canon) and np.any(lengths <= 0.0):
        bad = canon[int(np.argmin(lengths))]
        raise ZeroLengthEdge(f"edge {bad} joins coincident points")

    # connectivity over the bar graph
    adjacency = [[] for _ in range(n)]
    for u, v in canon:
        adjacency[u].append(v)
        adjacency[v].append(u)
    seen_v = {0}
    stack = [0]
    while stack:
        for w in adjacency[stack.pop()]:
            if w not in seen_v:
                seen_v.add(w)
                stack.append(w)
    if len(seen_v) != n:
        raise Disconnected(f"graph has {n - len(seen_v)} unreachable vertices")

    pairs = [(int(i), int(j)) for i, j in marked_pairs]
    if len(pairs) != dimension:
        raise WrongPairCount(f"expected {dimension} marked pairs, got {len(pairs)}")
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"marked pair ({i}, {j}) out of range")
        if i == j:
            raise MarkedPairsNotBasis(f"marked pair ({i}, {j}) has zero difference")
    columns = np.column_stack([pos[j] - pos[i] for i, j in pairs])
    _check_basis(columns, "marked pair vectors")

    return FiniteLinkage(
        dimension=dimension,
        positions=_readonly(pos),
        edges=tuple(canon),
        lengths=_readonly(lengths),
        marked_pairs=tuple(pairs),
    )


def lattice_matrix(linkage: FiniteLinkage) -> np.ndarray:
    """Matrix whose column k is the difference vector of marked pair k."""
    pos = linkage.positions
    return np.column_stack([pos[j] - pos[i] for i, j in linkage.marked_pairs])


def gram(lattice) -> SymmetricMatrix:
    """Gram matrix of the lattice generators, exactly symmetric."""
    lat = np.asarray(lattice, dtype=float)
    return SymmetricMatrix(lat.T @ lat)


def canonical_orbit(u: int, v: int, shift) -> tuple:
    """Canonical orientation of an edge orbit: u < v, or u == v with the
    first nonzero shift entry positive."""
    shift = tuple(int(s) for s in shift)
    if u > v:
        return v, u, tuple(-s for s in shift)
    if u == v:
        for s in shift:
            if s > 0:
                break
            if s < 0:
                return u, v, tuple(-x for x in shift)
    return u, v, shift


def build_framework(dimension: int, positions, lattice, edge_orbits) -> PeriodicFramework:
    """Validate and construct a :class:`PeriodicFramework`.

    Parameters
    ----------
    dimension : int
        Ambient dimension d >= 2.
    positions : array_like, shape (n_orbits, d)
        Orbit representative positions.
    lattice : array_like, shape (d, d)
        Columns generate the periodicity lattice; must be invertible.
    edge_orbits : sequence
        Items ``(u, v, shift)`` or ``(u, v, shift, length)``.  When a length
        is given it must match the geometry to relative 1e-9.

    Raises
    ------
    SingularMatrix, ZeroLengthEdge, DuplicateOrbit
    """
    dimension = int(dimension)
    if dimension < 2:
        raise ValueError("dimension must be >= 2")
    pos = _check_positions(dimension, positions)
    n = pos.shape[0]
    lat = np.asarray(lattice, dtype=float)
    if lat.shape != (dimension, dimension):
        raise ValueError(f"lattice must be {dimension} x {dimension}")
    scale = float(np.max(np.linalg.norm(lat, axis=0), initial=0.0))
    if scale == 0.0 or abs(np.linalg.det(lat)) < BASIS_DET_RTOL * scale**dimension:
        raise SingularMatrix("lattice matrix is singular")

    orbits = []
    seen = set()
    for item in edge_orbits:
        if len(item) == 3:
            u, v, shift = item
            stored = None
        else:
            u, v, shift, stored = item
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge orbit ({u}, {v}) out of range")
        shift = tuple(int(s) for s in shift)
        if len(shift) != dimension:
            raise ValueError("shift length must equal the dimension")
        u, v, shift = canonical_orbit(u, v, shift)
        key = (u, v, shift)
        if key in seen:
            raise DuplicateOrbit(f"edge orbit {key} listed twice (up to reversal)")
        seen.add(key)
        geometric = float(np.linalg.norm(pos[v] + lat @ np.asarray(shift, dtype=float) - pos[u]))
        if geometric <= 0.0 or (stored is not None and stored <= 0.0):
            raise ZeroLengthEdge(f"edge orbit {key} has zero length")
        if stored is not None and abs(geometric - stored) > LENGTH_RTOL * stored:
            raise ValueError(
                f"edge orbit {key}: stored length {stored} does not match geometry {geometric}")
        orbits.append(EdgeOrbit(u, v, shift, stored if stored is not None else geometric))

    return PeriodicFramework(
        dimension=dimension,
        positions=_readonly(pos),
        lattice=_readonly(lat),
        edge_orbits=tuple(orbits),
    )
