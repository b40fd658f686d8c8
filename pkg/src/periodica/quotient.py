"""Finite-to-periodic conversion: quotient by marked-pair identifications."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InconsistentIdentification
from .geometry import (
    FiniteLinkage,
    InfinitesimalDeformation,
    PeriodicFramework,
    build_framework,
    lattice_matrix,
)
from .rigidity import finite_rigidity_matrix, matrix_rank


@dataclass(frozen=True)
class QuotientReport:
    """Result of identifying the marked pairs of a finite linkage.

    Attributes
    ----------
    orbit_count : int
        Number of vertex classes (n - d for a valid linkage).
    edge_orbit_count : int
        Equals the finite edge count.
    representatives : tuple of int
        Lowest finite vertex index of each class, in orbit order.
    assignments : tuple of (int, tuple)
        For each finite vertex, its (orbit index, integer shift) so that
        p(v) = p(representative) + L @ shift.
    members : tuple of tuple
        Finite vertex indices in each orbit (exposes class multiplicity).
    """

    orbit_count: int
    edge_orbit_count: int
    representatives: tuple
    assignments: tuple
    members: tuple


def _identify(vertex_count: int, pairs):
    """Union-find over pair identifications with accumulated integer shifts.

    Pair k identifies vertex j(k) with the translate of vertex i(k) by the
    k-th lattice generator.  Returns per-vertex (root, shift-to-root) with
    shifts tracked exactly as integer vectors.

    Raises
    ------
    InconsistentIdentification
        If a pair closes a cycle: either the accumulated shifts conflict or
        the identification is redundant (fewer than d merges).
    """
    d = len(pairs)
    parent = list(range(vertex_count))
    shift = [np.zeros(d, dtype=int) for _ in range(vertex_count)]

    def find(v):
        path = []
        while parent[v] != v:
            path.append(v)
            v = parent[v]
        total = np.zeros(d, dtype=int)
        for w in reversed(path):
            total = total + shift[w]
            shift[w] = total.copy()
            parent[w] = v
        return v

    for k, (i, j) in enumerate(pairs):
        unit = np.zeros(d, dtype=int)
        unit[k] = 1
        ri, rj = find(i), find(j)
        # p(j) = p(i) + lambda_k, p(i) = p(ri) + L si, p(j) = p(rj) + L sj
        si, sj = shift[i], shift[j]
        if ri == rj:
            if np.array_equal(sj, si + unit):
                raise InconsistentIdentification(
                    f"pair {k} ({i}, {j}) is redundant: vertices already identified")
            raise InconsistentIdentification(
                f"pair {k} ({i}, {j}) closes a cycle with conflicting shifts "
                f"{tuple(sj)} vs {tuple(si + unit)}")
        parent[rj] = ri
        shift[rj] = si + unit - sj

    roots = [find(v) for v in range(vertex_count)]
    return roots, [shift[v].copy() for v in range(vertex_count)]


def quotient(linkage: FiniteLinkage) -> QuotientReport:
    """Quotient the linkage graph by its marked-pair identifications."""
    n = linkage.vertex_count
    roots, shifts = _identify(n, linkage.marked_pairs)

    by_root = {}
    for v in range(n):
        by_root.setdefault(roots[v], []).append(v)
    # deterministic choice: the lowest finite index represents its class
    reps = sorted(min(group) for group in by_root.values())
    orbit_of_root = {roots[rep]: k for k, rep in enumerate(reps)}
    assignments = []
    for v in range(n):
        orbit = orbit_of_root[roots[v]]
        gamma = shifts[v] - shifts[reps[orbit]]
        assignments.append((orbit, tuple(int(x) for x in gamma)))
    members = [[] for _ in reps]
    for v in range(n):
        members[assignments[v][0]].append(v)
    return QuotientReport(
        orbit_count=len(reps),
        edge_orbit_count=linkage.edge_count,
        representatives=tuple(reps),
        assignments=tuple(assignments),
        members=tuple(tuple(m) for m in members),
    )


def to_periodic(linkage: FiniteLinkage) -> PeriodicFramework:
    """The unique periodic framework generated by the marked-pair lattice.

    Vertex orbits sit at the representative positions; every finite edge
    (u, v) becomes the orbit (rep(u), rep(v), shift(v) - shift(u)) with the
    finite rest length.  If the finite edge constraints are not independent
    the construction still goes through, but the closed-form freedom count
    no longer applies; a warning is issued.
    """
    report = quotient(linkage)
    rank = matrix_rank(finite_rigidity_matrix(linkage))
    if rank != linkage.edge_count:
        warnings.warn(
            "edge constraints are not infinitesimally independent; the quotient "
            "is still well defined but freedom counts may not match the closed form",
            stacklevel=2)

    positions = linkage.positions[list(report.representatives)]
    orbits = []
    for k, (u, v) in enumerate(linkage.edges):
        ou, gu = report.assignments[u]
        ov, gv = report.assignments[v]
        gamma = tuple(b - a for a, b in zip(gu, gv))
        orbits.append((ou, ov, gamma, float(linkage.lengths[k])))
    return build_framework(linkage.dimension, positions, lattice_matrix(linkage), orbits)


def periodic_flex_from_finite(
    linkage: FiniteLinkage, flex: InfinitesimalDeformation
) -> InfinitesimalDeformation:
    """Carry a finite flex over to the associated periodic framework.

    Orbit velocities are taken at the representatives and the lattice
    velocity columns are the marked-pair velocity differences; the marked
    identifications make this exact on every edge orbit.
    """
    report = quotient(linkage)
    vel = flex.velocities[list(report.representatives)]
    columns = [flex.velocities[j] - flex.velocities[i] for i, j in linkage.marked_pairs]
    return InfinitesimalDeformation(vel, np.column_stack(columns))
