"""Linkage constructors: hinges, paneled simplices, one-dof reduction,
the double arrowhead, the cadelniza, roofing presets and the L_k gallery."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DegenerateHinge,
    DegenerateSimplex,
    IllConditionedPosition,
    NonRigidScaffold,
    RedundantAttachment,
)
from .geometry import (
    FiniteLinkage,
    InfinitesimalDeformation,
    PeriodicFramework,
    SymmetricMatrix,
    build_framework,
    build_linkage,
    canonical_orbit,
)
from .quotient import to_periodic
from .rigidity import (
    RANK_RTOL,
    finite_dof,
    matrix_rank,
    periodic_dof,
    relative_deformation_basis,
)

#: Hinge points must lie in the hinge plane to this relative tolerance.
HINGE_PLANE_RTOL = 1e-8

#: Flex direction at a hinged vertex must align with the prescription
#: to this angular (sine) tolerance.
HINGE_DIRECTION_RTOL = 1e-8

#: Condition-number limit for the joint-velocity linear system.
POSITION_COND_LIMIT = 1e8


# ---------------------------------------------------------------------------
# altitudes


def altitude_directions(points) -> np.ndarray:
    """Outward unit altitude directions of a simplex.

    Parameters
    ----------
    points : array_like, shape (d + 1, d)
        Affinely independent simplex vertices p_0 .. p_d.

    Returns
    -------
    (d, d) ndarray
        Row k - 1 is the unit vector orthogonal to the facet opposite p_k,
        pointing from the facet towards p_k, for k = 1 .. d.
    """
    p = np.asarray(points, dtype=float)
    d = p.shape[1]
    if p.shape[0] != d + 1:
        raise DegenerateSimplex(f"expected {d + 1} points in R^{d}")
    spread = p[1:] - p[0]
    s = np.linalg.svd(spread, compute_uv=False)
    if s[0] == 0.0 or s[-1] < RANK_RTOL * (d + 1) * s[0]:
        raise DegenerateSimplex("simplex vertices are affinely dependent")

    out = np.zeros((d, d))
    for k in range(1, d + 1):
        facet = np.delete(p, k, axis=0)
        directions = facet[1:] - facet[0]
        _, _, vt = np.linalg.svd(directions)
        normal = vt[-1]
        if normal @ (p[k] - facet[0]) < 0.0:
            normal = -normal
        out[k - 1] = normal
    return out


# ---------------------------------------------------------------------------
# hinge attachment


@dataclass(frozen=True)
class HingeSpec:
    """Prescription for attaching one vertex with a single allowed direction.

    ``hinge_points`` are d - 1 affinely independent points in the hyperplane
    through ``vertex`` with normal ``direction``, away from the vertex.
    ``attachments`` optionally lists, per hinge point, the d scaffold vertex
    indices it is barred to; when None they are chosen automatically.
    """

    vertex: np.ndarray
    direction: np.ndarray
    hinge_points: np.ndarray
    attachments: Optional[tuple] = None

    def __post_init__(self):
        object.__setattr__(self, "vertex", np.asarray(self.vertex, dtype=float))
        object.__setattr__(self, "direction", np.asarray(self.direction, dtype=float))
        object.__setattr__(self, "hinge_points",
                           np.atleast_2d(np.asarray(self.hinge_points, dtype=float)))


def _validate_hinge(spec: HingeSpec, dimension: int):
    d = dimension
    v, mu, pts = spec.vertex, spec.direction, spec.hinge_points
    if v.shape != (d,) or mu.shape != (d,):
        raise DegenerateHinge("vertex and direction must be d-vectors")
    if pts.shape != (d - 1, d):
        raise DegenerateHinge(f"a hinge in R^{d} needs {d - 1} points")
    norm_mu = np.linalg.norm(mu)
    if norm_mu == 0.0:
        raise DegenerateHinge("prescribed direction is zero")
    arms = v - pts
    arm_norms = np.linalg.norm(arms, axis=1)
    if np.any(arm_norms == 0.0):
        raise DegenerateHinge("a hinge point coincides with the vertex")
    tilt = np.abs(arms @ (mu / norm_mu))
    if np.any(tilt > HINGE_PLANE_RTOL * arm_norms):
        raise DegenerateHinge("hinge points leave the hyperplane normal to the direction")
    if d > 2:
        s = np.linalg.svd(pts[1:] - pts[0], compute_uv=False)
        if s[-1] < RANK_RTOL * d * max(s[0], 1.0):
            raise DegenerateHinge("hinge points are affinely dependent")
    s = np.linalg.svd(arms, compute_uv=False)
    if s[-1] < RANK_RTOL * d * s[0]:
        raise DegenerateHinge("vertex lies in the affine hull of the hinge")


def _sub_rigidity(positions: np.ndarray, edges, d: int):
    index = {}
    rows = []
    for u, v in edges:
        for w in (u, v):
            if w not in index:
                index[w] = len(index)
    r = np.zeros((len(edges), len(index) * d))
    for k, (u, v) in enumerate(edges):
        e = positions[v] - positions[u]
        iu, iv = index[u], index[v]
        r[k, iv * d:(iv + 1) * d] += e
        r[k, iu * d:(iu + 1) * d] -= e
    return r, len(index)


def _is_minimally_rigid(positions: np.ndarray, edges, vertices, d: int) -> bool:
    vertices = list(vertices)
    sub = positions[vertices]
    centered = sub - sub.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    if s.size == 0 or s[0] == 0.0 or np.sum(s >= RANK_RTOL * max(centered.shape) * s[0]) < d:
        return False
    vset = set(vertices)
    sub_edges = [e for e in edges if e[0] in vset and e[1] in vset]
    if len(sub_edges) != len(vertices) * d - d * (d + 1) // 2:
        return False
    r, count = _sub_rigidity(positions, sub_edges, d)
    if count != len(vertices):
        return False
    return matrix_rank(r) == len(sub_edges)


def _best_attachment(point: np.ndarray, positions: np.ndarray, candidates, d: int):
    """Pick the d candidate vertices whose arm vectors are best conditioned."""
    best, best_subset = -1.0, None
    for subset in itertools.combinations(candidates, d):
        arms = point - positions[list(subset)]
        vol = abs(np.linalg.det(arms))
        if vol > best:
            best, best_subset = vol, subset
    if best_subset is None or best == 0.0:
        raise DegenerateHinge("no non-degenerate attachment subset exists")
    return best_subset


def hinge_attach(scaffold: FiniteLinkage, spec: HingeSpec,
                 rigid_part: Optional[Sequence[int]] = None) -> FiniteLinkage:
    """Attach one vertex to a rigid scaffold through a hinge.

    The d - 1 hinge points are each barred to d scaffold vertices and the new
    vertex is barred to the hinge, so relative to the scaffold it keeps a
    single degree of freedom: rotation about the hinge, with instantaneous
    direction ``spec.direction``.

    Parameters
    ----------
    scaffold : FiniteLinkage
        Existing linkage; by default it must be minimally rigid as a whole.
    spec : HingeSpec
        Hinge geometry and optional explicit attachments.
    rigid_part : sequence of int, optional
        Restrict the rigidity requirement and the attachments to this vertex
        subset (used when building onto a partially flexible linkage).

    Raises
    ------
    NonRigidScaffold, DegenerateHinge, RedundantAttachment
    """
    d = scaffold.dimension
    n0 = scaffold.vertex_count
    rigid = tuple(range(n0)) if rigid_part is None else tuple(int(i) for i in rigid_part)
    if not _is_minimally_rigid(scaffold.positions, scaffold.edges, rigid, d):
        raise NonRigidScaffold("the scaffold (rigid part) is not spanning minimally rigid")
    _validate_hinge(spec, d)

    hinge_count = d - 1
    positions = np.vstack([scaffold.positions, spec.hinge_points, spec.vertex[None, :]])
    vertex_index = n0 + hinge_count

    if spec.attachments is not None:
        attachments = tuple(tuple(int(i) for i in targets) for targets in spec.attachments)
        if len(attachments) != hinge_count or any(len(t) != d for t in attachments):
            raise DegenerateHinge("attachments must give d scaffold vertices per hinge point")
        if any(i not in set(rigid) for t in attachments for i in t):
            raise DegenerateHinge("attachments must target the rigid part")
    else:
        attachments = tuple(
            _best_attachment(spec.hinge_points[t], positions, rigid, d)
            for t in range(hinge_count))

    edges = list(scaffold.edges)
    for t in range(hinge_count):
        h = n0 + t
        edges.extend((min(h, int(a)), max(h, int(a))) for a in attachments[t])
        edges.append((h, vertex_index))
    result = build_linkage(d, positions, edges, scaffold.marked_pairs)

    from .rigidity import finite_rigidity_matrix  # local import avoids cycle at module load
    if matrix_rank(finite_rigidity_matrix(result)) != result.edge_count:
        raise RedundantAttachment("attachment bars are not independent")

    relative = relative_deformation_basis(result, range(n0))
    if len(relative) != 1:
        raise RedundantAttachment(
            f"relative motion space has dimension {len(relative)}, expected 1")
    velocity = relative[0].velocities[vertex_index]
    speed = np.linalg.norm(velocity)
    mu_hat = spec.direction / np.linalg.norm(spec.direction)
    off_axis = np.linalg.norm(velocity - (velocity @ mu_hat) * mu_hat)
    if speed == 0.0 or off_axis > HINGE_DIRECTION_RTOL * speed:
        raise DegenerateHinge("hinged vertex does not move along the prescribed direction")
    return result


def _hinge_points(vertex: np.ndarray, direction: np.ndarray, radius: float,
                  rng: np.random.Generator) -> np.ndarray:
    """d - 1 generic points in the hyperplane through ``vertex`` with normal
    ``direction``, at the given radius."""
    d = vertex.shape[0]
    mu = direction / np.linalg.norm(direction)
    # orthonormal basis of the hinge plane
    _, _, vt = np.linalg.svd(mu[None, :])
    plane = vt[1:]
    points = np.zeros((d - 1, d))
    for t in range(d - 1):
        combo = plane[t] + 0.2 * rng.standard_normal(d - 1) @ plane
        combo /= np.linalg.norm(combo)
        points[t] = vertex + radius * combo
    return points


# ---------------------------------------------------------------------------
# paneled simplex


@dataclass(frozen=True)
class PaneledSimplex:
    """A linkage with d panel vertices hinged along simplex altitudes.

    ``panel_vertices[k - 1]`` moves only along ``directions[k - 1]`` relative
    to the scaffold; the marked pairs run from the anchored vertex to each
    panel vertex, so the altitude flex opens every lattice generator.
    """

    linkage: FiniteLinkage
    scaffold: tuple
    anchor: int
    panel_vertices: tuple
    hinges: tuple
    directions: np.ndarray

    def altitude_flex(self, coefficients=None) -> InfinitesimalDeformation:
        """The flex moving panel vertex k along its altitude direction with
        the given positive coefficient (all ones by default)."""
        n = self.linkage.vertex_count
        d = self.linkage.dimension
        c = np.ones(d) if coefficients is None else np.asarray(coefficients, dtype=float)
        vel = np.zeros((n, d))
        for k, v in enumerate(self.panel_vertices):
            vel[v] = c[k] * self.directions[k]
        return InfinitesimalDeformation(vel)


def paneled_simplex(dimension: int) -> PaneledSimplex:
    """Build the d-degree-of-freedom paneled simplex linkage.

    A rigid simplex scaffold carries one rigidly attached vertex v_0 and d
    hinged vertices v_1 .. v_d whose prescribed directions are the outward
    altitudes of the simplex [v_0 .. v_d]; moving every v_k outward makes the
    Gram tangent of the marked basis positive definite.
    """
    d = int(dimension)
    if d < 2:
        raise ValueError("dimension must be >= 2")
    rng = np.random.default_rng(20240 + d)

    marked = np.vstack([np.zeros(d), np.eye(d)])  # v_0 .. v_d
    mu = altitude_directions(marked)

    offset = np.resize([0.31, -0.42, 0.27, -0.18, 0.11], d)
    scaffold_pos = offset + np.vstack([np.zeros(d), 0.55 * np.eye(d)])
    scaffold_pos = scaffold_pos + 0.07 * rng.standard_normal(scaffold_pos.shape)
    scaffold_edges = list(itertools.combinations(range(d + 1), 2))
    placeholder = [(0, k) for k in range(1, d + 1)]
    linkage = build_linkage(d, scaffold_pos, scaffold_edges, placeholder)
    scaffold_idx = tuple(range(d + 1))

    # v_0, rigidly attached by d independent bars
    v0_index = d + 1
    targets = _best_attachment(marked[0], linkage.positions, scaffold_idx, d)
    positions = np.vstack([linkage.positions, marked[0][None, :]])
    edges = list(linkage.edges) + [(int(t), v0_index) for t in targets]
    linkage = build_linkage(d, positions, edges, placeholder)

    hinges = []
    panel_vertices = []
    for k in range(1, d + 1):
        pts = _hinge_points(marked[k], mu[k - 1], 0.35, rng)
        spec = HingeSpec(marked[k], mu[k - 1], pts)
        before = linkage.vertex_count
        linkage = hinge_attach(linkage, spec, rigid_part=scaffold_idx)
        hinges.append(tuple(range(before, before + d - 1)))
        panel_vertices.append(before + d - 1)

    pairs = [(v0_index, v) for v in panel_vertices]
    linkage = build_linkage(d, linkage.positions, linkage.edges, pairs)
    count = finite_dof(linkage)
    if count != (d, True):
        raise RedundantAttachment(
            f"paneled simplex came out with {count.f} dof (independent={count.independent})")
    return PaneledSimplex(
        linkage=linkage,
        scaffold=scaffold_idx,
        anchor=v0_index,
        panel_vertices=tuple(panel_vertices),
        hinges=tuple(hinges),
        directions=mu,
    )


# ---------------------------------------------------------------------------
# reduction to one degree of freedom


def joint_velocity(points, velocities, position) -> np.ndarray:
    """Velocity of a joint barred to moving points p_k with velocities pdot_k.

    Solves <pdot_k - qdot, p_k - q> = 0 for qdot; the arm vectors p_k - q
    must be linearly independent (condition number at most 1e8).
    """
    p = np.asarray(points, dtype=float)
    v = np.asarray(velocities, dtype=float)
    q = np.asarray(position, dtype=float)
    arms = p - q
    if arms.shape[0] != arms.shape[1]:
        raise IllConditionedPosition("need exactly d moving points in R^d")
    s = np.linalg.svd(arms, compute_uv=False)
    if s[-1] == 0.0 or s[0] / s[-1] > POSITION_COND_LIMIT:
        raise IllConditionedPosition("arm vectors are (nearly) linearly dependent")
    return np.linalg.solve(arms, np.sum(arms * v, axis=1))


def reduce_to_one_dof(linkage: FiniteLinkage, flex: InfinitesimalDeformation,
                      position, moving: Optional[Sequence[int]] = None,
                      scaffold: Optional[Sequence[int]] = None,
                      hinge_radius: float = 0.35) -> FiniteLinkage:
    """Tie the moving vertices together through one new hinged joint.

    A new vertex w at ``position`` is barred to the moving vertices; its
    velocity compatible with the prescribed flex is forced by
    :func:`joint_velocity`, and a hinge attachment pins w to that single
    direction.  The result has one degree of freedom whose flex restricts to
    the prescribed velocities on the moving vertices (up to scale).

    Parameters
    ----------
    moving : sequence of int, optional
        The d driven vertices; defaults to the second entry of each marked
        pair.
    scaffold : sequence of int, optional
        Vertices to which the hinge is rigidly attached; defaults to the
        vertices the flex leaves still.
    """
    d = linkage.dimension
    if moving is None:
        moving = [j for _, j in linkage.marked_pairs]
    moving = [int(i) for i in moving]
    if len(set(moving)) != d:
        raise ValueError(f"need {d} distinct moving vertices")
    q = np.asarray(position, dtype=float)
    qdot = joint_velocity(linkage.positions[moving], flex.velocities[moving], q)

    if scaffold is None:
        speeds = np.linalg.norm(flex.velocities, axis=1)
        scaffold = [i for i in range(linkage.vertex_count)
                    if speeds[i] <= 1e-9 * speeds.max()]
    scaffold = tuple(int(i) for i in scaffold)

    rng = np.random.default_rng(7)
    spec = HingeSpec(q, qdot, _hinge_points(q, qdot, hinge_radius, rng))
    attached = hinge_attach(linkage, spec, rigid_part=scaffold)
    w = attached.vertex_count - 1

    edges = list(attached.edges) + [(min(v, w), max(v, w)) for v in moving]
    result = build_linkage(d, attached.positions, edges, linkage.marked_pairs)
    count = finite_dof(result)
    if count.f != 1:
        raise RedundantAttachment(f"reduction produced {count.f} dof, expected 1")
    return result


# ---------------------------------------------------------------------------
# double arrowhead


def double_arrowhead(height: float = 1.0, notch: float = 0.4) -> FiniteLinkage:
    """The concave quadrilateral whose diagonals are the marked pairs.

    Vertices (0,0), (1,height), (2,0), (1,notch) with the four cycle edges;
    the reflex vertex (1, notch) lies inside the triangle of the other three,
    which requires 0 < notch < height.
    """
    if not (0.0 < notch < height):
        raise ValueError("need 0 < notch < height for a concave quadrilateral")
    positions = [(0.0, 0.0), (1.0, height), (2.0, 0.0), (1.0, notch)]
    edges = [(0, 1), (1, 2), (2, 3), (3, 0)]
    return build_linkage(2, positions, edges, [(0, 2), (3, 1)])


# ---------------------------------------------------------------------------
# cadelniza


def _regular_simplex(count: int, edge: float) -> np.ndarray:
    """Vertices of a regular (count-1)-simplex in R^(count-1), centered at
    the origin with the given edge length."""
    e = np.eye(count) - 1.0 / count
    _, _, vt = np.linalg.svd(e)
    coords = e @ vt[:count - 1].T
    return coords * (edge / math.sqrt(2.0))


@dataclass(frozen=True)
class Cadelniza:
    """Floor simplex plus two stacked apexes; no floor edges.

    The marked pairs are the vertical apex pair followed by the d - 1
    horizontal floor pairs from floor vertex 0.
    """

    linkage: FiniteLinkage
    floor: tuple
    apexes: tuple
    circumradius: float
    heights: tuple

    def dilation_flex(self) -> InfinitesimalDeformation:
        """Unit-rate radial dilation of the floor about its circumcenter; the
        apexes slide down the axis to keep all bar lengths."""
        pos = self.linkage.positions
        d = self.linkage.dimension
        vel = np.zeros_like(pos)
        for i in self.floor:
            vel[i, :d - 1] = pos[i, :d - 1]
        r2 = self.circumradius ** 2
        for i, h in zip(self.apexes, self.heights):
            vel[i, d - 1] = -r2 / h
        return InfinitesimalDeformation(vel)


def cadelniza(dimension: int = 3, floor_edge: float = 1.0,
              h1: Optional[float] = None, h2: Optional[float] = None) -> Cadelniza:
    """Build the (d choose 2)-degree-of-freedom floor-and-apexes linkage.

    d floor vertices form a regular simplex in the horizontal hyperplane
    (carrying no edges); two apex vertices sit on the vertical axis through
    the circumcenter at heights 0 < h1 < h2 and are barred to every floor
    vertex.  Default heights make the bar lengths 1.2 and 1.6 times the floor
    circumradius.
    """
    d = int(dimension)
    if d < 3:
        raise ValueError("dimension must be >= 3")
    if floor_edge <= 0.0:
        raise ValueError("floor_edge must be positive")
    radius = floor_edge * math.sqrt((d - 1) / (2.0 * d))
    if h1 is None:
        h1 = radius * math.sqrt(1.2 ** 2 - 1.0)
    if h2 is None:
        h2 = radius * math.sqrt(1.6 ** 2 - 1.0)
    if not (0.0 < h1 < h2):
        raise ValueError("need 0 < h1 < h2 (both apexes on the same side)")

    floor_coords = _regular_simplex(d, floor_edge)
    positions = np.zeros((d + 2, d))
    positions[:d, :d - 1] = floor_coords
    positions[d, d - 1] = h1
    positions[d + 1, d - 1] = h2

    edges = [(j, d) for j in range(d)] + [(j, d + 1) for j in range(d)]
    pairs = [(d, d + 1)] + [(0, k) for k in range(1, d)]
    linkage = build_linkage(d, positions, edges, pairs)
    return Cadelniza(
        linkage=linkage,
        floor=tuple(range(d)),
        apexes=(d, d + 1),
        circumradius=radius,
        heights=(float(h1), float(h2)),
    )


# ---------------------------------------------------------------------------
# roofing


def add_edge_orbit(framework: PeriodicFramework, u: int, v: int, shift) -> PeriodicFramework:
    """Return the framework with one more edge orbit, its rest length taken
    from the current geometry."""
    orbits = [(e.u, e.v, e.shift, e.length) for e in framework.edge_orbits]
    orbits.append((int(u), int(v), tuple(int(s) for s in shift)))
    return build_framework(framework.dimension, framework.positions,
                           framework.lattice, orbits)


def roofing_preset(variant: str = "default") -> list:
    """Edge orbits that cut the d = 3 cadelniza framework down to one dof.

    Orbit 0 is the floor representative, orbit 1 the lower apex; lattice
    generators are ordered (vertical, horizontal 1, horizontal 2).  Both
    variants put the new bars in the same two roof planes through the apex;
    the default extends the roofs forward, the alternate backward.
    """
    presets = {
        "default": [(1, 0, (-1, 2, 0)), (1, 0, (0, 1, 1))],
        "alternate": [(1, 0, (-1, -1, 0)), (1, 0, (0, -1, 1))],
    }
    if variant not in presets:
        raise ValueError(f"unknown roofing variant {variant!r}")
    return [canonical_orbit(*orbit) for orbit in presets[variant]]


def roofing_adapted_basis() -> np.ndarray:
    """Unimodular change of lattice generators adapted to the roofed motion.

    The motion keeps the roof-line period (horizontal generator 1) at fixed
    length and orthogonal to the others, so reordering the generators to
    (vertical, horizontal 2, horizontal 1) diagonalizes the Gram tangent with
    its two positive entries first and the zero last."""
    return np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=float)


def roofed_cadelniza(floor_edge: float = 1.0, h1: Optional[float] = None,
                     h2: Optional[float] = None,
                     variant: str = "default") -> PeriodicFramework:
    """The d = 3 cadelniza framework with a roofing preset applied.

    The preset is data, not trusted: the build fails unless the resulting
    framework has exactly one degree of freedom with independent constraints.
    """
    framework = to_periodic(cadelniza(3, floor_edge, h1, h2).linkage)
    for u, v, shift in roofing_preset(variant):
        framework = add_edge_orbit(framework, u, v, shift)
    count = periodic_dof(framework)
    if count != (1, True):
        raise RedundantAttachment(
            f"roofing preset {variant!r} gave {count.f} dof "
            f"(independent={count.independent}), expected 1")
    return framework


# ---------------------------------------------------------------------------
# the L_k gallery


@dataclass(frozen=True)
class LkGallery:
    """A ring of 3k joints under two stacked apexes, one ring bar removed.

    The marked pairs are the vertical apex pair and the two chords from
    polygon vertex 0 to vertices k and 2k.
    """

    linkage: FiniteLinkage
    k: int
    radius: float
    heights: tuple
    polygon: tuple
    apexes: tuple
    removed_edge: tuple


@dataclass(frozen=True)
class LkClosedForm:
    """Closed-form state of the L_k one-parameter motion at ring radius r.

    ``omega`` and ``domega_dr`` are 3 x 3 in the marked basis order
    (vertical, chord 1, chord 2); the vertical-horizontal cross terms vanish
    identically.
    """

    theta: float
    lambda1: np.ndarray
    lambda2: np.ndarray
    omega: SymmetricMatrix
    domega_dr: SymmetricMatrix


def _lk_domain(k: int, r: float, heights) -> tuple:
    if k < 3:
        raise ValueError("k must be >= 3")
    z1, z2 = heights
    if not (0.0 < z1 < z2):
        raise ValueError("need 0 < z1 < z2 (apexes on the same side)")
    l1 = math.hypot(1.0, z1)
    l2 = math.hypot(1.0, z2)
    r_max = min(1.0 / math.sin(math.pi / (3 * k)), l1)
    if not (1.0 <= r < r_max):
        raise ValueError(f"radius must satisfy 1 <= r < {r_max:.6g}")
    return l1, l2


def gallery_lk(k: int, radius: float = 1.0, heights=(0.9, 1.7),
               perturbation: float = 0.0) -> LkGallery:
    """Build the L_k linkage at ring radius ``radius``.

    A regular 3k-gon is inscribed in the unit circle of the horizontal plane
    and every ring joint is barred to two apexes on the vertical axis at
    heights ``heights``.  One ring bar, the middle bar of the arc between the
    two horizontal marked vertices (ties broken toward the lower index), is
    removed, leaving one degree of freedom.  For radius > 1 the ring opens at
    the removed bar while every remaining bar keeps its length.  A nonzero
    ``perturbation`` displaces the ring joints by that magnitude (breaking the
    planarity that makes the periodic framework self-cross); closed forms
    only apply to the unperturbed build.
    """
    k = int(k)
    l1, l2 = _lk_domain(k, radius, heights)
    m = 3 * k
    phi = 2.0 * math.asin(math.sin(math.pi / m) / radius)
    slack = 2.0 * math.pi - m * phi
    gap = k + (k - 1) // 2  # removed bar joins ring vertices gap and gap + 1

    angles = np.pi - phi * np.arange(m)
    angles[gap + 1:] -= slack
    positions = np.zeros((m + 2, 3))
    positions[:m, 0] = radius * np.cos(angles)
    positions[:m, 1] = radius * np.sin(angles)
    positions[m, 2] = math.sqrt(l1 ** 2 - radius ** 2)
    positions[m + 1, 2] = math.sqrt(l2 ** 2 - radius ** 2)
    if perturbation:
        rng = np.random.default_rng(1100 + k)
        positions[:m] += perturbation * rng.standard_normal((m, 3))

    edges = [(j, (j + 1) % m) for j in range(m) if j != gap]
    edges += [(j, m) for j in range(m)] + [(j, m + 1) for j in range(m)]
    pairs = [(m, m + 1), (0, k), (0, 2 * k)]
    linkage = build_linkage(3, positions, edges, pairs)
    return LkGallery(
        linkage=linkage,
        k=k,
        radius=float(radius),
        heights=(float(heights[0]), float(heights[1])),
        polygon=tuple(range(m)),
        apexes=(m, m + 1),
        removed_edge=(gap, gap + 1),
    )


def lk_closed_form(k: int, r: float, heights=(0.9, 1.7)) -> LkClosedForm:
    """Closed-form Gram data of the L_k motion at ring radius r.

    The ring joints stay on the intersection circle of the two apex spheres,
    so the opening angle is theta(r) = 2k asin(sin(pi/3k)/r), the marked
    chords are r (1 - cos theta, +-sin theta, 0), and the vertical period has
    length h2(r) - h1(r) with h_i = sqrt(l_i^2 - r^2).  ``domega_dr`` is the
    analytic derivative of the Gram matrix in the ring radius.
    """
    k = int(k)
    l1, l2 = _lk_domain(k, r, heights)
    s = math.sin(math.pi / (3 * k))
    u = s / r
    theta = 2.0 * k * math.asin(u)
    dtheta = -2.0 * k * s / (r * r * math.sqrt(1.0 - u * u))

    c, sn = math.cos(theta), math.sin(theta)
    lam1 = np.array([r * (1.0 - c), r * sn, 0.0])
    lam2 = np.array([r * (1.0 - c), -r * sn, 0.0])

    h1 = math.sqrt(l1 ** 2 - r ** 2)
    h2 = math.sqrt(l2 ** 2 - r ** 2)
    vertical = h2 - h1
    dvertical = r / h1 - r / h2

    a = 2.0 * r * r * (1.0 - c)               # |lam|^2
    b = 2.0 * r * r * c * (c - 1.0)           # <lam1, lam2>
    da = 4.0 * r * (1.0 - c) + 2.0 * r * r * sn * dtheta
    db = 4.0 * r * c * (c - 1.0) - 2.0 * r * r * sn * (2.0 * c - 1.0) * dtheta

    omega = np.array([
        [vertical ** 2, 0.0, 0.0],
        [0.0, a, b],
        [0.0, b, a],
    ])
    domega = np.array([
        [2.0 * vertical * dvertical, 0.0, 0.0],
        [0.0, da, db],
        [0.0, db, da],
    ])
    return LkClosedForm(
        theta=theta,
        lambda1=lam1,
        lambda2=lam2,
        omega=SymmetricMatrix(omega),
        domega_dr=SymmetricMatrix(domega),
    )


# ---------------------------------------------------------------------------
# gallery registry (CLI vocabulary)


def build_gallery(name: str, **params):
    """Build a gallery member by selector name.

    Selectors: ``double-arrowhead`` (height, notch), ``paneled-simplex`` (d),
    ``cadelniza`` (d, floor_edge, h1, h2), ``roofed-cadelniza`` (floor_edge,
    h1, h2, variant) and ``lk`` (k, radius, perturbation).  All but
    ``roofed-cadelniza`` return a finite linkage; the roofed build is
    inherently periodic and returns a framework.
    """
    if name == "double-arrowhead":
        return double_arrowhead(**params)
    if name == "paneled-simplex":
        return paneled_simplex(params.pop("d", 2), **params).linkage
    if name == "cadelniza":
        return cadelniza(params.pop("d", 3), **params).linkage
    if name == "roofed-cadelniza":
        return roofed_cadelniza(**params)
    if name == "lk":
        return gallery_lk(params.pop("k", 3), **params).linkage
    raise ValueError(f"unknown gallery selector {name!r}")
