import math

import numpy as np
import pytest

import periodica as pa
from periodica.auxetics import Auxeticity
from conftest import rigid_simplex


# ---------------------------------------------------------------------------
# altitudes


def test_altitudes_of_right_simplex():
    mu = pa.altitude_directions([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
    assert np.allclose(mu, np.eye(2), atol=1e-14)


def test_altitudes_of_equilateral_triangle():
    points = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, math.sqrt(3) / 2]])
    mu = pa.altitude_directions(points)
    for k in (1, 2):
        opposite = np.delete(points, k, axis=0)
        expected = points[k] - opposite.mean(axis=0)
        expected /= np.linalg.norm(expected)
        assert np.allclose(mu[k - 1], expected, atol=1e-12)


def test_altitudes_of_regular_tetrahedron():
    points = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0],
                       [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
    mu = pa.altitude_directions(points)
    for k in (1, 2, 3):
        face = np.delete(points, k, axis=0)
        expected = points[k] - face.mean(axis=0)
        expected /= np.linalg.norm(expected)
        assert np.allclose(mu[k - 1], expected, atol=1e-12)


def test_altitudes_orthogonal_and_outward_random():
    rng = np.random.default_rng(10)
    for _ in range(20):
        d = int(rng.integers(2, 5))
        points = rng.standard_normal((d + 1, d))
        try:
            mu = pa.altitude_directions(points)
        except pa.DegenerateSimplex:
            continue
        for k in range(1, d + 1):
            facet = np.delete(points, k, axis=0)
            spans = facet[1:] - facet[0]
            assert np.max(np.abs(spans @ mu[k - 1])) <= 1e-10
            assert mu[k - 1] @ (points[k] - facet[0]) > 0.0
            assert np.isclose(np.linalg.norm(mu[k - 1]), 1.0)


def test_altitudes_reject_degenerate():
    with pytest.raises(pa.DegenerateSimplex):
        pa.altitude_directions([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])


# ---------------------------------------------------------------------------
# hinges


def test_hinge_planar_rotation():
    scaffold = rigid_simplex(2)
    vertex = np.array([1.4, 1.3])
    direction = np.array([0.3, 1.1])
    mu_hat = direction / np.linalg.norm(direction)
    ortho = np.array([-mu_hat[1], mu_hat[0]])
    spec = pa.HingeSpec(vertex, direction, [vertex + 0.5 * ortho])
    result = pa.hinge_attach(scaffold, spec)
    flexes = pa.relative_deformation_basis(result, range(3))
    assert len(flexes) == 1
    velocity = flexes[0].velocities[-1]
    # rotation about the hinge point: velocity orthogonal to the arm
    arm = vertex - spec.hinge_points[0]
    assert abs(velocity @ arm) <= 1e-10 * np.linalg.norm(velocity) * np.linalg.norm(arm)
    off = velocity - (velocity @ mu_hat) * mu_hat
    assert np.linalg.norm(off) <= 1e-8 * np.linalg.norm(velocity)


def test_hinge_vertical_panel_in_space():
    scaffold = rigid_simplex(3)
    vertex = np.array([0.9, 1.1, 0.7])
    direction = np.array([0.0, 0.0, 1.0])  # horizontal hinge bar, vertical motion
    points = [vertex + np.array([0.4, 0.1, 0.0]), vertex + np.array([-0.2, 0.45, 0.0])]
    result = pa.hinge_attach(scaffold, pa.HingeSpec(vertex, direction, points))
    flexes = pa.relative_deformation_basis(result, range(4))
    assert len(flexes) == 1
    velocity = flexes[0].velocities[-1]
    assert np.linalg.norm(velocity[:2]) <= 1e-8 * abs(velocity[2])


def test_hinge_rejects_tilted_plane():
    scaffold = rigid_simplex(3)
    vertex = np.array([0.9, 1.1, 0.7])
    direction = np.array([0.0, 0.0, 1.0])
    points = [vertex + np.array([0.4, 0.1, 0.3]),  # leaves the hinge plane
              vertex + np.array([-0.2, 0.45, 0.0])]
    with pytest.raises(pa.DegenerateHinge):
        pa.hinge_attach(scaffold, pa.HingeSpec(vertex, direction, points))


def test_hinge_rejects_flexible_scaffold():
    square = pa.build_linkage(2, [(0, 0), (1, 0), (1, 1), (0, 1)],
                              [(0, 1), (1, 2), (2, 3), (3, 0)], [(0, 2), (1, 3)])
    vertex = np.array([2.0, 0.5])
    spec = pa.HingeSpec(vertex, np.array([1.0, 0.0]), [vertex + np.array([0.0, 0.4])])
    with pytest.raises(pa.NonRigidScaffold):
        pa.hinge_attach(square, spec)


def test_hinge_rejects_dependent_attachment():
    scaffold = pa.build_linkage(2, [(0.0, 0.0), (1.0, 0.0), (0.3, 0.9)],
                                [(0, 1), (1, 2), (0, 2)], [(0, 1), (0, 2)])
    vertex = np.array([0.5, 0.7])
    hinge_point = np.array([0.5, 0.0])  # collinear with scaffold vertices 0 and 1
    spec = pa.HingeSpec(vertex, np.array([1.0, 0.0]), [hinge_point],
                        attachments=[(0, 1)])
    with pytest.raises(pa.RedundantAttachment):
        pa.hinge_attach(scaffold, spec)


# ---------------------------------------------------------------------------
# paneled simplex


@pytest.mark.parametrize("d", [2, 3])
def test_paneled_simplex_freedom(d):
    built = pa.paneled_simplex(d)
    assert pa.finite_dof(built.linkage) == (d, True)


def test_paneled_altitude_flex_positive_definite(paneled2, paneled3):
    for built in (paneled2, paneled3):
        flex = built.altitude_flex()
        assert pa.flex_residual(built.linkage, flex) <= 1e-12
        tangent = pa.deformation_gram_velocity(built.linkage, flex)
        normalized = tangent.matrix / tangent.frobenius()
        assert np.linalg.eigvalsh(normalized)[0] > 1e-6


@pytest.mark.parametrize("d", [2, 3])
def test_paneled_single_vertex_flex_rank_one(d):
    built = pa.paneled_simplex(d)
    for k in range(d):
        coefficients = np.zeros(d)
        coefficients[k] = 1.0
        tangent = pa.deformation_gram_velocity(
            built.linkage, built.altitude_flex(coefficients)).matrix
        scale = np.linalg.norm(tangent)
        assert tangent[k, k] > 0.0
        masked = tangent.copy()
        masked[k, k] = 0.0
        assert np.max(np.abs(masked)) <= 1e-10 * scale


# ---------------------------------------------------------------------------
# one-dof reduction


def test_joint_velocity_analytic_case():
    qdot = pa.joint_velocity([(1.0, 0.0), (0.0, 1.0)], [(1.0, 0.0), (0.0, 1.0)], (0.0, 0.0))
    assert np.allclose(qdot, [1.0, 1.0], atol=1e-15)


def test_joint_velocity_matches_direct_solve():
    rng = np.random.default_rng(11)
    for _ in range(20):
        d = int(rng.integers(2, 5))
        points = rng.standard_normal((d, d))
        velocities = rng.standard_normal((d, d))
        q = rng.standard_normal(d)
        arms = points - q
        if np.linalg.cond(arms) > 1e6:
            continue
        expected = np.linalg.solve(arms, np.einsum("kd,kd->k", arms, velocities))
        assert np.allclose(pa.joint_velocity(points, velocities, q), expected, atol=1e-12)


def test_joint_velocity_rejects_collinear():
    with pytest.raises(pa.IllConditionedPosition):
        pa.joint_velocity([(1.0, 0.0), (2.0, 0.0)], [(0.0, 1.0), (0.0, 1.0)], (0.0, 0.0))


def test_reduce_planar_paneled_simplex(paneled2):
    flex = paneled2.altitude_flex()
    reduced = pa.reduce_to_one_dof(paneled2.linkage, flex, (0.45, -0.6))
    assert pa.finite_dof(reduced) == (1, True)
    survivors = pa.relative_deformation_basis(reduced, paneled2.scaffold)
    assert len(survivors) == 1
    moving = list(paneled2.panel_vertices)
    got = survivors[0].velocities[moving]
    prescribed = flex.velocities[moving]
    scale = np.sum(got * prescribed) / np.sum(prescribed * prescribed)
    assert np.max(np.abs(got - scale * prescribed)) <= 1e-8 * np.max(np.abs(got))
    # the survivor still opens the Gram matrix in every direction
    tangent = pa.deformation_gram_velocity(reduced, survivors[0])
    eigs = np.linalg.eigvalsh(tangent.matrix * np.sign(scale))
    assert eigs[0] > 0.0


def test_reduce_rejects_aligned_position(paneled2):
    flex = paneled2.altitude_flex()
    p = paneled2.linkage.positions
    v1, v2 = paneled2.panel_vertices
    on_line = p[v1] + 0.37 * (p[v2] - p[v1])
    with pytest.raises(pa.IllConditionedPosition):
        pa.reduce_to_one_dof(paneled2.linkage, flex, on_line)


# ---------------------------------------------------------------------------
# double arrowhead


def test_double_arrowhead_counts(arrowhead):
    assert arrowhead.vertex_count == 4
    assert arrowhead.edge_count == 4
    assert pa.finite_dof(arrowhead) == (1, True)


def test_double_arrowhead_concave(arrowhead):
    # reflex vertex inside the triangle of the other three
    a, b, c, d = arrowhead.positions
    assert 0.0 < d[1] < b[1]
    assert d[1] < d[0] * b[1] and d[1] < (2.0 - d[0]) * b[1]


def test_double_arrowhead_rejects_convex_parameters():
    with pytest.raises(ValueError):
        pa.double_arrowhead(height=0.5, notch=0.8)


def test_double_arrowhead_periodic_strictly_auxetic(arrowhead_framework):
    space = pa.deformation_basis(arrowhead_framework)
    result = pa.strict_direction(space)
    assert result.found and result.lambda_min > 0.0


# ---------------------------------------------------------------------------
# cadelniza


def test_cadelniza_counts(cad):
    assert cad.linkage.vertex_count == 5
    assert cad.linkage.edge_count == 6
    assert pa.finite_dof(cad.linkage) == (3, True)


def test_cadelniza_dimension_four():
    built = pa.cadelniza(4)
    assert built.linkage.vertex_count == 6
    assert built.linkage.edge_count == 8
    assert pa.finite_dof(built.linkage) == (6, True)  # d(d-1)/2


def test_cadelniza_floor_carries_no_edges(cad):
    floor = set(cad.floor)
    for u, v in cad.linkage.edges:
        assert not (u in floor and v in floor)


def test_cadelniza_parameter_validation():
    with pytest.raises(ValueError):
        pa.cadelniza(2)
    with pytest.raises(ValueError):
        pa.cadelniza(3, h1=0.8, h2=0.5)


def test_cadelniza_dilation_keeps_vertical_period(cad):
    flex = cad.dilation_flex()
    assert pa.flex_residual(cad.linkage, flex) <= 1e-12
    lam_dot = pa.marked_velocity_matrix(cad.linkage, flex)
    lam = pa.lattice_matrix(cad.linkage)
    # vertical generator stays vertical (orthogonal to the floor) and lengthens
    assert np.linalg.norm(lam_dot[:2, 0]) <= 1e-14
    assert lam[:, 0] @ lam_dot[:, 0] > 0.0


# ---------------------------------------------------------------------------
# roofing


def test_add_edge_orbit_rejects_duplicates(cad_framework):
    existing = cad_framework.edge_orbits[0]
    with pytest.raises(pa.DuplicateOrbit):
        pa.add_edge_orbit(cad_framework, existing.u, existing.v, existing.shift)
    with pytest.raises(pa.DuplicateOrbit):
        pa.add_edge_orbit(cad_framework, existing.v, existing.u,
                          tuple(-s for s in existing.shift))


def test_add_edge_orbit_takes_length_from_geometry(cad_framework):
    extended = pa.add_edge_orbit(cad_framework, 1, 0, (1, 1, 1))
    new = extended.edge_orbits[-1]
    assert np.isclose(new.length,
                      np.linalg.norm(extended.edge_vector(len(extended.edge_orbits) - 1)),
                      rtol=1e-12)


@pytest.mark.parametrize("variant", ["default", "alternate"])
def test_roofing_presets_give_one_dof(variant):
    framework = pa.roofed_cadelniza(variant=variant)
    assert pa.periodic_dof(framework) == (1, True)


def test_roofing_variants_share_roof_planes(cad_framework):
    # both presets join the apex to points on the same two lines through it
    apex = cad_framework.positions[1]
    planes = {}
    for variant in ("default", "alternate"):
        directions = []
        for u, v, shift in pa.roofing_preset(variant):
            framework = pa.add_edge_orbit(cad_framework, u, v, shift)
            vec = framework.edge_vector(framework.edge_orbit_count - 1)
            if u == 0:  # canonical orientation flipped the edge
                vec = -vec
            directions.append(vec / np.linalg.norm(vec))
        planes[variant] = directions
    # roof plane normal: orthogonal to the new bar and the roof line period
    roof_line = cad_framework.lattice[:, 1]
    for a, b in zip(planes["default"], planes["alternate"]):
        normal = np.cross(a, roof_line)
        assert abs(b @ normal) <= 1e-9 * np.linalg.norm(normal)


def test_roofing_adapted_basis_pattern(roofed):
    space = pa.deformation_basis(roofed)
    tangent = pa.deformation_gram_velocity(roofed, space.basis[0]).matrix
    p = pa.roofing_adapted_basis()
    assert abs(abs(np.linalg.det(p)) - 1.0) <= 1e-12
    adapted = p.T @ tangent @ p
    adapted *= np.sign(np.trace(adapted))
    scale = np.linalg.norm(adapted)
    assert adapted[0, 0] > 1e-3 * scale and adapted[1, 1] > 1e-3 * scale
    assert abs(adapted[2, 2]) <= 1e-8 * scale
    off = adapted - np.diag(np.diag(adapted))
    assert np.max(np.abs(off)) <= 1e-8 * scale


def test_roofing_preset_rejects_unknown():
    with pytest.raises(ValueError):
        pa.roofing_preset("sideways")


# ---------------------------------------------------------------------------
# the L_k gallery


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_lk_opening_angle_at_unit_radius(k):
    assert pa.lk_closed_form(k, 1.0).theta == pytest.approx(2.0 * math.pi / 3.0, abs=1e-14)


def test_lk_chords_at_unit_radius():
    cf = pa.lk_closed_form(3, 1.0)
    assert np.allclose(cf.lambda1, [1.5, math.sqrt(3) / 2, 0.0], atol=1e-14)
    assert np.allclose(cf.lambda2, [1.5, -math.sqrt(3) / 2, 0.0], atol=1e-14)
    assert np.linalg.norm(cf.lambda1) ** 2 == pytest.approx(3.0, abs=1e-12)


def test_lk_closed_form_matches_linkage(lk3):
    cf = pa.lk_closed_form(3, 1.0)
    lam = pa.lattice_matrix(lk3.linkage)
    assert np.allclose(lam[:, 1], cf.lambda1, atol=1e-12)
    assert np.allclose(lam[:, 2], cf.lambda2, atol=1e-12)
    assert np.allclose(pa.gram(lam).matrix, cf.omega.matrix, atol=1e-12)


def closed_form_omega(k, r, heights=(0.9, 1.7)):
    """Independent route to the Gram matrix for finite differencing."""
    s = math.sin(math.pi / (3 * k))
    theta = 2 * k * math.asin(s / r)
    a = 2 * r * r * (1 - math.cos(theta))
    b = 2 * r * r * math.cos(theta) * (math.cos(theta) - 1)
    h1 = math.sqrt(1 + heights[0] ** 2 - r * r)
    h2 = math.sqrt(1 + heights[1] ** 2 - r * r)
    return np.array([[(h2 - h1) ** 2, 0, 0], [0, a, b], [0, b, a]])


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_lk_derivative_matches_central_differences(k):
    h = 1e-6
    fd = (closed_form_omega(k, 1.0 + h) - closed_form_omega(k, 1.0 - h)) / (2 * h)
    analytic = pa.lk_closed_form(k, 1.0).domega_dr.matrix
    assert np.max(np.abs(fd - analytic)) <= 1e-8 * np.linalg.norm(analytic)


def test_lk3_derivative_frozen_values():
    # frozen from the finite-difference oracle above
    d = pa.lk_closed_form(3, 1.0).domega_dr.matrix
    assert d[1, 1] == pytest.approx(2.21751037, abs=1e-6)
    assert d[1, 2] == pytest.approx(-4.56497926, abs=1e-6)
    assert d[0, 0] > 0.0  # vertical period lengthens


def test_lk_counts_and_removed_edge():
    lk = pa.gallery_lk(5)
    assert lk.linkage.vertex_count == 17
    assert lk.linkage.edge_count == 44
    gap = lk.removed_edge
    assert gap == (7, 8)  # middle of the arc between vertices 5 and 10
    assert tuple(sorted(gap)) not in lk.linkage.edges


def test_lk_domain_validation():
    with pytest.raises(ValueError):
        pa.gallery_lk(2)
    with pytest.raises(ValueError):
        pa.gallery_lk(3, radius=0.5)
    with pytest.raises(ValueError):
        pa.gallery_lk(3, radius=5.0)
    with pytest.raises(ValueError):
        pa.lk_closed_form(3, 5.0)


def test_lk_perturbed_build_keeps_one_dof():
    lk = pa.gallery_lk(3, perturbation=1e-3)
    assert pa.finite_dof(lk.linkage) == (1, True)
    framework = pa.to_periodic(lk.linkage)
    assert pa.periodic_dof(framework) == (1, True)


def test_lk_series_orbit_counts_differ():
    counts = {pa.to_periodic(pa.gallery_lk(k).linkage).orbit_count for k in (3, 4, 5, 6)}
    assert counts == {8, 11, 14, 17}


# ---------------------------------------------------------------------------
# gallery registry


def test_build_gallery_selectors():
    assert isinstance(pa.build_gallery("double-arrowhead"), pa.FiniteLinkage)
    assert isinstance(pa.build_gallery("paneled-simplex", d=2), pa.FiniteLinkage)
    assert isinstance(pa.build_gallery("cadelniza", d=3), pa.FiniteLinkage)
    assert isinstance(pa.build_gallery("roofed-cadelniza"), pa.PeriodicFramework)
    assert isinstance(pa.build_gallery("lk", k=3), pa.FiniteLinkage)
    with pytest.raises(ValueError):
        pa.build_gallery("moebius")
