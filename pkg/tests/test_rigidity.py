import numpy as np
import pytest

import periodica as pa
from conftest import rigid_simplex


def svd_rank(matrix, rtol=1e-9):
    s = np.linalg.svd(matrix, compute_uv=False)
    return int(np.sum(s >= rtol * max(matrix.shape) * s[0]))


def test_single_bar_row():
    linkage = pa.build_linkage(2, [(0.0, 0.0), (1.0, 0.0), (0.4, 0.8)],
                               [(0, 1), (1, 2), (0, 2)], [(0, 1), (0, 2)])
    row = pa.finite_rigidity_matrix(linkage)[0]
    assert np.array_equal(row, [-1.0, 0.0, 1.0, 0.0, 0.0, 0.0])


def test_triangle_rank_three():
    triangle = rigid_simplex(2)
    r = pa.finite_rigidity_matrix(triangle)
    assert r.shape == (3, 6)
    assert svd_rank(r) == 3


def test_arrowhead_matrix_rank(arrowhead):
    r = pa.finite_rigidity_matrix(arrowhead)
    assert r.shape == (4, 8)
    assert svd_rank(r) == 4


def test_arrowhead_finite_dof(arrowhead):
    assert pa.finite_dof(arrowhead) == (1, True)


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_lk_finite_dof(k):
    lk = pa.gallery_lk(k)
    assert lk.linkage.vertex_count == 3 * k + 2
    assert lk.linkage.edge_count == 9 * k - 1
    assert pa.finite_dof(lk.linkage) == (1, True)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_rigid_simplex_dof(d):
    assert pa.finite_dof(rigid_simplex(d)) == (0, True)


def test_degenerate_placement_rejected():
    # bypass the factory: collinear placement with formally independent pairs
    positions = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    linkage = pa.FiniteLinkage(
        dimension=2, positions=positions, edges=((0, 1), (1, 2)),
        lengths=np.array([1.0, 1.0]), marked_pairs=((0, 1), (0, 2)))
    with pytest.raises(pa.DegeneratePlacement):
        pa.finite_dof(linkage)


def test_single_orbit_row():
    framework = pa.build_framework(2, [(0.0, 0.0)], np.eye(2), [(0, 0, (1, 0))])
    row = pa.periodic_rigidity_matrix(framework)[0]
    assert np.array_equal(row, [0.0, 0.0, 1.0, 0.0, 0.0, 0.0])


def test_arrowhead_periodic_matrix(arrowhead_framework):
    r = pa.periodic_rigidity_matrix(arrowhead_framework)
    assert r.shape == (4, 8)
    assert svd_rank(r) == 4


def test_cadelniza_periodic_matrix(cad_framework):
    r = pa.periodic_rigidity_matrix(cad_framework)
    assert r.shape == (6, 15)
    assert svd_rank(r) == 6


def test_periodic_dof_values(cad_framework, arrowhead_framework, roofed):
    assert pa.periodic_dof(cad_framework) == (3, True)
    assert pa.periodic_dof(arrowhead_framework) == (1, True)
    assert pa.periodic_dof(roofed) == (1, True)


def test_rank_tolerance_guard():
    with pytest.raises(pa.RankToleranceAmbiguous):
        pa.matrix_rank(np.diag([1.0, 2e-9]))


def test_rigid_simplex_basis_empty():
    space = pa.deformation_basis(rigid_simplex(3))
    assert space.dof == 0
    assert space.basis == ()
    assert space.independent


def test_basis_dimensions(arrowhead_framework, cad_framework):
    assert pa.deformation_basis(arrowhead_framework).dof == 1
    assert len(pa.deformation_basis(cad_framework).basis) == 3


def test_basis_orthonormal(cad_framework):
    space = pa.deformation_basis(cad_framework)
    vectors = np.column_stack([x.as_vector() for x in space.basis])
    assert np.allclose(vectors.T @ vectors, np.eye(space.dof), atol=1e-12)


def test_basis_residuals(gallery_frameworks, gallery_linkages):
    for structure in list(gallery_frameworks.values()) + list(gallery_linkages.values()):
        space = pa.deformation_basis(structure)
        for flex in space.basis:
            assert pa.flex_residual(structure, flex) <= 1e-10


def test_basis_gauge_conditions(gallery_frameworks):
    for framework in gallery_frameworks.values():
        inv = np.linalg.inv(framework.lattice)
        for flex in pa.deformation_basis(framework).basis:
            assert np.max(np.abs(flex.velocities[0])) <= 1e-12
            m = flex.lattice_velocity @ inv
            assert np.max(np.abs(m - m.T)) <= 1e-10


def test_finite_basis_gauge_conditions(gallery_linkages):
    for linkage in gallery_linkages.values():
        rel = linkage.positions - linkage.positions[0]
        for flex in pa.deformation_basis(linkage).basis:
            assert np.max(np.abs(flex.velocities[0])) <= 1e-12
            assert flex.lattice_velocity is None
            # rotation content about the pinned vertex was projected out
            d = linkage.dimension
            for a in range(d):
                for b in range(a + 1, d):
                    s = np.zeros((d, d))
                    s[a, b], s[b, a] = 1.0, -1.0
                    rotation = (rel @ s.T).ravel()
                    overlap = abs(rotation @ flex.as_vector()) / np.linalg.norm(rotation)
                    assert overlap <= 1e-10


def test_trivial_motions_lie_in_nullspace(gallery_frameworks, gallery_linkages):
    for linkage in gallery_linkages.values():
        r = pa.finite_rigidity_matrix(linkage)
        t = pa.finite_trivial_motions(linkage)
        assert np.max(np.abs(r @ t)) <= 1e-10 * np.linalg.norm(r, 2)
    for framework in gallery_frameworks.values():
        r = pa.periodic_rigidity_matrix(framework)
        t = pa.periodic_trivial_motions(framework)
        assert np.max(np.abs(r @ t)) <= 1e-10 * np.linalg.norm(r, 2)


def test_closed_form_counts_match_rank_counts(gallery_linkages, gallery_frameworks):
    for linkage in gallery_linkages.values():
        f, independent = pa.finite_dof(linkage)
        assert independent
        n, d = linkage.positions.shape
        assert f == n * d - linkage.edge_count - d * (d + 1) // 2
    for framework in gallery_frameworks.values():
        f, independent = pa.periodic_dof(framework)
        assert independent
        n, d = framework.positions.shape
        assert f == n * d - framework.edge_orbit_count + d * (d - 1) // 2


def test_relative_basis_pins_vertices(paneled2):
    flexes = pa.relative_deformation_basis(paneled2.linkage, paneled2.scaffold)
    assert len(flexes) == 2
    for flex in flexes:
        assert np.max(np.abs(flex.velocities[list(paneled2.scaffold)])) <= 1e-10
