import itertools
import json

import numpy as np
import pytest

import periodica as pa


def test_linkage_round_trip(arrowhead):
    text = pa.serialize(arrowhead)
    back = pa.parse_document(text)
    assert isinstance(back, pa.FiniteLinkage)
    assert np.array_equal(back.positions, arrowhead.positions)
    assert back.edges == arrowhead.edges
    assert back.marked_pairs == arrowhead.marked_pairs
    assert pa.serialize(back) == text


def test_framework_round_trip(cad_framework):
    text = pa.serialize(cad_framework)
    back = pa.parse_document(text)
    assert isinstance(back, pa.PeriodicFramework)
    assert np.array_equal(back.positions, cad_framework.positions)
    assert np.array_equal(back.lattice, cad_framework.lattice)
    assert back.edge_orbits == cad_framework.edge_orbits
    assert pa.serialize(back) == text


def test_round_trip_all_gallery(gallery_linkages, gallery_frameworks):
    for structure in list(gallery_linkages.values()) + list(gallery_frameworks.values()):
        text = pa.serialize(structure)
        assert pa.serialize(pa.parse_document(text)) == text


def test_seventeen_digit_floats_survive():
    values = [np.pi, 1.0 / 3.0, 1e-17, 123456.789012345678]
    linkage = pa.build_linkage(
        2, [(0.0, 0.0), (values[0], values[1]), (values[2], values[3])],
        [(0, 1), (1, 2), (0, 2)], [(0, 1), (0, 2)])
    back = pa.parse_document(pa.serialize(linkage))
    assert np.array_equal(back.positions, linkage.positions)


def test_missing_marked_pairs_reports_path(arrowhead):
    doc = pa.linkage_document(arrowhead)
    del doc["marked_pairs"]
    with pytest.raises(pa.SchemaError) as info:
        pa.parse_document(json.dumps(doc))
    assert info.value.path == "$.marked_pairs"


def test_bad_entry_paths(arrowhead):
    doc = pa.linkage_document(arrowhead)
    doc["vertices"][1][0] = "oops"
    with pytest.raises(pa.SchemaError) as info:
        pa.parse_document(doc)
    assert info.value.path == "$.vertices[1][0]"


def test_nonfinite_rejected(arrowhead):
    doc = json.loads(pa.serialize(arrowhead).replace("0.40000000000000002", "NaN"))
    with pytest.raises(pa.SchemaError):
        pa.parse_document(doc)


def test_unsupported_version(arrowhead):
    doc = pa.linkage_document(arrowhead)
    doc["version"] = 2
    with pytest.raises(pa.VersionUnsupported):
        pa.parse_document(doc)


def test_unknown_kind(arrowhead):
    doc = pa.linkage_document(arrowhead)
    doc["kind"] = "mesh"
    with pytest.raises(pa.SchemaError) as info:
        pa.parse_document(doc)
    assert info.value.path == "$.kind"


def test_invalid_json_text():
    with pytest.raises(pa.SchemaError):
        pa.parse_document("{not json")


def test_framework_shift_length_checked(cad_framework):
    doc = pa.framework_document(cad_framework)
    doc["edge_orbits"][0]["shift"] = [1, 0]
    with pytest.raises(pa.SchemaError) as info:
        pa.parse_document(doc)
    assert info.value.path == "$.edge_orbits[0].shift"


def test_reanalysis_after_round_trip(cad_framework):
    back = pa.parse_document(pa.serialize(cad_framework))
    assert pa.periodic_dof(back) == pa.periodic_dof(cad_framework)
    a = pa.strict_direction(pa.deformation_basis(back))
    b = pa.strict_direction(pa.deformation_basis(cad_framework))
    assert a.found == b.found
    assert a.lambda_min == pytest.approx(b.lambda_min, abs=1e-12)


# ---------------------------------------------------------------------------
# OBJ export


def brute_force_counts(framework, cells):
    """Oracle: enumerate all vertex and edge translates of the block."""
    d = framework.dimension
    vertices = set()
    edges = set()
    for shift in itertools.product(range(cells), repeat=d):
        for i in range(framework.orbit_count):
            vertices.add(shift + (i,))
    for shift in itertools.product(range(cells), repeat=d):
        for orbit in framework.edge_orbits:
            target = tuple(s + t for s, t in zip(shift, orbit.shift))
            if all(0 <= t < cells for t in target):
                edges.add((shift + (orbit.u,), target + (orbit.v,)))
    return len(vertices), len(edges)


def parse_obj(text):
    vertex_lines = [l for l in text.splitlines() if l.startswith("v ")]
    edge_lines = [l for l in text.splitlines() if l.startswith("l ")]
    return vertex_lines, edge_lines


def test_export_single_orbit_no_edges():
    framework = pa.PeriodicFramework(
        dimension=3, positions=np.zeros((1, 3)), lattice=np.eye(3), edge_orbits=())
    vertex_lines, edge_lines = parse_obj(pa.export_obj(framework, 2))
    assert len(vertex_lines) == 8
    assert len(edge_lines) == 0


def test_export_arrowhead_counts(arrowhead_framework):
    text = pa.export_obj(arrowhead_framework, 3)
    vertex_lines, edge_lines = parse_obj(text)
    nv, ne = brute_force_counts(arrowhead_framework, 3)
    assert len(vertex_lines) == nv == 18
    assert len(edge_lines) == ne


def test_export_cadelniza_counts(cad_framework):
    for cells in (1, 2, 3):
        vertex_lines, edge_lines = parse_obj(pa.export_obj(cad_framework, cells))
        nv, ne = brute_force_counts(cad_framework, cells)
        assert len(vertex_lines) == nv
        assert len(edge_lines) == ne


def test_export_planar_embedded_at_zero(arrowhead_framework):
    vertex_lines, _ = parse_obj(pa.export_obj(arrowhead_framework, 2))
    for line in vertex_lines:
        assert line.split()[-1] == "0"


def test_export_line_indices_valid(cad_framework):
    text = pa.export_obj(cad_framework, 2)
    vertex_lines, edge_lines = parse_obj(text)
    for line in edge_lines:
        _, a, b = line.split()
        assert 1 <= int(a) <= len(vertex_lines)
        assert 1 <= int(b) <= len(vertex_lines)


def test_export_rejects_unsupported_dimension():
    framework = pa.PeriodicFramework(
        dimension=4, positions=np.zeros((1, 4)), lattice=np.eye(4), edge_orbits=())
    with pytest.raises(pa.UnsupportedDimension):
        pa.export_obj(framework, 1)


def test_export_rejects_bad_cells(arrowhead_framework):
    with pytest.raises(ValueError):
        pa.export_obj(arrowhead_framework, 0)


def test_export_deterministic(cad_framework):
    assert pa.export_obj(cad_framework, 2) == pa.export_obj(cad_framework, 2)
