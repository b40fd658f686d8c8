"""Versioned JSON documents for linkages and frameworks, plus OBJ export.

Documents are plain JSON objects with a ``version`` field (currently 1) and
a ``kind`` of ``"linkage"`` or ``"framework"``.  Numbers are emitted with 17
significant digits so serialization round-trips float64 exactly; parsing a
canonical document and serializing it again reproduces the same text.
"""

from __future__ import annotations

import itertools
import json
import math
from typing import Union

import numpy as np

from .errors import SchemaError, UnsupportedDimension, VersionUnsupported
from .geometry import (
    FiniteLinkage,
    PeriodicFramework,
    build_framework,
    build_linkage,
)

DOCUMENT_VERSION = 1

Structure = Union[FiniteLinkage, PeriodicFramework]


# ---------------------------------------------------------------------------
# serialization


def _format_number(x) -> str:
    if isinstance(x, bool):
        raise TypeError("unexpected boolean in numeric field")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _emit(value, indent: int) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f'{pad}  "{k}": {_emit(v, indent + 1)}' for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        flat = all(isinstance(v, (int, float, np.integer, np.floating)) for v in value)
        if flat:
            return "[" + ", ".join(_format_number(v) for v in value) + "]"
        items = [f"{pad}  {_emit(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (int, float, np.integer, np.floating)):
        return _format_number(value)
    raise TypeError(f"cannot serialize {type(value)!r}")


def linkage_document(linkage: FiniteLinkage) -> dict:
    return {
        "version": DOCUMENT_VERSION,
        "kind": "linkage",
        "dimension": linkage.dimension,
        "vertices": [list(p) for p in linkage.positions],
        "edges": [list(e) for e in linkage.edges],
        "marked_pairs": [list(p) for p in linkage.marked_pairs],
    }


def framework_document(framework: PeriodicFramework) -> dict:
    return {
        "version": DOCUMENT_VERSION,
        "kind": "framework",
        "dimension": framework.dimension,
        "lattice": list(framework.lattice.ravel(order="F")),
        "vertex_orbits": [list(p) for p in framework.positions],
        "edge_orbits": [
            {"u": e.u, "v": e.v, "shift": list(e.shift)} for e in framework.edge_orbits
        ],
    }


def serialize(structure: Structure) -> str:
    """Canonical document text for a linkage or framework."""
    if isinstance(structure, PeriodicFramework):
        doc = framework_document(structure)
    else:
        doc = linkage_document(structure)
    return _emit(doc, 0) + "\n"


# ---------------------------------------------------------------------------
# parsing


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise SchemaError(f"{path}.{key}", "missing required field")
    return doc[key]


def _as_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(path, f"expected an integer, got {value!r}")
    return value


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise SchemaError(path, "number must be finite")
    return float(value)


def _as_list(value, path: str) -> list:
    if not isinstance(value, list):
        raise SchemaError(path, f"expected an array, got {type(value).__name__}")
    return value


def _vector_list(value, path: str, width: int) -> list:
    rows = []
    for i, row in enumerate(_as_list(value, path)):
        row = _as_list(row, f"{path}[{i}]")
        if len(row) != width:
            raise SchemaError(f"{path}[{i}]", f"expected {width} entries, got {len(row)}")
        rows.append([_as_number(x, f"{path}[{i}][{j}]") for j, x in enumerate(row)])
    return rows


def _pair_list(value, path: str) -> list:
    pairs = []
    for i, row in enumerate(_as_list(value, path)):
        row = _as_list(row, f"{path}[{i}]")
        if len(row) != 2:
            raise SchemaError(f"{path}[{i}]", f"expected 2 entries, got {len(row)}")
        pairs.append([_as_int(x, f"{path}[{i}][{j}]") for j, x in enumerate(row)])
    return pairs


def parse_document(text: Union[str, dict]) -> Structure:
    """Parse a document (text or already-decoded JSON) into a validated
    linkage or framework.

    Raises
    ------
    SchemaError
        With the JSON path of the offending field.
    VersionUnsupported
        If the version field is not 1.
    """
    if isinstance(text, (dict, list)):
        doc = text
    else:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected a JSON object")

    version = _as_int(_require(doc, "version", "$"), "$.version")
    if version != DOCUMENT_VERSION:
        raise VersionUnsupported(f"document version {version} is not supported")
    kind = _require(doc, "kind", "$")
    if kind not in ("linkage", "framework"):
        raise SchemaError("$.kind", f"expected 'linkage' or 'framework', got {kind!r}")
    d = _as_int(_require(doc, "dimension", "$"), "$.dimension")
    if d < 2:
        raise SchemaError("$.dimension", "dimension must be at least 2")

    if kind == "linkage":
        vertices = _vector_list(_require(doc, "vertices", "$"), "$.vertices", d)
        edges = _pair_list(_require(doc, "edges", "$"), "$.edges")
        pairs = _pair_list(_require(doc, "marked_pairs", "$"), "$.marked_pairs")
        return build_linkage(d, vertices, edges, pairs)

    lattice_flat = _as_list(_require(doc, "lattice", "$"), "$.lattice")
    if len(lattice_flat) != d * d:
        raise SchemaError("$.lattice", f"expected {d * d} entries, got {len(lattice_flat)}")
    lattice = np.array(
        [_as_number(x, f"$.lattice[{i}]") for i, x in enumerate(lattice_flat)]
    ).reshape(d, d, order="F")
    orbits_doc = _as_list(_require(doc, "vertex_orbits", "$"), "$.vertex_orbits")
    positions = _vector_list(orbits_doc, "$.vertex_orbits", d)
    edge_orbits = []
    for i, item in enumerate(_as_list(_require(doc, "edge_orbits", "$"), "$.edge_orbits")):
        path = f"$.edge_orbits[{i}]"
        if not isinstance(item, dict):
            raise SchemaError(path, "expected an object")
        u = _as_int(_require(item, "u", path), f"{path}.u")
        v = _as_int(_require(item, "v", path), f"{path}.v")
        shift = [_as_int(x, f"{path}.shift[{j}]")
                 for j, x in enumerate(_as_list(_require(item, "shift", path), f"{path}.shift"))]
        if len(shift) != d:
            raise SchemaError(f"{path}.shift", f"expected {d} entries, got {len(shift)}")
        edge_orbits.append((u, v, shift))
    return build_framework(d, positions, lattice, edge_orbits)


# ---------------------------------------------------------------------------
# OBJ export


def export_obj(framework: PeriodicFramework, cells: int) -> str:
    """Wireframe OBJ text of a block of ``cells``^d unit cells.

    Vertices are every orbit representative translated by the lattice shifts
    in {0 .. cells-1}^d; a line element is written for each edge-orbit
    translate whose endpoints both fall inside the block.  Planar frameworks
    are embedded at z = 0.  Ordering is deterministic: shifts in
    lexicographic order, orbits within each shift.
    """
    cells = int(cells)
    if cells < 1:
        raise ValueError("cells must be at least 1")
    d = framework.dimension
    if d not in (2, 3):
        raise UnsupportedDimension(f"OBJ export supports d in {{2, 3}}, got {d}")

    index = {}
    lines = ["# wireframe fragment: periodic framework block"]
    counter = 0
    for shift in itertools.product(range(cells), repeat=d):
        offset = framework.lattice @ np.asarray(shift, dtype=float)
        for i in range(framework.orbit_count):
            p = framework.positions[i] + offset
            x, y = p[0], p[1]
            z = p[2] if d == 3 else 0.0
            counter += 1
            index[shift + (i,)] = counter
            lines.append(f"v {x:.17g} {y:.17g} {z:.17g}")
    for shift in itertools.product(range(cells), repeat=d):
        for orbit in framework.edge_orbits:
            target = tuple(s + t for s, t in zip(shift, orbit.shift))
            if all(0 <= t < cells for t in target):
                a = index[shift + (orbit.u,)]
                b = index[target + (orbit.v,)]
                lines.append(f"l {a} {b}")
    return "\n".join(lines) + "\n"
