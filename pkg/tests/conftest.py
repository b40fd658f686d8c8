import numpy as np
import pytest

import periodica as pa


@pytest.fixture(scope="session")
def arrowhead():
    return pa.double_arrowhead()


@pytest.fixture(scope="session")
def arrowhead_framework(arrowhead):
    return pa.to_periodic(arrowhead)


@pytest.fixture(scope="session")
def cad():
    return pa.cadelniza(3)


@pytest.fixture(scope="session")
def cad_framework(cad):
    return pa.to_periodic(cad.linkage)


@pytest.fixture(scope="session")
def paneled2():
    return pa.paneled_simplex(2)


@pytest.fixture(scope="session")
def paneled3():
    return pa.paneled_simplex(3)


@pytest.fixture(scope="session")
def roofed():
    return pa.roofed_cadelniza()


@pytest.fixture(scope="session")
def lk3():
    return pa.gallery_lk(3)


@pytest.fixture(scope="session")
def lk3_framework(lk3):
    return pa.to_periodic(lk3.linkage)


def rigid_simplex(d):
    """Complete graph on d + 1 affinely independent points."""
    rng = np.random.default_rng(90 + d)
    positions = np.vstack([np.zeros(d), np.eye(d)]) + 0.05 * rng.standard_normal((d + 1, d))
    edges = [(i, j) for i in range(d + 1) for j in range(i + 1, d + 1)]
    pairs = [(0, k) for k in range(1, d + 1)]
    return pa.build_linkage(d, positions, edges, pairs)


@pytest.fixture(scope="session")
def gallery_linkages(arrowhead, cad, paneled2, paneled3, lk3):
    """Named finite gallery members satisfying the conversion prerequisites."""
    return {
        "double-arrowhead": arrowhead,
        "cadelniza": cad.linkage,
        "paneled-simplex-2": paneled2.linkage,
        "paneled-simplex-3": paneled3.linkage,
        "lk-3": lk3.linkage,
        "lk-4": pa.gallery_lk(4).linkage,
    }


@pytest.fixture(scope="session")
def gallery_frameworks(gallery_linkages, roofed):
    frameworks = {name: pa.to_periodic(linkage)
                  for name, linkage in gallery_linkages.items()}
    frameworks["roofed-cadelniza"] = roofed
    return frameworks
