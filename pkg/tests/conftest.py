import math
from pathlib import Path

import numpy as np
import pytest

from sunada_zeta import geoflow as gf
from sunada_zeta import groups as gr

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

G168_GENS = ["(0 1 2 3 4 5 6)", "(0 1)(2 5)"]
FANO_LINE = frozenset({0, 1, 3})


@pytest.fixture(scope="session")
def s3():
    return gr.parse_group(["(0 1 2)", "(0 1)"], 3)


@pytest.fixture(scope="session")
def g168():
    return gr.parse_group(G168_GENS, 7)


@pytest.fixture(scope="session")
def point_stab(g168):
    return gr.Subgroup(g168, [i for i, p in enumerate(g168.elements) if p[0] == 0])


@pytest.fixture(scope="session")
def line_stab(g168):
    return gr.Subgroup(
        g168,
        [
            i
            for i, p in enumerate(g168.elements)
            if frozenset(p[s] for s in FANO_LINE) == FANO_LINE
        ],
    )


@pytest.fixture(scope="session")
def torus_z2():
    return gf.FlatTorus(np.eye(2))


@pytest.fixture(scope="session")
def unit_sphere():
    return gf.RoundSphere(1.0)


@pytest.fixture(scope="session")
def revolution():
    return gf.SurfaceOfRevolution(gf.RevolutionProfile(2.0, 1.0))


@pytest.fixture(scope="session")
def inner_equator(revolution):
    p0 = gf.PhasePoint.of([math.pi, 0.0], [0.0, 1.0])
    return gf.orbit_from_start(revolution, p0, 2 * math.pi, 2 * math.pi)
