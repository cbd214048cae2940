import math

import pytest

from formdec import GridSpec, build_grid

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def t2_flat():
    return build_grid(GridSpec(2, (64, 64), (TWO_PI, TWO_PI), (1, 1)))


@pytest.fixture(scope="session")
def t2_embedded():
    return build_grid(
        GridSpec(2, (128, 128), (TWO_PI, TWO_PI), (1, 1), metric="embedded-torus", R=2.0, r=1.0)
    )


@pytest.fixture(scope="session")
def t4_mink():
    return build_grid(GridSpec(4, (12,) * 4, (TWO_PI,) * 4, (-1, 1, 1, 1)))
