import math

import pytest

from desksim.worldmap import GridMap, extract_path_network, generate_random_map
from desksim.worldmap.generate import _lay_ring


@pytest.fixture(scope="session")
def ring2_map():
    """Minimal circuit: a 2x2 ring of four turn cells (no straights)."""
    m = GridMap(2, 2, environment_style="desert", seed=0)
    _lay_ring(m, 0, 0, 1, 1)
    m.validate()
    return m


@pytest.fixture(scope="session")
def ring2_network(ring2_map):
    return extract_path_network(ring2_map)


@pytest.fixture(scope="session")
def small_map():
    return generate_random_map(7, 8, 8)


@pytest.fixture(scope="session")
def small_network(small_map):
    return extract_path_network(small_map)


@pytest.fixture(scope="session")
def obstacle_map():
    """12x12 desert map whose circuit carries lane-blocking obstacles."""
    for seed in range(200, 260):
        m = generate_random_map(seed, 12, 12, obstacle_density=0.6)
        if extract_path_network(m).obstacles:
            return m
    raise RuntimeError("no obstacle map found in seed range")
