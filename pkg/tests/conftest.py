import pytest

from ermakov_sta.gpe import Grid, ground_state_imaginary_time


@pytest.fixture(scope="session")
def grid():
    return Grid()


@pytest.fixture(scope="session")
def ground_states(grid):
    """Imaginary-time ground states keyed by (u, gN), computed once per session."""
    cache = {}

    def get(u, g_n):
        key = (u, g_n)
        if key not in cache:
            cache[key] = ground_state_imaginary_time(u, g_n, grid)
        return cache[key]
    return get
