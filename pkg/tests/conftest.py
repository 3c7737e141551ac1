import itertools

import pytest


def all_dims(max_count: int, max_hops: int):
    """Every dimension with entries <= max_count and at most max_hops hops."""
    for n_hops in range(1, max_hops + 1):
        for counts in itertools.product(range(1, max_count + 1), repeat=n_hops + 1):
            yield counts


@pytest.fixture(scope="session")
def dims_to_5_4():
    return list(all_dims(5, 4))


@pytest.fixture(scope="session")
def dims_to_4_3():
    return list(all_dims(4, 3))


@pytest.fixture(scope="session")
def dims_to_3_3():
    return list(all_dims(3, 3))
