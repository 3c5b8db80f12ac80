import pytest

from qrggsim import ConnectionModel, RandomStream, from_edges

FIG3_MODEL = ConnectionModel(r=0.1, r_prime=0.2, kernel="fixed", p=0.5)

# 4-relay, 2-terminal graph whose per-terminal flows orient edge (2, 3) in
# opposite directions, so the orientation union is cyclic.
CYCLIC_EDGES = [(0, 2), (0, 3), (1, 3), (1, 6), (2, 3), (2, 4), (2, 5), (3, 6), (4, 5)]


@pytest.fixture
def fig3_model():
    return FIG3_MODEL


@pytest.fixture
def rng():
    return RandomStream.from_seed(12345)


@pytest.fixture
def cyclic_graph():
    return from_edges(4, 2, CYCLIC_EDGES)
