import pytest

from noethkit import Chain

# name -> (chain, integrable sample points)
CORPUS = {
    "exp": (Chain.from_strings(1, 1, [["f1"]]), [(0, 1), (1, 3), (-2, 5), (3, -1), (1, 0)]),
    "trig": (Chain.from_strings(1, 2, [["-f2", "f1"]]), [(0, 1, 0), (1, 0, 1), (2, 3, 4), (-1, 1, 1), (5, 0, 0)]),
    "plane": (Chain.trivial(2), [(0, 0), (1, 2), (-1, 3), (2, -2), (4, 1)]),
    "exp2": (Chain.from_strings(2, 1, [["f1"], ["0"]]), [(0, 0, 1), (1, 2, 3), (-1, 0, 2), (2, 2, -1), (0, 5, 7)]),
    "product": (Chain.from_strings(2, 1, [["x2"], ["x1"]]), [(0, 0, 0), (1, 1, 2), (2, -1, 0), (-3, 2, 5), (1, 4, -2)]),
    "riccati": (Chain.from_strings(1, 2, [["f1^2", "f1*f2"]]), [(0, 1, 1), (1, 2, 0), (-1, 1, 3), (2, 0, 1), (0, -1, 2)]),
}


@pytest.fixture(params=sorted(CORPUS))
def corpus_chain(request):
    return CORPUS[request.param]


@pytest.fixture
def exp_chain():
    return CORPUS["exp"][0]


@pytest.fixture
def trig_chain():
    return CORPUS["trig"][0]


@pytest.fixture
def plane():
    return Chain.trivial(2)


@pytest.fixture
def twisted():
    """Non-integrable distribution whose depth-one locus is {x1 = 1}."""
    return Chain.from_strings(2, 1, [["f1"], ["x1"]])
