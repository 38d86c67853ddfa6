import numpy as np
import pytest

import skdist as sk


@pytest.fixture(scope="session")
def corpus():
    return sk.load_corpus(verify=False)


@pytest.fixture
def mix_corr_uncorr(corpus):
    return corpus["mix-corr-uncorr"].distribution


@pytest.fixture
def ubi_demo(corpus):
    return corpus["ubi-demo"].distribution


@pytest.fixture
def perfect_bit(corpus):
    return corpus["perfect-bit"].distribution


@pytest.fixture
def fig4_demo(corpus):
    return corpus["fig4-demo"].distribution


@pytest.fixture
def binary_symmetric():
    """X uniform, Y = X flipped w.p. 1/4, Z independent of both."""
    p = np.zeros((2, 2, 2))
    for x in range(2):
        for y in range(2):
            p[x, y, :] = (0.375 if x == y else 0.125) / 2
    return sk.TripartiteDistribution.from_array(p)


@pytest.fixture
def fast_options():
    return sk.SolverOptions(restarts=2, iterations=300)
