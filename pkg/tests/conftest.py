import numpy as np
import pytest

from fracbvp.bvp import ProblemSpec
from fracbvp.greens import cone_constants, greens_matrix

V, B = 8.0 / 3.0, 9


def example_phi(which: int) -> list[float]:
    coeffs = [0.0] * (B + 4)
    if which == 1:
        coeffs[2] = 3.0
        coeffs[5] = 2.5
    else:
        coeffs[1] = 7.0
        coeffs[6] = -2.0
    return coeffs


def example_spec(which: int, lam: float = 1.0) -> ProblemSpec:
    if which == 1:
        return ProblemSpec.from_strings(V, B, lam, "t^2", "y*(exp(y)-1)", example_phi(1))
    return ProblemSpec.from_strings(V, B, lam, "exp(t)", "sec(y)^2", example_phi(2))


@pytest.fixture(scope="session")
def G_main():
    return greens_matrix(V, B)


@pytest.fixture(scope="session")
def cc_main(G_main):
    return cone_constants(G_main)


@pytest.fixture
def ex1_spec():
    return example_spec(1)


@pytest.fixture
def ex2_spec():
    return example_spec(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
