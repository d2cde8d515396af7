import logging

import numpy as np
import pytest

from models.count_models import CountModel
from models.solver_models import SolverOptions


def columns(*bits: str) -> np.ndarray:
    """Pattern matrix (n x q) from column bit strings such as "1100"."""
    return np.asarray([[int(c) for c in column] for column in bits], dtype=int).T


def pattern(bits: str):
    return tuple(int(c) for c in bits)


def central_difference(f, x, h=1e-6):
    """Gradient of f in the chart x_{-n}: moving x_i moves x_n the other way."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros(x.size - 1)
    for i in range(x.size - 1):
        up, down = x.copy(), x.copy()
        up[i] += h
        up[-1] -= h
        down[i] -= h
        down[-1] += h
        grad[i] = (f(up) - f(down)) / (2 * h)
    return grad


@pytest.fixture(autouse=True)
def restore_root_logging():
    """Commands reconfigure the root logger; undo it after each test."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


PLAYBOARD_P = (0.2288, 0.3126, 0.3153, 0.1433)
PLAYBOARD_TAU0 = 87.41
PLAYBOARD_TAU = (22.17, 17.44, 44.11, 30.71, -35.04, -13.44, -4.36)


@pytest.fixture
def intro_model():
    return CountModel.from_arrays([2, 2, 2], [4], columns("110"))


@pytest.fixture
def playboard_model():
    return CountModel.from_arrays(
        [23, 41, 40, 17],
        [12, 8, 24, 14, -22, -5, -3],
        columns("1100", "0011", "1010", "0101", "0110", "1001", "1011"),
    )


@pytest.fixture
def multinomial_model():
    return CountModel.from_arrays([3, 7], [], np.zeros((2, 0), dtype=int))


@pytest.fixture
def shared_mle_model():
    # x1^2 x2^3 x3^5 (x1+x2)^-4
    return CountModel.from_arrays([2, 3, 5], [-4], columns("110"))


@pytest.fixture
def abcd_model():
    # a^2 b^3 c^4 d^5 / ((a+b)^4 (c+d)^6)
    return CountModel.from_arrays([2, 3, 4, 5], [-4, -6], columns("1100", "0011"), ions=["a", "b", "c", "d"])


@pytest.fixture
def pi1_model():
    return CountModel.from_arrays(
        [4, 6, 8, 10, 12],
        [5, 15, -9, -11],
        columns("11000", "00111", "11100", "00011"),
    )


@pytest.fixture
def assembly_model():
    return CountModel.from_arrays(
        [4, 10, 9, 24],
        [6, 8, 10, 14, -6, -9],
        columns("1100", "1010", "0110", "0011", "1110", "0111"),
    )


def regularity_kernel(first_exponent: float, with_x5: bool = True) -> CountModel:
    """x1^100..x4^100 [x5] (x1+x2)(x3+x4)^20 / ((x1+x2+x3)^e (x2+x3+x4)^220)."""
    if with_x5:
        return CountModel.from_arrays(
            [100, 100, 100, 100, 1],
            [1, 20, -first_exponent, -220],
            columns("11000", "00110", "11100", "01110"),
        )
    return CountModel.from_arrays(
        [100, 100, 100, 100],
        [1, 20, -first_exponent, -220],
        columns("1100", "0011", "1110", "0111"),
    )


@pytest.fixture
def regular_kernel():
    return regularity_kernel(200)


@pytest.fixture
def irregular_kernel():
    return regularity_kernel(202)


@pytest.fixture
def exhaustive_kernel():
    return regularity_kernel(202, with_x5=False)


PING_PONG = """A,B,21,16
C,D,18,21
A,E,19,21
B,C,25,27
D,E,22,20
A,D,21,18
"""


@pytest.fixture
def ping_pong_text():
    return PING_PONG


@pytest.fixture
def tight_options():
    return SolverOptions(sse_tolerance=1e-20, max_iterations=20000)
