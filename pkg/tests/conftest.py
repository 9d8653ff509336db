import numpy as np
import pytest

from diraclab.clifford import build_clifford
from diraclab.fields import GridSpec


@pytest.fixture(scope="session")
def rep2():
    return build_clifford(2)


@pytest.fixture(scope="session")
def rep3():
    return build_clifford(3)


@pytest.fixture(scope="session")
def grid2():
    return GridSpec(2, np.pi, 64)


def rel_err(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    den = np.linalg.norm(b.ravel())
    return np.linalg.norm((a - b).ravel()) / (den if den else 1.0)
