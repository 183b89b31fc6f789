import math

import numpy as np
import pytest
from hypothesis import strategies as st

from thermoform.errors import InputError
from thermoform.sft import is_primitive, validate

GOLDEN = (1 + math.sqrt(5)) / 2

CATMAP_CODING = [
    [1, 1, 0, 1, 0],
    [1, 1, 0, 1, 0],
    [1, 1, 0, 1, 0],
    [0, 0, 1, 0, 1],
    [0, 0, 1, 0, 1],
]


def full_shift(n):
    return validate(np.ones((n, n), dtype=int))


def random_primitive(n, seed, density=0.6):
    rng = np.random.default_rng(seed)
    while True:
        raw = (rng.random((n, n)) < density).astype(int)
        try:
            A = validate(raw)
        except InputError:
            continue
        if is_primitive(A)[0]:
            return A


@pytest.fixture
def full2():
    return full_shift(2)


@pytest.fixture
def golden():
    return validate([[1, 1], [1, 0]])


@pytest.fixture
def catmap_coding():
    return validate(CATMAP_CODING)


@pytest.fixture
def random4():
    return random_primitive(4, seed=2024)


@st.composite
def primitive_matrices(draw, max_n=4):
    """Random primitive 0/1 matrices (rejection-sampled)."""
    n = draw(st.integers(1, max_n))
    bits = draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    raw = np.array(bits, dtype=int).reshape(n, n)
    try:
        A = validate(raw)
    except InputError:
        A = None
    from hypothesis import assume

    assume(A is not None and is_primitive(A)[0])
    return A


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
