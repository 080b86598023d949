import itertools
import random

import pytest

from jacobi_kit.extcalc import DiffForm, MultiVector
from jacobi_kit.symcore import Chart, random_poly

ACCEPTANCE_LINES = []


def random_tensor(cls, chart, grade, degree, seed, density=0.7):
    rng = random.Random(seed)
    comps = {}
    for k, idx in enumerate(itertools.combinations(range(chart.dim), grade)):
        if rng.random() < density:
            comps[idx] = random_poly(chart, degree, seed * 101 + k)
    return cls(chart, grade, comps)


def random_mv(chart, grade, degree, seed):
    return random_tensor(MultiVector, chart, grade, degree, seed)


def random_form(chart, grade, degree, seed):
    return random_tensor(DiffForm, chart, grade, degree, seed)


@pytest.fixture
def R3():
    return Chart(["x", "y", "z"])


@pytest.fixture
def R4():
    return Chart(["x", "y", "z", "w"])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
