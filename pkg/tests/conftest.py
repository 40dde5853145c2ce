import random

import pytest

from homrep.surface import build_surface, jacobs_ladder, loch_ness, punctured_sphere

# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def model(core_genus, kinds):
    """``model(1, "NPP")``: core genus 1, one nonplanar end and two punctures."""
    return build_surface(core_genus, [{"N": "nonplanar", "P": "puncture"}[c] for c in kinds])


@pytest.fixture
def LN():
    return loch_ness()


@pytest.fixture
def JL():
    return jacobs_ladder()


@pytest.fixture
def P4():
    return punctured_sphere(4)


@pytest.fixture
def T2():
    """Twice-punctured torus."""
    return model(1, "PP")


@pytest.fixture
def rng():
    return random.Random(20261016)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
