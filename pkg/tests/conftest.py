"""Shared fixtures: the bundled corpus maps and one synthesized map that
several suites exercise (built once per session; synthesis is exact, so the
result is deterministic)."""

from fractions import Fraction

import pytest

from escapemaps import (
    PARTIAL,
    FOUR_INTERVAL_MARKOV,
    SynthesisSpec,
    four_interval_document,
    four_interval_map,
    four_interval_reaching_map,
    full_two_interval_map,
    synthesize,
)

F = Fraction


@pytest.fixture(scope="session")
def four_doc():
    return four_interval_document()


@pytest.fixture(scope="session")
def four_map():
    return four_interval_map()


@pytest.fixture(scope="session")
def reaching_map():
    return four_interval_reaching_map()


@pytest.fixture(scope="session")
def full2_map():
    return full_two_interval_map()


@pytest.fixture(scope="session")
def partial_spec():
    return SynthesisSpec(
        markov=FOUR_INTERVAL_MARKOV,
        escape=((1,), (0,), (0,), (1,)),
        mode=PARTIAL,
    )


@pytest.fixture(scope="session")
def partial_result(partial_spec):
    return synthesize(partial_spec)


@pytest.fixture(scope="session")
def partial_map(partial_result):
    return partial_result.map
