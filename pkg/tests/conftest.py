"""Shared fixtures: the bundled example systems and a few tiny helpers."""

import math

import pytest

from carpetdim.fixtures import (
    bipartite_fiber,
    column_carpet_21,
    fibonacci_fiber,
    full_torus,
    linear_lift_growth,
    parity_oscillation,
)
from carpetdim.sft import FactorSystem, Sft, induced_factor

# Exponent used throughout for the (l=3, m=2) geometry.
THETA_32 = math.log(2) / math.log(3)


def make_factor(symbols, edges, letter_map) -> FactorSystem:
    """One-call construction of a factor system from plain literals."""
    return induced_factor(Sft.from_edges(symbols, edges), letter_map)


@pytest.fixture
def parity() -> FactorSystem:
    return parity_oscillation()


@pytest.fixture
def bipartite() -> FactorSystem:
    return bipartite_fiber()


@pytest.fixture
def fibonacci() -> FactorSystem:
    return fibonacci_fiber()


@pytest.fixture
def linear_lift() -> FactorSystem:
    return linear_lift_growth()


@pytest.fixture(params=["parity", "bipartite", "fibonacci", "linear_lift"])
def any_fixture(request) -> FactorSystem:
    builders = {
        "parity": parity_oscillation,
        "bipartite": bipartite_fiber,
        "fibonacci": fibonacci_fiber,
        "linear_lift": linear_lift_growth,
    }
    return builders[request.param]()


@pytest.fixture
def carpet_21():
    return column_carpet_21()


@pytest.fixture
def torus_32():
    return full_torus(3, 2)


@pytest.fixture
def identity_system() -> FactorSystem:
    """A factor system whose letter map is a bijection (trivial fibers)."""
    return make_factor(
        ["a", "b"],
        [("a", "a"), ("a", "b"), ("b", "a")],
        {"a": "a", "b": "b"},
    )
