from fractions import Fraction

import pytest

from frugal.graph import Graph


@pytest.fixture
def triangle():
    return Graph.build(["a", "b", "c"],
                       [("ab", "a", "b"), ("bc", "b", "c"), ("ca", "c", "a")],
                       directed=False)


@pytest.fixture
def star():
    """K_{1,3} with center c."""
    return Graph.build(["c", "l1", "l2", "l3"],
                       [("e1", "c", "l1"), ("e2", "c", "l2"),
                        ("e3", "c", "l3")],
                       directed=False)


@pytest.fixture
def three_flow():
    """A minimally 3-connected s-t network: a direct edge plus two
    two-hop paths. Pruning at k=2 keeps all five edges."""
    return Graph.build(
        ["s", "a", "b", "t"],
        [("u", "s", "t"), ("v", "s", "a"), ("w", "s", "b"),
         ("x", "a", "t"), ("y", "b", "t")],
        directed=True, source="s", sink="t")


@pytest.fixture
def path_graph():
    return Graph.build(
        ["s", "a", "b", "t"],
        [("sa", "s", "a"), ("ab", "a", "b"), ("bt", "b", "t")],
        directed=True, source="s", sink="t")


@pytest.fixture
def path_costs():
    return {"sa": Fraction(1), "ab": Fraction(5), "bt": Fraction(2)}


@pytest.fixture
def diamond():
    return Graph.build(
        ["s", "a", "b", "t"],
        [("sa", "s", "a"), ("at", "a", "t"),
         ("sb", "s", "b"), ("bt", "b", "t")],
        directed=True, source="s", sink="t")
