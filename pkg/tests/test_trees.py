import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_tree
from ibntrees.trees import Tree, check_flow


def test_add_child_depth_recurrence():
    t = Tree()
    v = t.add_child(0)
    assert t.depth(v) == 1
    w = t.add_child(0)
    assert len(t.level_set(1)) == 2
    x = v
    for _ in range(4):
        x = t.add_child(x)
    assert t.depth(x) == 5


def test_add_child_unknown_parent():
    t = Tree()
    with pytest.raises(KeyError):
        t.add_child(7)


def test_level_set_root_and_binary():
    t = Tree()
    frontier = [0]
    for _ in range(4):
        frontier = [t.add_child(v) for v in frontier for _ in range(2)]
    assert t.level_set(0) == [0]
    assert len(t.level_set(3)) == 8
    assert t.level_set(9) == []


def test_is_cutset_levels_and_degenerate():
    t = random_tree(3, 5)
    n = 3
    level_edges = t.level_set(n)
    assert t.is_cutset(level_edges, 5)
    assert not t.is_cutset([], 5)
    # an edge plus its child edge hits one ray twice
    deep = max(range(t.n_vertices), key=t.depth)
    rest = [v for v in t.level_set(t.depth(deep)) if v != deep]
    assert not t.is_cutset([deep, t.parent(deep)] + rest, t.depth(deep))


def test_is_cutset_frontier_precondition():
    t = random_tree(5, 4)
    deep = max(range(t.n_vertices), key=t.depth)
    with pytest.raises(ValueError):
        t.is_cutset([deep], t.depth(deep) - 1)


def test_check_flow_zero_and_path():
    t = Tree()
    v = 0
    for _ in range(4):
        v = t.add_child(v)
    zero = np.zeros(t.n_vertices)
    res = check_flow(t, zero)
    assert res.valid and res.strength == 0.0
    unit = np.ones(t.n_vertices)
    cap = np.full(t.n_vertices, 1.5)
    res = check_flow(t, unit, cap)
    assert res.valid and res.strength == 1.0
    res = check_flow(t, unit, np.full(t.n_vertices, 0.5))
    assert not res.valid and "capacity" in res.reason


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10 ** 6), vertex_frac=st.floats(0.1, 0.9), eps=st.floats(1e-6, 0.5))
def test_check_flow_rejects_perturbations(seed, vertex_frac, eps):
    t = random_tree(seed, 4)
    # a valid flow: route 1 unit along leftmost children from the root
    theta = np.zeros(t.n_vertices)
    v = 0
    while t.children(v):
        v = t.children(v)[0]
        theta[v] = 1.0
    assert check_flow(t, theta).valid
    internal = [u for u in range(1, t.n_vertices) if t.children(u) and theta[u] > 0]
    if not internal:
        return
    u = internal[int(vertex_frac * len(internal)) % len(internal)]
    theta[u] += eps
    assert not check_flow(t, theta).valid


def test_serialization_round_trip():
    t = random_tree(11, 5)
    text = t.to_text()
    back = Tree.from_text(text)
    assert back.n_vertices == t.n_vertices
    assert back.to_text() == text
    assert text.splitlines()[0] == "0 - 0"


def test_from_text_rejects_bad_ids():
    with pytest.raises(ValueError):
        Tree.from_text("0 - 0\n2 0 1\n")
