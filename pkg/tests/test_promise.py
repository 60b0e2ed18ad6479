import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_tree
from hypotrees.core.tree import ColoredTree
from hypotrees.presentation import Piece
from hypotrees.promise import (
    PromiseError,
    PromiseStructure,
    check_cl2,
    check_cl3,
    closure,
    compare_with_gluing,
    glue_rounds,
    is_placeholder,
    leaf_extension_check,
)


def fork() -> ColoredTree:
    """r - a - b with leaves l1, l2 below b."""
    return ColoredTree.from_edges(range(5), [(0, 1), (1, 2), (2, 3), (2, 4)], root=0)


def test_single_promise_grows_a_ray_of_forks():
    ps = PromiseStructure([fork()], [(1, 2)], [frozenset({3})])
    cr = closure(ps)
    t = cr.components[0]
    assert not cr.placeholders
    assert check_cl2(cr, 0, 3, 6) and check_cl3(cr, 0, 3, 6)
    # r, a, b, then two vertices on each further level
    assert len(t.expand(6)) == 3 + 2 * 4
    assert t.max_degree() == 3


def test_placeholder_promise_survives_as_a_marker():
    # the second promise points at leaf 4 from its neighbour: a placeholder
    ps = PromiseStructure([fork()], [(1, 2), (2, 4)], [frozenset({3}), frozenset({4})], colours=["P", "Q"])
    assert is_placeholder(ps, 1) and not is_placeholder(ps, 0)
    cr = closure(ps)
    assert [p.colour for p in cr.placeholders] == ["Q"]
    grown = cr.components[0].expand(8)
    assert sorted(set(grown.colours.values())) == ["Q"]
    assert check_cl3(cr, 0, 3, 8)


def test_rejects_invalid_structures():
    t = fork()
    with pytest.raises(PromiseError):
        PromiseStructure([t], [(1, 2)], [frozenset({2})])  # not a leaf
    with pytest.raises(PromiseError):
        PromiseStructure([t], [(1, 2), (2, 3)], [frozenset({3}), frozenset({3})])
    with pytest.raises(PromiseError):
        PromiseStructure([t], [(0, 3)], [frozenset({3})])  # not an edge
    with pytest.raises(PromiseError):
        PromiseStructure([t, t], [], [])  # shared ids


def test_unproductive_promise_is_rejected_by_closure():
    # subtree is the single leaf 4, which is not in its own leaf set
    ps = PromiseStructure([fork()], [(2, 4)], [frozenset({3})])
    with pytest.raises(PromiseError):
        closure(ps)


def test_gluing_is_a_leaf_extension():
    ps = PromiseStructure([fork()], [(1, 2)], [frozenset({3})])
    one = glue_rounds(ps, 1)
    two = glue_rounds(ps, 2)
    t1, t2 = one.tree(0), two.tree(0)
    assert leaf_extension_check(fork(), t1, {3})
    assert leaf_extension_check(t1, t2, set(one.pending))
    assert not leaf_extension_check(fork(), t1, {4})


def test_inherited_rules_are_glued_too():
    base = ColoredTree.from_edges(range(3), [(0, 1), (1, 2)], root=0, colours={2: "OLD"})
    rule = ColoredTree.from_edges(range(3), [(0, 1), (0, 2)], root=0, colours={1: "OLD"})
    extra = ColoredTree.from_edges(range(10, 13), [(10, 11), (11, 12)], root=10)
    ps = PromiseStructure([base, extra], [(10, 11)], [frozenset({12})], rules={"OLD": Piece(rule)})
    for c in compare_with_gluing(ps, 4, 3):
        assert c.equal


@st.composite
def promise_structures(draw):
    seed = draw(st.integers(0, 10**6))
    rng = random.Random(seed)
    t = random_tree(rng, rng.randint(3, 10), max_degree=3)
    leaves = [v for v in t.vertices if t.degree(v) == 1 and v != t.root]
    edges = []
    leaf_sets = []
    for a, b in t.edges():
        for u, w in ((a, b), (b, a)):
            if t.degree(w) > 1 and w != t.root:
                edges.append((u, w))
    rng.shuffle(edges)
    edges = edges[: rng.randint(1, 2)]
    free = leaves[:]
    rng.shuffle(free)
    for _ in edges:
        k = rng.randint(1, max(1, len(free) // len(edges)))
        leaf_sets.append(frozenset(free[:k]))
        free = free[k:]
    return PromiseStructure([t], edges, leaf_sets)


@settings(max_examples=50, deadline=None)
@given(promise_structures())
def test_closure_keeps_promises_and_degree(ps):
    cr = closure(ps)
    for i, ls in enumerate(ps.leaf_sets):
        for leaf in ls:
            assert check_cl2(cr, i, leaf, 5)
            assert check_cl3(cr, i, leaf, 5)
    # gluing never raises the maximum degree
    assert cr.components[0].max_degree() == ps.forest[0].max_degree()


@settings(max_examples=50, deadline=None)
@given(promise_structures())
def test_literal_gluing_matches_closure(ps):
    radius = 4
    for rounds in range(1, 8):
        comps = compare_with_gluing(ps, rounds, radius)
        if all(c.frontier_depth > radius for c in comps):
            break
    assert all(c.equal for c in comps)
