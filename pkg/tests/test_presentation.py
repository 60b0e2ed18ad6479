import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import tree_from_parents
from hypotrees.core.analysis import max_bare_path, max_binary_height
from hypotrees.core.canon import canonical_code
from hypotrees.core.tree import ColoredTree, binary_tree, path_tree
from hypotrees.presentation import (
    ROOT,
    Piece,
    Presentation,
    PresentationError,
    finite_presentation,
    presentations_equivalent,
)

RULE_COLOURS = ("A", "B")


@st.composite
def pieces(draw, min_size, max_size):
    """Random pieces with at most two children per vertex and coloured leaves."""
    n = draw(st.integers(min_size, max_size))
    parents = []
    degree = [0] * n
    for v in range(1, n):
        choices = [u for u in range(v) if degree[u] < 2]
        p = draw(st.sampled_from(choices))
        parents.append(p)
        degree[p] += 1
    t = tree_from_parents(parents)
    colours = {}
    for v in t.vertices:
        if v != 0 and len(t.adj[v]) == 1:
            c = draw(st.sampled_from(RULE_COLOURS + ("M", None)))
            if c is not None:
                colours[v] = c
    return t.with_colours(colours)


@st.composite
def presentations(draw):
    root = draw(pieces(1, 6))
    rules = {c: Piece(draw(pieces(2, 5))) for c in RULE_COLOURS}
    return Presentation(Piece(root), rules)


def binary_rule() -> Presentation:
    """The infinite binary tree hanging below a root leaf."""
    root = ColoredTree.from_edges(range(2), [(0, 1)], root=0, colours={1: "A"})
    rule = ColoredTree.from_edges(range(3), [(0, 1), (0, 2)], root=0, colours={1: "A", 2: "A"})
    return Presentation(Piece(root), {"A": Piece(rule)})


def comb() -> Presentation:
    """A ray with a pendant leaf at every second vertex."""
    root = ColoredTree.from_edges(range(2), [(0, 1)], root=0, colours={1: "C"})
    rule = ColoredTree.from_edges(range(4), [(0, 1), (1, 2), (1, 3)], root=0, colours={2: "C"})
    return Presentation(Piece(root), {"C": Piece(rule)})


def test_rejects_malformed_rules():
    leaf = ColoredTree.from_edges([0], [], root=0)
    with pytest.raises(PresentationError):
        Presentation(Piece(binary_tree(2)), {"A": Piece(leaf)})
    bad = ColoredTree.from_edges(range(3), [(0, 1), (1, 2)], root=0, colours={1: "A"})
    with pytest.raises(PresentationError):
        Presentation(Piece(bad), {"A": Piece(path_tree(1))})


def test_binary_rule_expansion_sizes():
    p = binary_rule()
    for d in range(6):
        assert len(p.expand(d)) == 1 + (2**d - 1 if d else 0)
    assert p.max_binary_height_symbolic() == math.inf
    assert p.max_degree() == 3


def test_comb_analyses():
    p = comb()
    assert p.max_bare_path_symbolic() == 2
    # centred at a degree-2 ray vertex between two vertices with pendant leaves
    assert p.max_binary_height_symbolic() == 3
    assert p.max_degree() == 3


def test_finite_presentation_expands_to_itself():
    t = binary_tree(4)
    p = finite_presentation(t)
    assert canonical_code(p.expand(10)) == canonical_code(t)
    assert p.max_bare_path_symbolic() == max_bare_path(t).exact


def test_addresses_walk_into_rule_copies():
    p = comb()
    assert p.child_addresses((0,)) == [(1,)]
    assert p.child_addresses((1,)) == [(1, 1)]
    kids = p.child_addresses((1, 1))
    assert kids == [(1, 2), (1, 3)]
    assert p.parent_address((1, 2, 1)) == (1, 2)
    with pytest.raises(PresentationError):
        p.resolve((0, 1))


def test_round_trip_through_documents():
    p = comb()
    q = Presentation.from_doc(p.to_doc())
    assert q.same_as(p)
    assert presentations_equivalent(p, q)


@settings(max_examples=60, deadline=None)
@given(presentations(), st.integers(0, 7))
def test_ball_code_matches_explicit_expansion(p, d):
    t = p.expand(d)
    assert p.ball_code(d) == canonical_code(t)
    assert p.ball_code(d, colours=False) == canonical_code(t, colours=False)


@settings(max_examples=60, deadline=None)
@given(presentations())
def test_symbolic_bare_path_matches_expansions(p):
    sym = p.max_bare_path_symbolic()
    deep = len(p.states) + 2
    if sym == math.inf:
        # an infinite bare path shows up as ever longer censored paths
        assert max_bare_path(p.expand(4 * deep)).lower_bound >= 2 * deep
        return
    depth = deep + int(sym) + 2
    stats = max_bare_path(p.expand(depth))
    assert stats.exact <= sym
    assert stats.lower_bound >= sym or stats.exact == sym


@settings(max_examples=60, deadline=None)
@given(presentations())
def test_symbolic_binary_height_matches_expansions(p):
    sym = p.max_binary_height_symbolic()
    t = p.expand(len(p.states) + 10)
    stats = max_binary_height(t)
    assert stats.lower <= sym <= stats.upper
    if sym != math.inf and sym <= 4:
        assert stats.lower == sym


@settings(max_examples=60, deadline=None)
@given(presentations(), presentations())
def test_bisimulation_agrees_with_deep_codes(p, q):
    # states separated by refinement differ within as many levels as there are states
    depth = len(p.states) + len(q.states) + 1
    same = p.ball_code(depth, colours=False) == q.ball_code(depth, colours=False)
    assert presentations_equivalent(p, q, colours=False) == same


def test_bare_extend_marks_added_states():
    root = ColoredTree.from_edges(range(3), [(0, 1), (1, 2)], root=0, colours={2: "R0"})
    p = finite_presentation(root)
    ext, added = p.bare_extend({"R0"}, 3)
    assert len(ext.expand(20)) == 3 + 4
    assert len(added) == 4 and all(s[0] == ROOT for s in added)


def test_vertex_deletion_and_rerooting():
    root = ColoredTree.from_edges(range(4), [(0, 1), (1, 2), (1, 3)], root=0, colours={2: "C"})
    p = Presentation(Piece(root), comb().rules)
    parts = dict(p.without_vertex(1))
    assert set(parts) == {0, 2, 3}
    assert len(parts[0].expand(5)) == 1
    assert presentations_equivalent(parts[2], p.subpresentation((1, 2)))
    assert presentations_equivalent(p.rerooted(3), p.rerooted(0))
    with pytest.raises(PresentationError):
        p.without_vertex(2)
    with pytest.raises(PresentationError):
        p.rerooted(2)
