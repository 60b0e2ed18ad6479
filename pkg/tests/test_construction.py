import json

import pytest

from hypotrees.construction import (
    BASE_ROOT,
    S_SIDE,
    T_SIDE,
    ConstructionError,
    base_case,
    build_gadgets,
    compute_ktilde,
    edge_map,
    edge_to_root,
    enumerated,
    select_target,
    split_at,
    state_from_doc,
    state_to_doc,
    step,
)
from hypotrees.core.analysis import max_bare_path
from hypotrees.core.canon import unrooted_iso
from hypotrees.core.embed import embed_search
from hypotrees.core.tree import bare_extension


def test_base_trees():
    st = base_case()
    t, s = st.T.root_piece.tree, st.S.root_piece.tree
    assert len(t) == len(s) == 11
    assert t.max_degree() == s.max_degree() == 3
    assert t.root == s.root == BASE_ROOT and t.degree(BASE_ROOT) == 1
    assert unrooted_iso(t, s, colours=False) is None
    assert (st.k, st.b) == (2, 3)
    assert max_bare_path(t).exact == 2
    assert enumerated(st, T_SIDE, 0) != (BASE_ROOT,)
    assert st.X == st.Y == ()


@pytest.mark.parametrize("length", range(7))
def test_base_trees_do_not_embed_into_each_other(length):
    st = base_case()
    t, s = st.T.root_piece.tree.uncoloured(), st.S.root_piece.tree.uncoloured()
    for a, b in ((t, s), (s, t)):
        host, _ = bare_extension(b, [BASE_ROOT], length)
        assert embed_search(a, host).status == "none"
    # sanity: a tree does embed into its own extension, fixing the root
    host, _ = bare_extension(t, [BASE_ROOT], length)
    res = embed_search(t, host, root_mode="preserve")
    assert res.found and res.mapping[BASE_ROOT] == BASE_ROOT


def test_first_target_and_split():
    st = base_case()
    side, target = select_target(st)
    assert (side, target) == (T_SIDE, (0,))
    split = split_at(st, side, target)
    a = split.root_part.root_piece.tree
    b = split.target_part.root_piece.tree
    assert len(a) + len(b) == 11 and not set(a.adj) & set(b.adj)
    assert split.edge == edge_to_root(st.T, 0)
    with pytest.raises(ConstructionError):
        split_at(st, T_SIDE, (BASE_ROOT,))


def test_first_gadgets_frozen_values():
    st = base_case()
    split = split_at(st, *select_target(st))
    kt = compute_ktilde(st, split)
    assert kt == 6
    g = build_gadgets(st, split, kt)
    assert len(g.T_tilde) == len(g.S_tilde) == 119
    p = 4 * (kt + 1) + 3
    assert g.path_length == p == 31
    interior = {f"u{i}/0" for i in range(1, p)}
    assert interior <= set(g.T_tilde.labels.values())
    assert {"u0leaf/0", f"u{p}leaf/0"} <= set(g.T_tilde.labels.values())


def test_frozen_growth_values(states):
    assert [s.k for s in states] == [2, 15, 59, 235]
    assert [s.b for s in states] == [3, 6, 9, 12]
    assert list(states[3].ktildes) == [6, 28, 116]
    assert [len(s.T.root_piece.tree) for s in states] == [11, 119, 871, 6311]
    assert [len(s.S.root_piece.tree) for s in states] == [11, 119, 871, 6311]


def test_frozen_handled_vertices(states):
    st = states[3]
    assert st.X == ((0,), (231,), (1,))
    assert st.Y == ((15,), (0,), (1739,))
    # T is split on even steps, S on odd ones
    assert [select_target(s)[0] for s in states] == [T_SIDE, S_SIDE, T_SIDE, S_SIDE]


def test_trees_nest_and_markers_move_up(states):
    for prev, cur in zip(states, states[1:]):
        for side in (T_SIDE, S_SIDE):
            a = prev.side(side).root_piece.tree
            b = cur.side(side).root_piece.tree
            assert set(a.adj) <= set(b.adj)
        r = cur.T.root_piece.tree
        assert r.colours[r.root] == cur.R
        assert cur.R == f"R{cur.n}" and cur.B == f"B{cur.n}"


def test_certificates_accumulate(states):
    for prev, cur in zip(states, states[1:]):
        assert set(prev.certs) < set(cur.certs)
        for x, c in prev.certs.items():
            assert cur.certs[x].same_as(c)
        assert len(cur.edge_certs) == cur.n


def test_edge_map_is_injective(states):
    psi = edge_map(states[3])
    assert len(set(psi.values())) == len(psi) == 3


def test_state_documents_round_trip(states):
    for st in states:
        doc = state_to_doc(st)
        text = json.dumps(doc, sort_keys=True)
        back = state_from_doc(json.loads(text))
        assert json.dumps(state_to_doc(back), sort_keys=True) == text


def test_step_is_deterministic(states):
    again = step(states[1])
    assert json.dumps(state_to_doc(again), sort_keys=True) == json.dumps(state_to_doc(states[2]), sort_keys=True)


def test_enumerations_extend(states):
    for prev, cur in zip(states, states[1:]):
        for side in (T_SIDE, S_SIDE):
            for j in range(prev.n + 2):
                if prev.enumeration.used(j):
                    assert enumerated(prev, side, j) == enumerated(cur, side, j)


def test_fourth_step(state4):
    assert state4.k == 939
    assert state4.X[-1] == (12619,) and state4.Y[-1] == (1,)
    assert len(state4.T.root_piece.tree) == 47271
