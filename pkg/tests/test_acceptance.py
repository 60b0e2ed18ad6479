"""The acceptance suite: one test (or parametrized family) per criterion.

A summary line per criterion is printed at the end of the pytest run.
"""

import math
import random
import time

import networkx as nx
import pytest

from hypotrees.certificates import expansion_codes, validate_certificate
from hypotrees.cli import EXIT_OK, main
from hypotrees.construction import BASE_ROOT, base_case
from hypotrees.core.analysis import bare_path_bound_after_deletion, max_bare_path
from hypotrees.core.canon import unrooted_iso
from hypotrees.core.embed import embed_search
from hypotrees.core.tree import ColoredTree, bare_extension, binary_tree
from hypotrees.presentation import presentations_equivalent
from hypotrees.verify import BOUNDED, FAILED, PROVED, VerifyParams, check_all, check_closure, check_nonisomorphic
from mutations import MUTATIONS, run_check

PASSING = {PROVED, BOUNDED}


def criterion(number, title):
    return pytest.mark.criterion(number, title)


# -- 1 --------------------------------------------------------------------------


@criterion(1, "base case: degree 3, k = 2, b = 3, non-isomorphic, no embeddings for lengths 0..6")
def test_base_case_suite():
    start = time.perf_counter()
    st = base_case()
    rep = check_all(st, VerifyParams(ext_len=6))
    assert rep.ok, [(r.name, r.detail) for r in rep.results if r.failed]
    assert rep.get("max_degree").status == PROVED
    assert (st.k, st.b) == (2, 3)
    t, s = st.T.root_piece.tree, st.S.root_piece.tree
    assert max(t.max_degree(), s.max_degree()) == 3
    assert unrooted_iso(t, s, colours=False) is None
    # the same non-embedding claim, searched directly on explicit extensions
    t, s = t.uncoloured(), s.uncoloured()
    for length in range(7):
        for a, b in ((t, s), (s, t)):
            host, _ = bare_extension(b, [BASE_ROOT], length)
            assert embed_search(a, host).status == "none"
    assert rep.get("no_cross_embedding").bounds["ext_len"] == 6
    assert time.perf_counter() - start < 60


# -- 2 --------------------------------------------------------------------------


@criterion(2, "closure: promises hold exactly and literal gluing matches at radius 3 k~")
@pytest.mark.parametrize("n", [1, 2])
def test_closure_suite(states, n):
    start = time.perf_counter()
    res = {r.name: r for r in check_closure(states[n - 1], states[n], VerifyParams())}
    assert res["promise_uncoloured"].status == PROVED, res["promise_uncoloured"].detail
    assert res["promise_coloured"].status == PROVED, res["promise_coloured"].detail
    oracle = res["gluing_oracle"]
    assert oracle.status == PROVED, oracle.detail
    assert oracle.bounds["radius"] == 3 * states[n].ktildes[-1]
    assert oracle.bounds["rounds"] <= 3
    assert time.perf_counter() - start < 300


# -- 3 --------------------------------------------------------------------------


@criterion(3, "hypomorphism: certificates validate, extend, and expansions agree byte for byte")
@pytest.mark.parametrize("n", [1, 2, 3])
def test_hypomorphism_suite(states, n):
    st, prev = states[n], states[n - 1]
    kt = st.ktildes[n - 1]
    depths = [kt, 2 * kt, 3 * kt]
    assert set(st.certs) == set(st.edge_certs) == {x for (x,) in st.X}
    for (x,), (y,) in zip(st.X, st.Y):
        for certs in (st.certs, st.edge_certs):
            c = certs[x]
            assert c.y == y
            v = validate_certificate(st.T, st.S, c)
            assert v, v.reason
            o = expansion_codes(st.T, st.S, c, depths)
            assert o, o.reason
    for x, c in prev.certs.items():
        assert st.certs[x].same_as(c)
    for x, c in prev.edge_certs.items():
        assert st.edge_certs[x].same_as(c)


# -- 4 --------------------------------------------------------------------------


@criterion(4, "non-isomorphism: presentations differ and the deletion argument holds at depth 3 k")
@pytest.mark.parametrize("n", [1, 2, 3])
def test_nonisomorphism_suite(states, state4, n):
    st = states[n]
    nxt = states[n + 1] if n + 1 < len(states) else state4
    assert not presentations_equivalent(st.T, st.S)
    assert not presentations_equivalent(st.T, st.S, colours=False)
    res = check_nonisomorphic(st, VerifyParams(), nxt)
    assert res.status == BOUNDED, res.detail
    assert res.bounds["depth"] == 3 * st.k
    assert res.bounds["ball_radius"] == st.k + 1


# -- 5 --------------------------------------------------------------------------


@criterion(5, "growth law and finite symbolic bounds")
def test_growth_law_suite(states, state4):
    chain = list(states) + [state4]
    for prev, cur in zip(chain, chain[1:]):
        assert cur.k == 2 * cur.ktildes[prev.n] + 3
        assert cur.b == prev.b + 3
    for st in chain[:-1]:
        for side in (st.T, st.S):
            bare = side.max_bare_path_symbolic()
            height = side.max_binary_height_symbolic()
            assert bare != math.inf and bare <= st.k
            assert height != math.inf and height <= st.b


# -- 6 --------------------------------------------------------------------------


def nx_longest_bare_path(g: nx.Graph) -> int:
    """Walk from every vertex of degree other than two through degree-two vertices."""
    best = 0
    for v in g:
        if g.degree(v) == 2:
            continue
        for w in g[v]:
            prev, cur, length = v, w, 1
            while g.degree(cur) == 2:
                prev, cur = cur, next(u for u in g[cur] if u != prev)
                length += 1
            best = max(best, length)
    return best


@criterion(6, "edge deletion at most doubles bare paths; binary trees have 2^k - 1 vertices")
def test_edge_deletion_suite():
    rng = random.Random(20260)
    failures = 0
    for _ in range(500):
        n = rng.randint(2, 40)
        edges = [(rng.randrange(v), v) for v in range(1, n)]
        g = nx.Graph(edges)
        t = ColoredTree.from_edges(range(n), edges, root=0)
        k = max_bare_path(t).exact
        assert k == nx_longest_bare_path(g)
        for a, b in edges:
            after = bare_path_bound_after_deletion(t, (a, b))
            h = g.copy()
            h.remove_edge(a, b)
            assert after == nx_longest_bare_path(h)
            failures += after > 2 * k
    assert failures == 0
    for k in range(1, 13):
        assert len(binary_tree(k)) == 2**k - 1


# -- 7 --------------------------------------------------------------------------


@criterion(7, "build and verify twice give byte-identical files")
def test_determinism(tmp_path):
    runs = []
    for name in ("first", "second"):
        out = tmp_path / name
        args = ["--steps", "2", "--ext-len", "1", "--out", str(out)]
        assert main(["build", *args]) == EXIT_OK
        assert main(["verify", *args]) == EXIT_OK
        runs.append({p.relative_to(out): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()})
    assert runs[0].keys() == runs[1].keys()
    assert len(runs[0]) == 3 + 3 * 2 + 1
    for path in runs[0]:
        assert runs[0][path] == runs[1][path], path


# -- 8 --------------------------------------------------------------------------


@criterion(8, "each designed mutation makes its check fail")
def test_mutation_sensitivity(states):
    assert len(MUTATIONS) >= 10
    for m in MUTATIONS:
        assert run_check(m.check, states[m.base], states).status in PASSING, m.name
        assert run_check(m.check, m.make(states), states).status == FAILED, m.name
