import dataclasses
import json

import pytest

from hypotrees.construction import base_case
from hypotrees.core.tree import ColoredTree
from hypotrees.verify import (
    BOUNDED,
    CHECKS,
    FAILED,
    PROVED,
    CheckReport,
    VerifyParams,
    check_all,
    check_nonisomorphic,
    check_self_embeddings,
    root_orbit,
)
from mutations import MUTATIONS, SMALL, run_check

PASSING = {PROVED, BOUNDED}


@pytest.fixture(scope="module")
def reports(states):
    return [
        check_all(st, VerifyParams(ext_len=2), states[n - 1] if n else None, states[n + 1])
        for n, st in enumerate(states[:2])
    ] + [check_all(states[2], SMALL, states[1], states[3])]


@pytest.mark.parametrize("n", [0, 1, 2])
def test_every_check_passes_on_built_states(reports, n):
    rep = reports[n]
    assert [r.name for r in rep.results] == list(CHECKS)
    bad = [(r.name, r.detail) for r in rep.results if r.status not in PASSING]
    assert not bad
    assert rep.ok


def test_report_documents_are_stable(states, reports):
    again = check_all(states[1], VerifyParams(ext_len=2), states[0], states[2])
    assert again.to_json() == reports[1].to_json()
    doc = json.loads(reports[1].to_json())
    assert "timings" not in json.dumps(doc)
    assert doc["params"]["ext_len"] == 2
    assert "Overall: pass" in reports[1].to_markdown()


def test_report_get_and_failure_summary():
    st = base_case()
    res = dataclasses.replace(run_check("growth_law", st, [st]), status=FAILED)
    rep = CheckReport(0, SMALL.to_doc(st), [res], {})
    assert not rep.ok and rep.get("growth_law").failed
    assert "Overall: FAIL" in rep.to_markdown()
    with pytest.raises(KeyError):
        rep.get("nope")


def test_later_states_need_their_predecessor(states):
    with pytest.raises(ValueError):
        check_all(states[1], SMALL)


def test_base_root_is_swapped_only_with_its_twin(states):
    # vertex 9 carries two leaves, the root 10 and vertex 8
    t = states[0].S.root_piece.tree
    assert root_orbit(t) == [8, 10]
    res = check_self_embeddings(states[0], SMALL, "S")
    assert res.status == BOUNDED and "[8]" in res.detail


def test_root_orbit_on_small_trees():
    path = ColoredTree.from_edges(range(3), [(0, 1), (1, 2)], root=0)
    assert root_orbit(path) == [0, 2]
    # a fork two steps from the root breaks the symmetry
    t = ColoredTree.from_edges(range(5), [(0, 1), (1, 2), (2, 3), (2, 4)], root=0)
    assert root_orbit(t) == [0]


@pytest.mark.parametrize("m", MUTATIONS, ids=lambda m: m.check)
def test_mutation_is_caught(states, m):
    clean = run_check(m.check, states[m.base], states)
    assert clean.status in PASSING, clean.detail
    bad = run_check(m.check, m.make(states), states)
    assert bad.status == FAILED
    assert bad.detail


def test_mutations_cover_many_checks():
    assert len({m.check for m in MUTATIONS}) >= 10
    assert {m.check for m in MUTATIONS} <= set(CHECKS)


def test_deletion_threshold_is_a_parameter(states):
    st, nxt = states[1], states[2]
    for cut in (st.k - 1, st.k + 1, 2 * st.k):
        res = check_nonisomorphic(st, VerifyParams(bare_cut=cut), nxt)
        assert res.status == BOUNDED and res.bounds["bare_cut"] == cut
    # cutting only above k_{n+1} leaves the bare extensions attached
    assert check_nonisomorphic(st, VerifyParams(bare_cut=nxt.k), nxt).status == FAILED
    assert check_nonisomorphic(st, VerifyParams(bare_cut=3), nxt).status == FAILED
