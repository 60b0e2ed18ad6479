import dataclasses

import pytest

from hypotrees.certificates import expansion_codes, validate_certificate, validate_map


@pytest.mark.parametrize("n", [1, 2, 3])
def test_vertex_certificates_validate(states, n):
    st = states[n]
    for x, c in st.certs.items():
        assert validate_certificate(st.T, st.S, c), x


@pytest.mark.parametrize("n", [1, 2, 3])
def test_edge_certificates_validate(states, n):
    st = states[n]
    for x, c in st.edge_certs.items():
        assert validate_certificate(st.T, st.S, c), x


@pytest.mark.parametrize("n", [1, 2])
def test_expansions_agree_with_certificates(states, n):
    st = states[n]
    kt = st.ktildes[-1]
    for c in list(st.certs.values()) + list(st.edge_certs.values()):
        assert expansion_codes(st.T, st.S, c, [kt, 2 * kt, 3 * kt])


def test_old_certificates_survive_growth(states):
    # the certificate made at step 1 still validates against the later trees
    c = states[1].certs[0]
    for st in states[1:]:
        assert validate_certificate(st.T, st.S, c)


def test_swapped_pair_is_rejected(states):
    st = states[2]
    c = st.certs[231]
    keys = sorted(k for k in c.core_map if k != c.x)[:2]
    bad = dict(c.core_map)
    bad[keys[0]], bad[keys[1]] = bad[keys[1]], bad[keys[0]]
    v = validate_certificate(st.T, st.S, dataclasses.replace(c, core_map=bad))
    assert not v and v.reason


def wrong_target(c, root):
    """Trade ``y`` with the image of ``root``: still a bijection, no longer an isomorphism."""
    m = dict(c.core_map)
    other = m[root]
    m[root] = c.y
    return dataclasses.replace(c, y=other, core_map=m)


def test_wrong_target_is_rejected(states):
    st = states[1]
    bad = wrong_target(st.certs[0], st.T.root_piece.tree.root)
    assert not validate_certificate(st.T, st.S, bad)
    assert not validate_map(st.T, st.S, bad.core_map, (bad.x,), (bad.y,))


def test_corrupted_edge_certificate_is_rejected(states):
    st = states[2]
    c = st.edge_certs[0]
    a, b = c.removed_s
    elsewhere = next(w for w in st.S.root_piece.tree.adj[b] if w != a)
    bad = dataclasses.replace(c, removed_s=(b, elsewhere))
    assert not validate_certificate(st.T, st.S, bad)


def test_expansion_oracle_catches_a_bad_map(states):
    st = states[1]
    bad = wrong_target(st.certs[0], st.T.root_piece.tree.root)
    assert not expansion_codes(st.T, st.S, bad, [st.ktildes[-1]])
