"""Executable checks of the construction's invariants.

Every check returns a :class:`CheckResult` with one of four verdicts:

* ``proved``: an exact computation on the finite presentation settles it;
* ``verified-to-bound``: exact for every parameter up to the stated bound
  (extension length, depth), silent beyond it;
* ``failed``: a concrete witness is attached;
* ``inconclusive``: a search ran out of budget.

Checks never rebuild certificates.  Where a check needs the construction
itself (the promise structure of the previous step, the next state), it
calls the construction module and says so in the detail text.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .certificates import _Classes, expansion_codes, validate_certificate
from .construction import (
    BASE_B,
    BASE_K,
    S_SIDE,
    T_SIDE,
    ConstructionState,
    build_gadgets,
    colour_class,
    compute_ktilde,
    edge_to_root,
    enumerated,
    in_level,
    select_target,
    split_at,
    step,
    tail_vertex,
)
from .core.analysis import bare_decompose, max_bare_path, max_binary_height
from .core.canon import canonical_code, rooted_iso
from .core.embed import BudgetExceeded, Embedder, EmbedResult, run_deep
from .core.refine import refine
from .core.tree import ColoredTree, bare_extension, component_of
from .presentation import ROOT, Piece, Presentation, presentations_equivalent
from .promise import ClosureResult, check_cl2, check_cl3, closure, compare_with_gluing

PROVED = "proved"
BOUNDED = "verified-to-bound"
FAILED = "failed"
INCONCLUSIVE = "inconclusive"

# check name -> one-line description, in report order
CHECKS: dict[str, str] = {
    "nested_trees": "the previous trees are induced subtrees of the current ones",
    "max_degree": "every vertex has degree at most 3",
    "root_colours": "the roots carry the current red and blue marker",
    "binary_height_bound": "binary subtrees are finite with height at most b",
    "bare_path_bound": "bare paths are finite with length at most k",
    "ball_T": "the ball around the previous T is its bare extension and misses the new markers",
    "ball_S": "the ball around the previous S is its bare extension and misses the new markers",
    "no_cross_embedding": "neither tree embeds into a bare extension of the other",
    "self_embeddings_T": "embeddings of T into its bare extensions fix the root and have image T",
    "self_embeddings_S": "embeddings of S into its bare extensions fix the root and have image S",
    "enumeration": "enumeration bookkeeping (nested, extending, co-infinite, covers 0..n)",
    "enumerated_unmarked": "the first n+1 enumerated vertices carry no current marker",
    "handled_sets": "handled sets X, Y and the bijection phi",
    "isomorphism_family": "old certificates are unchanged and all respect the marker classes",
    "promise_uncoloured": "every promise leaf grows a subtree isomorphic to its promise subtree",
    "promise_coloured": "as above, with the surviving marker classes matched",
    "gluing_oracle": "literal gluing agrees with the closure near the roots",
    "union_embeddings_fix_root": "embeddings into bare extensions of the disjoint union fix the root",
    "embeddings_stay_inside": "no embedding fixing the root reaches the added extension vertices",
    "growth_law": "k and b follow their recurrences and increase strictly",
    "nonisomorphic": "T and S are not isomorphic",
    "vertex_hypomorphism": "every vertex certificate validates and expansions agree",
    "edge_hypomorphism": "every edge certificate validates and expansions agree",
    "edge_map": "the edge map pairs e(x) with e(phi(x)) injectively",
}


@dataclass(frozen=True)
class VerifyParams:
    depth: int | None = None  # None means 3 * k_n
    ext_len: int = 6
    budget: int = 10**7
    expansion_cap: int = 50_000  # vertex cap for explicit expansions
    bare_cut: int | None = None  # non-isomorphism deletes bare paths longer than this; None means k_n

    def depth_for(self, st: ConstructionState) -> int:
        return self.depth if self.depth is not None else 3 * st.k

    def to_doc(self, st: ConstructionState) -> dict:
        return {"depth": self.depth_for(st), "ext_len": self.ext_len, "budget": self.budget}


@dataclass
class CheckResult:
    name: str
    status: str
    detail: str = ""
    bounds: dict | None = None
    witness: dict | None = None

    @property
    def failed(self) -> bool:
        return self.status == FAILED

    def to_doc(self) -> dict:
        doc = {"name": self.name, "status": self.status, "detail": self.detail}
        if self.bounds is not None:
            doc["bounds"] = self.bounds
        if self.witness is not None:
            doc["witness"] = self.witness
        return doc


@dataclass
class CheckReport:
    n: int
    params: dict
    results: list[CheckResult]
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not any(r.failed for r in self.results)

    def get(self, name: str) -> CheckResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_doc(self) -> dict:
        # timings are kept out so that reports are byte-stable
        return {
            "n": self.n,
            "params": self.params,
            "ok": self.ok,
            "checks": [r.to_doc() for r in self.results],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), indent=2, sort_keys=True) + "\n"

    def to_markdown(self) -> str:
        lines = [
            f"# Verification of state {self.n}",
            "",
            f"Parameters: depth {self.params['depth']}, extension length {self.params['ext_len']},"
            f" budget {self.params['budget']}.",
            "",
            "| check | status | detail |",
            "|---|---|---|",
        ]
        for r in self.results:
            detail = r.detail.replace("|", "/")
            lines.append(f"| {r.name} | {r.status} | {detail} |")
        lines += ["", f"Overall: {'pass' if self.ok else 'FAIL'}", ""]
        return "\n".join(lines)


def _res(name, status, detail="", bounds=None, witness=None) -> CheckResult:
    return CheckResult(name, status, detail, bounds, witness)


def _sides(st: ConstructionState):
    return ((T_SIDE, st.T), (S_SIDE, st.S))


def _other(side: str) -> str:
    return S_SIDE if side == T_SIDE else T_SIDE


def bounded_expand(p: Presentation, depth: int, cap: int) -> tuple[ColoredTree, int]:
    """The root expansion at the largest depth ``<= depth`` with at most ``cap`` vertices."""
    row = {p.root_state: 1}
    total = 1
    d = 0
    while d < depth:
        nxt: dict = {}
        for s, cnt in row.items():
            for c in p.children(s):
                nxt[c] = nxt.get(c, 0) + cnt
        size = sum(nxt.values())
        if not nxt or total + size > cap:
            break
        total += size
        row = nxt
        d += 1
    return p.expand(d), d


# -- structural invariants -----------------------------------------------------


def check_nested(prev: ConstructionState | None, st: ConstructionState) -> CheckResult:
    name = "nested_trees"
    if prev is None:
        return _res(name, PROVED, "base case: nothing precedes it")
    old_markers = {prev.R, prev.B}
    for side, cur in _sides(st):
        old = prev.side(side)
        a, b = old.root_piece.tree, cur.root_piece.tree
        for v in a.adj:
            if v not in b.adj:
                return _res(name, FAILED, "vertex lost", witness={"side": side, "vertex": v})
            if set(b.adj[v]) & set(a.adj) != set(a.adj[v]):
                return _res(name, FAILED, "not induced", witness={"side": side, "vertex": v})
            ca, cb = a.colours.get(v), b.colours.get(v)
            if ca != cb and not (ca in old_markers and cb is None):
                return _res(name, FAILED, "colour changed", witness={"side": side, "vertex": v})
            if a.labels.get(v) != b.labels.get(v):
                return _res(name, FAILED, "label changed", witness={"side": side, "vertex": v})
        for c, piece in old.rules.items():
            if c not in cur.rules or not cur.rules[c].tree.same_as(piece.tree):
                return _res(name, FAILED, "rule changed", witness={"side": side, "colour": c})
    return _res(name, PROVED, "root pieces extend the previous ones; earlier rules are unchanged")


def check_degree(st: ConstructionState, params: VerifyParams) -> CheckResult:
    name = "max_degree"
    depth = params.depth_for(st)
    for side, p in _sides(st):
        d = p.max_degree()
        if d > 3:
            s = max(p.states, key=p.degree)
            return _res(name, FAILED, "symbolic degree above 3",
                        witness={"side": side, "address": list(p.representative(s)), "degree": d})
        t, dd = bounded_expand(p, depth, params.expansion_cap)
        if t.max_degree() > 3:
            return _res(name, FAILED, "expansion has a vertex of degree above 3", witness={"side": side})
    return _res(name, PROVED, "state graphs have degree at most 3; expansions agree")


def check_root_colours(st: ConstructionState) -> CheckResult:
    name = "root_colours"
    got = (st.T.root_piece.tree.colours.get(st.T.root_piece.tree.root),
           st.S.root_piece.tree.colours.get(st.S.root_piece.tree.root))
    if got != (st.R, st.B):
        return _res(name, FAILED, "root colours differ", witness={"found": list(map(str, got))})
    return _res(name, PROVED, f"roots carry {st.R} and {st.B}")


def check_binary(st: ConstructionState, params: VerifyParams) -> CheckResult:
    name = "binary_height_bound"
    depth = params.depth_for(st)
    vals = {}
    for side, p in _sides(st):
        sym = p.max_binary_height_symbolic()
        vals[side] = sym
        if sym == math.inf or sym > st.b:
            return _res(name, FAILED, f"binary height {sym} exceeds b = {st.b}", witness={"side": side})
        t, dd = bounded_expand(p, depth, params.expansion_cap)
        stats = max_binary_height(t)
        if not stats.lower <= sym <= stats.upper:
            return _res(name, FAILED, "symbolic value disagrees with the expansion",
                        witness={"side": side, "symbolic": sym, "lower": stats.lower, "depth": dd})
    return _res(name, PROVED, f"max binary height T {vals['T']}, S {vals['S']}, bound {st.b}")


def check_bare(st: ConstructionState, params: VerifyParams) -> CheckResult:
    name = "bare_path_bound"
    depth = params.depth_for(st)
    vals = {}
    for side, p in _sides(st):
        sym = p.max_bare_path_symbolic()
        vals[side] = sym
        if sym == math.inf or sym > st.k:
            return _res(name, FAILED, f"bare path {sym} exceeds k = {st.k}", witness={"side": side})
        t, dd = bounded_expand(p, depth, params.expansion_cap)
        stats = max_bare_path(t)
        if stats.exact > sym:
            return _res(name, FAILED, "expansion has a longer bare path than the symbolic value",
                        witness={"side": side, "symbolic": sym, "expansion": stats.exact, "depth": dd})
    return _res(name, PROVED, f"max bare path T {vals['T']}, S {vals['S']}, bound {st.k}")


def check_growth(st: ConstructionState) -> CheckResult:
    name = "growth_law"
    if not st.ks or st.ks[0] != BASE_K or st.bs[0] != BASE_B:
        return _res(name, FAILED, "wrong initial values")
    if st.ks[-1] != st.k or st.bs[-1] != st.b or len(st.ks) != st.n + 1 or len(st.ktildes) != st.n:
        return _res(name, FAILED, "history does not match the state")
    for i in range(st.n):
        if st.ks[i + 1] != 2 * st.ktildes[i] + 3 or st.bs[i + 1] != st.bs[i] + 3:
            return _res(name, FAILED, "recurrence violated", witness={"step": i})
        if st.ks[i + 1] <= st.ks[i]:
            return _res(name, FAILED, "k not increasing", witness={"step": i})
    return _res(name, PROVED, f"k = {list(st.ks)}, b = {list(st.bs)}")


# -- balls around the previous trees ---------------------------------------------


def _extension_shape(length: int) -> bytes:
    """Rooted code of a leaf plus a path of ``length`` edges hanging from one vertex."""
    verts = list(range(length + 2))
    edges = [(i, i + 1) for i in range(length)] + [(0, length + 1)]
    return canonical_code(ColoredTree.from_edges(verts, edges, root=0), colours=False, cuts=False)


def check_ball(prev: ConstructionState | None, st: ConstructionState, side: str) -> CheckResult:
    name = f"ball_{side}"
    if prev is None:
        return _res(name, PROVED, "base case: the previous tree is empty")
    old, cur = prev.side(side), st.side(side)
    L = prev.k + 1
    markers = {prev.R, prev.B}
    new_markers = {st.R, st.B}
    shape = _extension_shape(L)
    a, b = old.root_piece.tree, cur.root_piece.tree
    # nothing new hangs off non-marker vertices, and the old tree carries no new marker
    for v in a.adj:
        if a.colours.get(v) not in markers and set(b.adj[v]) != set(a.adj[v]):
            return _res(name, FAILED, "a non-marker vertex gained neighbours", witness={"vertex": v})
        if b.colours.get(v) in new_markers:
            return _res(name, FAILED, "the previous tree meets a new marker", witness={"vertex": v})
    for c, piece in old.rules.items():
        if not cur.rules[c].tree.same_as(piece.tree):
            return _res(name, FAILED, "a rule changed", witness={"colour": c})
        if set(piece.tree.colours.values()) & new_markers:
            return _res(name, FAILED, "the previous tree meets a new marker", witness={"colour": c})

    def shape_ok(p: Presentation) -> str | None:
        t = p.expand(L)
        if canonical_code(t, colours=False, cuts=False) != shape:
            return "the extension is not a bare path with one extra leaf"
        if set(t.colours.values()) & new_markers:
            return "the extension meets a new marker"
        return None

    used = {c for k in old.keys for c in old.piece(k).colours.values()}
    for c in sorted(markers & used):
        if c in cur.rules:
            err = shape_ok(Presentation(cur.rules[c], cur.rules, cur.level))
            if err:
                return _res(name, FAILED, err, witness={"rule": c})
    for v, c in sorted(a.colours.items()):
        if c in markers and not cur.is_expanding(ROOT, v):
            grown = [w for w in b.adj[v] if w not in a.adj[v]]
            if not grown:
                return _res(name, FAILED, "a marker leaf was not extended", witness={"vertex": v})
            keep = {v}
            for w in grown:
                keep.update(component_of(b, (v, w)).adj)
            err = shape_ok(cur._with_root_piece(b.induced(keep, root=v)))
            if err:
                return _res(name, FAILED, err, witness={"vertex": v})
    detail = f"every {'/'.join(sorted(markers))} leaf grows a bare path of length {L} plus a leaf"
    # explicit second route when the previous tree is finite
    if old.host().size[old.root_state] == len(a):
        err = _explicit_ball(old, cur, markers, new_markers, L)
        if err:
            return _res(name, FAILED, err)
        detail += "; explicit ball matches"
    return _res(name, PROVED, detail)


def _explicit_ball(old: Presentation, cur: Presentation, markers, new_markers, L: int) -> str | None:
    a = old.root_piece.tree
    dist = {(v,): 0 for v in a.adj}
    frontier = list(dist)
    edges = []
    for d in range(1, L + 1):
        nxt = []
        for u in frontier:
            for w in cur.neighbour_addresses(u):
                if w not in dist:
                    dist[w] = d
                    edges.append((u, w))
                    nxt.append(w)
        frontier = nxt
    ids = {addr: addr[0] for addr in dist if len(addr) == 1 and addr[0] in a.adj}
    fresh = max(a.adj) + 1
    for addr in sorted(dist):
        if addr not in ids:
            ids[addr] = fresh
            fresh += 1
    all_edges = [(u, w) for u, w in a.edges()] + [(ids[u], ids[w]) for u, w in edges]
    colours = {}
    for addr, i in ids.items():
        lab = cur.label(cur.address_state(addr))
        if lab is not None:
            colours[i] = lab
    ball = ColoredTree.from_edges(list(ids.values()), all_edges, root=a.root, colours=colours)
    if set(ball.colours.values()) & new_markers:
        return "the explicit ball meets a new marker"
    leaves = [v for v, c in a.colours.items() if c in markers]
    ext, _ = bare_extension(a.uncoloured(), leaves, L)
    if rooted_iso(ball, ext, colours=False, cuts=False) is None:
        return "the explicit ball is not the bare extension"
    return None


# -- embeddings ----------------------------------------------------------------


class _Searches:
    """Embedding searches shared by several checks (one per host and length)."""

    def __init__(self, st: ConstructionState, budget: int):
        self.st = st
        self.budget = budget
        self.cache: dict = {}

    def embedder(self, pattern_side: str, host_side: str, L: int, pattern: ColoredTree | None = None):
        key = (pattern_side, host_side, L, pattern is None)
        if key not in self.cache or pattern is not None:
            st = self.st
            ext, added = st.side(host_side).bare_extend({st.R, st.B}, L)
            host = ext.host(added)
            pat = pattern if pattern is not None else st.side(pattern_side).core()
            emb = Embedder(pat, host, self.budget)
            if pattern is not None:
                return emb
            self.cache[key] = {"emb": emb}
        return self.cache[key]["emb"]

    def _memo(self, key, fn):
        if key not in self.cache:
            self.cache[key] = run_deep(fn)
        return self.cache[key]

    def cross(self, a: str, b: str, L: int) -> EmbedResult:
        emb = self.embedder(a, b, L)
        return self._memo(("cross", a, b, L), emb.search)

    def root_orbit(self, a: str) -> list[int]:
        """Core vertices an automorphism of the core can send the root to."""
        key = ("orbit", a)
        if key not in self.cache:
            self.cache[key] = root_orbit(self.st.side(a).core())
        return self.cache[key]

    def root_moving(self, a: str, L: int) -> EmbedResult:
        """Search for an embedding whose top is not the root up to automorphism.

        An embedding sending the root to ``q`` in the root's orbit is a
        root-fixing embedding composed with an automorphism, so such tops
        are skipped.
        """
        emb = self.embedder(a, a, L)
        orbit = set(self.root_orbit(a))
        hr = emb.h.root
        return self._memo(("moving", a, L), lambda: emb.search(exclude=lambda q, s: q in orbit and s == hr))

    def fixing(self, a: str, L: int) -> tuple[bool, bool] | None:
        """(identity-like embedding exists, some root-fixing embedding touches the extension)."""
        emb = self.embedder(a, a, L)

        def run():
            try:
                r, hr = emb.p.root, emb.h.root
                return (emb.can(r, None, hr), emb.touch(r, None, hr))
            except BudgetExceeded:
                return None

        return self._memo(("fixing", a, L), run)


def root_orbit(t: ColoredTree) -> list[int]:
    """Vertices ``q`` with ``t`` rooted at ``q`` isomorphic to ``t`` at its root (colours ignored)."""
    # classes of directed edges (u, parent) give every rooted subtree type at once
    nodes = [(u, p) for u in t.adj for p in t.adj[u]] + [(u, None) for u in t.adj]
    children = {(u, p): [(w, u) for w in t.adj[u] if w != p] for u, p in nodes}
    cls = refine(nodes, children, {n: None for n in nodes})
    target = cls[(t.root, None)]
    return [q for q in t.vertices if cls[(q, None)] == target]


def _witness(res: EmbedResult, limit: int = 12) -> dict:
    pairs = sorted(res.mapping.items())[:limit] if res.mapping else []
    return {"mapping_sample": [[q, list(a)] for q, a in pairs], "nodes": res.nodes}


def check_non_embed(st: ConstructionState, params: VerifyParams, searches: _Searches | None = None) -> CheckResult:
    name = "no_cross_embedding"
    searches = searches or _Searches(st, params.budget)
    nodes = 0
    inconclusive = []
    for L in range(params.ext_len + 1):
        for a in (T_SIDE, S_SIDE):
            res = searches.cross(a, _other(a), L)
            nodes += res.nodes
            if res.found:
                return _res(name, FAILED, f"{a} core embeds into the length-{L} extension of {_other(a)}",
                            witness=_witness(res))
            if res.status == "exhausted":
                inconclusive.append([a, L])
    bounds = {"ext_len": params.ext_len, "budget": params.budget}
    if inconclusive:
        return _res(name, INCONCLUSIVE, "search budget exhausted", bounds, {"runs": inconclusive})
    scope = "whole trees" if _finite(st) else "root pieces (subtrees of the trees)"
    return _res(name, BOUNDED,
                f"definitive none in both directions for lengths 0..{params.ext_len}; patterns are the {scope}",
                bounds)


def _finite(st: ConstructionState) -> bool:
    return all(p.host().size[p.root_state] == len(p.root_piece.tree) for _, p in _sides(st))


def check_self_embeddings(
    st: ConstructionState, params: VerifyParams, side: str, searches: _Searches | None = None
) -> CheckResult:
    name = f"self_embeddings_{side}"
    searches = searches or _Searches(st, params.budget)
    bounds = {"ext_len": params.ext_len, "budget": params.budget}
    for L in range(params.ext_len + 1):
        res = searches.root_moving(side, L)
        if res.found:
            return _res(name, FAILED, f"an embedding moves the root (length {L})", bounds, _witness(res))
        if res.status == "exhausted":
            return _res(name, INCONCLUSIVE, "search budget exhausted", bounds, {"length": L})
        fx = searches.fixing(side, L)
        if fx is None:
            return _res(name, INCONCLUSIVE, "search budget exhausted", bounds, {"length": L})
        identity, touches = fx
        if not identity:
            return _res(name, FAILED, "the identity embedding was not found (search bug)", bounds)
        if touches:
            return _res(name, FAILED, f"a root-fixing embedding reaches the extension (length {L})", bounds)
    detail = f"no root-moving embedding and image stays in {side} for lengths 0..{params.ext_len}"
    twins = [q for q in searches.root_orbit(side) if q != st.side(side).root_piece.tree.root]
    if twins:
        detail += f"; the root is fixed up to automorphisms swapping it with {twins}"
    return _res(name, BOUNDED, detail, bounds, {"root_orbit": twins} if twins else None)


def check_union_root_fixing(st: ConstructionState, params: VerifyParams, searches: _Searches) -> CheckResult:
    name = "union_embeddings_fix_root"
    bounds = {"ext_len": params.ext_len, "budget": params.budget}
    for L in range(params.ext_len + 1):
        for a in (T_SIDE, S_SIDE):
            # an embedding of a connected tree into a disjoint union lands in one part
            for res in (searches.root_moving(a, L), searches.cross(a, _other(a), L)):
                if res.found:
                    return _res(name, FAILED, f"{a} has an embedding not fixing its root (length {L})",
                                bounds, _witness(res))
                if res.status == "exhausted":
                    return _res(name, INCONCLUSIVE, "search budget exhausted", bounds, {"length": L})
    return _res(name, BOUNDED, f"every embedding found fixes the root, lengths 0..{params.ext_len}", bounds)


def check_stay_inside(st: ConstructionState, params: VerifyParams, searches: _Searches) -> CheckResult:
    name = "embeddings_stay_inside"
    bounds = {"ext_len": params.ext_len, "budget": params.budget}
    for L in range(params.ext_len + 1):
        for a in (T_SIDE, S_SIDE):
            fx = searches.fixing(a, L)
            if fx is None:
                return _res(name, INCONCLUSIVE, "search budget exhausted", bounds, {"length": L})
            if fx[1]:
                return _res(name, FAILED, f"an embedding of {a} reaches the extension (length {L})", bounds)
    return _res(name, BOUNDED, f"no embedding uses extension vertices, lengths 0..{params.ext_len}", bounds)


# -- enumeration and handled vertices --------------------------------------------


def _markers_of(st: ConstructionState, side: str, addr) -> str | None:
    p = st.side(side)
    return p.label(p.address_state(addr))


def check_enumeration(prev: ConstructionState | None, st: ConstructionState) -> CheckResult:
    name = "enumeration"
    e = st.enumeration
    for side, p in _sides(st):
        heads = e.head_t if side == T_SIDE else e.head_s
        if sorted(heads.values()) != sorted(p.root_piece.tree.adj):
            return _res(name, FAILED, "heads do not list the root piece exactly", witness={"side": side})
    if set(e.head_t) != set(e.head_s):
        return _res(name, FAILED, "index sets differ between the trees")
    for i in range(st.n + 1):
        if not e.used(i):
            return _res(name, FAILED, "an initial index is missing", witness={"index": i})
    for t in e.tails:
        # residue 0 would swallow the indices kept free below
        if t.residue % t.modulus == 0 or any(t.contains(i) for i in e.head_t):
            return _res(name, FAILED, "tail indices overlap", witness={"level": t.level})
    # indices divisible by every tail modulus and above all heads stay unused forever
    top = max(e.head_t) + 1
    m = max((t.modulus for t in e.tails), default=1)
    spare = [top + ((-top) % m) + j * m for j in range(3)]
    if any(e.used(i) for i in spare):
        return _res(name, FAILED, "complement of the index set looks finite")
    # tails: the counted vertices exist and lie in their level
    for t in e.tails:
        for side in (T_SIDE, S_SIDE):
            for mth in range(3 if t.count is None else min(3, t.count)):
                addr = tail_vertex(st, side, t.level, mth)
                if not in_level(st, side, t.level, addr) or len(addr) == 1:
                    return _res(name, FAILED, "a tail vertex lies outside its level", witness={"level": t.level})
    if prev is not None:
        pe = prev.enumeration
        for src, dst in ((pe.head_t, e.head_t), (pe.head_s, e.head_s)):
            if any(dst.get(i) != v for i, v in src.items()):
                return _res(name, FAILED, "the enumeration does not extend the previous one")
        if e.tails[: len(pe.tails)] != pe.tails or e.core_bounds[: len(pe.core_bounds)] != pe.core_bounds:
            return _res(name, FAILED, "tail records changed")
        for t in pe.tails:
            for side in (T_SIDE, S_SIDE):
                for mth in range(3 if t.count is None else min(3, t.count)):
                    j = t.index(mth)
                    if enumerated(prev, side, j) != enumerated(st, side, j):
                        return _res(name, FAILED, "a tail index changed its vertex", witness={"index": j})
    return _res(name, PROVED, f"{len(e.head_t)} head indices, {len(e.tails)} tail classes")


def check_enumerated_unmarked(st: ConstructionState) -> CheckResult:
    name = "enumerated_unmarked"
    bad = {st.R, st.B}
    for j in range(st.n + 1):
        for side in (T_SIDE, S_SIDE):
            if _markers_of(st, side, enumerated(st, side, j)) in bad:
                return _res(name, FAILED, "an early vertex is a marker leaf", witness={"side": side, "index": j})
    return _res(name, PROVED, f"indices 0..{st.n} avoid {st.R} and {st.B}")


def check_handled(prev: ConstructionState | None, st: ConstructionState) -> CheckResult:
    name = "handled_sets"
    n = st.n
    if not (len(st.X) == len(st.Y) == n) or len(set(st.X)) != n or len(set(st.Y)) != n:
        return _res(name, FAILED, "handled sets have the wrong size")
    if prev is not None:
        if st.X[: n - 1] != prev.X or st.Y[: n - 1] != prev.Y:
            return _res(name, FAILED, "handled sets do not extend the previous ones")
    for m in range(n):
        if 2 * m + 1 <= n:
            need = {enumerated(st, T_SIDE, j) for j in range(m + 1)}
            if not need <= set(st.X[: 2 * m + 1]):
                return _res(name, FAILED, "an early T vertex is not handled in time", witness={"m": m})
        if 2 * (m + 1) <= n:
            need = {enumerated(st, S_SIDE, j) for j in range(m + 1)}
            if not need <= set(st.Y[: 2 * (m + 1)]):
                return _res(name, FAILED, "an early S vertex is not handled in time", witness={"m": m})
    bad = {st.R, st.B}
    for side, addrs in ((T_SIDE, st.X), (S_SIDE, st.Y)):
        for a in addrs:
            if _markers_of(st, side, a) in bad:
                return _res(name, FAILED, "a handled vertex is a marker leaf",
                            witness={"side": side, "address": list(a)})
    return _res(name, PROVED, f"X and Y hold {n} vertices each")


# -- certificates --------------------------------------------------------------


def _cert_depths(st: ConstructionState, depth: int) -> list[int]:
    if not st.ktildes:
        return [depth]
    kt = st.ktildes[-1]
    return sorted({kt, 2 * kt, 3 * kt, depth})


def check_hypomorphism(st: ConstructionState, params: VerifyParams, edges: bool = False,
                       classes: _Classes | None = None) -> CheckResult:
    name = "edge_hypomorphism" if edges else "vertex_hypomorphism"
    certs = st.edge_certs if edges else st.certs
    phi = {x[0]: y[0] for x, y in zip(st.X, st.Y)}
    if set(certs) != set(phi):
        return _res(name, FAILED, "certificates do not match the handled vertices")
    classes = classes or _Classes(st.T, st.S)
    depths = _cert_depths(st, params.depth_for(st))
    for x in sorted(certs):
        c = certs[x]
        if c.y != phi[x]:
            return _res(name, FAILED, "certificate pairs the wrong vertices", witness={"x": x})
        v = validate_certificate(st.T, st.S, c, classes)
        if not v:
            return _res(name, FAILED, v.reason, witness={"x": x, **v.witness})
        o = expansion_codes(st.T, st.S, c, depths)
        if not o:
            return _res(name, FAILED, o.reason, witness={"x": x, **o.witness})
    return _res(name, PROVED, f"{len(certs)} certificates validate; expansions agree at depths {depths}",
                {"depths": depths})


def check_isomorphism_family(prev: ConstructionState | None, st: ConstructionState,
                             vertex: CheckResult, edge: CheckResult) -> CheckResult:
    name = "isomorphism_family"
    if prev is not None:
        for x, c in prev.certs.items():
            if x not in st.certs or not st.certs[x].same_as(c):
                return _res(name, FAILED, "an old certificate changed", witness={"x": x})
    for r in (vertex, edge):
        if r.failed:
            return _res(name, FAILED, f"{r.name}: {r.detail}", witness=r.witness)
    return _res(name, PROVED, "certificates restrict to their predecessors; colour-sensitive validation passed")


def check_edge_map(st: ConstructionState) -> CheckResult:
    name = "edge_map"
    seen = set()
    for x, y in zip(st.X, st.Y):
        et, es = edge_to_root(st.T, x[0]), edge_to_root(st.S, y[0])
        c = st.edge_certs.get(x[0])
        if c is None or tuple(c.removed_t) != et or tuple(c.removed_s) != es or c.y != y[0]:
            return _res(name, FAILED, "edge certificate does not match e(x), e(phi(x))", witness={"x": x[0]})
        if es in seen:
            return _res(name, FAILED, "edge map is not injective", witness={"x": x[0]})
        seen.add(es)
    return _res(name, PROVED, f"{len(seen)} edges paired")


# -- closure -------------------------------------------------------------------


def stored_closure(prev: ConstructionState, st: ConstructionState):
    """The promise structure of the step ``prev -> st`` with the stored trees as its closure."""
    side, target = select_target(prev)
    split = split_at(prev, side, target)
    g = build_gadgets(prev, split, compute_ktilde(prev, split))
    cr = closure(g.promises)
    s_tree = st.S.root_piece.tree
    S_shift = Presentation(
        Piece(s_tree.relabelled({v: v + g.s_offset for v in s_tree.adj}), st.S.root_piece.provenance),
        st.S.rules, st.S.level,
    )
    stored = ClosureResult(g.promises, (st.T, S_shift), cr.placeholders)
    return g, cr, stored


def _same_trees(a: Presentation, b: Presentation) -> bool:
    """Equal root pieces and rules, ignoring provenance strings."""
    return (
        a.root_piece.tree.same_as(b.root_piece.tree)
        and a.rules.keys() == b.rules.keys()
        and all(a.rules[c].tree.same_as(b.rules[c].tree) for c in a.rules)
    )


def check_closure(prev: ConstructionState | None, st: ConstructionState, params: VerifyParams):
    names = ("promise_uncoloured", "promise_coloured", "gluing_oracle")
    if prev is None:
        return [_res(n, PROVED, "base case: no promises") for n in names]
    g, cr, stored = stored_closure(prev, st)
    depth = 3 * g.ktilde
    out = []
    place = {p.index for p in cr.placeholders}
    for name, fn in zip(names[:2], (check_cl2, check_cl3)):
        count = 0
        bad = None
        for i, leaves in enumerate(g.promises.leaf_sets):
            if i in place:
                continue
            for leaf in sorted(leaves):
                count += 1
                if not fn(stored, i, leaf, depth):
                    bad = {"promise": i, "leaf": leaf}
                    break
            if bad:
                break
        if bad:
            out.append(_res(name, FAILED, "a promise leaf grows the wrong subtree", witness=bad))
        else:
            out.append(_res(name, PROVED, f"{count} promise leaves match exactly (bisimulation)"))
    same = all(_same_trees(a, b) for a, b in zip(cr.components, stored.components))
    comps = []
    for rounds in (1, 2, 3):
        comps = compare_with_gluing(g.promises, rounds, depth)
        if all(c.equal for c in comps):
            break
    ok = all(c.equal for c in comps)
    if not same:
        out.append(_res(names[2], FAILED, "stored trees differ from the recomputed closure"))
    elif not ok:
        out.append(_res(names[2], FAILED, "literal gluing disagrees with the closure",
                        witness={"rounds": comps[0].rounds, "radius": depth}))
    else:
        out.append(_res(names[2], PROVED, f"byte-equal codes at radius {depth} after {comps[0].rounds} rounds",
                        {"radius": depth, "rounds": comps[0].rounds}))
    return out


# -- non-isomorphism -------------------------------------------------------------


def _unfold_markers(p: Presentation, colours: set[str]) -> ColoredTree:
    """The root piece with every leaf of the given expanding colours replaced by
    one copy of its rule piece; remaining expanding leaves become cut marks."""
    t = p.root_piece.tree
    verts = list(t.adj)
    edges = t.edges()
    cols = {v: c for v, c in t.colours.items() if c not in p.rules}
    cuts = {v for v, c in t.colours.items() if c in p.rules and c not in colours}
    fresh = max(t.adj) + 1
    for v, c in sorted(t.colours.items()):
        if c not in colours or c not in p.rules:
            continue
        rule = p.rules[c].tree
        ids = {rule.root: v}
        for w in rule.vertices:
            if w != rule.root:
                ids[w] = fresh
                verts.append(fresh)
                fresh += 1
        edges += [(ids[a], ids[b]) for a, b in rule.edges()]
        for w, cw in rule.colours.items():
            if cw in p.rules:
                cuts.add(ids[w])
            else:
                cols[ids[w]] = cw
    return ColoredTree.from_edges(verts, edges, t.root, cols, cuts)


def check_nonisomorphic(st: ConstructionState, params: VerifyParams, nxt: ConstructionState | None = None,
                        searches: _Searches | None = None) -> CheckResult:
    name = "nonisomorphic"
    depth = params.depth_for(st)
    if presentations_equivalent(st.T, st.S, colours=False):
        return _res(name, FAILED, "the rooted trees are isomorphic")
    # root-free: no leaf of the S root piece can play the part of the T root
    r_t = st.T.root_piece.tree.root
    s_tree = st.S.root_piece.tree
    candidates = [v for v in s_tree.adj if len(s_tree.adj[v]) == 1 and not st.S.is_expanding(ROOT, v)]
    survivors = []
    for v in candidates:
        radius = 1
        alive = True
        while radius <= depth:
            a, _ = st.T.ball((r_t,), radius)
            b, _ = st.S.ball((v,), radius)
            if canonical_code(a, colours=False) != canonical_code(b, colours=False):
                alive = False
                break
            if len(a) > params.expansion_cap:
                break
            radius *= 2
        if alive:
            survivors.append(v)
    for v in survivors:
        if presentations_equivalent(st.T, st.S.rerooted(v), colours=False):
            return _res(name, FAILED, "S rooted at a core leaf is isomorphic to T", witness={"vertex": v})
    # the deletion argument: remove long bare paths from the next tree
    nxt = nxt or step(st)
    unfolded = _unfold_markers(nxt.T, {st.R, st.B})
    t0 = enumerated(st, T_SIDE, 0)[0]
    cut = params.bare_cut if params.bare_cut is not None else st.k
    comp = next(c.tree for c in bare_decompose(unfolded, cut) if t0 in c.tree.adj)
    core = st.T.root_piece.tree
    cuts = {v for v, c in core.colours.items() if c in st.T.rules}
    marked = [v for v, c in core.colours.items() if c in (st.R, st.B)]
    expected, _ = bare_extension(ColoredTree(core.adj, core.root, {}, frozenset(cuts)), marked, 0)
    if core.root not in comp.adj:
        return _res(name, FAILED, "after deleting long bare paths t_0 is cut off from the root")
    comp_root = comp.rerooted(core.root)
    if rooted_iso(ColoredTree(comp_root.adj, comp_root.root, {}, comp_root.cuts), expected, colours=False) is None:
        return _res(name, FAILED, "after deleting long bare paths the component of t_0 is not the expected one")
    searches = searches or _Searches(st, params.budget)
    L = st.k + 1
    emb = searches.embedder(T_SIDE, S_SIDE, L, pattern=comp_root)
    res = run_deep(emb.search)
    if res.found:
        return _res(name, FAILED, "the component of t_0 embeds into the ball around S", witness=_witness(res))
    bounds = {"depth": depth, "ball_radius": L, "budget": params.budget, "bare_cut": cut}
    if res.status == "exhausted":
        return _res(name, INCONCLUSIVE, "search budget exhausted", bounds)
    return _res(name, BOUNDED,
                f"rooted trees not bisimilar; {len(candidates)} S core leaves ruled out as root images "
                f"({len(survivors)} needed the exact test); component of t_0 does not embed into the "
                f"radius-{L} ball around S",
                bounds)


# -- everything ------------------------------------------------------------------


def check_all(
    st: ConstructionState,
    params: VerifyParams = VerifyParams(),
    prev: ConstructionState | None = None,
    nxt: ConstructionState | None = None,
) -> CheckReport:
    """Run every check on ``st``.  ``prev`` is required for ``n > 0``."""
    if st.n > 0 and (prev is None or prev.n != st.n - 1):
        raise ValueError("checking a state after the base case needs its predecessor")
    timings: dict[str, float] = {}
    results: dict[str, CheckResult] = {}

    def run(name: str, fn: Callable[[], CheckResult | list[CheckResult]]) -> None:
        t0 = time.perf_counter()
        got = fn()
        for r in got if isinstance(got, list) else [got]:
            results[r.name] = r
        timings[name] = time.perf_counter() - t0

    searches = _Searches(st, params.budget)
    run("nested_trees", lambda: check_nested(prev, st))
    run("max_degree", lambda: check_degree(st, params))
    run("root_colours", lambda: check_root_colours(st))
    run("binary_height_bound", lambda: check_binary(st, params))
    run("bare_path_bound", lambda: check_bare(st, params))
    run("ball_T", lambda: check_ball(prev, st, T_SIDE))
    run("ball_S", lambda: check_ball(prev, st, S_SIDE))
    run("no_cross_embedding", lambda: check_non_embed(st, params, searches))
    run("self_embeddings_T", lambda: check_self_embeddings(st, params, T_SIDE, searches))
    run("self_embeddings_S", lambda: check_self_embeddings(st, params, S_SIDE, searches))
    run("enumeration", lambda: check_enumeration(prev, st))
    run("enumerated_unmarked", lambda: check_enumerated_unmarked(st))
    run("handled_sets", lambda: check_handled(prev, st))
    classes = _Classes(st.T, st.S)
    run("vertex_hypomorphism", lambda: check_hypomorphism(st, params, False, classes))
    run("edge_hypomorphism", lambda: check_hypomorphism(st, params, True, classes))
    run("isomorphism_family", lambda: check_isomorphism_family(
        prev, st, results["vertex_hypomorphism"], results["edge_hypomorphism"]))
    run("closure", lambda: check_closure(prev, st, params))
    run("union_embeddings_fix_root", lambda: check_union_root_fixing(st, params, searches))
    run("embeddings_stay_inside", lambda: check_stay_inside(st, params, searches))
    run("growth_law", lambda: check_growth(st))
    run("nonisomorphic", lambda: check_nonisomorphic(st, params, nxt, searches))
    run("edge_map", lambda: check_edge_map(st))
    ordered = [results[n] for n in CHECKS]
    return CheckReport(st.n, params.to_doc(st), ordered, timings)
