"""Validation of isomorphism certificates between presented trees.

A certificate claims that ``T - x`` and ``S - y`` are isomorphic (or
``T - e`` and ``S - f`` for edges ``e``, ``f``).  It carries a finite
injective map between root-piece vertices.  The validator never rebuilds
the construction; it checks that the map extends to a full isomorphism:

* the map is injective, avoids the removed vertices, and preserves
  adjacency in both directions and marker colours;
* at every mapped pair the unmapped branches on both sides have equal
  multisets of isomorphism classes (decided by bisimulation);
* no such branch contains the removed vertex or edge;
* mapped vertices in one component of ``T - x`` form a connected set whose
  image lies in a single component of ``S - y``, distinct components going
  to distinct components;
* the components missed by the map are matched by isomorphism class.

Together these imply that the map extends branch by branch to an
isomorphism of the whole (possibly infinite) forests.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core.tree import component_of
from .presentation import ROOT, Presentation, StateSpace


@dataclass(frozen=True)
class Validation:
    ok: bool
    reason: str = ""
    witness: Mapping = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


def _fail(reason: str, **witness) -> Validation:
    return Validation(False, reason, {k: repr(v) for k, v in witness.items()})


class _Side:
    """One tree with a removed vertex ``(x,)`` or edge ``(a, b)``."""

    def __init__(self, p: Presentation, removed: tuple[int, ...], tag: str):
        self.p = p
        self.removed = removed
        self.tag = tag
        self.t = p.root_piece.tree
        self.parent = p._parents[ROOT]
        # vertices on the path from the first removed vertex up to the root
        self.anc = set()
        v = removed[0]
        while v is not None:
            self.anc.add(v)
            v = self.parent[v]

    def is_removed_vertex(self, v: int) -> bool:
        return len(self.removed) == 1 and v == self.removed[0]

    def cut(self, u: int, w: int) -> bool:
        """Whether the root-piece edge ``u w`` is absent after the removal."""
        if len(self.removed) == 1:
            return self.removed[0] in (u, w)
        return {u, w} == set(self.removed)

    def beyond_contains_removed(self, u: int, w: int) -> bool:
        """Whether the branch beyond root-piece edge ``u -> w`` meets the removal."""
        if self.parent.get(w) == u:  # w is a child of u
            return w in self.anc
        return u not in self.anc

    def components(self) -> dict[int, int]:
        """Root-piece vertex -> index of its component after the removal."""
        comp: dict[int, int] = {}
        idx = 0
        for s in self.t.adj:
            if s in comp or self.is_removed_vertex(s):
                continue
            comp[s] = idx
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for w in self.t.adj[v]:
                    if w not in comp and not self.is_removed_vertex(w) and not self.cut(v, w):
                        comp[w] = idx
                        queue.append(w)
            idx += 1
        return comp


class _Classes:
    """Isomorphism classes of branches, shared by both trees."""

    def __init__(self, T: Presentation, S: Presentation):
        self.space = StateSpace(colours=True)
        self.pres = {"T": T, "S": S}
        self.space.add(T, "T")
        self.space.add(S, "S")
        self.extra: dict[tuple, tuple] = {}

    def branch(self, side: _Side, u: int, w: int) -> tuple:
        """Node for the root-piece branch beyond ``u -> w``."""
        p = side.p
        if side.parent.get(w) == u:
            return (side.tag, p.state_of(ROOT, w))
        key = (side.tag, u, w)
        if key not in self.extra:
            sub = p.subpresentation((u, w))
            self.extra[key] = self.space.add(sub, key)
        return self.extra[key]

    def rule_children(self, side: _Side, u: int) -> list[tuple]:
        p = side.p
        if not p.is_expanding(ROOT, u):
            return []
        return [(side.tag, c) for c in p.children(p.state_of(ROOT, u))]

    def cls(self, node: tuple) -> int:
        return self.space.classes()[node]


def _outward(side: _Side, classes: _Classes, u: int, domain: set[int]) -> list[tuple] | Validation:
    out = []
    for w in side.t.adj[u]:
        if w in domain or side.is_removed_vertex(w) or side.cut(u, w):
            continue
        if side.beyond_contains_removed(u, w):
            return _fail("an unmapped branch contains the removed part", side=side.tag, at=u, towards=w)
        out.append(classes.branch(side, u, w))
    out.extend(classes.rule_children(side, u))
    return out


def _missed_components(
    side: _Side, classes: _Classes, comp: dict[int, int], hit: set[int]
) -> list[tuple]:
    """Branch nodes of the components that contain no mapped vertex."""
    out = []
    if len(side.removed) == 1:
        x = side.removed[0]
        for w in side.t.adj[x]:
            if comp[w] not in hit:
                out.append(classes.branch(side, x, w))
        out.extend(classes.rule_children(side, x))
    else:
        a, b = side.removed
        for u, w in ((a, b), (b, a)):
            if comp[w] not in hit:
                out.append(classes.branch(side, u, w))
    return out


def _connected(vertices: set[int], t) -> bool:
    if not vertices:
        return True
    start = next(iter(vertices))
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in t.adj[v]:
            if w in vertices and w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(vertices)


def validate_map(
    T: Presentation,
    S: Presentation,
    mapping: Mapping[int, int],
    removed_t: tuple[int, ...],
    removed_s: tuple[int, ...],
    classes: _Classes | None = None,
) -> Validation:
    """Check that ``mapping`` extends to an isomorphism of the two forests.

    ``removed_t`` is ``(x,)`` for a deleted vertex or ``(a, b)`` for a
    deleted edge of ``T``'s root piece; likewise ``removed_s``.
    """
    classes = classes or _Classes(T, S)
    ts, ss = _Side(T, removed_t, "T"), _Side(S, removed_s, "S")
    for side in (ts, ss):
        for v in side.removed:
            if v not in side.t.adj:
                return _fail("removed vertex is not in the root piece", side=side.tag, vertex=v)
        if len(side.removed) == 2 and not side.t.has_edge(*side.removed):
            return _fail("removed edge is not an edge", side=side.tag, edge=side.removed)
    if not mapping:
        return _fail("empty map")
    dom, img = set(mapping), set(mapping.values())
    if len(img) != len(dom):
        return _fail("map is not injective")
    for side, vs in ((ts, dom), (ss, img)):
        for v in vs:
            if v not in side.t.adj:
                return _fail("mapped vertex outside the root piece", side=side.tag, vertex=v)
            if side.is_removed_vertex(v):
                return _fail("removed vertex is mapped", side=side.tag, vertex=v)
    # adjacency both ways and marker colours
    for u, hu in mapping.items():
        lu = T.label(T.state_of(ROOT, u))
        lh = S.label(S.state_of(ROOT, hu))
        if lu != lh:
            return _fail("marker colours differ", vertex=u, image=hu, colours=(lu, lh))
        for w in ts.t.adj[u]:
            if w in dom and not ts.cut(u, w):
                hw = mapping[w]
                if not ss.t.has_edge(hu, hw) or ss.cut(hu, hw):
                    return _fail("edge not preserved", edge=(u, w))
    inverse = {hu: u for u, hu in mapping.items()}
    for hu, u in inverse.items():
        for hw in ss.t.adj[hu]:
            if hw in img and not ss.cut(hu, hw):
                w = inverse[hw]
                if not ts.t.has_edge(u, w) or ts.cut(u, w):
                    return _fail("edge not reflected", edge=(hu, hw))
    # components
    ct, cs = ts.components(), ss.components()
    by_comp: dict[int, set[int]] = {}
    for u in dom:
        by_comp.setdefault(ct[u], set()).add(u)
    image_comp: dict[int, int] = {}
    for c, vs in by_comp.items():
        if not _connected(vs, ts.t):
            return _fail("mapped vertices of one component are not connected", component=sorted(vs)[:5])
        targets = {cs[mapping[u]] for u in vs}
        if len(targets) != 1:
            return _fail("one component is split across several", component=sorted(vs)[:5])
        (target,) = targets
        if target in image_comp.values():
            return _fail("two components map into one")
        image_comp[c] = target
    # branches at mapped pairs
    pending = []
    for u, hu in mapping.items():
        a = _outward(ts, classes, u, dom)
        if isinstance(a, Validation):
            return a
        b = _outward(ss, classes, hu, img)
        if isinstance(b, Validation):
            return b
        pending.append((u, hu, a, b))
    miss_t = _missed_components(ts, classes, ct, set(image_comp))
    miss_s = _missed_components(ss, classes, cs, set(image_comp.values()))
    for u, hu, a, b in pending:
        if Counter(classes.cls(n) for n in a) != Counter(classes.cls(n) for n in b):
            return _fail("unmapped branches differ", vertex=u, image=hu)
    if Counter(classes.cls(n) for n in miss_t) != Counter(classes.cls(n) for n in miss_s):
        return _fail("components without mapped vertices differ")
    return Validation(True)


def validate_certificate(T: Presentation, S: Presentation, cert, classes: _Classes | None = None) -> Validation:
    """Validate a vertex or edge certificate against the given trees."""
    if cert.kind == "hypo_vertex":
        return validate_map(T, S, cert.core_map, (cert.x,), (cert.y,), classes)
    if cert.kind == "hypo_edge":
        if cert.core_map.get(cert.x) != cert.y:
            return _fail("edge certificate does not pair the edge ends", x=cert.x, y=cert.y)
        return validate_map(T, S, cert.core_map, tuple(cert.removed_t), tuple(cert.removed_s), classes)
    return _fail(f"not an isomorphism certificate: {cert.kind}")


# -- expansion cross-check ---------------------------------------------------


def _component_at(side: _Side, comp: dict[int, int], u: int) -> Presentation:
    """The component of the forest containing root-piece vertex ``u``, rooted at ``u``."""
    rem = side.removed
    if len(rem) == 1:
        x = rem[0]
        for w in side.t.adj[x]:
            if comp.get(w) == comp[u]:
                sub = side.p.subpresentation((x, w))
                break
        else:
            raise ValueError("vertex is not beside the removed one")
    else:
        a, b = rem
        sub = side.p.subpresentation((a, b) if comp[b] == comp[u] else (b, a))
    return sub.rerooted(u) if u != sub.root_piece.tree.root else sub


def expansion_codes(
    T: Presentation, S: Presentation, cert, depths: Sequence[int]
) -> Validation:
    """Compare depth-limited expansions of both forests around mapped base points.

    Base points are the root, the neighbours of the removed vertex (or the
    ends of the removed edge) and their images.  Components without mapped
    vertices are compared as multisets.  Codes are colour-sensitive and
    must be byte-equal.
    """
    if cert.kind == "hypo_vertex":
        rt, rs = (cert.x,), (cert.y,)
    else:
        rt, rs = tuple(cert.removed_t), tuple(cert.removed_s)
    ts, ss = _Side(T, rt, "T"), _Side(S, rs, "S")
    ct, cs = ts.components(), ss.components()
    m = cert.core_map
    near = set(ts.t.adj[rt[0]]) if len(rt) == 1 else set(rt)
    bases = sorted(
        u for u in near | {ts.t.root}
        if u in m and not T.is_expanding(ROOT, u) and not S.is_expanding(ROOT, m[u])
    )
    for u in bases:
        a = _component_at(ts, ct, u)
        b = _component_at(ss, cs, m[u])
        for d in depths:
            if a.ball_code(d) != b.ball_code(d):
                return _fail("expansions differ", base=u, image=m[u], depth=d)
    hit_t = {ct[u] for u in m}
    hit_s = {cs[v] for v in m.values()}

    def loose(side: _Side, comp, hit) -> list[Presentation]:
        out = []
        if len(side.removed) == 1:
            x = side.removed[0]
            for w in side.t.adj[x]:
                if comp[w] not in hit:
                    out.append(side.p.subpresentation((x, w)))
            if side.p.is_expanding(ROOT, x):
                c = side.t.colours[x]
                rule = side.p.rules[c].tree
                for w in rule.adj[rule.root]:
                    out.append(side.p._with_root_piece(component_of(rule, (rule.root, w))))
        else:
            a, b = side.removed
            for u, w in ((a, b), (b, a)):
                if comp[w] not in hit:
                    out.append(side.p.subpresentation((u, w)))
        return out

    for d in depths:
        la = sorted(p.ball_code(d) for p in loose(ts, ct, hit_t))
        lb = sorted(p.ball_code(d) for p in loose(ss, cs, hit_s))
        if la != lb:
            return _fail("unmapped components differ", depth=d)
    return Validation(True)

