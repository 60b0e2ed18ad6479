"""Finitely presented infinite trees.

A :class:`Presentation` is a root piece plus substitution rules.  A rule maps
an *expanding* colour to a rooted piece; every leaf carrying that colour is
identified with the root of a fresh copy of the piece, recursively.  All
other colours are *markers* and survive untouched.

Vertices of the denoted tree are named by addresses: tuples of vertex ids.
The first entry is a vertex of the root piece; each further entry is a
non-root vertex of the piece substituted at the previous entry, which must
be an expanding leaf.  Root-piece vertices therefore have one-element
addresses, and these stay valid when a later presentation keeps the same
root-piece ids.

The analyses work on *states*: a state is a pair ``(piece key, vertex)``
with the root piece keyed by ``""`` and rule pieces keyed by their colour.
An expanding leaf has the state of the root of its rule piece.  All vertices
with the same state have isomorphic subtrees, so finitely many states
describe the whole tree.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

from .core.analysis import _hang
from .core.canon import encode_levels
from .core.embed import Host, downward_binary_heights
from .core.refine import refine
from .core.tree import ColoredTree, TreeError, component_of

ROOT = ""
State = tuple[str, int]
Address = tuple[int, ...]


class PresentationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Piece:
    tree: ColoredTree
    provenance: str = ""

    def to_doc(self) -> dict:
        doc = self.tree.to_doc()
        if self.provenance:
            doc["provenance"] = self.provenance
        return doc

    @classmethod
    def from_doc(cls, doc: Mapping) -> "Piece":
        return cls(ColoredTree.from_doc(doc), doc.get("provenance", ""))


@dataclass(frozen=True, eq=False)
class Presentation:
    root_piece: Piece
    rules: Mapping[str, Piece] = field(default_factory=dict)
    level: int = 0

    def __post_init__(self) -> None:
        self._validate_piece(ROOT, self.root_piece)
        for c, piece in self.rules.items():
            self._validate_piece(c, piece)
            if len(piece.tree) < 2:
                raise PresentationError(f"rule {c!r} is unproductive (single vertex)")
            if piece.tree.root in piece.tree.colours:
                raise PresentationError(f"rule {c!r} has a coloured root")

    def _validate_piece(self, key: str, piece: Piece) -> None:
        t = piece.tree
        if t.root is None:
            raise PresentationError(f"piece {key!r} has no root")
        for v, c in t.colours.items():
            if c in self.rules:
                if v == t.root:
                    raise PresentationError(f"piece {key!r}: root carries expanding colour {c!r}")
                if len(t.adj[v]) != 1:
                    raise PresentationError(f"piece {key!r}: expanding colour on non-leaf {v}")

    # -- pieces -----------------------------------------------------------

    def piece(self, key: str) -> ColoredTree:
        return self.root_piece.tree if key == ROOT else self.rules[key].tree

    @property
    def keys(self) -> list[str]:
        return [ROOT] + sorted(self.rules)

    @cached_property
    def _kids(self) -> dict[str, dict[int, list[int]]]:
        return {k: self.piece(k).children_map() for k in self.keys}

    @cached_property
    def _parents(self) -> dict[str, dict[int, int | None]]:
        return {k: self.piece(k).parents() for k in self.keys}

    def is_expanding(self, key: str, v: int) -> bool:
        return self.piece(key).colours.get(v) in self.rules

    def marker(self, key: str, v: int) -> str | None:
        c = self.piece(key).colours.get(v)
        return None if c is None or c in self.rules else c

    def state_of(self, key: str, v: int) -> State:
        c = self.piece(key).colours.get(v)
        if c in self.rules:
            return (c, self.rules[c].tree.root)
        return (key, v)

    @property
    def root_state(self) -> State:
        return (ROOT, self.root_piece.tree.root)

    # -- state graph ------------------------------------------------------

    @cached_property
    def _graph(self) -> tuple[list[State], dict[State, tuple[State, ...]], dict[State, Address]]:
        kids = self._kids
        order = [self.root_state]
        children: dict[State, tuple[State, ...]] = {}
        rep: dict[State, Address] = {self.root_state: (self.root_state[1],)}
        i = 0
        while i < len(order):
            s = order[i]
            i += 1
            key, v = s
            out = []
            for w in kids[key][v]:
                c = self.state_of(key, w)
                out.append(c)
                if c not in rep:
                    base = rep[s] + (w,) if self._is_rule_root(s) else rep[s][:-1] + (w,)
                    rep[c] = base
                    order.append(c)
            children[s] = tuple(out)
        return order, children, rep

    def _is_rule_root(self, s: State) -> bool:
        key, v = s
        return key != ROOT and v == self.rules[key].tree.root

    @property
    def states(self) -> list[State]:
        return self._graph[0]

    def children(self, s: State) -> tuple[State, ...]:
        return self._graph[1][s]

    def label(self, s: State) -> str | None:
        return self.marker(*s)

    def degree(self, s: State) -> int:
        return len(self.children(s)) + (0 if s == self.root_state else 1)

    def representative(self, s: State) -> Address:
        return self._graph[2][s]

    def max_degree(self) -> int:
        return max(self.degree(s) for s in self.states)

    # -- addresses --------------------------------------------------------

    def resolve(self, addr: Address) -> tuple[str, int]:
        """The (piece key, vertex) holding the addressed vertex."""
        if not addr:
            raise PresentationError("empty address")
        key = ROOT
        t = self.piece(key)
        for i, v in enumerate(addr):
            if v not in t.adj:
                raise PresentationError(f"address {addr}: {v} not in piece {key!r}")
            if i > 0 and v == t.root:
                raise PresentationError(f"address {addr}: names a rule root")
            if i < len(addr) - 1:
                c = t.colours.get(v)
                if c not in self.rules:
                    raise PresentationError(f"address {addr}: {v} is not an expanding leaf")
                key = c
                t = self.piece(key)
        return key, addr[-1]

    def address_state(self, addr: Address) -> State:
        return self.state_of(*self.resolve(addr))

    def child_addresses(self, addr: Address) -> list[Address]:
        key, v = self.resolve(addr)
        c = self.piece(key).colours.get(v)
        if c in self.rules:
            r = self.rules[c].tree.root
            return [addr + (w,) for w in self._kids[c][r]]
        return [addr[:-1] + (w,) for w in self._kids[key][v]]

    def parent_address(self, addr: Address) -> Address | None:
        key, v = self.resolve(addr)
        p = self._parents[key][v]
        if p is None:
            return None
        if key != ROOT and p == self.rules[key].tree.root:
            return addr[:-1]
        return addr[:-1] + (p,)

    def neighbour_addresses(self, addr: Address) -> list[Address]:
        out = self.child_addresses(addr)
        p = self.parent_address(addr)
        return out if p is None else [p] + out

    def vertex_iter(self) -> Iterator[Address]:
        """Breadth-first stream of addresses of the denoted tree."""
        queue = deque([(self.root_state[1],)])
        while queue:
            a = queue.popleft()
            yield a
            queue.extend(self.child_addresses(a))

    # -- expansions -------------------------------------------------------

    def expand(
        self, depth: int, keep_root_ids: bool = False, with_addresses: bool = False
    ) -> ColoredTree | tuple[ColoredTree, dict[int, Address]]:
        """Ball of radius ``depth`` around the root, with cut marks.

        With ``keep_root_ids`` vertices of the root piece keep their ids and
        other vertices get fresh ids above them; otherwise ids follow
        breadth-first order.
        """
        root_ids = self.root_piece.tree.adj
        fresh = (max(root_ids) + 1) if keep_root_ids else 0

        def new_id(s: State) -> int:
            nonlocal fresh
            if keep_root_ids and s[0] == ROOT:
                return s[1]
            fresh += 1
            return fresh - 1

        rs = self.root_state
        rid = new_id(rs)
        ids = [rid]
        edges = []
        colours = {}
        cuts = []
        addrs: dict[int, Address] = {rid: (rs[1],)} if with_addresses else {}
        frontier = [(rid, rs, (rs[1],) if with_addresses else None)]
        for d in range(depth + 1):
            nxt = []
            for vid, s, a in frontier:
                lab = self.label(s)
                if lab is not None:
                    colours[vid] = lab
                ks = self.children(s)
                if d == depth:
                    if ks:
                        cuts.append(vid)
                    continue
                child_addrs = self.child_addresses(a) if with_addresses else None
                for j, c in enumerate(ks):
                    cid = new_id(c)
                    ids.append(cid)
                    edges.append((vid, cid))
                    ca = child_addrs[j] if with_addresses else None
                    if with_addresses:
                        addrs[cid] = ca
                    nxt.append((cid, c, ca))
            frontier = nxt
        t = ColoredTree.from_edges(ids, edges, root=rid, colours=colours, cuts=cuts, check=False)
        return (t, addrs) if with_addresses else t

    def ball(self, addr: Address, radius: int) -> tuple[ColoredTree, dict[int, Address]]:
        """Ball of the given radius around an addressed vertex (centre has id 0)."""
        self.resolve(addr)
        ids = {addr: 0}
        order = [addr]
        edges = []
        cuts = []
        colours = {}
        frontier = [addr]
        for d in range(radius + 1):
            nxt = []
            for a in frontier:
                lab = self.label(self.address_state(a))
                if lab is not None:
                    colours[ids[a]] = lab
                nbrs = self.neighbour_addresses(a)
                if d == radius:
                    if any(b not in ids for b in nbrs):
                        cuts.append(ids[a])
                    continue
                for b in nbrs:
                    if b not in ids:
                        ids[b] = len(order)
                        order.append(b)
                        edges.append((ids[a], ids[b]))
                        nxt.append(b)
            frontier = nxt
        t = ColoredTree.from_edges(range(len(order)), edges, root=0, colours=colours, cuts=cuts)
        return t, {i: a for a, i in ids.items()}

    def ball_code(self, depth: int, colours: bool = True) -> bytes:
        """Canonical code of ``expand(depth)`` computed on shared states.

        Byte-identical to ``canonical_code(self.expand(depth))`` (with the
        same colour sensitivity) but never materialises the expansion.
        """
        levels = []
        counts = []
        row = {self.root_state: 1}
        for d in range(depth + 1):
            level = {}
            nxt: dict[State, int] = {}
            for s, cnt in row.items():
                ks = self.children(s)
                lab = (self.label(s) or "") if colours else ""
                if d == depth:
                    level[s] = (lab, bool(ks), ())
                else:
                    level[s] = (lab, False, ks)
                    for c in ks:
                        nxt[c] = nxt.get(c, 0) + cnt
            levels.append(level)
            counts.append(row)
            row = nxt
            if not row:
                break
        return encode_levels(levels, counts)

    # -- derived presentations --------------------------------------------

    def _with_root_piece(self, tree: ColoredTree, provenance: str = "") -> "Presentation":
        r = tree.root
        c = tree.colours.get(r)
        if c in self.rules and len(tree) == 1:
            return Presentation(self.rules[c], self.rules, self.level)
        return Presentation(Piece(tree, provenance or self.root_piece.provenance), self.rules, self.level)

    def subpresentation(self, edge: tuple[int, int]) -> "Presentation":
        """The subtree beyond a directed root-piece edge ``(tail, head)``."""
        return self._with_root_piece(component_of(self.root_piece.tree, edge))

    def rerooted(self, v: int) -> "Presentation":
        t = self.root_piece.tree
        if self.is_expanding(ROOT, v):
            raise PresentationError("cannot root a presentation at an expanding leaf")
        return Presentation(Piece(t.rerooted(v), self.root_piece.provenance), self.rules, self.level)

    def without_vertex(self, x: int) -> list[tuple[int, "Presentation"]]:
        """Components of the denoted tree minus the root-piece vertex ``x``,
        each rooted at the neighbour of ``x`` it contains."""
        t = self.root_piece.tree
        if self.is_expanding(ROOT, x):
            raise PresentationError("cannot delete an expanding leaf")
        return [(w, self.subpresentation((x, w))) for w in t.adj[x]]

    def without_edge(self, a: int, b: int) -> list[tuple[int, "Presentation"]]:
        return [(b, self.subpresentation((a, b))), (a, self.subpresentation((b, a)))]

    def bare_extend(self, marker_colours: set[str], length: int) -> tuple["Presentation", frozenset[State]]:
        """Bare extension at every leaf carrying one of the marker colours.

        Returns the extended presentation and the states of added vertices.
        """
        added: set[State] = set()

        def extend(key: str, t: ColoredTree) -> ColoredTree:
            leaves = sorted(v for v, c in t.colours.items() if c in marker_colours and c not in self.rules)
            if not leaves:
                return t
            nxt = max(t.adj) + 1
            edges = t.edges()
            verts = list(t.adj)
            for leaf in leaves:
                prev = leaf
                for _ in range(length):
                    edges.append((prev, nxt))
                    verts.append(nxt)
                    added.add((key, nxt))
                    prev, nxt = nxt, nxt + 1
                edges.append((leaf, nxt))
                verts.append(nxt)
                added.add((key, nxt))
                nxt += 1
            return ColoredTree.from_edges(verts, edges, t.root, t.colours, t.cuts, t.labels, check=False)

        root = Piece(extend(ROOT, self.root_piece.tree), self.root_piece.provenance)
        rules = {c: Piece(extend(c, p.tree), p.provenance) for c, p in self.rules.items()}
        return Presentation(root, rules, self.level), frozenset(added)

    def host(self, marked: frozenset[State] = frozenset()) -> Host:
        """The denoted tree as an embedding-search host."""
        _, children, rep = self._graph

        def descend(addr: Address, j: int) -> Address:
            return self.child_addresses(addr)[j]

        return Host(
            self.root_state,
            dict(children),
            address=lambda s: rep[s],
            descend=descend,
            marked=marked,
            unique=lambda s: s[0] == ROOT,
        )

    def core(self) -> ColoredTree:
        """The root piece with expanding colours removed (marker colours kept)."""
        t = self.root_piece.tree
        return t.with_colours({v: c for v, c in t.colours.items() if c not in self.rules})

    # -- symbolic analyses ------------------------------------------------

    def max_bare_path_symbolic(self) -> float:
        """Exact longest bare path of the denoted tree, ``math.inf`` if unbounded."""
        run: dict[State, float] = {}

        def down_run(s: State) -> float:
            # edges from s downward through degree-2 vertices to the next stop
            chain: list[State] = []
            on_chain: set[State] = set()
            cur = s
            while cur not in run and self.degree(cur) == 2:
                if cur in on_chain:
                    for c in chain:
                        run[c] = math.inf
                    return math.inf
                on_chain.add(cur)
                chain.append(cur)
                (cur,) = self.children(cur)
            base = run.setdefault(cur, 0)
            for i, c in enumerate(reversed(chain)):
                run[c] = base + i + 1
            return run[s]

        best: float = 0
        for s in self.states:
            ks = self.children(s)
            if s == self.root_state and self.degree(s) == 2:
                best = max(best, 2 + down_run(ks[0]) + down_run(ks[1]))
            elif self.degree(s) != 2:
                for c in ks:
                    best = max(best, 1 + down_run(c))
        return best

    def downward_binary_heights(self) -> dict[State, float]:
        return downward_binary_heights(self.states, self._graph[1])

    def max_binary_height_symbolic(self) -> float:
        """Exact supremum of binary-subtree heights, ``math.inf`` on divergence."""
        f = self.downward_binary_heights()
        if any(v == math.inf for v in f.values()):
            return math.inf
        ups: dict[State, set[int]] = {s: set() for s in self.states}
        ups[self.root_state] = {0}
        work = deque([self.root_state])
        while work:
            s = work.popleft()
            ks = self.children(s)
            for u in sorted(ups[s]):
                for j, c in enumerate(ks):
                    vals = [f[x] for i, x in enumerate(ks) if i != j] + ([u] if u else [])
                    val = int(_hang(vals))
                    if val not in ups[c]:
                        ups[c].add(val)
                        work.append(c)
        best = 0
        for s in self.states:
            base = [f[c] for c in self.children(s)]
            for u in ups[s]:
                best = max(best, int(_hang(base + ([u] if u else []))))
        return best

    # -- serialisation ----------------------------------------------------

    def to_doc(self) -> dict:
        pieces = {"root": self.root_piece.to_doc()}
        rules = {}
        for c in sorted(self.rules):
            pieces[f"rule:{c}"] = self.rules[c].to_doc()
            rules[c] = f"rule:{c}"
        return {"pieces": pieces, "rules": rules, "root": "root", "level": self.level}

    @classmethod
    def from_doc(cls, doc: Mapping) -> "Presentation":
        pieces = {name: Piece.from_doc(d) for name, d in doc["pieces"].items()}
        rules = {c: pieces[name] for c, name in doc["rules"].items()}
        return cls(pieces[doc["root"]], rules, doc.get("level", 0))

    def same_as(self, other: "Presentation") -> bool:
        return self.to_doc() == other.to_doc()


# -- bisimulation ---------------------------------------------------------


class StateSpace:
    """Disjoint union of the state graphs of several presentations."""

    def __init__(self, colours: bool = True):
        self.colours = colours
        self.nodes: list = []
        self.children: dict = {}
        self.label: dict = {}
        self._classes: dict | None = None

    def add(self, p: Presentation, tag) -> tuple:
        """Add ``p`` under ``tag``; returns the node of its root."""
        for s in p.states:
            n = (tag, s)
            self.nodes.append(n)
            self.children[n] = [(tag, c) for c in p.children(s)]
            self.label[n] = p.label(s) if self.colours else None
        self._classes = None
        return (tag, p.root_state)

    def classes(self) -> dict:
        if self._classes is None:
            self._classes = refine(self.nodes, self.children, self.label)
        return self._classes


def presentations_equivalent(p1: Presentation, p2: Presentation, colours: bool = True) -> bool:
    """Whether the denoted rooted trees are isomorphic (marker colours
    respected when ``colours``)."""
    space = StateSpace(colours)
    a = space.add(p1, 0)
    b = space.add(p2, 1)
    cls = space.classes()
    return cls[a] == cls[b]


def finite_presentation(t: ColoredTree, level: int = 0, provenance: str = "") -> Presentation:
    """A presentation without rules denoting the finite tree ``t``."""
    if t.root is None:
        raise TreeError("presentation needs a rooted tree")
    return Presentation(Piece(t, provenance), {}, level)
