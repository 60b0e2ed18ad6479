"""The back-and-forth construction of the two trees.

State ``n`` holds presentations of the trees ``T_n`` and ``S_n``, the marker
colours ``R<n>`` and ``B<n>`` of their red and blue leaves, the handled
vertices ``X`` and ``Y`` with the bijection ``phi`` between them, a
certificate for every handled vertex, the bounds ``k`` (bare paths) and
``b`` (binary heights), and the vertex enumerations.

Each step splits one tree at its least-indexed unhandled vertex, builds the
two gadget trees around the old roots, and takes the promise closure.  The
tree split on even steps is ``T``; odd steps mirror everything with the
roles of the two trees swapped.

Vertex identity.  Root-piece vertex ids persist from step to step: the new
root piece contains the old one verbatim and fresh ids are allocated above
all existing ones.  Handled vertices are therefore one-element addresses.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Mapping

from .core.tree import ColoredTree, binary_tree, component_of
from .presentation import ROOT, Address, Piece, Presentation
from .promise import ClosureResult, PromiseStructure, closure

T_SIDE, S_SIDE = "T", "S"

# The two base trees.  Vertex j is t_j (resp. s_j).  Both consist of the
# binary tree of height 3 on 0..6, a path 0-7-9-10 up to the root leaf 10,
# and an extra leaf 8: on 7 (one level above the binary tree) in T_0 and on
# 9 (two levels above it) in S_0.
BASE_T_EDGES = [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6), (0, 7), (7, 8), (7, 9), (9, 10)]
BASE_S_EDGES = [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6), (0, 7), (7, 9), (9, 8), (9, 10)]
BASE_ROOT = 10
BASE_K = 2
BASE_B = 3


class ConstructionError(RuntimeError):
    pass


def red(n: int) -> str:
    return f"R{n}"


def blue(n: int) -> str:
    return f"B{n}"


def colour_class(colour: str) -> tuple[str, int]:
    return colour[0], int(colour[1:])


@dataclass(frozen=True, eq=False)
class Certificate:
    """Witness that ``T - x`` and ``S - y`` (or ``T - e(x)``, ``S - e(y)``) are isomorphic.

    ``core_map`` maps root-piece vertices of ``T`` to root-piece vertices
    of ``S``.  It covers the root pieces of the step that created it; later
    growth is matched by the validator branch by branch.
    """

    kind: str  # "hypo_vertex" | "hypo_edge" | "non_embed"
    x: int
    y: int
    core_map: Mapping[int, int]
    created: int
    removed_t: tuple[int, int] | None = None
    removed_s: tuple[int, int] | None = None
    colour_classes_matched: tuple[str, ...] = ()
    search_record: Mapping | None = None

    def to_doc(self) -> dict:
        doc = {
            "kind": self.kind,
            "x": str(self.x),
            "y": str(self.y),
            "created": self.created,
            "core_map": [[str(a), str(b)] for a, b in sorted(self.core_map.items())],
            "colour_classes_matched": list(self.colour_classes_matched),
        }
        if self.removed_t is not None:
            doc["removed_t"] = [str(v) for v in self.removed_t]
            doc["removed_s"] = [str(v) for v in self.removed_s]
        if self.search_record is not None:
            doc["search_record"] = dict(self.search_record)
        return doc

    @classmethod
    def from_doc(cls, doc: Mapping) -> "Certificate":
        pair = lambda xs: None if xs is None else (int(xs[0]), int(xs[1]))  # noqa: E731
        return cls(
            doc["kind"],
            int(doc["x"]),
            int(doc["y"]),
            {int(a): int(b) for a, b in doc["core_map"]},
            doc["created"],
            pair(doc.get("removed_t")),
            pair(doc.get("removed_s")),
            tuple(doc.get("colour_classes_matched", ())),
            doc.get("search_record"),
        )

    def same_as(self, other: "Certificate") -> bool:
        return self.to_doc() == other.to_doc()


@dataclass(frozen=True)
class Tail:
    """Indices reserved for the new vertices outside the root piece at a level.

    The ``m``-th index is ``base + ((residue - base) % modulus) + m * modulus``;
    it names the ``m``-th such vertex in breadth-first order.  ``count`` is
    None for infinitely many.
    """

    level: int
    base: int
    modulus: int
    residue: int
    count: int | None

    def index(self, m: int) -> int:
        return self.base + (self.residue - self.base) % self.modulus + m * self.modulus

    def contains(self, i: int) -> bool:
        if i < self.base or i % self.modulus != self.residue:
            return False
        m = (i - self.index(0)) // self.modulus
        return self.count is None or m < self.count

    def to_doc(self) -> dict:
        return {
            "level": self.level,
            "base": self.base,
            "modulus": self.modulus,
            "residue": self.residue,
            "count": self.count,
        }


@dataclass(frozen=True, eq=False)
class Enumeration:
    """Enumerations ``t_j``, ``s_j`` over a common index set ``J``.

    Root-piece vertices sit at explicit *head* indices; the remaining
    vertices of each level are named through :class:`Tail` records.
    """

    head_t: Mapping[int, int]
    head_s: Mapping[int, int]
    tails: tuple[Tail, ...] = ()
    core_bounds: tuple[tuple[int, int], ...] = ()  # per level: id bounds of the (T, S) root pieces
    level_roots: tuple[tuple[int, int], ...] = ()  # per level: roots of (T, S)

    def used(self, i: int) -> bool:
        return i in self.head_t or any(t.contains(i) for t in self.tails)

    def smallest_unused(self, count: int) -> list[int]:
        out = []
        i = 0
        while len(out) < count:
            if not self.used(i):
                out.append(i)
            i += 1
        return out

    def to_doc(self) -> dict:
        return {
            "head_t": [[str(i), str(v)] for i, v in sorted(self.head_t.items())],
            "head_s": [[str(i), str(v)] for i, v in sorted(self.head_s.items())],
            "tails": [t.to_doc() for t in self.tails],
            "core_bounds": [list(b) for b in self.core_bounds],
            "level_roots": [list(r) for r in self.level_roots],
        }

    @classmethod
    def from_doc(cls, doc: Mapping) -> "Enumeration":
        return cls(
            {int(i): int(v) for i, v in doc["head_t"]},
            {int(i): int(v) for i, v in doc["head_s"]},
            tuple(Tail(**t) for t in doc["tails"]),
            tuple(tuple(b) for b in doc["core_bounds"]),
            tuple(tuple(r) for r in doc["level_roots"]),
        )


@dataclass(frozen=True, eq=False)
class ConstructionState:
    n: int
    T: Presentation
    S: Presentation
    X: tuple[Address, ...]
    Y: tuple[Address, ...]
    certs: Mapping[int, Certificate]
    edge_certs: Mapping[int, Certificate]
    k: int
    b: int
    enumeration: Enumeration
    ks: tuple[int, ...] = ()
    bs: tuple[int, ...] = ()
    ktildes: tuple[int, ...] = ()  # k~_0 .. k~_{n-1}

    @property
    def R(self) -> str:
        return red(self.n)

    @property
    def B(self) -> str:
        return blue(self.n)

    @property
    def phi(self) -> dict[Address, Address]:
        return dict(zip(self.X, self.Y))

    @property
    def roots(self) -> tuple[Address, Address]:
        return (self.T.root_piece.tree.root,), (self.S.root_piece.tree.root,)

    def side(self, name: str) -> Presentation:
        return self.T if name == T_SIDE else self.S

    def markers(self, name: str) -> dict[int, str]:
        """Root-piece vertices carrying the current red or blue marker."""
        t = self.side(name).root_piece.tree
        return {v: c for v, c in t.colours.items() if c in (self.R, self.B)}

    def t(self, j: int) -> Address:
        return enumerated(self, T_SIDE, j)

    def s(self, j: int) -> Address:
        return enumerated(self, S_SIDE, j)


def enumerated(st: ConstructionState, side: str, j: int) -> Address:
    """The vertex with index ``j`` in the enumeration of one tree."""
    heads = st.enumeration.head_t if side == T_SIDE else st.enumeration.head_s
    if j in heads:
        return (heads[j],)
    for tail in st.enumeration.tails:
        if tail.contains(j):
            m = (j - tail.index(0)) // tail.modulus
            return tail_vertex(st, side, tail.level, m)
    raise KeyError(f"index {j} is not in J_{st.n}")


def in_level(st: ConstructionState, side: str, level: int, addr: Address) -> bool:
    """Whether an address of the current tree is a vertex of the tree at ``level``."""
    lo_t, lo_s = st.enumeration.core_bounds[level]
    bound = lo_t if side == T_SIDE else lo_s
    if addr[0] >= bound:
        return False
    p = st.side(side)
    key = ROOT
    for v in addr[:-1]:
        c = p.piece(key).colours[v]
        if colour_class(c)[1] >= level:
            return False
        key = c
    return True


def level_vertices(st: ConstructionState, side: str, level: int):
    """Breadth-first stream of the tree at ``level`` inside the current tree.

    The search starts at that level's root and visits neighbours in address
    order, so the stream does not depend on later growth.
    """
    p = st.side(side)
    roots = st.enumeration.level_roots[level]
    start = (roots[0] if side == T_SIDE else roots[1],)
    seen = {start}
    queue = deque([start])
    while queue:
        a = queue.popleft()
        yield a
        for b in sorted(p.neighbour_addresses(a)):
            if b not in seen and in_level(st, side, level, b):
                seen.add(b)
                queue.append(b)


def tail_vertex(st: ConstructionState, side: str, level: int, m: int) -> Address:
    """The ``m``-th vertex of the tree at ``level`` lying neither in its root
    piece nor in the tree one level down."""
    seen = 0
    for addr in level_vertices(st, side, level):
        if len(addr) == 1 or (level > 0 and in_level(st, side, level - 1, addr)):
            continue
        if seen == m:
            return addr
        seen += 1
    raise KeyError(f"level {level} has fewer than {m + 1} tail vertices")


# -- base case ---------------------------------------------------------------


def base_trees() -> tuple[ColoredTree, ColoredTree]:
    t0 = ColoredTree.from_edges(
        range(11), BASE_T_EDGES, root=BASE_ROOT, colours={BASE_ROOT: red(0)},
        labels={j: f"t{j}" for j in range(11)},
    )
    s0 = ColoredTree.from_edges(
        range(11), BASE_S_EDGES, root=BASE_ROOT, colours={BASE_ROOT: blue(0)},
        labels={j: f"s{j}" for j in range(11)},
    )
    return t0, s0


def base_case() -> ConstructionState:
    t0, s0 = base_trees()
    T = Presentation(Piece(t0, "T_0"), {}, 0)
    S = Presentation(Piece(s0, "S_0"), {}, 0)
    enum = Enumeration(
        {j: j for j in range(11)}, {j: j for j in range(11)}, (), ((11, 11),), ((BASE_ROOT, BASE_ROOT),)
    )
    return ConstructionState(0, T, S, (), (), {}, {}, BASE_K, BASE_B, enum, (BASE_K,), (BASE_B,), ())


# -- one step ----------------------------------------------------------------


def select_target(st: ConstructionState) -> tuple[str, Address]:
    """Least-indexed unhandled vertex of ``T`` (even steps) or ``S`` (odd steps)."""
    side = T_SIDE if st.n % 2 == 0 else S_SIDE
    handled = set(st.X if side == T_SIDE else st.Y)
    j = 0
    while True:
        if st.enumeration.used(j):
            addr = enumerated(st, side, j)
            if addr not in handled:
                if len(addr) != 1:
                    raise ConstructionError(
                        f"step {st.n}: target index {j} lies outside the root piece"
                    )
                return side, addr
        j += 1


@dataclass(frozen=True, eq=False)
class Split:
    side: str
    target: int
    edge: tuple[int, int]  # e(target) = (target, parent)
    root_part: Presentation  # the component containing the root
    target_part: Presentation  # the subtree at the target, rooted there


def split_at(st: ConstructionState, side: str, target: Address) -> Split:
    p = st.side(side)
    (x,) = target
    t = p.root_piece.tree
    if x == t.root:
        raise ConstructionError("cannot split at the root")
    parent = p._parents[ROOT][x]
    if p.is_expanding(ROOT, x):
        # the target is the root of an expanded copy of a rule piece
        target_part = Presentation(p.rules[t.colours[x]], p.rules, p.level)
    else:
        target_part = p.subpresentation((parent, x))
    return Split(side, x, (x, parent), p.subpresentation((x, parent)), target_part)


def compute_ktilde(st: ConstructionState, split: Split) -> int:
    vals = [
        st.T.max_bare_path_symbolic(),
        st.S.max_bare_path_symbolic(),
        split.root_part.max_bare_path_symbolic(),
        split.target_part.max_bare_path_symbolic(),
    ]
    if any(v == math.inf for v in vals):
        raise ConstructionError(f"step {st.n}: unbounded bare path")
    return 2 * int(max(vals))


class _Builder:
    """Accumulates one gadget tree with fresh ids."""

    def __init__(self, base: ColoredTree):
        self.edges = base.edges()
        self.verts = list(base.adj)
        self.colours = dict(base.colours)
        self.labels = dict(base.labels)
        self.next = max(base.adj) + 1

    def new(self, label: str, colour: str | None = None) -> int:
        v = self.next
        self.next += 1
        self.verts.append(v)
        self.labels[v] = label
        if colour is not None:
            self.colours[v] = colour
        return v

    def copy(self, t: ColoredTree, prefix: str) -> dict[int, int]:
        ids = {v: self.new(f"{prefix}:{t.labels.get(v, v)}", t.colours.get(v)) for v in t.vertices}
        for a, b in t.edges():
            self.edges.append((ids[a], ids[b]))
        return ids

    def path(self, start: int, end: int | None, length: int, name: str) -> list[int]:
        """Vertices start = w_0, ..., w_length; the last is ``end`` if given."""
        out = [start]
        for i in range(1, length + 1):
            v = end if (i == length and end is not None) else self.new(f"{name}{i}")
            self.edges.append((out[-1], v))
            out.append(v)
        return out

    def leaf(self, at: int, label: str, colour: str | None = None) -> int:
        v = self.new(label, colour)
        self.edges.append((at, v))
        return v

    def binary(self, height: int, at: int, prefix: str) -> list[int]:
        bt = binary_tree(height)
        ids = {v: self.new(f"{prefix}:{v}") for v in bt.vertices}
        for a, c in bt.edges():
            self.edges.append((ids[a], ids[c]))
        self.edges.append((at, ids[bt.root]))
        return [ids[v] for v in bt.vertices]

    def tree(self, root: int) -> ColoredTree:
        return ColoredTree.from_edges(self.verts, self.edges, root, self.colours, (), self.labels)


@dataclass(frozen=True, eq=False)
class Gadgets:
    """The two gadget trees, their promises and the isomorphism between them.

    ``T_tilde`` and ``S_tilde`` keep the vertex ids of the old root pieces.
    The promise structure needs disjoint ids, so there ``S_tilde`` is
    shifted up by ``s_offset``.
    """

    T_tilde: ColoredTree
    S_tilde: ColoredTree
    promises: PromiseStructure
    s_offset: int
    core_map: dict[int, int]  # T~ - x  ->  S~ - y
    x: int
    y: int
    ktilde: int
    path_length: int


def build_gadgets(st: ConstructionState, split: Split, ktilde: int) -> Gadgets:
    n, k, b = st.n, ktilde, st.b
    p_len = 4 * (k + 1) + 3
    P = st.side(split.side)
    other = S_SIDE if split.side == T_SIDE else T_SIDE
    Q = st.side(other)
    own = {T_SIDE: red, S_SIDE: blue}
    RP, RQ = P.root_piece.tree, Q.root_piece.tree
    rP, rQ = RP.root, RQ.root
    x = split.target
    root_part = split.root_part.root_piece.tree
    target_part = split.target_part.root_piece.tree
    xr = target_part.root
    pname, qname = ("u", "v") if split.side == T_SIDE else ("v", "u")

    # P~: P, a long path from its old root, and a copy of Q at the far end
    pb = _Builder(RP)
    pb.colours.pop(rP, None)
    q_hat = pb.copy(RQ, f"{other}hat{n}")
    pb.colours.pop(q_hat[rQ], None)
    upath = pb.path(rP, q_hat[rQ], p_len, "")
    a0 = pb.leaf(upath[0], f"{pname}0leaf/{n}")
    ap = pb.leaf(upath[-1], f"{pname}{p_len}leaf/{n}")
    p_root = pb.leaf(upath[2 * k + 2], f"root/{n + 1}", own[split.side](n + 1))
    p_partner = pb.leaf(upath[2 * k + 5], f"partner/{n + 1}", own[other](n + 1))
    d = pb.binary(b + 3, upath[2 * k + 3], f"D{n}")
    pb.labels.update({upath[i]: f"{pname}{i}/{n}" for i in range(1, p_len)})
    P_tilde = pb.tree(p_root)

    # Q~: Q, a copy of P cut at the target, and the target part hung on the path
    qb = _Builder(RQ)
    qb.colours.pop(rQ, None)
    r_hat = qb.copy(root_part, f"{split.side}hat{n}r")
    qb.colours.pop(r_hat[rP], None)
    x_hat_map = qb.copy(target_part, f"{split.side}hat{n}x")
    x_hat = x_hat_map[xr]
    vpath = qb.path(r_hat[rP], rQ, p_len, "")
    qb.edges.append((x_hat, vpath[k + 1]))
    b0 = qb.leaf(vpath[0], f"{qname}0leaf/{n}")
    bp = qb.leaf(vpath[-1], f"{qname}{p_len}leaf/{n}")
    q_root = qb.leaf(vpath[2 * k + 5], f"root/{n + 1}", own[other](n + 1))
    q_partner = qb.leaf(vpath[2 * k + 2], f"partner/{n + 1}", own[split.side](n + 1))
    dh = qb.binary(b + 3, vpath[2 * k + 3], f"Dhat{n}")
    qb.labels.update({vpath[i]: f"{qname}{i}/{n}" for i in range(1, p_len)})
    Q_tilde = qb.tree(q_root)

    # the isomorphism P~ - x -> Q~ - x^
    h: dict[int, int] = {}
    for w in root_part.adj:
        h[w] = r_hat[w]
    if not P.is_expanding(ROOT, x):
        # an expanded target's subtree lies outside the root piece; the
        # validator matches such whole components separately
        for w in target_part.adj:
            if w != xr:
                h[w] = x_hat_map[w]
    for w in RQ.adj:
        h[q_hat[w]] = w
    for i in range(1, p_len):
        h[upath[i]] = vpath[i]
    h.update({a0: b0, ap: bp, p_root: q_partner, p_partner: q_root})
    h.update(zip(d, dh))
    if set(h) != set(P_tilde.adj) - {x}:
        raise ConstructionError("gadget map does not cover the root piece")

    if split.side == T_SIDE:
        T_tilde, S_tilde, RT, RS = P_tilde, Q_tilde, RP, RQ
        t_root, s_root, t_partner, s_partner = p_root, q_root, q_partner, p_partner
        core_map, cx, cy = h, x, x_hat
    else:
        T_tilde, S_tilde, RT, RS = Q_tilde, P_tilde, RQ, RP
        t_root, s_root, t_partner, s_partner = q_root, p_root, p_partner, q_partner
        core_map = {v: w for w, v in h.items()}
        cx, cy = x_hat, x

    # promises, on a copy of S~ with ids shifted clear of T~
    off = max(T_tilde.adj) + 1
    S_shift = S_tilde.relabelled({v: v + off for v in S_tilde.adj})
    (t_nbr,) = RT.adj[RT.root]
    (s_nbr,) = RS.adj[RS.root]

    def marked(colour: str) -> frozenset[int]:
        return frozenset(
            v for g in (T_tilde, S_shift) for v, c in g.colours.items() if c == colour
        )

    ps = PromiseStructure(
        (T_tilde, S_shift),
        (
            (t_nbr, RT.root),
            (s_nbr + off, RS.root + off),
            (T_tilde.adj[t_root][0], t_root),
            (S_tilde.adj[s_root][0] + off, s_root + off),
        ),
        (
            marked(red(n)),
            marked(blue(n)),
            frozenset({t_root, t_partner + off}),  # the red partner lives in S~
            frozenset({s_root + off, s_partner}),  # the blue partner lives in T~
        ),
        (red(n), blue(n), red(n + 1), blue(n + 1)),
        dict(P.rules),
        n + 1,
    )
    return Gadgets(T_tilde, S_tilde, ps, off, core_map, cx, cy, ktilde, p_len)


def _head_order(p: Presentation, new: list[int]) -> list[int]:
    """New root-piece vertices: uncoloured vertices first, coloured leaves last."""
    t = p.root_piece.tree
    return sorted(new, key=lambda v: (v in t.colours, v))


def _level_size(p: Presentation) -> float:
    return p.host().size[p.root_state]


def _extend_enumeration(st: ConstructionState, T1: Presentation, S1: Presentation) -> Enumeration:
    enum = st.enumeration
    new_t = [v for v in T1.root_piece.tree.adj if v not in st.T.root_piece.tree.adj]
    new_s = [v for v in S1.root_piece.tree.adj if v not in st.S.root_piece.tree.adj]
    if len(new_t) != len(new_s):
        raise ConstructionError("root pieces grew by different amounts")
    idx = enum.smallest_unused(len(new_t))
    head_t = dict(enum.head_t)
    head_s = dict(enum.head_s)
    head_t.update(zip(idx, _head_order(T1, new_t)))
    head_s.update(zip(idx, _head_order(S1, new_s)))
    level = st.n + 1
    bounds = enum.core_bounds + (
        (max(T1.root_piece.tree.adj) + 1, max(S1.root_piece.tree.adj) + 1),
    )
    tails = enum.tails
    extra = []
    for p, old in ((T1, st.T), (S1, st.S)):
        size, old_size = _level_size(p), _level_size(old)
        if size == math.inf:
            extra.append(None)
        else:
            # vertices of this level outside its root piece and outside the previous level
            extra.append(int(size - len(p.root_piece.tree) - (old_size - len(old.root_piece.tree))))
    if extra[0] != extra[1]:
        raise ConstructionError("the two trees grew by different amounts outside their root pieces")
    if extra[0] != 0:
        base = max(head_t) + 1
        for t in tails:
            if t.count is not None:
                base = max(base, t.index(t.count - 1) + 1) if t.count else base
        modulus = 2**level
        tails = tails + (Tail(level, base, modulus, modulus // 2, extra[0]),)
    roots = enum.level_roots + ((T1.root_piece.tree.root, S1.root_piece.tree.root),)
    return Enumeration(head_t, head_s, tails, bounds, roots)


def step(st: ConstructionState) -> ConstructionState:
    side, target = select_target(st)
    split = split_at(st, side, target)
    kt = compute_ktilde(st, split)
    g = build_gadgets(st, split, kt)
    cr: ClosureResult = closure(g.promises)
    lvl = st.n + 1
    T1 = Presentation(Piece(cr.components[0].root_piece.tree, f"T_{lvl}"), cr.components[0].rules, lvl)
    s_tree = cr.components[1].root_piece.tree
    s_tree = s_tree.relabelled({v: v - g.s_offset for v in s_tree.adj})
    S1 = Presentation(Piece(s_tree, f"S_{lvl}"), cr.components[1].rules, lvl)
    for p in (T1, S1):
        if p.max_degree() > 3:
            raise ConstructionError(f"step {st.n}: vertex of degree {p.max_degree()}")
    x, y = g.x, g.y
    matched = (red(lvl), blue(lvl))
    cert = Certificate("hypo_vertex", x, y, dict(g.core_map), lvl, colour_classes_matched=matched)
    emap = dict(g.core_map)
    emap[x] = y
    ecert = Certificate(
        "hypo_edge", x, y, emap, lvl, edge_to_root(T1, x), edge_to_root(S1, y), matched
    )
    certs = dict(st.certs)
    certs[x] = cert
    ecerts = dict(st.edge_certs)
    ecerts[x] = ecert
    k1 = 2 * kt + 3
    b1 = st.b + 3
    return ConstructionState(
        lvl,
        T1,
        S1,
        st.X + ((x,),),
        st.Y + ((y,),),
        certs,
        ecerts,
        k1,
        b1,
        _extend_enumeration(st, T1, S1),
        st.ks + (k1,),
        st.bs + (b1,),
        st.ktildes + (kt,),
    )


def build(steps: int) -> list[ConstructionState]:
    states = [base_case()]
    for _ in range(steps):
        states.append(step(states[-1]))
    return states


def edge_to_root(p: Presentation, x: int) -> tuple[int, int]:
    """``e(x)``: the first edge on the path from root-piece vertex ``x`` to the root."""
    parent = p._parents[ROOT][x]
    if parent is None:
        raise ConstructionError("the root has no edge towards the root")
    return (x, parent)


def edge_map(st: ConstructionState) -> dict[tuple[int, int], tuple[int, int]]:
    """``psi``: e(x) -> e(phi(x)) for every handled ``x``."""
    return {
        edge_to_root(st.T, x[0]): edge_to_root(st.S, y[0]) for x, y in zip(st.X, st.Y)
    }


# -- serialisation -----------------------------------------------------------


def state_to_doc(st: ConstructionState) -> dict:
    return {
        "n": st.n,
        "T": st.T.to_doc(),
        "S": st.S.to_doc(),
        "colours": {"R": st.R, "B": st.B},
        "X": [[str(v) for v in a] for a in st.X],
        "Y": [[str(v) for v in a] for a in st.Y],
        "phi": [[[str(v) for v in a], [str(v) for v in b]] for a, b in zip(st.X, st.Y)],
        "certificates": [st.certs[x].to_doc() for x in sorted(st.certs)],
        "edge_certificates": [st.edge_certs[x].to_doc() for x in sorted(st.edge_certs)],
        "k": st.k,
        "b": st.b,
        "k_history": list(st.ks),
        "b_history": list(st.bs),
        "ktilde_history": list(st.ktildes),
        "enumeration": st.enumeration.to_doc(),
    }


def state_from_doc(doc: Mapping) -> ConstructionState:
    certs = [Certificate.from_doc(c) for c in doc["certificates"]]
    ecerts = [Certificate.from_doc(c) for c in doc["edge_certificates"]]
    return ConstructionState(
        doc["n"],
        Presentation.from_doc(doc["T"]),
        Presentation.from_doc(doc["S"]),
        tuple(tuple(int(v) for v in a) for a in doc["X"]),
        tuple(tuple(int(v) for v in a) for a in doc["Y"]),
        {c.x: c for c in certs},
        {c.x: c for c in ecerts},
        doc["k"],
        doc["b"],
        Enumeration.from_doc(doc["enumeration"]),
        tuple(doc["k_history"]),
        tuple(doc["b_history"]),
        tuple(doc["ktilde_history"]),
    )
