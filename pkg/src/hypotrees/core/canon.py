"""Canonical codes, isomorphism and deck comparison for finite trees.

The canonical code is a level-wise AHU encoding.  Vertices at depth ``L``
are described by ``(label, cut, sorted ranks of their children)``; the
distinct descriptions on a level are sorted and their positions become the
ranks used by the level above.  The code lists, level by level, every
description with its multiplicity.  Two rooted trees get equal codes exactly
when they are isomorphic, and the same format can be produced from a
compressed (shared) representation, which the presentation module uses.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from typing import Hashable, Iterable, Mapping, Sequence

from .tree import ColoredTree, TreeError

Node = Hashable


def encode_levels(
    levels: Sequence[Mapping[Node, tuple[str, bool, Sequence[Node]]]],
    counts: Sequence[Mapping[Node, int]] | None = None,
) -> bytes:
    """Encode a layered rooted structure.

    ``levels[L]`` maps each node at depth ``L`` to ``(label, cut, children)``
    where the children are nodes of ``levels[L + 1]`` listed with
    multiplicity.  ``counts[L]`` gives how many tree vertices each node of
    level ``L`` stands for (default one).  Node names are local to a level.
    """
    below: dict[Node, int] = {}
    parts: list[str] = []
    for depth in range(len(levels) - 1, -1, -1):
        desc = {}
        for node, (label, cut, kids) in levels[depth].items():
            desc[node] = (label, bool(cut), tuple(sorted(below[k] for k in kids)))
        order = sorted(set(desc.values()))
        index = {d: i for i, d in enumerate(order)}
        tally: Counter = Counter()
        ranks: dict[Node, int] = {}
        for node, d in desc.items():
            ranks[node] = index[d]
            tally[d] += 1 if counts is None else counts[depth][node]
        row = "|".join(
            f"{json.dumps(lab)}:{int(cut)}:{','.join(map(str, kids))}*{tally[(lab, cut, kids)]}"
            for lab, cut, kids in order
        )
        parts.append(row)
        below = ranks
    return "\n".join(reversed(parts)).encode("ascii")


def _vertex_label(t: ColoredTree, v: int, colours: bool) -> str:
    return (t.colours.get(v) or "") if colours else ""


def canonical_code(t: ColoredTree, colours: bool = True, cuts: bool = True) -> bytes:
    """Canonical code of a rooted tree, sensitive to colours and cut marks."""
    if t.root is None:
        raise TreeError("canonical_code needs a rooted tree")
    kids = t.children_map()
    levels: list[dict] = []
    frontier = [t.root]
    while frontier:
        row = {
            v: (_vertex_label(t, v, colours), cuts and v in t.cuts, kids[v]) for v in frontier
        }
        levels.append(row)
        frontier = [w for v in frontier for w in kids[v]]
    return encode_levels(levels)


def _type_ids(
    t: ColoredTree, table: dict, colours: bool, cuts: bool
) -> tuple[dict[int, int], dict[int, list[int]]]:
    kids = t.children_map()
    order = t.bfs_order(t.root)
    types: dict[int, int] = {}
    for v in reversed(order):
        key = (
            _vertex_label(t, v, colours),
            cuts and v in t.cuts,
            tuple(sorted(types[w] for w in kids[v])),
        )
        types[v] = table.setdefault(key, len(table))
    return types, kids


def rooted_iso(
    a: ColoredTree, b: ColoredTree, colours: bool = True, cuts: bool = True
) -> dict[int, int] | None:
    """A root-, colour- and cut-preserving isomorphism ``a -> b`` or None."""
    if a.root is None or b.root is None:
        raise TreeError("rooted_iso needs rooted trees")
    if len(a) != len(b):
        return None
    table: dict = {}
    ta, ka = _type_ids(a, table, colours, cuts)
    tb, kb = _type_ids(b, table, colours, cuts)
    if ta[a.root] != tb[b.root]:
        return None
    out = {}
    stack = [(a.root, b.root)]
    while stack:
        u, w = stack.pop()
        out[u] = w
        ca = sorted(ka[u], key=lambda x: (ta[x], x))
        cb = sorted(kb[w], key=lambda x: (tb[x], x))
        stack.extend(zip(ca, cb))
    return out


def centres(t: ColoredTree) -> list[int]:
    """The one or two centre vertices of a finite tree."""
    deg = {v: len(ns) for v, ns in t.adj.items()}
    remaining = len(deg)
    layer = [v for v, d in deg.items() if d <= 1]
    removed = set()
    while remaining > 2:
        nxt = []
        for v in layer:
            removed.add(v)
            remaining -= 1
            for w in t.adj[v]:
                if w not in removed:
                    deg[w] -= 1
                    if deg[w] == 1:
                        nxt.append(w)
        layer = nxt
    return sorted(v for v in t.adj if v not in removed)


def unrooted_code(t: ColoredTree, colours: bool = True) -> bytes:
    """Isomorphism invariant of an unrooted tree: the least centre-rooted code."""
    return min(canonical_code(t.rerooted(c), colours) for c in centres(t))


def unrooted_iso(a: ColoredTree, b: ColoredTree, colours: bool = True) -> dict[int, int] | None:
    """A colour-preserving isomorphism of unrooted trees, or None."""
    if len(a) != len(b):
        return None
    ca, cb = centres(a), centres(b)
    if len(ca) != len(cb):
        return None
    ra = a.rerooted(ca[0])
    for c in cb:
        m = rooted_iso(ra, b.rerooted(c), colours)
        if m is not None:
            return m
    return None


def forest_code(forest: Iterable[ColoredTree], colours: bool = False) -> tuple[bytes, ...]:
    return tuple(sorted(unrooted_code(t, colours) for t in forest))


def deck_compare(a: ColoredTree, b: ColoredTree) -> dict[int, int] | None:
    """Find a hypomorphism ``a -> b`` by matching vertex-deleted cards.

    Colours are ignored.  Returns a bijection ``phi`` with ``a - v`` isomorphic
    to ``b - phi(v)`` for all ``v``, or None when the decks differ.
    """
    if len(a) != len(b):
        raise TreeError("deck_compare needs equally sized trees")

    def cards(t: ColoredTree) -> dict[tuple, list[int]]:
        groups: dict[tuple, list[int]] = defaultdict(list)
        for v in t.vertices:
            groups[forest_code(t.without_vertex(v))].append(v)
        return groups

    ga, gb = cards(a), cards(b)
    if {k: len(v) for k, v in ga.items()} != {k: len(v) for k, v in gb.items()}:
        return None
    out = {}
    for key, vs in ga.items():
        out.update(zip(vs, gb[key]))
    return out
