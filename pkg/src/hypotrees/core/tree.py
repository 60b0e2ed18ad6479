"""Finite coloured trees.

A :class:`ColoredTree` is an immutable finite tree with integer vertex ids,
an optional root, a partial colour map, a set of cut marks (vertices on a
truncation boundary whose true degree is unknown) and optional provenance
labels.  Labels never influence any structural computation.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping


class TreeError(ValueError):
    """Raised when an input is not a tree or an operation is ill-posed."""


@dataclass(frozen=True, eq=False)
class ColoredTree:
    """An immutable finite tree.

    ``adj`` maps every vertex to the sorted tuple of its neighbours.  Build
    instances through :meth:`from_edges` unless the adjacency is already
    known to be a valid tree.
    """

    adj: Mapping[int, tuple[int, ...]]
    root: int | None = None
    colours: Mapping[int, str] = field(default_factory=dict)
    cuts: frozenset[int] = frozenset()
    labels: Mapping[int, str] = field(default_factory=dict)

    @classmethod
    def from_edges(
        cls,
        vertices: Iterable[int],
        edges: Iterable[tuple[int, int]],
        root: int | None = None,
        colours: Mapping[int, str] | None = None,
        cuts: Iterable[int] = (),
        labels: Mapping[int, str] | None = None,
        check: bool = True,
    ) -> "ColoredTree":
        nbrs: dict[int, list[int]] = {v: [] for v in vertices}
        count = 0
        for a, b in edges:
            if a not in nbrs or b not in nbrs:
                raise TreeError(f"edge ({a}, {b}) uses an unknown vertex")
            if a == b:
                raise TreeError(f"loop at {a}")
            nbrs[a].append(b)
            nbrs[b].append(a)
            count += 1
        adj = {v: tuple(sorted(ns)) for v, ns in nbrs.items()}
        t = cls(adj, root, dict(colours or {}), frozenset(cuts), dict(labels or {}))
        if check:
            if count != len(adj) - 1:
                raise TreeError(f"{len(adj)} vertices but {count} edges")
            t.validate()
        return t

    def validate(self) -> None:
        if not self.adj:
            raise TreeError("empty tree")
        for v, ns in self.adj.items():
            if len(set(ns)) != len(ns):
                raise TreeError(f"parallel edges at {v}")
            for w in ns:
                if v not in self.adj.get(w, ()):
                    raise TreeError(f"asymmetric adjacency {v}-{w}")
        start = next(iter(self.adj))
        if len(self.bfs_order(start)) != len(self.adj):
            raise TreeError("tree is not connected")
        if sum(len(ns) for ns in self.adj.values()) != 2 * (len(self.adj) - 1):
            raise TreeError("graph has a cycle")
        if self.root is not None and self.root not in self.adj:
            raise TreeError(f"root {self.root} is not a vertex")
        for v in list(self.colours) + list(self.cuts) + list(self.labels):
            if v not in self.adj:
                raise TreeError(f"annotation on unknown vertex {v}")

    # -- basic queries -----------------------------------------------------

    def __len__(self) -> int:
        return len(self.adj)

    def __contains__(self, v: object) -> bool:
        return v in self.adj

    @property
    def vertices(self) -> list[int]:
        return sorted(self.adj)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((a, b) for a, ns in self.adj.items() for b in ns if a < b)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max(len(ns) for ns in self.adj.values())

    def is_leaf(self, v: int) -> bool:
        return len(self.adj[v]) == 1

    def colour(self, v: int) -> str | None:
        return self.colours.get(v)

    def has_edge(self, a: int, b: int) -> bool:
        return a in self.adj and b in self.adj[a]

    def bfs_order(self, start: int, avoid: int | None = None) -> list[int]:
        """Vertices reachable from ``start`` without entering ``avoid``."""
        seen = {start}
        if avoid is not None:
            seen.add(avoid)
        order = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in self.adj[u]:
                if w not in seen:
                    seen.add(w)
                    order.append(w)
                    queue.append(w)
        return order

    def parents(self, root: int | None = None) -> dict[int, int | None]:
        """Parent map for the tree rooted at ``root`` (default: own root)."""
        r = self.root if root is None else root
        if r is None:
            raise TreeError("tree has no root")
        par: dict[int, int | None] = {r: None}
        queue = deque([r])
        while queue:
            u = queue.popleft()
            for w in self.adj[u]:
                if w not in par:
                    par[w] = u
                    queue.append(w)
        return par

    def children_map(self, root: int | None = None) -> dict[int, list[int]]:
        par = self.parents(root)
        kids: dict[int, list[int]] = {v: [] for v in self.adj}
        for v, p in par.items():
            if p is not None:
                kids[p].append(v)
        for ks in kids.values():
            ks.sort()
        return kids

    def distances(self, start: int) -> dict[int, int]:
        dist = {start: 0}
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in self.adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def path(self, a: int, b: int) -> list[int]:
        par = self.parents(a)
        out = [b]
        while out[-1] != a:
            nxt = par[out[-1]]
            assert nxt is not None
            out.append(nxt)
        return out[::-1]

    def first_edge_to_root(self, v: int) -> tuple[int, int]:
        """The edge from ``v`` to its parent, i.e. the first edge on the path to the root."""
        par = self.parents()
        p = par[v]
        if p is None:
            raise TreeError(f"vertex {v} is the root")
        return (v, p)

    # -- derived trees -----------------------------------------------------

    def induced(self, keep: Iterable[int], root: int | None = None) -> "ColoredTree":
        """Induced subtree on ``keep`` (which must be connected)."""
        ks = set(keep)
        adj = {v: tuple(w for w in self.adj[v] if w in ks) for v in ks}
        if root is None and self.root in ks:
            root = self.root
        t = ColoredTree(
            adj,
            root,
            {v: c for v, c in self.colours.items() if v in ks},
            frozenset(v for v in self.cuts if v in ks),
            {v: s for v, s in self.labels.items() if v in ks},
        )
        if len(t.bfs_order(next(iter(ks)))) != len(ks):
            raise TreeError("induced vertex set is not connected")
        return t

    def rerooted(self, root: int | None) -> "ColoredTree":
        if root is not None and root not in self.adj:
            raise TreeError(f"root {root} is not a vertex")
        return ColoredTree(self.adj, root, self.colours, self.cuts, self.labels)

    def with_colours(self, colours: Mapping[int, str]) -> "ColoredTree":
        return ColoredTree(self.adj, self.root, dict(colours), self.cuts, self.labels)

    def uncoloured(self) -> "ColoredTree":
        return ColoredTree(self.adj, self.root, {}, self.cuts, self.labels)

    def relabelled(self, mapping: Mapping[int, int]) -> "ColoredTree":
        """Rename vertices through the injective ``mapping``."""
        adj = {mapping[v]: tuple(sorted(mapping[w] for w in ns)) for v, ns in self.adj.items()}
        return ColoredTree(
            adj,
            None if self.root is None else mapping[self.root],
            {mapping[v]: c for v, c in self.colours.items()},
            frozenset(mapping[v] for v in self.cuts),
            {mapping[v]: s for v, s in self.labels.items()},
        )

    def without_vertex(self, x: int) -> list["ColoredTree"]:
        """Components of the tree minus ``x``; each rooted at the neighbour of ``x``
        unless it contains the original root."""
        out = []
        for w in self.adj[x]:
            comp = self.bfs_order(w, avoid=x)
            root = self.root if self.root in comp else w
            out.append(self.induced(comp, root=root))
        return out

    def without_edge(self, a: int, b: int) -> tuple["ColoredTree", "ColoredTree"]:
        if not self.has_edge(a, b):
            raise TreeError(f"({a}, {b}) is not an edge")
        return component_of(self, (b, a)), component_of(self, (a, b))

    # -- serialisation -----------------------------------------------------

    def to_doc(self) -> dict:
        doc = {
            "vertices": [str(v) for v in self.vertices],
            "edges": [[str(a), str(b)] for a, b in self.edges()],
            "root": None if self.root is None else str(self.root),
            "colours": {str(v): self.colours[v] for v in sorted(self.colours)},
            "cuts": [str(v) for v in sorted(self.cuts)],
        }
        if self.labels:
            doc["labels"] = {str(v): self.labels[v] for v in sorted(self.labels)}
        return doc

    @classmethod
    def from_doc(cls, doc: Mapping) -> "ColoredTree":
        return cls.from_edges(
            [int(v) for v in doc["vertices"]],
            [(int(a), int(b)) for a, b in doc["edges"]],
            root=None if doc.get("root") is None else int(doc["root"]),
            colours={int(v): c for v, c in doc.get("colours", {}).items()},
            cuts=[int(v) for v in doc.get("cuts", [])],
            labels={int(v): s for v, s in doc.get("labels", {}).items()},
        )

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "ColoredTree":
        return cls.from_doc(json.loads(text))

    def same_as(self, other: "ColoredTree") -> bool:
        """Equality of the data, labels included."""
        return self.to_doc() == other.to_doc()

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ColoredTree) and self.same_as(other)

    __hash__ = None  # type: ignore[assignment]


def component_of(t: ColoredTree, e: tuple[int, int]) -> ColoredTree:
    """The component of ``t - e`` containing the head of ``e = (tail, head)``,
    rooted at the head."""
    tail, head = e
    if not t.has_edge(tail, head):
        raise TreeError(f"({tail}, {head}) is not an edge")
    return t.induced(t.bfs_order(head, avoid=tail), root=head)


# -- generators --------------------------------------------------------------


def path_tree(n_edges: int, root_at_end: bool = True) -> ColoredTree:
    """Path 0-1-...-n_edges, rooted at 0 (or at the centre)."""
    vs = range(n_edges + 1)
    root = 0 if root_at_end else n_edges // 2
    return ColoredTree.from_edges(vs, [(i, i + 1) for i in range(n_edges)], root=root)


def star_tree(leaves: int) -> ColoredTree:
    return ColoredTree.from_edges(range(leaves + 1), [(0, i) for i in range(1, leaves + 1)], root=0)


def binary_tree(height: int, offset: int = 0) -> ColoredTree:
    """The binary tree of the given height in heap order, rooted at ``offset``.

    Height 1 is a single vertex and height 2 the three-vertex path rooted at
    its centre.
    """
    if height < 1:
        raise TreeError("binary tree height must be at least 1")
    n = 2**height - 1
    edges = [(offset + (i - 1) // 2, offset + i) for i in range(1, n)]
    return ColoredTree.from_edges(range(offset, offset + n), edges, root=offset)


def bare_extension(
    t: ColoredTree, leaves: Iterable[int], length: int, start: int | None = None
) -> tuple[ColoredTree, frozenset[int]]:
    """Attach to every listed leaf a path of ``length`` new edges and one new
    extra leaf.  Returns the new tree and the set of added vertices."""
    nxt = (max(t.adj) + 1) if start is None else start
    edges = t.edges()
    added: list[int] = []
    for leaf in sorted(set(leaves)):
        if leaf not in t.adj:
            continue
        prev = leaf
        for _ in range(length):
            edges.append((prev, nxt))
            added.append(nxt)
            prev = nxt
            nxt += 1
        edges.append((leaf, nxt))
        added.append(nxt)
        nxt += 1
    out = ColoredTree.from_edges(
        list(t.adj) + added, edges, t.root, t.colours, t.cuts, t.labels, check=False
    )
    return out, frozenset(added)


def forest_vertices(forest: Iterable[ColoredTree]) -> set[int]:
    out: set[int] = set()
    for t in forest:
        out.update(t.adj)
    return out
