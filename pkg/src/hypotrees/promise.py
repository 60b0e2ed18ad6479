"""Promise structures and their closures.

A promise structure is a forest with directed promise edges ``p_i`` and
disjoint sets ``L_i`` of promise leaves.  The promise at a leaf of ``L_i``
is that the tree eventually grown beyond it looks like the subtree beyond
``p_i``.  The closure keeps that promise by gluing, at every leaf of
``L_i``, a rooted copy of the subtree beyond ``p_i`` (which may contain
promise leaves itself), forever.  The result is represented exactly by a
:class:`~hypotrees.presentation.Presentation` per component: promise ``i``
becomes an expanding colour whose rule is the subtree beyond ``p_i``.

Promises whose subtree is a single leaf of their own leaf set
(*placeholders*) never grow anything; their colour becomes a marker.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .core.canon import canonical_code
from .core.tree import ColoredTree, TreeError, component_of
from .presentation import Piece, Presentation, presentations_equivalent


class PromiseError(ValueError):
    pass


class SelfCheckError(RuntimeError):
    """Two independent methods disagreed; this indicates a bug."""


@dataclass(frozen=True, eq=False)
class PromiseStructure:
    """Forest, promise edges ``(tail, head)``, leaf sets and colour names.

    ``rules`` holds substitution rules already in force for colours used by
    the forest (older promises); their expanding leaves are part of the
    forest's denoted trees but play no role in the new promises.
    """

    forest: Sequence[ColoredTree]
    promise_edges: Sequence[tuple[int, int]]
    leaf_sets: Sequence[frozenset[int]]
    colours: Sequence[str] | None = None
    rules: Mapping[str, Piece] = field(default_factory=dict)
    level: int = 0

    def __post_init__(self) -> None:
        if len(self.promise_edges) != len(self.leaf_sets):
            raise PromiseError("promise edges and leaf sets differ in number")
        seen: set[int] = set()
        for t in self.forest:
            if seen & set(t.adj):
                raise PromiseError("forest components share vertex ids")
            seen.update(t.adj)
        for i, (a, b) in enumerate(self.promise_edges):
            t = self.tree_of(a)
            if not t.has_edge(a, b):
                raise PromiseError(f"promise {i}: ({a}, {b}) is not an edge")
        used: set[int] = set()
        for i, ls in enumerate(self.leaf_sets):
            if used & ls:
                raise PromiseError("leaf sets overlap")
            used |= ls
            for v in ls:
                if len(self.tree_of(v).adj[v]) != 1:
                    raise PromiseError(f"promise leaf {v} is not a leaf")
        names = self.colour_names
        if len(set(names)) != len(names):
            raise PromiseError("promise colours must be distinct")
        for c in names:
            if c in self.rules:
                raise PromiseError(f"colour {c!r} already has a rule")
        for t in self.forest:
            for v, c in t.colours.items():
                if c in names and v not in self.leaf_sets[names.index(c)]:
                    raise PromiseError(f"vertex {v} carries promise colour {c!r} but is not in its leaf set")

    @property
    def colour_names(self) -> list[str]:
        if self.colours is not None:
            return list(self.colours)
        return [f"P{i}" for i in range(len(self.promise_edges))]

    def tree_of(self, v: int) -> ColoredTree:
        for t in self.forest:
            if v in t.adj:
                return t
        raise PromiseError(f"vertex {v} is not in the forest")

    def component_index(self, v: int) -> int:
        for i, t in enumerate(self.forest):
            if v in t.adj:
                return i
        raise PromiseError(f"vertex {v} is not in the forest")

    def subtree(self, i: int) -> ColoredTree:
        """The subtree beyond ``p_i``, rooted at its head."""
        a, b = self.promise_edges[i]
        return component_of(self.tree_of(a), (a, b))

    def coloured(self, t: ColoredTree) -> ColoredTree:
        """``t`` with every promise leaf carrying its promise colour."""
        names = self.colour_names
        colours = {v: c for v, c in t.colours.items() if c not in names}
        for i, ls in enumerate(self.leaf_sets):
            for v in ls:
                if v in t.adj:
                    colours[v] = names[i]
        return t.with_colours(colours)


def is_placeholder(ps: PromiseStructure, i: int) -> bool:
    sub = ps.subtree(i)
    return len(sub) == 1 and sub.root in ps.leaf_sets[i]


@dataclass(frozen=True)
class PlaceholderPromise:
    index: int
    edge: tuple[int, int]
    colour: str
    component: int


@dataclass(frozen=True, eq=False)
class ClosureResult:
    """One presentation per forest component plus the surviving promises.

    The leaf class of a surviving (placeholder) promise is the set of
    vertices carrying its marker colour in the denoted trees.
    """

    source: PromiseStructure
    components: tuple[Presentation, ...]
    placeholders: tuple[PlaceholderPromise, ...]

    def presentation_of(self, v: int) -> Presentation:
        return self.components[self.source.component_index(v)]


def closure(ps: PromiseStructure) -> ClosureResult:
    names = ps.colour_names
    rules = dict(ps.rules)
    placeholders = []
    for i, edge in enumerate(ps.promise_edges):
        if is_placeholder(ps, i):
            placeholders.append(
                PlaceholderPromise(i, tuple(edge), names[i], ps.component_index(edge[0]))
            )
            continue
        sub = ps.subtree(i)
        if len(sub) == 1:
            raise PromiseError(f"promise {i} is unproductive: its subtree is a single vertex")
        rules[names[i]] = Piece(ps.coloured(sub), f"C_{i + 1}")
    comps = tuple(
        Presentation(Piece(ps.coloured(t), t.labels.get(t.root, "") if t.root is not None else ""), rules, ps.level)
        for t in ps.forest
    )
    return ClosureResult(ps, comps, tuple(placeholders))


def _promise_subpresentations(cr: ClosureResult, i: int, leaf: int) -> tuple[Presentation, Presentation]:
    ps = cr.source
    if leaf not in ps.leaf_sets[i]:
        raise PromiseError(f"{leaf} is not a leaf of promise {i}")
    a, b = ps.promise_edges[i]
    first = cr.presentation_of(a).subpresentation((a, b))
    host = cr.presentation_of(leaf)
    (nbr,) = host.root_piece.tree.adj[leaf]
    second = host.subpresentation((nbr, leaf))
    return first, second


def _check_promise(cr: ClosureResult, i: int, leaf: int, depth: int, colours: bool) -> bool:
    first, second = _promise_subpresentations(cr, i, leaf)
    exact = presentations_equivalent(first, second, colours)
    sampled = first.ball_code(depth, colours) == second.ball_code(depth, colours)
    if exact and not sampled:
        raise SelfCheckError(f"promise {i}, leaf {leaf}: bisimulation and expansion disagree")
    return exact


def check_cl2(cr: ClosureResult, i: int, leaf: int, depth: int) -> bool:
    """The subtree beyond ``p_i`` and the one grown at ``leaf`` are isomorphic."""
    return _check_promise(cr, i, leaf, depth, colours=False)


def check_cl3(cr: ClosureResult, i: int, leaf: int, depth: int) -> bool:
    """As :func:`check_cl2`, with surviving promise classes matched too."""
    return _check_promise(cr, i, leaf, depth, colours=True)


def leaf_extension_check(
    g: ColoredTree | Iterable[ColoredTree], h: ColoredTree | Iterable[ColoredTree], leaves: set[int]
) -> bool:
    """Whether ``h`` is an extension of ``g`` grown only beyond ``leaves``."""
    gs = [g] if isinstance(g, ColoredTree) else list(g)
    hs = [h] if isinstance(h, ColoredTree) else list(h)
    h_comp = {}
    for j, t in enumerate(hs):
        for v in t.adj:
            h_comp[v] = j
    g_verts = set()
    for t in gs:
        for v in t.adj:
            if v not in h_comp:
                raise TreeError(f"vertex {v} of g is not in h")
            g_verts.add(v)
        for a, b in t.edges():
            if not hs[h_comp[a]].has_edge(a, b):
                raise TreeError(f"edge ({a}, {b}) of g is not in h")
    owners = [0] * len(hs)
    for t in gs:
        owners[h_comp[next(iter(t.adj))]] += 1
    if any(c != 1 for c in owners):
        return False
    for t in hs:
        for a, b in t.edges():
            for u, w in ((a, b), (b, a)):
                if u in g_verts and w not in g_verts and u not in leaves:
                    return False
    return True


@dataclass
class GluedForest:
    """The forest after some rounds of literal gluing."""

    adj: dict[int, list[int]]
    colours: dict[int, str]
    pending: dict[int, object]  # leaf -> what is still to be glued there
    roots: list[int]

    def tree(self, root: int) -> ColoredTree:
        seen = {root}
        order = [root]
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w in self.adj[u]:
                if w not in seen:
                    seen.add(w)
                    order.append(w)
                    queue.append(w)
        edges = [(u, w) for u in order for w in self.adj[u] if u < w]
        return ColoredTree.from_edges(
            order, edges, root=root, colours={v: self.colours[v] for v in order if v in self.colours}
        )


def glue_rounds(ps: PromiseStructure, rounds: int) -> GluedForest:
    """Glue copies of the promise subtrees at pending promise leaves, literally.

    Leaves carrying the colour of an inherited rule are treated the same way
    with the rule piece as the glued subtree.  Markers are placed on
    placeholder leaves and their copies.
    """
    names = ps.colour_names
    place = {p.index for p in closure(ps).placeholders}
    member = {}
    for i, ls in enumerate(ps.leaf_sets):
        for v in ls:
            member[v] = i

    def role(t: ColoredTree, v: int, in_forest: bool):
        """("glue", key), ("colour", c) or None for a vertex of a glued source."""
        if in_forest and v in member:
            j = member[v]
            return ("colour", names[j]) if j in place else ("glue", j)
        c = t.colours.get(v)
        if c is None or (in_forest and c in names):
            return None
        if c in ps.rules:
            return ("glue", ("rule", c))
        return ("colour", c)

    sources: dict = {i: (ps.subtree(i), True) for i in range(len(names)) if i not in place}
    sources.update({("rule", c): (p.tree, False) for c, p in ps.rules.items()})
    adj: dict[int, list[int]] = {}
    colours: dict[int, str] = {}
    pending: dict[int, object] = {}
    for t in ps.forest:
        for v, ns in t.adj.items():
            adj[v] = list(ns)
            r = role(t, v, True)
            if r is None:
                continue
            if r[0] == "colour":
                colours[v] = r[1]
            else:
                pending[v] = r[1]
    fresh = max(adj) + 1
    for _ in range(rounds):
        nxt = {}
        for leaf, key in sorted(pending.items(), key=lambda kv: kv[0]):
            sub, in_forest = sources[key]
            ids = {sub.root: leaf}
            for v in sub.vertices:
                if v != sub.root:
                    ids[v] = fresh
                    adj[fresh] = []
                    fresh += 1
            for a, b in sub.edges():
                adj[ids[a]].append(ids[b])
                adj[ids[b]].append(ids[a])
            for v in sub.vertices:
                if v == sub.root:
                    continue
                r = role(sub, v, in_forest)
                if r is None:
                    continue
                if r[0] == "colour":
                    colours[ids[v]] = r[1]
                else:
                    nxt[ids[v]] = r[1]
        pending = nxt
    roots = [t.root if t.root is not None else min(t.adj) for t in ps.forest]
    return GluedForest(adj, colours, pending, roots)


@dataclass(frozen=True)
class OracleComparison:
    component: int
    radius: int
    rounds: int
    equal: bool
    frontier_depth: float


def compare_with_gluing(ps: PromiseStructure, rounds: int, radius: int) -> list[OracleComparison]:
    """Compare each closure component with the literally glued forest.

    The comparison radius is the requested one; if unglued promise leaves
    lie within it the comparison is reported unequal (more rounds needed).
    """
    cr = closure(ps)
    glued = glue_rounds(ps, rounds)
    out = []
    for j, root in enumerate(glued.roots):
        dist = glued.tree(root).distances(root)
        frontier = min((dist[v] for v in glued.pending if v in dist), default=float("inf"))
        ball_ids = [v for v, d in dist.items() if d <= radius]
        full = glued.tree(root)
        ball = full.induced(ball_ids, root=root)
        cuts = [v for v in ball_ids if dist[v] == radius and any(dist[w] > radius for w in full.adj[v])]
        ball = ColoredTree(ball.adj, root, ball.colours, frozenset(cuts))
        same = frontier > radius and canonical_code(ball) == cr.components[j].ball_code(radius)
        out.append(OracleComparison(j, radius, rounds, same, frontier))
    return out
