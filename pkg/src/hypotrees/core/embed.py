"""Exhaustive subtree-embedding search.

An embedding is an injective adjacency-preserving map.  Because the image of
a connected pattern is connected, it has a unique vertex closest to the host
root (its *top*); everything else lies below the top.  So an embedding
exists iff for some pattern vertex ``q`` and host vertex ``t`` the pattern
rooted at ``q`` maps downward from ``t``.  Downward embeddability of a
directed pattern subtree into a host subtree only depends on the host
vertex's *state*, so the search is a memoised dynamic program over
(pattern directed edge, host state) pairs, with bipartite matching of
children.  This decides embeddability exactly, also for infinite hosts with
finitely many states (regular trees).

Pruning only uses necessary conditions (child counts, heights, sizes, and
binary-subtree bounds), so a "none" verdict is definitive.
"""

from __future__ import annotations

import math
import sys
import threading
from dataclasses import dataclass
from typing import Callable, Hashable, Sequence

from .analysis import _hang
from .refine import refine
from .tree import ColoredTree

State = Hashable


class Host:
    """A rooted host tree described by finitely many states.

    ``children[s]`` lists the states of the children of any vertex in state
    ``s`` (with multiplicity, in a fixed order).  ``address`` gives a
    representative vertex for each state and ``descend(addr, j)`` names the
    ``j``-th child of a vertex.  ``marked`` is a set of states of interest
    (for example bare-extension vertices).
    """

    def __init__(
        self,
        root: State,
        children: dict[State, tuple[State, ...]],
        address: Callable[[State], Hashable] | None = None,
        descend: Callable[[Hashable, int], Hashable] | None = None,
        marked: frozenset = frozenset(),
        unique: Callable[[State], bool] | None = None,
    ):
        self.root = root
        self.children = children
        self.states = list(children)
        self._address = address or (lambda s: s)
        self._descend = descend or (lambda a, j: children[a][j])
        self.marked = marked
        # whether a state stands for exactly one vertex of the host
        self.unique = unique or (lambda s: True)
        self._invariants()

    @classmethod
    def from_tree(cls, t: ColoredTree, marked=frozenset()) -> "Host":
        root = t.root if t.root is not None else min(t.adj)
        kids = t.children_map(root)
        return cls(root, {v: tuple(ks) for v, ks in kids.items()}, marked=frozenset(marked))

    def address(self, s: State) -> Hashable:
        return self._address(s)

    def descend(self, addr: Hashable, j: int) -> Hashable:
        return self._descend(addr, j)

    def _invariants(self) -> None:
        states = self.states
        parents: dict[State, list[State]] = {s: [] for s in states}
        for s in states:
            for c in self.children[s]:
                parents[c].append(s)
        # heights and sizes: finite exactly for states that reach no cycle
        pending = {s: len(self.children[s]) for s in states}
        ready = [s for s in states if pending[s] == 0]
        height: dict[State, float] = {}
        size: dict[State, float] = {}
        while ready:
            s = ready.pop()
            ks = self.children[s]
            height[s] = 1 + max((height[c] for c in ks), default=-1)
            size[s] = 1 + sum(size[c] for c in ks)
            for p in parents[s]:
                pending[p] -= 1
                if pending[p] == 0:
                    ready.append(p)
        for s in states:
            height.setdefault(s, math.inf)
            size.setdefault(s, math.inf)
        self.height, self.size = height, size
        self.fdown = downward_binary_heights(states, self.children)
        # best downward binary height anywhere below (inclusive)
        reach = dict(self.fdown)
        work = list(states)
        queued = set(states)
        while work:
            s = work.pop()
            queued.discard(s)
            m = max([reach[s]] + [reach[c] for c in self.children[s]])
            if m > reach[s]:
                reach[s] = m
                for p in parents[s]:
                    if p not in queued:
                        queued.add(p)
                        work.append(p)
        # any binary subgraph below s has height at most one more than this
        self.binary_bound = {s: reach[s] + 1 for s in states}


def downward_binary_heights(
    states: Sequence[State], children: dict[State, tuple[State, ...]]
) -> dict[State, float]:
    """Least fixed point of f(s) = hang(f of children); inf when unbounded.

    A finite value never exceeds the number of states, so any value above
    that bound marks divergence.
    """
    f: dict[State, float] = {s: 1 for s in states}
    cap = len(states) + 1
    changed = True
    while changed:
        changed = False
        for s in states:
            if f[s] == math.inf:
                continue
            v = _hang([f[c] for c in children[s]])
            if v > cap:
                v = math.inf
            if v != f[s]:
                f[s] = v
                changed = True
    return f


@dataclass(frozen=True)
class EmbedResult:
    status: str  # "found" | "none" | "exhausted"
    mapping: dict | None
    nodes: int

    @property
    def found(self) -> bool:
        return self.status == "found"


class BudgetExceeded(Exception):
    pass


class Embedder:
    """Embedding search of a finite pattern into a :class:`Host`."""

    def __init__(self, pattern: ColoredTree, host: Host, budget: int = 10**7):
        self.p = pattern
        self.h = host
        self.budget = budget
        self.nodes = 0
        self.memo: dict[tuple, bool] = {}
        self.touch_memo: dict[tuple, bool] = {}
        self._pinv: dict[tuple, tuple] = {}
        self._ptype: dict[tuple, int] = {}
        self._ptable: dict[tuple, int] = {}
        # isomorphic downward subtrees behave alike, so results are shared
        # between host states in one bisimulation class
        hs = host.states
        self.hclass = refine(hs, host.children, {s: None for s in hs})
        self.hclass_marked = refine(hs, host.children, {s: s in host.marked for s in hs})

    # -- pattern invariants per directed subtree --------------------------

    def _pattern_inv(self, v: int, par: int | None) -> tuple:
        """(height, size, rooted binary height, best binary height below)."""
        key = (v, par)
        got = self._pinv.get(key)
        if got is not None:
            return got
        # iterative post-order to avoid deep recursion
        stack = [(v, par, False)]
        while stack:
            u, pu, done = stack.pop()
            if (u, pu) in self._pinv:
                continue
            kids = [w for w in self.p.adj[u] if w != pu]
            if not done:
                stack.append((u, pu, True))
                stack.extend((w, u, False) for w in kids if (w, u) not in self._pinv)
                continue
            sub = [self._pinv[(w, u)] for w in kids]
            shape = tuple(sorted(self._ptype[(w, u)] for w in kids))
            self._ptype[(u, pu)] = self._ptable.setdefault(shape, len(self._ptable))
            fd = _hang([s[2] for s in sub])
            self._pinv[(u, pu)] = (
                1 + max((s[0] for s in sub), default=-1),
                1 + sum(s[1] for s in sub),
                fd,
                max([fd] + [s[3] for s in sub]),
            )
        return self._pinv[key]

    def _plausible(self, v: int, par: int | None, s: State) -> bool:
        h = self.h
        nk = len(self.p.adj[v]) - (0 if par is None else 1)
        if nk > len(h.children[s]):
            return False
        height, size, fd, best = self._pattern_inv(v, par)
        return (
            height <= h.height[s]
            and size <= h.size[s]
            and fd <= h.fdown[s]
            and best <= h.binary_bound[s]
        )

    # -- core dynamic programme -------------------------------------------

    def _ptype_of(self, v: int, par: int | None) -> int:
        if (v, par) not in self._ptype:
            self._pattern_inv(v, par)
        return self._ptype[(v, par)]

    def can(self, v: int, par: int | None, s: State) -> bool:
        key = (self._ptype_of(v, par), self.hclass[s])
        got = self.memo.get(key)
        if got is not None:
            return got
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded
        ok = self._plausible(v, par, s)
        if ok:
            kids = [w for w in self.p.adj[v] if w != par]
            ok = self._match(v, kids, s) is not None
        self.memo[key] = ok
        return ok

    def _compat(self, v: int, kids: list[int], s: State) -> list[list[int]]:
        hk = self.h.children[s]
        out = []
        for w in kids:
            cache: dict[State, bool] = {}
            row = []
            for j, c in enumerate(hk):
                if c not in cache:
                    cache[c] = self.can(w, v, c)
                if cache[c]:
                    row.append(j)
            out.append(row)
        return out

    def _match(
        self, v: int, kids: list[int], s: State, forbid: int | None = None,
        compat: list[list[int]] | None = None,
    ) -> dict[int, int] | None:
        """Injective assignment pattern child -> host child position."""
        if compat is None:
            compat = self._compat(v, kids, s)
        if any(not row for row in compat):
            return None
        owner: dict[int, int] = {}

        def augment(i: int, seen: set[int]) -> bool:
            for j in compat[i]:
                if j == forbid or j in seen:
                    continue
                seen.add(j)
                if j not in owner or augment(owner[j], seen):
                    owner[j] = i
                    return True
            return False

        for i in range(len(kids)):
            if not augment(i, set()):
                return None
        return {kids[i]: j for j, i in owner.items()}

    def touch(self, v: int, par: int | None, s: State) -> bool:
        """Some downward embedding of the subtree uses a marked host state."""
        key = (self._ptype_of(v, par), self.hclass_marked[s])
        got = self.touch_memo.get(key)
        if got is not None:
            return got
        if not self.can(v, par, s):
            res = False
        elif s in self.h.marked:
            res = True
        else:
            res = False
            kids = [w for w in self.p.adj[v] if w != par]
            hk = self.h.children[s]
            compat = self._compat(v, kids, s)
            for i, w in enumerate(kids):
                for j in compat[i]:
                    if not self.touch(w, v, hk[j]):
                        continue
                    rest = kids[:i] + kids[i + 1:]
                    rest_compat = [[x for x in row if x != j] for row in compat[:i] + compat[i + 1:]]
                    if self._match(v, rest, s, compat=rest_compat) is not None:
                        res = True
                        break
                if res:
                    break
        self.touch_memo[key] = res
        return res

    # -- witnesses --------------------------------------------------------

    def witness(self, q: int, s: State, touch: bool = False) -> dict:
        """Reconstruct one embedding with ``q`` at the representative of ``s``."""
        out = {}
        stack = [(q, None, s, self.h.address(s), touch)]
        while stack:
            v, par, st, addr, need_touch = stack.pop()
            out[v] = addr
            kids = [w for w in self.p.adj[v] if w != par]
            hk = self.h.children[st]
            assign = None
            if need_touch and st not in self.h.marked:
                compat = self._compat(v, kids, st)
                for i, w in enumerate(kids):
                    for j in compat[i]:
                        if self.touch(w, v, hk[j]):
                            rest = kids[:i] + kids[i + 1:]
                            rc = [[x for x in row if x != j] for row in compat[:i] + compat[i + 1:]]
                            m = self._match(v, rest, st, compat=rc)
                            if m is not None:
                                assign = dict(m)
                                assign[w] = j
                                touched = w
                                break
                    if assign is not None:
                        break
                assert assign is not None
            else:
                assign = self._match(v, kids, st)
                touched = None
                assert assign is not None
            for w, j in assign.items():
                stack.append((w, v, hk[j], self.h.descend(addr, j), need_touch and w == touched))
        return out

    # -- top-level queries ------------------------------------------------

    def search(
        self,
        exclude: Callable[[int, State], bool] | None = None,
        tops: Sequence[tuple[int, State]] | None = None,
    ) -> EmbedResult:
        """Find an embedding whose top is some allowed (pattern vertex, host state)."""
        try:
            pairs = tops if tops is not None else self._top_pairs()
            for q, s in pairs:
                if exclude is not None and exclude(q, s):
                    continue
                if self.can(q, None, s):
                    return EmbedResult("found", self.witness(q, s), self.nodes)
        except BudgetExceeded:
            return EmbedResult("exhausted", None, self.nodes)
        return EmbedResult("none", None, self.nodes)

    def _top_pairs(self):
        whole = self._pattern_inv(min(self.p.adj), None)
        n, best = whole[1], whole[3]
        verts = self.p.vertices
        for s in self.h.states:
            if self.h.size[s] < n or self.h.binary_bound[s] < best:
                continue
            for q in verts:
                yield q, s


def run_deep(fn: Callable, *args, **kwargs):
    """Run ``fn`` in a thread with a large stack and recursion limit."""
    result: list = []
    error: list = []

    def target():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 200000))
        try:
            result.append(fn(*args, **kwargs))
        except BaseException as exc:  # re-raised in the caller
            error.append(exc)
        finally:
            sys.setrecursionlimit(old)

    old_size = threading.stack_size()
    threading.stack_size(512 * 1024 * 1024)
    try:
        th = threading.Thread(target=target)
        th.start()
        th.join()
    finally:
        threading.stack_size(old_size)
    if error:
        raise error[0]
    return result[0]


def embed_search(
    pattern: ColoredTree,
    host: ColoredTree | Host,
    root_mode: str = "free",
    budget: int = 10**7,
) -> EmbedResult:
    """Search for an embedding of ``pattern`` into ``host``.

    With ``root_mode="preserve"`` the pattern root must map to the host root.
    Colours are ignored.
    """
    if root_mode not in ("free", "preserve"):
        raise ValueError(f"unknown root mode {root_mode!r}")
    h = host if isinstance(host, Host) else Host.from_tree(host)
    emb = Embedder(pattern, h, budget)
    if root_mode == "preserve":
        if pattern.root is None:
            raise ValueError("preserve mode needs a rooted pattern")
        return run_deep(emb.search, tops=[(pattern.root, h.root)])
    return run_deep(emb.search)


def is_embedding(pattern: ColoredTree, host: ColoredTree, mapping: dict[int, int]) -> bool:
    """Check a finite embedding edge by edge."""
    if set(mapping) != set(pattern.adj):
        return False
    if len(set(mapping.values())) != len(mapping):
        return False
    return all(host.has_edge(mapping[a], mapping[b]) for a, b in pattern.edges())
