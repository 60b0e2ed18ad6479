"""Bare paths and binary subtrees of finite trees.

Cut-marked vertices have unknown true degree.  Results that depend on them
are reported separately (bare paths) or as an upper bound (binary heights)
so that truncations of infinite trees never yield false exact values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .tree import ColoredTree


@dataclass(frozen=True)
class BarePath:
    vertices: tuple[int, ...]
    censored: bool

    @property
    def length(self) -> int:
        return len(self.vertices) - 1


@dataclass(frozen=True)
class BarePathStats:
    exact: int
    censored: int | None  # longest path touching a cut mark (a lower bound), if any

    @property
    def lower_bound(self) -> int:
        return max(self.exact, self.censored or 0)


def maximal_bare_paths(t: ColoredTree) -> list[BarePath]:
    """Every maximal bare path of ``t`` once, as a vertex sequence.

    Endpoints are vertices of degree other than two, or cut marks.
    """

    def stop(v: int) -> bool:
        return len(t.adj[v]) != 2 or v in t.cuts

    out = []
    for e in t.vertices:
        if not stop(e):
            continue
        for w in t.adj[e]:
            seq = [e, w]
            while not stop(seq[-1]):
                a, b = t.adj[seq[-1]]
                seq.append(b if a == seq[-2] else a)
            if (seq[0], seq[1]) <= (seq[-1], seq[-2]):
                censored = any(v in t.cuts for v in seq)
                out.append(BarePath(tuple(seq), censored))
    return out


def max_bare_path(t: ColoredTree | Iterable[ColoredTree]) -> BarePathStats:
    """Longest maximal bare path of a tree or forest."""
    trees = [t] if isinstance(t, ColoredTree) else list(t)
    exact = 0
    censored: int | None = None
    for tree in trees:
        for p in maximal_bare_paths(tree):
            if p.censored:
                censored = max(censored or 0, p.length)
            else:
                exact = max(exact, p.length)
    return BarePathStats(exact, censored)


def bare_path_bound_after_deletion(t: ColoredTree, e: tuple[int, int]) -> int:
    """Longest bare path of ``t - e`` (cut marks ignored)."""
    return max_bare_path(t.without_edge(*e)).exact


def _second_largest(vals: list[float]) -> float:
    a = b = -math.inf
    for x in vals:
        if x > a:
            a, b = x, a
        elif x > b:
            b = x
    return b


def _hang(vals: list[float]) -> float:
    """Height of the best binary tree rooted at a vertex whose available
    branches have the given best heights."""
    return 1 + _second_largest(vals) if len(vals) >= 2 else 1


@dataclass(frozen=True)
class BinaryHeightStats:
    lower: int
    upper: float  # math.inf when a cut mark could hide arbitrarily large subtrees

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def _binary_height(t: ColoredTree, cut_infinite: bool) -> float:
    start = t.root if t.root is not None else min(t.adj)
    par = t.parents(start)
    order = t.bfs_order(start)
    kids = {v: [] for v in t.adj}
    for v in order[1:]:
        kids[par[v]].append(v)

    def boundary(v: int) -> bool:
        return cut_infinite and v in t.cuts

    down: dict[int, float] = {}
    for v in reversed(order):
        down[v] = math.inf if boundary(v) else _hang([down[c] for c in kids[v]])
    up: dict[int, float] = {start: 0}  # value of the parent side seen from v; 0 = none
    best = 0.0
    for v in order:
        branches = [down[c] for c in kids[v]] + ([up[v]] if par[v] is not None else [])
        best = max(best, math.inf if boundary(v) else _hang(branches))
        for c in kids[v]:
            others = [down[x] for x in kids[v] if x != c]
            if par[v] is not None:
                others.append(up[v])
            up[c] = math.inf if boundary(v) else _hang(others)
    return best


def max_binary_height(t: ColoredTree) -> BinaryHeightStats:
    """Largest k such that the binary tree of height k is a subgraph of ``t``."""
    lower = int(_binary_height(t, cut_infinite=False))
    upper = _binary_height(t, cut_infinite=True) if t.cuts else lower
    return BinaryHeightStats(lower, upper)


@dataclass(frozen=True)
class Component:
    tree: ColoredTree
    touches_cut: bool


def bare_decompose(t: ColoredTree, k: int) -> list[Component]:
    """Delete the interior vertices of every maximal bare path longer than ``k``.

    Censored paths are deleted only when their visible part already exceeds
    ``k``; cut-marked vertices themselves are never deleted.  Components keep
    the original root when they contain it.
    """
    doomed: set[int] = set()
    for p in maximal_bare_paths(t):
        if p.length > k:
            doomed.update(v for v in p.vertices[1:-1] if v not in t.cuts)
    seen: set[int] = set(doomed)
    out = []
    for v in t.vertices:
        if v in seen:
            continue
        comp = [v]
        seen.add(v)
        i = 0
        while i < len(comp):
            for w in t.adj[comp[i]]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
            i += 1
        sub = t.induced(comp)
        out.append(Component(sub, any(u in t.cuts for u in comp)))
    return out
