"""Partition refinement for finite state graphs."""

from __future__ import annotations

from typing import Mapping


def refine(nodes: list, children: Mapping, label: Mapping) -> dict:
    """Coarsest partition where equivalent nodes have equal labels and equal
    multisets of child classes.  Returns node -> class id.

    Each round only re-examines classes containing a node whose children
    changed class in the previous round.
    """
    parents: dict = {n: [] for n in nodes}
    for n in nodes:
        for c in children[n]:
            parents[c].append(n)
    cls: dict = {}
    members: dict[int, list] = {}
    table: dict = {}
    for n in nodes:
        k = table.setdefault((label[n], len(children[n])), len(table))
        cls[n] = k
        members.setdefault(k, []).append(n)
    fresh = len(table)
    sig: dict = {}
    dirty = list(nodes)
    while dirty:
        for n in dirty:
            sig[n] = tuple(sorted(cls[c] for c in children[n]))
        touched = list(dict.fromkeys(cls[n] for n in dirty))
        moved = []
        for k in touched:
            groups: dict[tuple, list] = {}
            for n in members[k]:
                groups.setdefault(sig[n], []).append(n)
            if len(groups) == 1:
                continue
            # the largest part keeps the old id
            parts = sorted(groups.values(), key=len, reverse=True)
            members[k] = parts[0]
            for part in parts[1:]:
                members[fresh] = part
                for n in part:
                    cls[n] = fresh
                    moved.append(n)
                fresh += 1
        dirty = list(dict.fromkeys(p for n in moved for p in parents[n]))
    return cls
