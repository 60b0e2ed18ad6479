"""Deterministic DOT export of coloured trees."""

from __future__ import annotations

from .tree import ColoredTree

# Fill colours for the usual colour families; anything else falls back to grey.
_PALETTE = {"R": "#e41a1c", "B": "#377eb8", "P": "#4daf4a"}


def fill_for(colour: str) -> str:
    return _PALETTE.get(colour[:1], "#999999")


def to_dot(t: ColoredTree, name: str = "tree") -> str:
    """DOT text with colour fills, cut marks as dashed outlines, a legend,
    and provenance labels where present."""
    lines = [f'graph "{name}" {{', "  node [shape=circle, style=filled, fillcolor=white];"]
    for v in t.vertices:
        attrs = []
        label = t.labels.get(v, str(v))
        colour = t.colours.get(v)
        if colour is not None:
            label = f"{label}\\n{colour}"
            attrs.append(f'fillcolor="{fill_for(colour)}"')
        if v in t.cuts:
            attrs.append('style="filled,dashed"')
        if v == t.root:
            attrs.append("peripheries=2")
        attrs.insert(0, f'label="{label}"')
        lines.append(f"  {v} [{', '.join(attrs)}];")
    for a, b in t.edges():
        lines.append(f"  {a} -- {b};")
    used = sorted(set(t.colours.values()))
    if used:
        lines.append("  subgraph cluster_legend {")
        lines.append('    label="colours";')
        for i, c in enumerate(used):
            lines.append(f'    legend_{i} [label="{c}", fillcolor="{fill_for(c)}", shape=box];')
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
