"""Finite coloured trees and the algorithms run on them."""

from .analysis import (
    BarePathStats,
    BinaryHeightStats,
    Component,
    bare_decompose,
    bare_path_bound_after_deletion,
    max_bare_path,
    max_binary_height,
    maximal_bare_paths,
)
from .canon import (
    canonical_code,
    centres,
    deck_compare,
    rooted_iso,
    unrooted_code,
    unrooted_iso,
)
from .dot import to_dot
from .embed import EmbedResult, Embedder, Host, embed_search, is_embedding, run_deep
from .tree import (
    ColoredTree,
    TreeError,
    bare_extension,
    binary_tree,
    component_of,
    path_tree,
    star_tree,
)

__all__ = [
    "BarePathStats",
    "BinaryHeightStats",
    "ColoredTree",
    "Component",
    "EmbedResult",
    "Embedder",
    "Host",
    "TreeError",
    "bare_decompose",
    "bare_extension",
    "bare_path_bound_after_deletion",
    "binary_tree",
    "canonical_code",
    "centres",
    "component_of",
    "deck_compare",
    "embed_search",
    "is_embedding",
    "max_bare_path",
    "max_binary_height",
    "maximal_bare_paths",
    "path_tree",
    "rooted_iso",
    "run_deep",
    "star_tree",
    "to_dot",
    "unrooted_code",
    "unrooted_iso",
]
