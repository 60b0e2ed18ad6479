"""Two non-isomorphic hypomorphic infinite trees, built and verified at desk scale."""

__version__ = "0.1.0"
