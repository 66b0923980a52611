"""Input validation helpers for the estimator-style API."""

from __future__ import annotations

from .errors import VertexRangeError
from .graph import DynamicGraph


def as_dynamic_graph(X) -> DynamicGraph:
    """Coerce fit() input into a DynamicGraph.

    Accepts an existing DynamicGraph (used as-is), or any iterable of
    (u, v) integer pairs — including 2-column array-likes — from which a
    graph over vertices 0..max_id is built.
    """
    if isinstance(X, DynamicGraph):
        return X
    edges: list[tuple[int, int]] = []
    max_id = -1
    for row in X:
        pair = tuple(int(x) for x in row)
        if len(pair) != 2:
            raise ValueError(f"edge rows must have two entries, got {row!r}")
        u, v = pair
        if u < 0 or v < 0:
            raise ValueError(f"vertex ids must be non-negative, got {row!r}")
        edges.append((u, v))
        max_id = max(max_id, u, v)
    g = DynamicGraph(max_id + 1)
    for u, v in edges:
        g.add_edge(u, v)
    return g


def check_pairs(X, n_vertices: int) -> list[tuple[int, int]]:
    """Validate query pairs against the fitted vertex range."""
    pairs: list[tuple[int, int]] = []
    for row in X:
        pair = tuple(int(x) for x in row)
        if len(pair) != 2:
            raise ValueError(f"query rows must have two entries, got {row!r}")
        for x in pair:
            if not 0 <= x < n_vertices:
                raise VertexRangeError(f"vertex {x} outside [0, {n_vertices})")
        pairs.append(pair)
    return pairs
