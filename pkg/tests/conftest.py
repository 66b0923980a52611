"""Shared fixtures: the 11-vertex worked-example graph and small helpers.

The example graph (vertices v1..v11 mapped to dense ids 0..10) is used
throughout: landmarks {v5, v8}, source leaves {v1, v2, v3}, sink leaves
{v10, v11}, and a two-bucket leaf hash with h(v1)=h(v10)=0 and
h(v2)=h(v3)=h(v11)=1.
"""

from __future__ import annotations

import pytest

from dblreach import DynamicGraph, IndexConfig, build_index, select_leaves

# v1..v11 -> 0..10
V1, V2, V3, V4, V5, V6, V7, V8, V9, V10, V11 = range(11)

EXAMPLE_EDGES = [
    (V1, V4), (V2, V5), (V2, V6), (V3, V7), (V4, V8), (V5, V6),
    (V6, V8), (V6, V9), (V7, V11), (V8, V10), (V9, V5), (V9, V11),
]

EXAMPLE_BUCKETS = {V1: 0, V10: 0, V2: 1, V3: 1, V11: 1}

# Expected label tables after a fresh build (bit 0 = v5, bit 1 = v8 for DL).
EXPECTED_DL_IN = {V1: set(), V2: set(), V3: set(), V4: set(), V5: {0}, V6: {0},
                  V7: set(), V8: {0, 1}, V9: {0}, V10: {0, 1}, V11: {0}}
EXPECTED_DL_OUT = {V1: {1}, V2: {0, 1}, V3: set(), V4: {1}, V5: {0, 1}, V6: {0, 1},
                   V7: set(), V8: {1}, V9: {0, 1}, V10: set(), V11: set()}
EXPECTED_BL_IN = {V1: {0}, V2: {1}, V3: {1}, V4: {0}, V5: {1}, V6: {1},
                  V7: {1}, V8: {0, 1}, V9: {1}, V10: {0, 1}, V11: {1}}
EXPECTED_BL_OUT = {V1: {0}, V2: {0, 1}, V3: {1}, V4: {0}, V5: {0, 1}, V6: {0, 1},
                   V7: {1}, V8: {0}, V9: {0, 1}, V10: {0}, V11: {1}}


def example_graph() -> DynamicGraph:
    g = DynamicGraph(11)
    for u, v in EXAMPLE_EDGES:
        g.add_edge(u, v)
    return g


def example_index(g: DynamicGraph):
    leaf_sets = select_leaves(g, 0, k_prime=2, bucket_override=EXAMPLE_BUCKETS)
    return build_index(g, IndexConfig(k=2, k_prime=2),
                       landmarks=[V5, V8], leaf_sets=leaf_sets)


@pytest.fixture
def toy_graph() -> DynamicGraph:
    return example_graph()


@pytest.fixture
def toy(toy_graph):
    """(graph, index) for the worked example."""
    return toy_graph, example_index(toy_graph)


def label_sets(idx, family: str) -> dict[int, set[int]]:
    """All labels of one family as {vertex: set of bit positions}."""
    masks = getattr(idx, family)
    return {v: {i for i in range(max(idx.config.k, idx.config.k_prime))
                if masks[v] >> i & 1}
            for v in range(idx.vertex_count)}
