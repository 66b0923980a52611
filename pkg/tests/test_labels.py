import pytest
from hypothesis import given, settings, strategies as st

from dblreach import (ConfigError, DynamicGraph, IndexConfig, LandmarkStrategy,
                      bl_contain, build_index, dl_intersec, gen_random_graph,
                      leaf_hash, oracle_reach, select_landmarks, select_leaves)

from conftest import (EXAMPLE_BUCKETS, EXPECTED_BL_IN, EXPECTED_BL_OUT,
                      EXPECTED_DL_IN, EXPECTED_DL_OUT, V1, V2, V3, V4, V5, V6,
                      V8, V10, V11, example_graph, label_sets)


class TestSelectLandmarks:
    def test_k_zero_gives_empty_set(self):
        ls = select_landmarks(example_graph(), 0)
        assert len(ls) == 0

    def test_k_larger_than_n_rejected(self):
        with pytest.raises(ConfigError):
            select_landmarks(DynamicGraph(3), 4)

    def test_star_center_ranks_first(self):
        g = DynamicGraph(11)
        for spoke in range(1, 6):
            g.add_edge(spoke, 0)
        for spoke in range(6, 11):
            g.add_edge(0, spoke)
        ls = select_landmarks(g, 1, LandmarkStrategy.PRODUCT)
        assert ls.landmarks == (0,)

    def test_ranking_matches_brute_force(self):
        g = example_graph()
        for strategy in LandmarkStrategy:
            scores = sorted(((-strategy.score(g.in_degree(v), g.out_degree(v)), v)
                             for v in g.vertices()))
            expected = tuple(v for _, v in scores[:4])
            assert select_landmarks(g, 4, strategy).landmarks == expected

    def test_tie_break_prefers_smaller_id(self):
        # v5, v8, v9 all score 2 under the degree product; v6 scores 4.
        g = example_graph()
        ls = select_landmarks(g, 3, LandmarkStrategy.PRODUCT)
        assert ls.landmarks == (V6, V5, V8)

    def test_positions_follow_order(self):
        ls = select_landmarks(example_graph(), 3)
        assert [ls.position[v] for v in ls.landmarks] == [0, 1, 2]


class TestSelectLeaves:
    def test_example_graph_leaves(self):
        leaves = select_leaves(example_graph(), 0, k_prime=2)
        assert leaves.leaves_in == {V1, V2, V3}
        assert leaves.leaves_out == {V10, V11}

    def test_cycle_has_no_leaves(self):
        g = DynamicGraph(4)
        for i in range(4):
            g.add_edge(i, (i + 1) % 4)
        leaves = select_leaves(g, 0)
        assert not leaves.leaves_in and not leaves.leaves_out

    def test_threshold_is_monotone(self):
        g = gen_random_graph(30, 2, seed=5)
        base = select_leaves(g, 0)
        wider = select_leaves(g, 4)
        assert base.leaves_in <= wider.leaves_in
        assert base.leaves_out <= wider.leaves_out
        for v in g.vertices():
            if g.in_degree(v) * g.out_degree(v) <= 4:
                assert v in wider.leaves_in and v in wider.leaves_out

    def test_negative_threshold_rejected(self):
        with pytest.raises(ConfigError):
            select_leaves(example_graph(), -1)


class TestLeafHash:
    def test_single_bucket(self):
        assert all(leaf_hash(v, 1, seed=s) == 0 for v in range(50) for s in (0, 9))

    def test_deterministic(self):
        assert leaf_hash(1234, 64, seed=7) == leaf_hash(1234, 64, seed=7)

    def test_within_range(self):
        assert all(0 <= leaf_hash(v, 13, seed=3) < 13 for v in range(200))

    def test_seed_changes_assignment(self):
        buckets_a = [leaf_hash(v, 64, seed=0) for v in range(100)]
        buckets_b = [leaf_hash(v, 64, seed=1) for v in range(100)]
        assert buckets_a != buckets_b

    def test_override_table_reproduces_example_assignment(self):
        leaves = select_leaves(example_graph(), 0, k_prime=2,
                               bucket_override=EXAMPLE_BUCKETS)
        assert {v: leaves.bucket[v] for v in leaves.bucket} == EXAMPLE_BUCKETS


class TestBuildIndex:
    def test_example_tables_reproduced(self, toy):
        _, idx = toy
        assert label_sets(idx, "dl_in") == EXPECTED_DL_IN
        assert label_sets(idx, "dl_out") == EXPECTED_DL_OUT
        assert label_sets(idx, "bl_in") == EXPECTED_BL_IN
        assert label_sets(idx, "bl_out") == EXPECTED_BL_OUT

    def test_no_landmarks_no_leaves_means_empty_labels(self):
        g = DynamicGraph(4)
        for i in range(4):
            g.add_edge(i, (i + 1) % 4)  # a cycle: no degree-zero leaves
        idx = build_index(g, IndexConfig(k=0, k_prime=4))
        assert not any(idx.dl_in + idx.dl_out + idx.bl_in + idx.bl_out)

    def test_two_builds_are_bit_identical(self):
        g = gen_random_graph(80, 4, seed=21)
        a = build_index(g, IndexConfig(k=16, k_prime=16))
        b = build_index(g, IndexConfig(k=16, k_prime=16))
        assert a.labels_equal(b)
        assert a.landmark_set == b.landmark_set

    def test_explicit_landmarks_must_match_k(self):
        with pytest.raises(ConfigError):
            build_index(example_graph(), IndexConfig(k=3, k_prime=2), landmarks=[V5, V6])

    def test_exactness_against_per_source_bfs(self):
        for seed in (1, 2, 3):
            g = gen_random_graph(60, 3, seed=seed, acyclic=seed == 2)
            idx = build_index(g, IndexConfig(k=8, k_prime=8))
            for i, landmark in enumerate(idx.landmark_set.landmarks):
                for v in g.vertices():
                    assert bool(idx.dl_in[v] >> i & 1) == oracle_reach(g, landmark, v)
                    assert bool(idx.dl_out[v] >> i & 1) == oracle_reach(g, v, landmark)
            for v in g.vertices():
                expected_in = {idx.leaf_sets.bucket[s] for s in idx.leaf_sets.leaves_in
                               if oracle_reach(g, s, v)}
                expected_out = {idx.leaf_sets.bucket[t] for t in idx.leaf_sets.leaves_out
                                if oracle_reach(g, v, t)}
                assert {b for b in range(8) if idx.bl_in[v] >> b & 1} == expected_in
                assert {b for b in range(8) if idx.bl_out[v] >> b & 1} == expected_out


@st.composite
def graphs_with_pairs(draw):
    n = draw(st.integers(2, 14))
    possible = [(u, v) for u in range(n) for v in range(n) if u != v]
    edges = draw(st.lists(st.sampled_from(possible), max_size=3 * n, unique=True))
    g = DynamicGraph(n)
    for u, v in edges:
        g.add_edge(u, v)
    u = draw(st.integers(0, n - 1))
    v = draw(st.integers(0, n - 1))
    return g, u, v


@given(graphs_with_pairs())
@settings(max_examples=80, deadline=None)
def test_label_evidence_is_sound(case):
    g, u, v = case
    idx = build_index(g, IndexConfig(k=min(4, g.vertex_count), k_prime=4))
    if dl_intersec(idx, u, v):
        assert oracle_reach(g, u, v)
    if not bl_contain(idx, u, v):
        assert not oracle_reach(g, u, v)


class TestLabelChecks:
    def test_dl_intersec_example_positive(self, toy):
        _, idx = toy
        assert dl_intersec(idx, V1, V10) is True

    def test_dl_intersec_cannot_refute(self, toy):
        g, idx = toy
        assert dl_intersec(idx, V3, V11) is False
        assert oracle_reach(g, V3, V11) is True  # the miss, not a refutation

    def test_dl_intersec_empty_labels(self, toy):
        _, idx = toy
        assert dl_intersec(idx, V3, V3) is False

    def test_bl_contain_prunes_example_pair(self, toy):
        _, idx = toy
        assert bl_contain(idx, V4, V6) is False

    def test_bl_contain_pass_is_not_a_positive(self, toy):
        g, idx = toy
        assert bl_contain(idx, V5, V2) is True
        assert oracle_reach(g, V5, V2) is False

    def test_bl_contain_reflexive(self, toy):
        _, idx = toy
        assert all(bl_contain(idx, v, v) for v in range(11))


def test_index_grow_keeps_new_labels_empty(toy):
    _, idx = toy
    idx.grow_to(13)
    assert idx.vertex_count == 13
    assert idx.dl_in[11] == idx.dl_out[12] == 0


def test_config_validation():
    with pytest.raises(ConfigError):
        IndexConfig(k=-1).validate(5)
    with pytest.raises(ConfigError):
        IndexConfig(k_prime=0).validate(5)
    with pytest.raises(ConfigError):
        IndexConfig(leaf_threshold=-2).validate(5)
    IndexConfig(k=0).validate(5)  # no landmarks is a valid degenerate setup
