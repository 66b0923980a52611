import random

import pytest
from hypothesis import given, settings, strategies as st

from dblreach import (DynamicGraph, IndexConfig, MissingEdgeError, build_index,
                      seed_removal_sets,
                      delete_edge, delete_vertex, gen_insert_workload,
                      gen_random_graph, insert_edge, insert_vertex, oracle_reach,
                      query, rebuild_index, reachable_set_masks, verify_labels)

from conftest import V1, V2, V3, V5, V6, V7, V9, V10, V11, label_sets


def snapshot_labels(idx):
    return (list(idx.dl_in), list(idx.dl_out), list(idx.bl_in), list(idx.bl_out))


class TestInsertExample:
    """Inserting (v9, v2) into the worked example."""

    def test_only_dl_in_of_v2_changes(self, toy):
        g, idx = toy
        before = snapshot_labels(idx)
        stats = insert_edge(g, idx, V9, V2)
        after = snapshot_labels(idx)
        assert after[0][V2] != before[0][V2]
        assert label_sets(idx, "dl_in")[V2] == {0}  # picked up v5's bit
        # everything else identical, including every BL_in label
        for v in g.vertices():
            if v != V2:
                assert after[0][v] == before[0][v]
        assert after[1:] == before[1:]
        assert stats.labels_changed == 1
        assert stats.early_terminated is False

    def test_supersets_are_pruned(self, toy):
        g, idx = toy
        stats = insert_edge(g, idx, V9, V2)
        # one dequeue per direction: v2 forward, v9 backward; v5/v6 and the
        # backward neighbors are pruned without being enqueued
        assert stats.visited == 2

    def test_matches_rebuild(self, toy):
        g, idx = toy
        insert_edge(g, idx, V9, V2)
        assert idx.labels_equal(rebuild_index(g, idx))

    def test_certified_edge_skips_label_work(self, toy):
        g, idx = toy
        before = snapshot_labels(idx)
        stats = insert_edge(g, idx, V2, V5)  # DL already proves v2 -> v5
        assert stats.early_terminated is True
        assert stats.visited == 0
        assert snapshot_labels(idx) == before
        # the skipped work was provably redundant
        assert idx.labels_equal(rebuild_index(g, idx))

    def test_reinsert_existing_edge_is_idempotent(self, toy):
        g, idx = toy
        before = snapshot_labels(idx)
        m = g.edge_count
        insert_edge(g, idx, V3, V7)
        assert snapshot_labels(idx) == before
        assert g.edge_count == m


class TestDeleteExample:
    """Deleting (v6, v9) from the worked example."""

    def test_figure_cells(self, toy):
        g, idx = toy
        stats = delete_edge(g, idx, V6, V9)
        dl_in = label_sets(idx, "dl_in")
        bl_in = label_sets(idx, "bl_in")
        assert dl_in[V9] == set() and dl_in[V11] == set()
        assert bl_in[V9] == set()
        assert bl_in[V11] == {1}  # sustained by v7
        assert stats.tainted is False

    def test_propagation_halts_at_landmark(self, toy):
        g, idx = toy
        stats = delete_edge(g, idx, V6, V9)
        # v5's own landmark bit empties its removal set; its in-label is intact
        assert label_sets(idx, "dl_in")[V5] == {0}
        # forward pass dequeues v9, v11; backward dequeues v6, v5, v2
        assert stats.visited == 5

    def test_matches_rebuild_and_oracle(self, toy):
        g, idx = toy
        delete_edge(g, idx, V6, V9)
        assert idx.labels_equal(rebuild_index(g, idx))
        for u in g.vertices():
            for v in g.vertices():
                assert query(g, idx, u, v).reachable == oracle_reach(g, u, v)

    def test_absent_edge_rejected(self, toy):
        g, idx = toy
        with pytest.raises(MissingEdgeError):
            delete_edge(g, idx, V1, V11)

    def test_removal_preview_matches_applied_deletion(self, toy):
        g, idx = toy
        incoming, outgoing = seed_removal_sets(g, idx, V6, V9)
        # preview is contained in the labels it would shrink
        assert incoming.r_dl.issubset(idx.dl_in_label(V9))
        assert incoming.r_bl.issubset(idx.bl_in_label(V9))
        assert outgoing.r_dl.issubset(idx.dl_out_label(V6))
        assert outgoing.r_bl.issubset(idx.bl_out_label(V6))
        assert incoming.r_dl.to_set() == {0} and incoming.r_bl.to_set() == {1}
        before_in = (idx.dl_in[V9], idx.bl_in[V9])
        delete_edge(g, idx, V6, V9)
        assert idx.dl_in[V9] == before_in[0] & ~incoming.r_dl.bits
        assert idx.bl_in[V9] == before_in[1] & ~incoming.r_bl.bits
        with pytest.raises(MissingEdgeError):
            seed_removal_sets(g, idx, V6, V9)

    def test_redundant_edge_deletion_changes_nothing(self):
        # diamond with a rung: after deleting (1, 3), the path 1 -> 2 -> 3
        # still carries every bit, so no reachability changes at all
        g = DynamicGraph(4)
        for e in [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]:
            g.add_edge(*e)
        idx = build_index(g, IndexConfig(k=1, k_prime=1), landmarks=[0])
        before = snapshot_labels(idx)
        stats = delete_edge(g, idx, 1, 3)
        assert stats.labels_changed == 0
        assert snapshot_labels(idx) == before
        assert idx.labels_equal(rebuild_index(g, idx))


class TestTaint:
    def build_cycle_case(self):
        # landmark 0 feeds a 2-cycle through the edge to be deleted
        g = DynamicGraph(4)
        for e in [(0, 1), (1, 2), (2, 3), (3, 2)]:
            g.add_edge(*e)
        idx = build_index(g, IndexConfig(k=1, k_prime=1), landmarks=[0])
        return g, idx

    def test_cycle_in_affected_region_sets_flag(self):
        g, idx = self.build_cycle_case()
        stats = delete_edge(g, idx, 1, 2)
        assert stats.tainted is True
        # the mutually sustained landmark bit survives: exactness is gone
        assert not verify_labels(g, idx).ok

    def test_rebuild_escalation_restores_exactness(self):
        g, idx = self.build_cycle_case()
        stats = delete_edge(g, idx, 1, 2, rebuild_if_tainted=True)
        assert stats.tainted is True
        assert idx.labels_equal(rebuild_index(g, idx))
        assert verify_labels(g, idx).ok

    def test_dag_deletions_never_taint(self):
        g = gen_random_graph(60, 3, seed=31, acyclic=True)
        idx = build_index(g, IndexConfig(k=8, k_prime=8))
        rng = random.Random(7)
        for _ in range(40):
            u, v = rng.choice(sorted(g._edges))
            assert delete_edge(g, idx, u, v).tainted is False


class TestVertexOps:
    def test_isolated_vertex_has_empty_labels(self, toy):
        g, idx = toy
        insert_vertex(g, idx)
        v = g.vertex_count - 1
        assert idx.dl_in[v] == idx.dl_out[v] == idx.bl_in[v] == idx.bl_out[v] == 0

    def test_edge_to_landmark_sets_out_bit(self, toy):
        g, idx = toy
        insert_vertex(g, idx, out_edges=[V5])
        v = g.vertex_count - 1
        assert label_sets(idx, "dl_out")[v] == {0, 1}  # reaches v5, then v8

    def test_duplicate_vertex_edges_idempotent(self, toy):
        g, idx = toy
        insert_vertex(g, idx, out_edges=[V5], in_edges=[V1])
        v = g.vertex_count - 1
        before = snapshot_labels(idx)
        insert_edge(g, idx, v, V5)
        insert_edge(g, idx, V1, v)
        assert snapshot_labels(idx) == before

    def test_vertex_insertion_matches_rebuild(self, toy):
        g, idx = toy
        insert_vertex(g, idx, out_edges=[V6, V10], in_edges=[V1, V9])
        assert idx.labels_equal(rebuild_index(g, idx))

    def test_delete_isolated_vertex_is_noop(self, toy):
        g, idx = toy
        insert_vertex(g, idx)
        v = g.vertex_count - 1
        stats = delete_vertex(g, idx, v)
        assert stats.visited == 0 and stats.labels_changed == 0

    def test_delete_source_leaf_on_chain_matches_rebuild(self):
        g = DynamicGraph(5)
        for i in range(4):
            g.add_edge(i, i + 1)
        idx = build_index(g, IndexConfig(k=1, k_prime=2))
        delete_vertex(g, idx, 0)
        assert g.in_degree(1) == 0
        assert idx.labels_equal(rebuild_index(g, idx))

    def test_hub_deletion_on_random_dag_matches_rebuild(self):
        g = gen_random_graph(50, 4, seed=13, acyclic=True)
        idx = build_index(g, IndexConfig(k=8, k_prime=8))
        hub = max(g.vertices(), key=lambda v: g.in_degree(v) * g.out_degree(v))
        delete_vertex(g, idx, hub)
        assert idx.labels_equal(rebuild_index(g, idx))

    def test_deleted_landmark_keeps_self_bit(self):
        g = DynamicGraph(3)
        g.add_edge(0, 1)
        g.add_edge(1, 2)
        idx = build_index(g, IndexConfig(k=1, k_prime=1), landmarks=[1])
        delete_vertex(g, idx, 1)
        assert idx.dl_in[1] == idx.dl_out[1] == 1
        assert idx.labels_equal(rebuild_index(g, idx))


class TestRebuildEquivalence:
    def test_insert_sequences_cyclic(self):
        for seed in range(6):
            g = gen_random_graph(40 + seed * 12, 2, seed=seed)
            idx = build_index(g, IndexConfig(k=8, k_prime=8))
            for ev in gen_insert_workload(g, 120, seed=seed + 50):
                insert_edge(g, idx, ev.u, ev.v)
            assert idx.labels_equal(rebuild_index(g, idx))

    def test_queries_match_oracle_after_inserts(self):
        g = gen_random_graph(45, 1.5, seed=77)
        idx = build_index(g, IndexConfig(k=8, k_prime=8))
        for ev in gen_insert_workload(g, 80, seed=78):
            insert_edge(g, idx, ev.u, ev.v)
        closure = reachable_set_masks(g)
        for u in g.vertices():
            for v in g.vertices():
                assert query(g, idx, u, v).reachable == bool(closure[u] >> v & 1)

    def test_dag_deletion_sequences(self):
        for seed in range(4):
            g = gen_random_graph(40, 3, seed=seed + 90, acyclic=True)
            idx = build_index(g, IndexConfig(k=8, k_prime=8))
            rng = random.Random(seed)
            for _ in range(50):
                if not g.edge_count:
                    break
                u, v = rng.choice(sorted(g._edges))
                delete_edge(g, idx, u, v)
            assert idx.labels_equal(rebuild_index(g, idx))


@st.composite
def insertion_cases(draw):
    n = draw(st.integers(3, 12))
    possible = [(u, v) for u in range(n) for v in range(n) if u != v]
    initial = draw(st.lists(st.sampled_from(possible), max_size=2 * n, unique=True))
    extra = draw(st.lists(st.sampled_from(possible), max_size=n, unique=True))
    return n, initial, extra


@given(insertion_cases())
@settings(max_examples=50, deadline=None)
def test_insertion_is_monotone_and_rebuild_equivalent(case):
    n, initial, extra = case
    g = DynamicGraph(n)
    for u, v in initial:
        g.add_edge(u, v)
    idx = build_index(g, IndexConfig(k=min(3, n), k_prime=3))
    for u, v in extra:
        before = snapshot_labels(idx)
        insert_edge(g, idx, u, v)
        for fam_before, fam_after in zip(before, snapshot_labels(idx)):
            for b, a in zip(fam_before, fam_after):
                assert b & ~a == 0  # insertion never clears a bit
    assert idx.labels_equal(rebuild_index(g, idx))


@given(insertion_cases())
@settings(max_examples=30, deadline=None)
def test_dag_deletion_is_monotone(case):
    n, initial, _ = case
    g = DynamicGraph(n)
    for u, v in initial:
        if u < v:  # orient upward: a DAG
            g.add_edge(u, v)
    idx = build_index(g, IndexConfig(k=min(3, n), k_prime=3))
    rng = random.Random(n)
    for _ in range(min(6, g.edge_count)):
        u, v = rng.choice(sorted(g._edges))
        before = snapshot_labels(idx)
        delete_edge(g, idx, u, v)
        for fam_before, fam_after in zip(before, snapshot_labels(idx)):
            for b, a in zip(fam_before, fam_after):
                assert a & ~b == 0  # deletion never sets a bit


class TestThresholdedLeaves:
    """Leaf threshold r > 0 admits low-centrality vertices with edges on
    both sides; their own-bucket rule must survive maintenance."""

    def test_exact_and_maintainable_with_threshold(self):
        g = gen_random_graph(40, 2, seed=61, acyclic=True)
        cfg = IndexConfig(k=8, k_prime=8, leaf_threshold=3)
        idx = build_index(g, cfg)
        assert any(g.in_degree(v) > 0 for v in idx.leaf_sets.leaves_in)
        assert verify_labels(g, idx).ok
        rng = random.Random(63)
        for _ in range(15):  # DAG deletions first: never tainted
            u, v = rng.choice(sorted(g._edges))
            assert delete_edge(g, idx, u, v).tainted is False
        assert idx.labels_equal(rebuild_index(g, idx))
        for ev in gen_insert_workload(g, 30, seed=62):  # cycles allowed
            insert_edge(g, idx, ev.u, ev.v)
        assert idx.labels_equal(rebuild_index(g, idx))
        closure = reachable_set_masks(g)
        for u in g.vertices():
            for v in g.vertices():
                assert query(g, idx, u, v).reachable == bool(closure[u] >> v & 1)


class TestVerifyLabels:
    def test_fresh_index_ok(self, toy):
        g, idx = toy
        assert verify_labels(g, idx).ok

    def test_ok_after_random_insertions(self):
        g = gen_random_graph(50, 2, seed=17)
        idx = build_index(g, IndexConfig(k=8, k_prime=8))
        for ev in gen_insert_workload(g, 60, seed=18):
            insert_edge(g, idx, ev.u, ev.v)
        assert verify_labels(g, idx).ok

    def test_corrupted_bit_yields_exactly_one_violation(self, toy):
        g, idx = toy
        idx.dl_in[V10] &= ~1  # drop v5's bit at a sink: no downstream fallout
        report = verify_labels(g, idx, exhaustive=False)
        assert not report.ok
        assert len(report.violations) == 1
        violation = report.violations[0]
        assert (violation.vertex, violation.family) == (V10, "dl_in")

    def test_exhaustive_mode_catches_cycle_sustained_bits(self):
        g = DynamicGraph(4)
        for e in [(0, 1), (1, 2), (2, 3), (3, 2)]:
            g.add_edge(*e)
        idx = build_index(g, IndexConfig(k=1, k_prime=1), landmarks=[0])
        delete_edge(g, idx, 1, 2)
        report = verify_labels(g, idx, exhaustive=True)
        assert not report.ok
        assert any(v.family == "dl_in" for v in report.violations)
