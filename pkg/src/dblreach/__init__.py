"""Dynamic reachability queries on directed graphs.

Two complementary per-vertex bit labels answer most queries without
traversal: landmark labels certify reachable pairs, hashed leaf labels
prune unreachable ones, and a label-pruned BFS settles the rest. Both
label families are maintained incrementally under edge insertion (and,
experimentally, deletion) without ever condensing the graph.
"""

from .bitset import BitLabel
from .errors import (ConfigError, DblError, EdgeListFormatError,
                     IndexGraphMismatchError, MissingEdgeError, NotFittedError,
                     VertexRangeError, WorkloadExhaustedError)
from .estimator import DblReachability
from .graph import (DynamicGraph, TemporalEdge, bidirectional_bfs, dump_edge_list,
                    load_edge_list, load_temporal_edge_list, oracle_reach,
                    reachable_set_masks)
from .labels import (DblIndex, IndexConfig, LandmarkSet, LandmarkStrategy, LeafSets,
                     bl_contain, build_index, centrality_score, dl_intersec,
                     leaf_hash, rebuild_index, select_landmarks, select_leaves)
from .queries import (AnsweredBy, BL_ONLY, BatchStats, DEFAULT_FLAGS, DL_ONLY,
                      QueryFlags, QueryOutcome, default_workers, explain, query,
                      query_batch)
from .snapshot import load_index, save_index, sniff_snapshot
from .updates import (LabelViolation, RemovalSet, UpdateStats, VerifyReport,
                      delete_edge, delete_vertex, insert_edge, insert_vertex,
                      seed_removal_sets, verify_labels)
from .workload import (BenchReport, DistanceQueries, EventKind, UNREACHABLE,
                       WorkloadEvent, bench_run, gen_distance_queries,
                       gen_insert_workload, gen_power_law_graph, gen_random_graph,
                       gen_random_queries, random_graph_suite, replay_temporal)

__version__ = "0.1.0"

__all__ = [
    "AnsweredBy", "BL_ONLY", "BatchStats", "BenchReport", "BitLabel", "ConfigError",
    "DEFAULT_FLAGS", "DL_ONLY", "DblError", "DblIndex", "DblReachability", "DistanceQueries",
    "DynamicGraph", "EdgeListFormatError", "EventKind", "IndexConfig",
    "IndexGraphMismatchError", "LabelViolation", "LandmarkSet", "LandmarkStrategy",
    "LeafSets", "MissingEdgeError", "NotFittedError", "QueryFlags", "QueryOutcome",
    "RemovalSet", "TemporalEdge", "UNREACHABLE", "UpdateStats", "VerifyReport",
    "VertexRangeError", "WorkloadEvent", "WorkloadExhaustedError",
    "bench_run", "bidirectional_bfs", "bl_contain", "build_index",
    "centrality_score", "default_workers", "delete_edge", "delete_vertex",
    "dl_intersec", "dump_edge_list", "explain", "gen_distance_queries",
    "gen_insert_workload", "gen_power_law_graph", "gen_random_graph",
    "gen_random_queries", "insert_edge", "insert_vertex", "leaf_hash",
    "load_edge_list", "load_index", "load_temporal_edge_list", "oracle_reach",
    "query", "query_batch", "random_graph_suite", "reachable_set_masks",
    "rebuild_index", "replay_temporal", "save_index", "seed_removal_sets",
    "select_landmarks", "select_leaves", "sniff_snapshot", "verify_labels",
]
