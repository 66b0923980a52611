"""Workload generation, temporal replay, and benchmark reporting.

Everything here is seeded and deterministic: two runs with the same
arguments produce identical workloads and identical non-timing report
fields.
"""

from __future__ import annotations

import json
import random
import time
from collections import deque
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Sequence

from .errors import ConfigError, WorkloadExhaustedError
from .graph import DynamicGraph, TemporalEdge, oracle_reach
from .labels import DblIndex, IndexConfig, build_index
from .queries import DEFAULT_FLAGS, QueryFlags, query_batch
from .updates import delete_edge, insert_edge

UNREACHABLE = "unreachable"


class EventKind(str, Enum):
    INSERT = "INSERT"
    DELETE = "DELETE"
    QUERY = "QUERY"


@dataclass(frozen=True)
class WorkloadEvent:
    kind: EventKind
    u: int
    v: int
    timestamp: int | None = None


def gen_random_queries(n_vertices: int, count: int, seed: int) -> list[tuple[int, int]]:
    """Uniform independent (u, v) pairs, reproducible per seed."""
    if count < 0:
        raise ConfigError(f"count must be >= 0, got {count}")
    if count > 0 and n_vertices < 1:
        raise ConfigError("cannot sample queries from an empty graph")
    rng = random.Random(seed)
    return [(rng.randrange(n_vertices), rng.randrange(n_vertices)) for _ in range(count)]


@dataclass(frozen=True)
class DistanceQueries:
    """Sampled pairs plus how many requests could not be satisfied."""

    pairs: list[tuple[int, int]]
    shortfall: int


def _vertices_at_distance(g: DynamicGraph, u: int, hops: int) -> list[int]:
    # Truncated BFS: stops after `hops` levels; the frontier then holds
    # exactly the vertices at shortest-path distance `hops`.
    seen = {u}
    frontier = [u]
    forward = g.forward
    for _ in range(hops):
        nxt: list[int] = []
        for w in frontier:
            for x in forward[w]:
                if x not in seen:
                    seen.add(x)
                    nxt.append(x)
        frontier = nxt
        if not frontier:
            return []
    return frontier


def gen_distance_queries(g: DynamicGraph, hops: int | str, count: int, seed: int,
                         max_rejects: int = 200) -> DistanceQueries:
    """Sample pairs at an exact hop distance, or verified-unreachable pairs.

    Rejection sampling: each requested pair retries up to ``max_rejects``
    random sources before giving up; the unmet remainder is reported as
    shortfall (e.g. asking for unreachable pairs on a strongly connected
    graph yields shortfall == count).
    """
    if count < 0:
        raise ConfigError(f"count must be >= 0, got {count}")
    unreachable = hops == UNREACHABLE
    if not unreachable and (not isinstance(hops, int) or hops < 1):
        raise ConfigError(f"hops must be a positive integer or {UNREACHABLE!r}, got {hops!r}")
    if count > 0 and g.vertex_count < 1:
        raise ConfigError("cannot sample queries from an empty graph")
    rng = random.Random(seed)
    n = g.vertex_count
    pairs: list[tuple[int, int]] = []
    shortfall = 0
    for _ in range(count):
        for _attempt in range(max_rejects):
            u = rng.randrange(n)
            if unreachable:
                v = rng.randrange(n)
                if not oracle_reach(g, u, v):
                    pairs.append((u, v))
                    break
            else:
                candidates = _vertices_at_distance(g, u, hops)
                if candidates:
                    pairs.append((u, rng.choice(candidates)))
                    break
        else:
            shortfall += 1
    return DistanceQueries(pairs, shortfall)


def gen_insert_workload(g: DynamicGraph, count: int, seed: int) -> list[WorkloadEvent]:
    """Random edges absent from g (and distinct from each other), u != v."""
    if count < 0:
        raise ConfigError(f"count must be >= 0, got {count}")
    n = g.vertex_count
    self_loops = sum(1 for v in g.vertices() if g.has_edge(v, v))
    free_slots = n * (n - 1) - (g.edge_count - self_loops)
    if count > free_slots:
        raise WorkloadExhaustedError(
            f"requested {count} new edges but only {free_slots} slots are free")
    rng = random.Random(seed)
    chosen: set[tuple[int, int]] = set()
    events: list[WorkloadEvent] = []
    attempts, cap = 0, 100 * count + 1000
    while len(events) < count:
        attempts += 1
        if attempts > cap:
            raise WorkloadExhaustedError(
                f"gave up after {attempts} attempts with {len(events)}/{count} edges")
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v or (u, v) in chosen or g.has_edge(u, v):
            continue
        chosen.add((u, v))
        events.append(WorkloadEvent(EventKind.INSERT, u, v))
    return events


# -- seeded graph synthesis -----------------------------------------------


def gen_random_graph(n: int, avg_degree: float, seed: int, *,
                     acyclic: bool = False) -> DynamicGraph:
    """Uniform random digraph with ~avg_degree * n distinct edges.

    With ``acyclic`` the edges are oriented along a random vertex
    permutation, so the result is a DAG.
    """
    if n < 1:
        raise ConfigError("n must be >= 1")
    rng = random.Random(seed)
    m = min(int(round(avg_degree * n)), n * (n - 1) // (2 if acyclic else 1))
    g = DynamicGraph(n)
    order = list(range(n))
    rng.shuffle(order)
    rank = {v: i for i, v in enumerate(order)}
    attempts, cap = 0, 100 * m + 1000
    while g.edge_count < m and attempts < cap:
        attempts += 1
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v:
            continue
        if acyclic and rank[u] > rank[v]:
            u, v = v, u
        g.add_edge(u, v)
    return g


def gen_power_law_graph(n: int, avg_degree: float, seed: int, *,
                        core_fraction: float = 0.6) -> DynamicGraph:
    """Preferential-attachment digraph with one guaranteed giant SCC.

    A directed ring over ``core_fraction`` of the vertices forms the SCC;
    the remaining edges pick endpoints proportionally to current degree,
    which produces the heavy-tailed hubs.
    """
    if n < 3:
        raise ConfigError("n must be >= 3")
    rng = random.Random(seed)
    g = DynamicGraph(n)
    core = max(2, int(n * core_fraction))
    for i in range(core):
        g.add_edge(i, (i + 1) % core)
    pool = list(range(n)) + list(range(core)) * 2
    m = int(round(avg_degree * n))
    attempts, cap = 0, 100 * m + 1000
    while g.edge_count < m and attempts < cap:
        attempts += 1
        u = rng.choice(pool)
        v = rng.choice(pool)
        if u == v:
            continue
        if g.add_edge(u, v):
            pool.append(u)
            pool.append(v)
    return g


def random_graph_suite(count: int, max_n: int, seed: int, *,
                       min_n: int = 16) -> list[tuple[DynamicGraph, bool]]:
    """A spread of seeded graphs (cyclic and acyclic, sparse to dense).

    Returns (graph, acyclic) pairs; sizes sweep [min_n, max_n] and average
    degrees cycle through 1..20.
    """
    degrees = [1, 1.5, 2, 4, 8, 12, 20]
    span = max(1, max_n - min_n)
    suite = []
    for i in range(count):
        n = min_n + (i * 97) % (span + 1)
        acyclic = i % 2 == 1
        avg = degrees[i % len(degrees)]
        suite.append((gen_random_graph(n, avg, seed + i, acyclic=acyclic), acyclic))
    return suite


# -- benchmark report ------------------------------------------------------


@dataclass
class BenchReport:
    """Stable, versioned summary of a benchmark run. Durations are ms."""

    schema_version: int = 1
    graph: dict = field(default_factory=dict)     # {"n", "m", "d_avg"}
    config: dict = field(default_factory=dict)    # index/config echo
    build_ms: float = 0.0
    insert_ms: float = 0.0
    delete_ms: float = 0.0
    query_ms: float = 0.0
    insert_count: int = 0
    delete_count: int = 0
    query_count: int = 0
    label_answered: int = 0
    rho: float = 0.0
    reachable_fraction: float = 0.0
    visited_total: int = 0
    update_visited_total: int = 0
    by_distance: dict | None = None
    replay_rows: list | None = None

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(asdict(self), indent=indent, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "BenchReport":
        data = json.loads(text)
        if data.get("schema_version") != 1:
            raise ConfigError(f"unsupported report schema {data.get('schema_version')!r}")
        return cls(**data)

    @staticmethod
    def graph_stats(g: DynamicGraph) -> dict:
        n = g.vertex_count
        return {"n": n, "m": g.edge_count,
                "d_avg": g.edge_count / n if n else 0.0}

    @staticmethod
    def config_echo(cfg: IndexConfig, **extra) -> dict:
        echo = {"k": cfg.k, "k_prime": cfg.k_prime,
                "strategy": cfg.landmark_strategy.value,
                "leaf_threshold": cfg.leaf_threshold, "hash_seed": cfg.hash_seed}
        echo.update(extra)
        return echo


def bench_run(g: DynamicGraph, config: IndexConfig | None = None, *,
              landmarks=None, leaf_sets=None,
              query_pairs: Sequence[tuple[int, int]] | None = None,
              query_count: int = 0, insert_count: int = 0, seed: int = 0,
              workers: int = 1, flags: QueryFlags = DEFAULT_FLAGS,
              distance_hops: Sequence[int | str] | None = None) -> BenchReport:
    """Build, optionally apply a random insert workload, run a query batch.

    Explicit ``query_pairs`` win over ``query_count`` random ones (random
    queries derive their stream from seed + 1 so the insert workload in
    the same run stays independent). ``landmarks``/``leaf_sets`` pin the
    index metadata, as in build_index.
    """
    cfg = config if config is not None else IndexConfig()
    report = BenchReport(graph=BenchReport.graph_stats(g),
                         config=BenchReport.config_echo(cfg, seed=seed, workers=workers))
    started = time.perf_counter()
    idx = build_index(g, cfg, landmarks=landmarks, leaf_sets=leaf_sets)
    report.build_ms = (time.perf_counter() - started) * 1000.0

    if insert_count:
        events = gen_insert_workload(g, insert_count, seed)
        started = time.perf_counter()
        for ev in events:
            stats = insert_edge(g, idx, ev.u, ev.v)
            report.update_visited_total += stats.visited
        report.insert_ms = (time.perf_counter() - started) * 1000.0
        report.insert_count = len(events)
        report.graph = BenchReport.graph_stats(g)

    pairs = list(query_pairs) if query_pairs is not None else \
        gen_random_queries(g.vertex_count, query_count, seed + 1)
    if pairs:
        outcomes, stats = query_batch(g, idx, pairs, workers=workers, flags=flags)
        report.query_ms = stats.elapsed_ms
        report.query_count = stats.query_count
        report.label_answered = stats.label_answered
        report.rho = stats.rho
        report.visited_total = stats.visited_total
        report.reachable_fraction = stats.reachable_count / stats.query_count

    if distance_hops:
        report.by_distance = {}
        for hop in distance_hops:
            sample = gen_distance_queries(g, hop, max(100, min(1000, query_count or 100)),
                                          seed + 2)
            entry = {"requested_hops": hop, "pairs": len(sample.pairs),
                     "shortfall": sample.shortfall, "rho": 0.0, "query_ms": 0.0}
            if sample.pairs:
                _, dstats = query_batch(g, idx, sample.pairs, workers=workers, flags=flags)
                entry["rho"] = dstats.rho
                entry["query_ms"] = dstats.elapsed_ms
            report.by_distance[str(hop)] = entry
    return report


# -- temporal replay -------------------------------------------------------


def replay_temporal(edges: Sequence[TemporalEdge], warm_fraction: float = 0.5,
                    report_every: int = 10000, config: IndexConfig | None = None, *,
                    allow_delete: bool = False) -> tuple[DynamicGraph, DblIndex, BenchReport]:
    """Replay a time-sorted edge stream through incremental maintenance.

    The first ``warm_fraction`` of the stream becomes the batch-built
    starting graph (the vertex space covers the whole stream, so later
    edges never grow the index). Remaining edges are applied with
    insert_edge in order; with ``allow_delete`` the window slides, deleting
    the oldest edge per insertion (duplicates are reference-counted since
    the graph collapses them). A cumulative report row is appended every
    ``report_every`` replay events, plus a final partial row.
    """
    if not 0.0 <= warm_fraction <= 1.0:
        raise ConfigError(f"warm_fraction must be in [0, 1], got {warm_fraction}")
    if report_every < 1:
        raise ConfigError(f"report_every must be >= 1, got {report_every}")

    dense: dict[int, int] = {}
    originals: list[int] = []
    for e in edges:
        for raw in (e.src, e.dst):
            if raw not in dense:
                dense[raw] = len(originals)
                originals.append(raw)
    n = len(originals)
    g = DynamicGraph(n)
    g.original_ids = originals
    g._dense_of = dict(dense)
    cfg = config if config is not None else IndexConfig(k=min(64, n))

    warm_count = int(len(edges) * warm_fraction)
    window: deque[tuple[int, int]] = deque()
    refcount: dict[tuple[int, int], int] = {}

    def push(pair: tuple[int, int]) -> None:
        window.append(pair)
        refcount[pair] = refcount.get(pair, 0) + 1

    started = time.perf_counter()
    for e in edges[:warm_count]:
        pair = (dense[e.src], dense[e.dst])
        g.add_edge(*pair)
        if allow_delete:
            push(pair)
    idx = build_index(g, cfg)
    build_ms = (time.perf_counter() - started) * 1000.0

    report = BenchReport(graph=BenchReport.graph_stats(g),
                         config=BenchReport.config_echo(
                             cfg, warm_fraction=warm_fraction,
                             report_every=report_every, allow_delete=allow_delete),
                         build_ms=build_ms, replay_rows=[])
    events = 0
    visited = 0
    changed = 0
    started = time.perf_counter()

    def emit_row() -> None:
        report.replay_rows.append({
            "events": events,
            "elapsed_ms": (time.perf_counter() - started) * 1000.0,
            "visited": visited,
            "labels_changed": changed,
        })

    for e in edges[warm_count:]:
        pair = (dense[e.src], dense[e.dst])
        t0 = time.perf_counter()
        stats = insert_edge(g, idx, *pair)
        report.insert_ms += (time.perf_counter() - t0) * 1000.0
        visited += stats.visited
        changed += stats.labels_changed
        report.insert_count += 1
        if allow_delete:
            push(pair)
            old = window.popleft()
            refcount[old] -= 1
            if refcount[old] == 0 and g.has_edge(*old):
                t0 = time.perf_counter()
                dstats = delete_edge(g, idx, *old)
                report.delete_ms += (time.perf_counter() - t0) * 1000.0
                visited += dstats.visited
                changed += dstats.labels_changed
                report.delete_count += 1
        events += 1
        if events % report_every == 0:
            emit_row()
    if events % report_every != 0:
        emit_row()
    report.update_visited_total = visited
    report.graph = BenchReport.graph_stats(g)
    return g, idx, report
