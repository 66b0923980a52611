"""Reachability query processing over a built index.

Rule order for q(u, v):

  0. u == v                        -> True   (REFLEXIVE)
  1. dl_intersec(u, v)             -> True   (DL_POSITIVE)
  2. not bl_contain(u, v)          -> False  (BL_NEGATIVE)
  3. dl_intersec(v, u)             -> False  (THM1_NEGATIVE: v provably
     reaches u, so u reaching v would put both in one SCC whose common
     landmark would have fired rule 1)
  4. dl_intersec(u, u) or dl_intersec(v, v) -> False (THM2_NEGATIVE: an
     endpoint shares an SCC with a landmark, whose label coverage is
     complete, so rule 1 not firing settles the query)
  5. forward BFS from u, pruning a frontier vertex x when dl_intersec(u, x)
     (x's whole cone is already certified; had v been inside it, rule 1
     would have fired) or when bl_contain(x, v) fails (x provably cannot
     reach v).

Rules 3, 4 and both prunes are sound only because the labels stay exact
under maintenance; each can be toggled off for ablation without changing
any answer.
"""

from __future__ import annotations

import os
import time
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import ConfigError, IndexGraphMismatchError
from .graph import DynamicGraph
from .labels import DblIndex

WORKERS_ENV_VAR = "DBLREACH_WORKERS"


class AnsweredBy(str, Enum):
    REFLEXIVE = "REFLEXIVE"
    DL_POSITIVE = "DL_POSITIVE"
    BL_NEGATIVE = "BL_NEGATIVE"
    THM1_NEGATIVE = "THM1_NEGATIVE"
    THM2_NEGATIVE = "THM2_NEGATIVE"
    BFS_POSITIVE = "BFS_POSITIVE"
    BFS_NEGATIVE = "BFS_NEGATIVE"


@dataclass(frozen=True)
class QueryOutcome:
    """Answer plus provenance; visited counts BFS dequeues (0 if label-answered)."""

    reachable: bool
    answered_by: AnsweredBy
    visited: int = 0


@dataclass(frozen=True)
class QueryFlags:
    """Rule toggles. use_dl=False disables every landmark-label rule
    (positive check, both early terminations, DL pruning); use_bl=False
    disables the leaf-label negative check and BL pruning."""

    use_dl: bool = True
    use_bl: bool = True
    use_thm1: bool = True
    use_thm2: bool = True
    prune_dl: bool = True
    prune_bl: bool = True


DEFAULT_FLAGS = QueryFlags()
DL_ONLY = QueryFlags(use_bl=False)
BL_ONLY = QueryFlags(use_dl=False)


class _Scratch:
    """Epoch-stamped visited marks: O(n) resident, O(1) reset per query."""

    __slots__ = ("stamp", "epoch")

    def __init__(self, n: int):
        self.stamp = [0] * n
        self.epoch = 0


def _check_consistent(g: DynamicGraph, idx: DblIndex) -> None:
    if g.vertex_count != idx.vertex_count:
        raise IndexGraphMismatchError(
            f"graph has {g.vertex_count} vertices but index has {idx.vertex_count}")


def query(g: DynamicGraph, idx: DblIndex, u: int, v: int,
          flags: QueryFlags = DEFAULT_FLAGS, *, _scratch: _Scratch | None = None) -> QueryOutcome:
    """Answer q(u, v); the result always equals plain-BFS ground truth."""
    _check_consistent(g, idx)
    g._check_vertex(u)
    g._check_vertex(v)
    if u == v:
        return QueryOutcome(True, AnsweredBy.REFLEXIVE)

    dl_out, dl_in = idx.dl_out, idx.dl_in
    bl_in, bl_out = idx.bl_in, idx.bl_out
    use_dl, use_bl = flags.use_dl, flags.use_bl

    if use_dl and dl_out[u] & dl_in[v]:
        return QueryOutcome(True, AnsweredBy.DL_POSITIVE)
    if use_bl and (bl_in[u] & ~bl_in[v] or bl_out[v] & ~bl_out[u]):
        return QueryOutcome(False, AnsweredBy.BL_NEGATIVE)
    if use_dl and flags.use_thm1 and dl_out[v] & dl_in[u]:
        return QueryOutcome(False, AnsweredBy.THM1_NEGATIVE)
    if use_dl and flags.use_thm2 and (dl_out[u] & dl_in[u] or dl_out[v] & dl_in[v]):
        return QueryOutcome(False, AnsweredBy.THM2_NEGATIVE)

    prune_dl = use_dl and flags.prune_dl
    prune_bl = use_bl and flags.prune_bl
    scratch = _scratch if _scratch is not None else _Scratch(g.vertex_count)
    scratch.epoch += 1
    epoch, stamp = scratch.epoch, scratch.stamp
    dl_out_u = dl_out[u]
    bl_in_v, bl_out_v = bl_in[v], bl_out[v]

    stamp[u] = epoch
    queue = deque([u])
    forward = g.forward
    visited = 0
    while queue:
        w = queue.popleft()
        visited += 1
        for x in forward[w]:
            if x == v:
                return QueryOutcome(True, AnsweredBy.BFS_POSITIVE, visited)
            if stamp[x] == epoch:
                continue
            stamp[x] = epoch
            if prune_dl and dl_out_u & dl_in[x]:
                continue
            if prune_bl and (bl_in[x] & ~bl_in_v or bl_out_v & ~bl_out[x]):
                continue
            queue.append(x)
    return QueryOutcome(False, AnsweredBy.BFS_NEGATIVE, visited)


@dataclass(frozen=True)
class BatchStats:
    """Aggregates over one query batch; times are milliseconds."""

    query_count: int
    label_answered: int
    rho: float
    visited_total: int
    reachable_count: int
    elapsed_ms: float

    @classmethod
    def collect(cls, outcomes: Sequence[QueryOutcome], elapsed_ms: float) -> "BatchStats":
        label_answered = sum(1 for o in outcomes if o.visited == 0)
        return cls(
            query_count=len(outcomes),
            label_answered=label_answered,
            rho=label_answered / len(outcomes) if outcomes else 0.0,
            visited_total=sum(o.visited for o in outcomes),
            reachable_count=sum(1 for o in outcomes if o.reachable),
            elapsed_ms=elapsed_ms,
        )


def _run_slice(g: DynamicGraph, idx: DblIndex, queries: Sequence[tuple[int, int]],
               flags: QueryFlags, start: int, stop: int) -> list[QueryOutcome]:
    scratch = _Scratch(g.vertex_count)
    return [query(g, idx, u, v, flags, _scratch=scratch)
            for u, v in queries[start:stop]]


# Worker-process state. Under the fork start method this is inherited from
# the parent's address space, so the graph, index and query list are never
# serialized; only slice bounds and compact result rows cross the pipe.
_worker_state: tuple | None = None


def _pool_init(*state) -> None:
    global _worker_state
    if state:
        _worker_state = state


_ANSWER_ORDER = tuple(AnsweredBy)
_ANSWER_INDEX = {a: i for i, a in enumerate(_ANSWER_ORDER)}


def _pool_run(bounds: tuple[int, int]) -> list[tuple[bool, int, int]]:
    g, idx, queries, flags = _worker_state
    index = _ANSWER_INDEX
    return [(o.reachable, index[o.answered_by], o.visited)
            for o in _run_slice(g, idx, queries, flags, bounds[0], bounds[1])]


def default_workers() -> int:
    """Worker count from the environment, else the processor count."""
    value = os.environ.get(WORKERS_ENV_VAR)
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV_VAR} must be an integer, got {value!r}") from None
    return os.cpu_count() or 1


def query_batch(g: DynamicGraph, idx: DblIndex, queries: Iterable[tuple[int, int]],
                workers: int = 1,
                flags: QueryFlags = DEFAULT_FLAGS) -> tuple[list[QueryOutcome], BatchStats]:
    """Evaluate many queries; outcomes are identical for any worker count.

    Multi-worker runs fork worker processes, each answering a contiguous
    slice; results are reassembled in input order, so parallelism affects
    throughput only.
    """
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    _check_consistent(g, idx)
    qlist = list(queries)
    started = time.perf_counter()
    if workers == 1 or len(qlist) < 2 * workers:
        outcomes = _run_slice(g, idx, qlist, flags, 0, len(qlist))
    else:
        import concurrent.futures
        import multiprocessing

        global _worker_state
        chunk = -(-len(qlist) // workers)
        bounds = [(i, min(i + chunk, len(qlist))) for i in range(0, len(qlist), chunk)]
        forking = hasattr(os, "fork")
        ctx = multiprocessing.get_context("fork" if forking else None)
        initargs = () if forking else (g, idx, qlist, flags)
        _worker_state = (g, idx, qlist, flags)
        try:
            with concurrent.futures.ProcessPoolExecutor(
                    max_workers=workers, mp_context=ctx,
                    initializer=_pool_init, initargs=initargs) as pool:
                order = _ANSWER_ORDER
                outcome = QueryOutcome
                outcomes = [outcome(r, order[a], n)
                            for part in pool.map(_pool_run, bounds)
                            for r, a, n in part]
        finally:
            _worker_state = None
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    return outcomes, BatchStats.collect(outcomes, elapsed_ms)


def explain(outcome: QueryOutcome) -> str:
    """One-line provenance string with a stable format for log scraping."""
    by = outcome.answered_by
    if by is AnsweredBy.REFLEXIVE:
        return "answered positive: self-query, reachability is reflexive"
    if by is AnsweredBy.DL_POSITIVE:
        return "answered positive by DL label intersection"
    if by is AnsweredBy.BL_NEGATIVE:
        return "answered negative by BL label containment failure"
    if by is AnsweredBy.THM1_NEGATIVE:
        return "answered negative by reverse DL intersection early termination"
    if by is AnsweredBy.THM2_NEGATIVE:
        return "answered negative by landmark coverage early termination"
    if by is AnsweredBy.BFS_POSITIVE:
        return f"answered positive by pruned BFS, visited {outcome.visited} vertices"
    return f"answered negative by exhausted pruned BFS, visited {outcome.visited} vertices"
