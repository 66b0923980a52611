"""Command-line harness.

Subcommands: build, query, update, replay, bench, verify. Exit codes:
0 success, 2 verification failure, 1 usage or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from typing import IO

from .errors import DblError, EdgeListFormatError
from .graph import DynamicGraph, load_edge_list, load_temporal_edge_list, reachable_set_masks
from .labels import DblIndex, IndexConfig, LandmarkStrategy, build_index, rebuild_index
from .queries import default_workers, query_batch
from .snapshot import load_index, save_index, sniff_snapshot
from .updates import delete_edge, insert_edge, verify_labels
from .workload import (bench_run, gen_insert_workload, random_graph_suite,
                       replay_temporal)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the harness contract
    # reserves 2 for verification failures.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=None,
                   help="landmark label width (default: min(64, n))")
    p.add_argument("--kprime", type=int, default=64, help="leaf label width (default 64)")
    p.add_argument("--strategy", choices=[s.value for s in LandmarkStrategy],
                   default="product", help="landmark ranking by in/out degree")
    p.add_argument("--leaf-r", type=int, default=0,
                   help="leaf threshold: also admit vertices with degree product <= r")
    p.add_argument("--seed", type=int, default=0, help="leaf hash seed")


def _config_from(args, n_vertices: int) -> IndexConfig:
    k = args.k if args.k is not None else min(64, n_vertices)
    return IndexConfig(k=k, k_prime=args.kprime,
                       landmark_strategy=LandmarkStrategy(args.strategy),
                       leaf_threshold=args.leaf_r, hash_seed=args.seed)


def _load_graph(path: str, gzipped: bool) -> DynamicGraph:
    return load_edge_list(path, gzipped=True if gzipped else None)


def _resolve_graph_index(args) -> tuple[DynamicGraph, DblIndex]:
    """The positional source may be an edge list or an index snapshot."""
    if sniff_snapshot(args.source):
        if not getattr(args, "graph", None):
            raise DblError("an index snapshot needs its graph: pass --graph <edge list>")
        idx = load_index(args.source)
        g = _load_graph(args.graph, args.gzip)
        if g.vertex_count != idx.vertex_count:
            raise DblError(f"snapshot has {idx.vertex_count} vertices but graph has "
                           f"{g.vertex_count}; they do not belong together")
        return g, idx
    g = _load_graph(args.source, args.gzip)
    if getattr(args, "index", None):
        idx = load_index(args.index)
        if g.vertex_count != idx.vertex_count:
            raise DblError("index snapshot does not match the graph (vertex counts differ)")
        return g, idx
    return g, build_index(g, _config_from(args, g.vertex_count))


def _read_pairs(path: str, g: DynamicGraph) -> list[tuple[int, int]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgeListFormatError(line_no, f"expected 'u v', got {line!r}")
            try:
                pairs.append((g.to_dense(int(parts[0])), g.to_dense(int(parts[1]))))
            except ValueError:
                raise EdgeListFormatError(line_no, f"non-integer id in {line!r}") from None
    return pairs


def _emit_outcomes(out: IO[str], g: DynamicGraph, pairs, outcomes, fmt: str,
                   header: bool = True) -> None:
    if fmt == "csv":
        writer = csv.writer(out)
        if header:
            writer.writerow(["u", "v", "reachable", "answered_by", "visited"])
        for (u, v), o in zip(pairs, outcomes):
            writer.writerow([g.to_original(u), g.to_original(v),
                             str(o.reachable).lower(), o.answered_by.value, o.visited])
    else:
        for (u, v), o in zip(pairs, outcomes):
            out.write(json.dumps({"u": g.to_original(u), "v": g.to_original(v),
                                  "reachable": o.reachable,
                                  "answered_by": o.answered_by.value,
                                  "visited": o.visited}) + "\n")


def _open_output(path: str | None) -> IO[str]:
    return open(path, "w", encoding="utf-8") if path else sys.stdout


def cmd_build(args) -> int:
    started = time.perf_counter()
    g = _load_graph(args.graph, args.gzip)
    load_ms = (time.perf_counter() - started) * 1000.0
    cfg = _config_from(args, g.vertex_count)
    started = time.perf_counter()
    idx = build_index(g, cfg)
    build_ms = (time.perf_counter() - started) * 1000.0
    if args.output:
        save_index(idx, args.output)
    summary = {"n": g.vertex_count, "m": g.edge_count,
               "d_avg": g.edge_count / g.vertex_count if g.vertex_count else 0.0,
               "k": cfg.k, "k_prime": cfg.k_prime, "strategy": cfg.landmark_strategy.value,
               "leaves_in": len(idx.leaf_sets.leaves_in),
               "leaves_out": len(idx.leaf_sets.leaves_out),
               "load_ms": load_ms, "build_ms": build_ms,
               "snapshot": args.output}
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_query(args) -> int:
    g, idx = _resolve_graph_index(args)
    pairs = _read_pairs(args.queries, g)
    outcomes, stats = query_batch(g, idx, pairs, workers=args.workers)
    out = _open_output(args.output)
    try:
        _emit_outcomes(out, g, pairs, outcomes, args.format)
    finally:
        if out is not sys.stdout:
            out.close()
    print(f"answered {stats.query_count} queries in {stats.elapsed_ms:.3f} ms, "
          f"rho={stats.rho:.4f}, visited_total={stats.visited_total}", file=sys.stderr)
    return 0


def cmd_update(args) -> int:
    g, idx = _resolve_graph_index(args)

    def ensure_vertex(original: int) -> int:
        dense = g.register_original(original)
        if dense >= idx.vertex_count:
            idx.grow_to(g.vertex_count)
        return dense

    applied = {"+": 0, "-": 0, "?": 0}
    with open(args.stream, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3 or parts[0] not in "+-?":
                raise EdgeListFormatError(line_no, f"expected '+|-|? u v', got {line!r}")
            op = parts[0]
            try:
                raw_u, raw_v = int(parts[1]), int(parts[2])
            except ValueError:
                raise EdgeListFormatError(line_no, f"non-integer id in {line!r}") from None
            if op == "+":
                u, v = ensure_vertex(raw_u), ensure_vertex(raw_v)
                stats = insert_edge(g, idx, u, v)
            elif op == "-":
                if not args.allow_delete:
                    raise DblError(f"line {line_no}: deletion requires --allow-delete")
                u, v = g.to_dense(raw_u), g.to_dense(raw_v)
                stats = delete_edge(g, idx, u, v, rebuild_if_tainted=args.rebuild_tainted)
            else:
                u, v = g.to_dense(raw_u), g.to_dense(raw_v)
                outcomes, _ = query_batch(g, idx, [(u, v)])
                _emit_outcomes(sys.stdout, g, [(u, v)], outcomes, args.format,
                               header=False)
                stats = None
            applied[op] += 1
            if args.line_stats and stats is not None:
                print(json.dumps({"line": line_no, "op": op, "u": raw_u, "v": raw_v,
                                  "visited": stats.visited,
                                  "labels_changed": stats.labels_changed,
                                  "early_terminated": stats.early_terminated,
                                  "tainted": stats.tainted}), file=sys.stderr)
    if args.save_index:
        save_index(idx, args.save_index)
    print(f"applied {applied['+']} inserts, {applied['-']} deletes, "
          f"{applied['?']} queries", file=sys.stderr)
    return 0


def cmd_replay(args) -> int:
    edges = load_temporal_edge_list(args.temporal, gzipped=True if args.gzip else None)
    n_est = len({x for e in edges for x in (e.src, e.dst)})
    cfg = _config_from(args, n_est)
    _, idx, report = replay_temporal(edges, warm_fraction=args.warm,
                                     report_every=args.report_every, config=cfg,
                                     allow_delete=args.allow_delete)
    out = _open_output(args.output)
    try:
        out.write(report.to_json(indent=2) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_bench(args) -> int:
    g = _load_graph(args.graph, args.gzip)
    cfg = _config_from(args, g.vertex_count)
    query_pairs = _read_pairs(args.query_file, g) if args.query_file else None
    hops = None
    if args.by_distance:
        hops = [h if h == "unreachable" else int(h) for h in args.by_distance.split(",")]
    report = bench_run(g, cfg, query_pairs=query_pairs, query_count=args.queries,
                       insert_count=args.inserts, seed=args.seed,
                       workers=args.workers, distance_hops=hops)
    out = _open_output(args.output)
    try:
        out.write(report.to_json(indent=2) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def _verify_one(g: DynamicGraph, cfg: IndexConfig, inserts: int, seed: int,
                idx: DblIndex | None = None) -> list[str]:
    """Build (or take a given index), optionally mutate, then differential-check."""
    problems: list[str] = []
    if idx is None:
        idx = build_index(g, cfg)
    if inserts:
        try:
            events = gen_insert_workload(g, inserts, seed)
        except DblError:
            events = []
        for ev in events:
            insert_edge(g, idx, ev.u, ev.v)
        fresh = rebuild_index(g, idx)
        if not idx.labels_equal(fresh):
            problems.append("incremental labels differ from rebuild after inserts")
    closure = reachable_set_masks(g)
    pairs = [(u, v) for u in g.vertices() for v in g.vertices()]
    outcomes, _ = query_batch(g, idx, pairs)
    for (u, v), o in zip(pairs, outcomes):
        expected = bool(closure[u] >> v & 1)
        if o.reachable != expected:
            problems.append(f"q({u},{v}) = {o.reachable}, oracle says {expected}")
    report = verify_labels(g, idx)
    if not report.ok:
        problems.extend(str(v) for v in report.violations[:10])
    return problems


def cmd_verify(args) -> int:
    failures = 0
    if args.graph:
        g = _load_graph(args.graph, args.gzip)
        if g.vertex_count > 2000:
            raise DblError("verify is an exhaustive all-pairs check; "
                           "use a graph with at most 2000 vertices")
        cfg = _config_from(args, g.vertex_count)
        idx = None
        if args.index:
            idx = load_index(args.index)
            if idx.vertex_count != g.vertex_count:
                raise DblError("index snapshot does not match the graph")
        problems = _verify_one(g, cfg, args.inserts, args.seed, idx=idx)
        for p in problems:
            print(f"FAIL {args.graph}: {p}", file=sys.stderr)
        failures += bool(problems)
        checked = 1
    else:
        suite = random_graph_suite(args.graphs, args.max_n, args.seed)
        for i, (g, acyclic) in enumerate(suite):
            cfg = _config_from(args, g.vertex_count)
            problems = _verify_one(g, cfg, args.inserts, args.seed + 1000 + i)
            label = f"graph {i} (n={g.vertex_count}, m={g.edge_count}, "\
                    f"{'acyclic' if acyclic else 'cyclic'})"
            if problems:
                failures += 1
                for p in problems[:10]:
                    print(f"FAIL {label}: {p}", file=sys.stderr)
            elif args.verbose:
                print(f"ok {label}", file=sys.stderr)
        checked = len(suite)
    print(f"verified {checked} graph(s): "
          f"{'all consistent with the oracle' if not failures else f'{failures} FAILED'}")
    return 2 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dblreach",
                     description="Dynamic reachability index: build, query, update, benchmark.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[], help="build an index from an edge list")
    p.add_argument("graph", help="edge list file ('src dst' lines, # comments)")
    _add_config_flags(p)
    p.add_argument("--gzip", action="store_true", help="force gzip decoding of inputs")
    p.add_argument("-o", "--output", help="write an index snapshot here")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="answer reachability queries from a file")
    p.add_argument("source", help="edge list or index snapshot")
    p.add_argument("queries", help="query file ('u v' lines)")
    p.add_argument("--graph", help="edge list (required when source is a snapshot)")
    p.add_argument("--index", help="index snapshot to use with the graph")
    _add_config_flags(p)
    p.add_argument("--gzip", action="store_true")
    p.add_argument("--workers", type=int, default=default_workers(),
                   help="parallel query workers (default: DBLREACH_WORKERS or CPU count)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("-o", "--output", help="write results here instead of stdout")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("update", help="apply an update stream ('+ u v', '- u v', '? u v')")
    p.add_argument("source", help="edge list or index snapshot")
    p.add_argument("stream", help="update stream file")
    p.add_argument("--graph", help="edge list (required when source is a snapshot)")
    p.add_argument("--index", help="index snapshot to use with the graph")
    _add_config_flags(p)
    p.add_argument("--gzip", action="store_true")
    p.add_argument("--allow-delete", action="store_true",
                   help="enable experimental '- u v' deletion lines")
    p.add_argument("--rebuild-tainted", action="store_true",
                   help="rebuild labels when a deletion touches a cycle")
    p.add_argument("--line-stats", action="store_true",
                   help="log per-line update stats as JSON on stderr")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--save-index", help="write the updated index snapshot here")
    p.set_defaults(func=cmd_update)

    p = sub.add_parser("replay", help="replay a temporal edge stream ('src dst ts' lines)")
    p.add_argument("temporal", help="temporal edge list file")
    _add_config_flags(p)
    p.add_argument("--gzip", action="store_true")
    p.add_argument("--warm", type=float, default=0.5,
                   help="fraction of the stream batch-built before replay (default 0.5)")
    p.add_argument("--report-every", type=int, default=10000,
                   help="append a report row every N replay events")
    p.add_argument("--allow-delete", action="store_true",
                   help="slide the window: delete the oldest edge per insertion")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("bench", help="load, build, optional updates, query batch, report")
    p.add_argument("graph", help="edge list file")
    _add_config_flags(p)
    p.add_argument("--gzip", action="store_true")
    p.add_argument("--queries", type=int, default=10000, help="random query count")
    p.add_argument("--query-file", help="explicit query file instead of random queries")
    p.add_argument("--inserts", type=int, default=0, help="random edge insertions before querying")
    p.add_argument("--workers", type=int, default=default_workers())
    p.add_argument("--by-distance", metavar="HOPS",
                   help="comma list of hop distances (and 'unreachable') to break down, "
                        "e.g. 2,4,6,8,unreachable")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="differential check against the plain-BFS oracle")
    p.add_argument("graph", nargs="?", default=None,
                   help="edge list to verify (omit to sweep random graphs)")
    _add_config_flags(p)
    p.add_argument("--gzip", action="store_true")
    p.add_argument("--index", help="verify this index snapshot instead of a fresh build")
    p.add_argument("--graphs", type=int, default=50, help="random graphs to sweep (default 50)")
    p.add_argument("--max-n", type=int, default=200, help="largest random graph (default 200)")
    p.add_argument("--inserts", type=int, default=25,
                   help="seeded edge insertions applied before checking (default 25)")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits for usage errors and --help
        return exc.code or 0
    try:
        return args.func(args)
    except DblError as exc:
        print(f"dblreach: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"dblreach: i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
