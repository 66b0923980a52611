"""Mutable directed graph with forward and reverse adjacency.

Vertex ids are dense integers ``0..n-1``. Adjacency lists keep insertion
order; a side set of edge tuples makes duplicate detection O(1) so repeated
``add_edge`` calls are idempotent. Loaders remap arbitrary file ids to dense
ids and keep the original ids in a side table for reporting.
"""

from __future__ import annotations

import gzip
import io
from dataclasses import dataclass
from collections import deque
from typing import IO, Iterator, Union

from .errors import EdgeListFormatError, VertexRangeError

Source = Union[str, bytes, IO[bytes], IO[str]]


@dataclass(frozen=True)
class TemporalEdge:
    """A directed edge stamped with a non-negative integer timestamp."""

    src: int
    dst: int
    timestamp: int


class DynamicGraph:
    """Directed graph storage supporting edge insertion and removal."""

    def __init__(self, vertex_count: int = 0):
        self.forward: list[list[int]] = [[] for _ in range(vertex_count)]
        self.reverse: list[list[int]] = [[] for _ in range(vertex_count)]
        self.edge_count = 0
        self._edges: set[tuple[int, int]] = set()
        # Dense id -> id used in the source file; None for graphs built in code.
        self.original_ids: list[int] | None = None
        self._dense_of: dict[int, int] | None = None

    @property
    def vertex_count(self) -> int:
        return len(self.forward)

    def add_vertex(self) -> int:
        self.forward.append([])
        self.reverse.append([])
        return len(self.forward) - 1

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < len(self.forward):
            raise VertexRangeError(f"vertex {v} outside [0, {len(self.forward)})")

    def add_edge(self, u: int, v: int) -> bool:
        """Insert edge (u, v). Returns False if it was already present."""
        self._check_vertex(u)
        self._check_vertex(v)
        if (u, v) in self._edges:
            return False
        self._edges.add((u, v))
        self.forward[u].append(v)
        self.reverse[v].append(u)
        self.edge_count += 1
        return True

    def remove_edge(self, u: int, v: int) -> bool:
        """Remove edge (u, v). Returns False if it was not present."""
        self._check_vertex(u)
        self._check_vertex(v)
        if (u, v) not in self._edges:
            return False
        self._edges.remove((u, v))
        self.forward[u].remove(v)
        self.reverse[v].remove(u)
        self.edge_count -= 1
        return True

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._edges

    def successors(self, u: int) -> list[int]:
        self._check_vertex(u)
        return self.forward[u]

    def predecessors(self, v: int) -> list[int]:
        self._check_vertex(v)
        return self.reverse[v]

    def out_degree(self, u: int) -> int:
        self._check_vertex(u)
        return len(self.forward[u])

    def in_degree(self, v: int) -> int:
        self._check_vertex(v)
        return len(self.reverse[v])

    def vertices(self) -> range:
        return range(len(self.forward))

    def edges(self) -> Iterator[tuple[int, int]]:
        """Edges in dense-id order: by source vertex, then adjacency order."""
        for u, succ in enumerate(self.forward):
            for v in succ:
                yield (u, v)

    def copy(self) -> "DynamicGraph":
        g = DynamicGraph(self.vertex_count)
        for u, succ in enumerate(self.forward):
            g.forward[u] = list(succ)
        for v, pred in enumerate(self.reverse):
            g.reverse[v] = list(pred)
        g.edge_count = self.edge_count
        g._edges = set(self._edges)
        g.original_ids = list(self.original_ids) if self.original_ids else None
        g._dense_of = dict(self._dense_of) if self._dense_of else None
        return g

    # -- original-id side table ------------------------------------------

    def to_original(self, dense: int) -> int:
        self._check_vertex(dense)
        return self.original_ids[dense] if self.original_ids else dense

    def to_dense(self, original: int) -> int:
        if self._dense_of is None:
            self._check_vertex(original)
            return original
        try:
            return self._dense_of[original]
        except KeyError:
            raise VertexRangeError(f"unknown original vertex id {original}") from None

    def register_original(self, original: int) -> int:
        """Map an original id to a dense id, creating a vertex if unseen."""
        if self._dense_of is None:
            self._dense_of = {self.to_original(v): v for v in self.vertices()}
            self.original_ids = [self.to_original(v) for v in self.vertices()]
        dense = self._dense_of.get(original)
        if dense is None:
            dense = self.add_vertex()
            self._dense_of[original] = dense
            self.original_ids.append(original)
        return dense


def _open_source(source: Source, gzipped: bool | None = None) -> IO[str]:
    """Open a path / byte stream / text stream for line reading.

    ``gzipped=None`` auto-detects from a ``.gz`` suffix (paths) or the gzip
    magic bytes (binary streams).
    """
    if isinstance(source, str):
        if gzipped or (gzipped is None and source.endswith(".gz")):
            return io.TextIOWrapper(gzip.open(source, "rb"), encoding="utf-8")
        return open(source, "r", encoding="utf-8")
    if isinstance(source, bytes):
        if gzipped is None:
            gzipped = source[:2] == b"\x1f\x8b"
        source = io.BytesIO(source)
    if hasattr(source, "read"):
        probe = source.read(0)
        if isinstance(probe, bytes):
            if gzipped is None and hasattr(source, "peek"):
                gzipped = source.peek(2)[:2] == b"\x1f\x8b"
            if gzipped:
                return io.TextIOWrapper(gzip.GzipFile(fileobj=source), encoding="utf-8")
            return io.TextIOWrapper(source, encoding="utf-8")
        return source  # already a text stream
    raise TypeError(f"unsupported source type: {type(source)!r}")


def load_edge_list(source: Source, gzipped: bool | None = None) -> DynamicGraph:
    """Parse "src dst" lines into a graph with densely remapped ids.

    Lines starting with '#' are comments. Duplicate edges collapse to one.
    Original ids are retained on the returned graph's side table.
    """
    g = DynamicGraph()
    dense: dict[int, int] = {}
    originals: list[int] = []

    def intern(raw: int) -> int:
        vid = dense.get(raw)
        if vid is None:
            vid = g.add_vertex()
            dense[raw] = vid
            originals.append(raw)
        return vid

    with _open_source(source, gzipped) as stream:
        for line_no, line in enumerate(stream, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgeListFormatError(line_no, f"expected 'src dst', got {line!r}")
            try:
                raw_u, raw_v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListFormatError(line_no, f"non-integer vertex id in {line!r}") from None
            if raw_u < 0 or raw_v < 0:
                raise EdgeListFormatError(line_no, f"negative vertex id in {line!r}")
            g.add_edge(intern(raw_u), intern(raw_v))

    g.original_ids = originals
    g._dense_of = dense
    return g


def dump_edge_list(g: DynamicGraph, sink: IO[str]) -> None:
    """Write the graph back out as "src dst" lines using original ids."""
    for u, v in g.edges():
        sink.write(f"{g.to_original(u)} {g.to_original(v)}\n")


def load_temporal_edge_list(source: Source, gzipped: bool | None = None) -> list[TemporalEdge]:
    """Parse "src dst timestamp" lines, sorted by timestamp (stable).

    Ids are returned as they appear in the file; remapping happens when a
    graph is materialized from the edges (see workload.replay_temporal).
    """
    edges: list[TemporalEdge] = []
    with _open_source(source, gzipped) as stream:
        for line_no, line in enumerate(stream, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise EdgeListFormatError(line_no, f"expected 'src dst timestamp', got {line!r}")
            try:
                src, dst, ts = int(parts[0]), int(parts[1]), int(parts[2])
            except ValueError:
                raise EdgeListFormatError(line_no, f"non-integer field in {line!r}") from None
            if src < 0 or dst < 0 or ts < 0:
                raise EdgeListFormatError(line_no, f"negative field in {line!r}")
            edges.append(TemporalEdge(src, dst, ts))
    edges.sort(key=lambda e: e.timestamp)  # sort() is stable: ties keep input order
    return edges


def oracle_reach(g: DynamicGraph, u: int, v: int) -> bool:
    """Plain forward BFS ground truth. Reflexive: (u, u) is always True."""
    g._check_vertex(u)
    g._check_vertex(v)
    if u == v:
        return True
    seen = bytearray(g.vertex_count)
    seen[u] = 1
    queue = deque([u])
    forward = g.forward
    while queue:
        w = queue.popleft()
        for x in forward[w]:
            if x == v:
                return True
            if not seen[x]:
                seen[x] = 1
                queue.append(x)
    return False


def reachable_set_masks(g: DynamicGraph) -> list[int]:
    """Transitive closure as one reachability bitmask per source vertex.

    Row u has bit v set iff u reaches v (reflexively). Intended for
    exhaustive differential checks on small graphs.
    """
    n = g.vertex_count
    rows = [0] * n
    forward = g.forward
    for u in range(n):
        seen = bytearray(n)
        seen[u] = 1
        row = 1 << u
        queue = deque([u])
        while queue:
            w = queue.popleft()
            for x in forward[w]:
                if not seen[x]:
                    seen[x] = 1
                    row |= 1 << x
                    queue.append(x)
        rows[u] = row
    return rows


def bidirectional_bfs(g: DynamicGraph, u: int, v: int) -> bool:
    """Reachability by alternating forward/backward search.

    Expands whichever frontier is currently smaller; terminates when the
    two searches meet or either side exhausts. Equivalent to oracle_reach.
    """
    g._check_vertex(u)
    g._check_vertex(v)
    if u == v:
        return True
    seen_f = bytearray(g.vertex_count)
    seen_b = bytearray(g.vertex_count)
    seen_f[u] = 1
    seen_b[v] = 1
    frontier_f = [u]
    frontier_b = [v]
    while frontier_f and frontier_b:
        if len(frontier_f) <= len(frontier_b):
            frontier_f = _expand(g.forward, frontier_f, seen_f)
            if any(seen_b[x] for x in frontier_f):
                return True
        else:
            frontier_b = _expand(g.reverse, frontier_b, seen_b)
            if any(seen_f[x] for x in frontier_b):
                return True
    return False


def _expand(adj: list[list[int]], frontier: list[int], seen: bytearray) -> list[int]:
    nxt: list[int] = []
    for w in frontier:
        for x in adj[w]:
            if not seen[x]:
                seen[x] = 1
                nxt.append(x)
    return nxt
