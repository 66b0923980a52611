"""Incremental label maintenance for edge and vertex updates.

Insertion is a pruned union propagation: the labels the new edge carries
are OR-ed into every vertex whose label actually grows, in one BFS per
direction (DL and BL share the traversal). Deletion is the experimental
inverse: for each affected vertex a removal set is recomputed as the
difference between the incoming label and the union over the remaining
predecessors (successors for out-labels), stopping where it empties.
Deletion is exact on DAGs; inside cycles, mutually sustained bits can
survive, so any deletion whose affected region contains a cycle raises
the ``tainted`` flag instead of guessing a repair.

Landmark and leaf sets are frozen at build time: updates never reselect
them, and vertices added later carry empty labels until edges connect
them.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .bitset import BitLabel
from .errors import MissingEdgeError
from .graph import DynamicGraph
from .labels import DblIndex, rebuild_index
from .queries import _check_consistent


@dataclass
class UpdateStats:
    """Work accounting for one maintenance operation.

    ``visited`` counts BFS dequeues across both directions;
    ``labels_changed`` counts label-change events (unique vertices per
    direction pass); ``early_terminated`` marks insertions skipped by the
    reachability pre-check; ``tainted`` marks deletions whose affected
    region contains a cycle (labels may retain stale bits).
    """

    visited: int = 0
    labels_changed: int = 0
    early_terminated: bool = False
    tainted: bool = False

    def absorb(self, other: "UpdateStats") -> None:
        self.visited += other.visited
        self.labels_changed += other.labels_changed
        self.tainted = self.tainted or other.tainted


@dataclass(frozen=True)
class RemovalSet:
    """Bits one deletion step would exclude from a vertex's labels."""

    r_dl: BitLabel
    r_bl: BitLabel

    def __bool__(self) -> bool:
        return bool(self.r_dl) or bool(self.r_bl)


def seed_removal_sets(g: DynamicGraph, idx: DblIndex, u: int,
                      v: int) -> tuple[RemovalSet, RemovalSet]:
    """Preview what deleting the present edge (u, v) would retract.

    Returns (in-direction removal at v, out-direction removal at u)
    without touching graph or labels. Each removal set is contained in
    the label it would shrink.
    """
    _check_consistent(g, idx)
    if not g.has_edge(u, v):
        raise MissingEdgeError(f"edge ({u}, {v}) is not present")
    cfg = idx.config
    in_preds = [p for p in g.predecessors(v) if p != u]
    r_dl, r_bl = _removal_at(v, idx.dl_in[u], idx.bl_in[u], in_preds,
                             idx.dl_in, idx.bl_in,
                             idx.landmark_set.bit(v), idx.leaf_sets.in_bit(v))
    incoming = RemovalSet(BitLabel(cfg.k, r_dl), BitLabel(cfg.k_prime, r_bl))
    out_succs = [q for q in g.successors(u) if q != v]
    r_dl, r_bl = _removal_at(u, idx.dl_out[v], idx.bl_out[v], out_succs,
                             idx.dl_out, idx.bl_out,
                             idx.landmark_set.bit(u), idx.leaf_sets.out_bit(u))
    outgoing = RemovalSet(BitLabel(cfg.k, r_dl), BitLabel(cfg.k_prime, r_bl))
    return incoming, outgoing


def _propagate_union(adj: list[list[int]], seed: int, dl_add: int, bl_add: int,
                     dl_labels: list[int], bl_labels: list[int]) -> tuple[int, int]:
    """OR (dl_add, bl_add) into seed and its cone, pruning vertices whose
    labels both already contain the additions. Returns (dequeues, changes)."""
    changed = 0
    if (dl_add & ~dl_labels[seed]) or (bl_add & ~bl_labels[seed]):
        dl_labels[seed] |= dl_add
        bl_labels[seed] |= bl_add
        changed += 1
    queue = deque([seed])
    visited = 0
    while queue:
        p = queue.popleft()
        visited += 1
        for x in adj[p]:
            if (dl_add & ~dl_labels[x]) or (bl_add & ~bl_labels[x]):
                dl_labels[x] |= dl_add
                bl_labels[x] |= bl_add
                changed += 1
                queue.append(x)
    return visited, changed


def insert_edge(g: DynamicGraph, idx: DblIndex, u: int, v: int) -> UpdateStats:
    """Insert (u, v) and repair all four label families.

    If the landmark labels already certify that u reaches v, the edge adds
    no reachability and label work is skipped entirely (the pre-check is
    evaluated on pre-insertion labels). Re-inserting a present edge is a
    no-op for the labels either way.
    """
    _check_consistent(g, idx)
    g._check_vertex(u)
    g._check_vertex(v)
    pre_certified = idx.dl_out[u] & idx.dl_in[v] != 0
    g.add_edge(u, v)
    if pre_certified:
        return UpdateStats(early_terminated=True)

    stats = UpdateStats()
    visited, changed = _propagate_union(
        g.forward, v, idx.dl_in[u], idx.bl_in[u], idx.dl_in, idx.bl_in)
    stats.visited += visited
    stats.labels_changed += changed
    visited, changed = _propagate_union(
        g.reverse, u, idx.dl_out[v], idx.bl_out[v], idx.dl_out, idx.bl_out)
    stats.visited += visited
    stats.labels_changed += changed
    return stats


def _removal_at(x: int, r_dl: int, r_bl: int, neighbors: list[int],
                dl_labels: list[int], bl_labels: list[int],
                own_dl_bit: int, own_bl_bit: int) -> tuple[int, int]:
    """Shrink the inherited removal set by everything x still receives."""
    for y in neighbors:
        r_dl &= ~dl_labels[y]
        r_bl &= ~bl_labels[y]
        if not r_dl and not r_bl:
            return 0, 0
    return r_dl & ~own_dl_bit, r_bl & ~own_bl_bit


def _propagate_removal(adj: list[list[int]], radj: list[list[int]], seed: int,
                       seed_dl: int, seed_bl: int,
                       dl_labels: list[int], bl_labels: list[int],
                       own_dl, own_bl) -> tuple[int, int]:
    """Subtract removal sets along adj starting at seed.

    ``seed_dl``/``seed_bl`` are the labels formerly fed through the deleted
    edge; ``radj`` yields the remaining suppliers of each vertex. ``own_dl``
    and ``own_bl`` map a vertex to the self bit it always retains (landmark
    position / own leaf bucket). Returns (dequeues, change events).
    """
    r_dl, r_bl = _removal_at(seed, seed_dl, seed_bl, radj[seed],
                             dl_labels, bl_labels, own_dl(seed), own_bl(seed))
    if not r_dl and not r_bl:
        return 0, 0
    dl_labels[seed] &= ~r_dl
    bl_labels[seed] &= ~r_bl
    changed = {seed}
    visited = 0
    queue = deque([(seed, r_dl, r_bl)])
    while queue:
        p, p_dl, p_bl = queue.popleft()
        visited += 1
        for x in adj[p]:
            x_dl, x_bl = _removal_at(x, p_dl, p_bl, radj[x],
                                     dl_labels, bl_labels, own_dl(x), own_bl(x))
            if x_dl or x_bl:
                dl_labels[x] &= ~x_dl
                bl_labels[x] &= ~x_bl
                changed.add(x)
                # Re-enqueueing with a fresh removal set is allowed; each
                # step strictly clears bits, so propagation terminates.
                queue.append((x, x_dl, x_bl))
    return visited, len(changed)


def _region_has_cycle(adj: list[list[int]], start: int) -> bool:
    """Kahn's algorithm over the subgraph induced by start's cone."""
    region = {start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for x in adj[w]:
            if x not in region:
                region.add(x)
                queue.append(x)
    indeg = dict.fromkeys(region, 0)
    for w in region:
        for x in adj[w]:
            if x in region:
                indeg[x] += 1
    ready = deque(w for w in region if indeg[w] == 0)
    processed = 0
    while ready:
        w = ready.popleft()
        processed += 1
        for x in adj[w]:
            if x in region:
                indeg[x] -= 1
                if indeg[x] == 0:
                    ready.append(x)
    return processed != len(region)


def delete_edge(g: DynamicGraph, idx: DblIndex, u: int, v: int, *,
                rebuild_if_tainted: bool = False) -> UpdateStats:
    """Remove (u, v) and retract label bits it alone sustained. Experimental.

    The edge must be present. On DAGs the result is bit-identical to a
    fresh build with the same landmark/leaf sets. If the affected region
    (v's descendants or u's ancestors after removal) contains a cycle,
    ``tainted`` is set; with ``rebuild_if_tainted`` the labels are then
    recomputed from scratch instead of being left possibly stale.
    """
    _check_consistent(g, idx)
    if not g.remove_edge(u, v):
        raise MissingEdgeError(f"edge ({u}, {v}) is not present")
    stats = UpdateStats()

    landmark_bit = idx.landmark_set.bit
    leaves = idx.leaf_sets
    visited, changed = _propagate_removal(
        g.forward, g.reverse, v, idx.dl_in[u], idx.bl_in[u],
        idx.dl_in, idx.bl_in, landmark_bit, leaves.in_bit)
    stats.visited += visited
    stats.labels_changed += changed
    visited, changed = _propagate_removal(
        g.reverse, g.forward, u, idx.dl_out[v], idx.bl_out[v],
        idx.dl_out, idx.bl_out, landmark_bit, leaves.out_bit)
    stats.visited += visited
    stats.labels_changed += changed

    stats.tainted = (_region_has_cycle(g.forward, v)
                     or _region_has_cycle(g.reverse, u))
    if stats.tainted and rebuild_if_tainted:
        fresh = rebuild_index(g, idx)
        idx.dl_in[:] = fresh.dl_in
        idx.dl_out[:] = fresh.dl_out
        idx.bl_in[:] = fresh.bl_in
        idx.bl_out[:] = fresh.bl_out
    return stats


def insert_vertex(g: DynamicGraph, idx: DblIndex, out_edges: Iterable[int] = (),
                  in_edges: Iterable[int] = ()) -> UpdateStats:
    """Add a vertex (id = new vertex_count - 1) and wire its edges.

    The vertex starts with empty labels and is never promoted to landmark
    or leaf; each incident edge goes through insert_edge, so the labels
    stay exact. Aggregated stats are returned.
    """
    _check_consistent(g, idx)
    vid = g.add_vertex()
    idx.grow_to(g.vertex_count)
    stats = UpdateStats()
    for w in out_edges:
        stats.absorb(insert_edge(g, idx, vid, w))
    for w in in_edges:
        stats.absorb(insert_edge(g, idx, w, vid))
    return stats


def delete_vertex(g: DynamicGraph, idx: DblIndex, v: int, *,
                  rebuild_if_tainted: bool = False) -> UpdateStats:
    """Remove all edges incident to v, keeping v as an isolated id. Experimental.

    After the edge deletions, v's labels are reset to the isolated base
    state: empty except for its own landmark bit / leaf bucket bits.
    """
    _check_consistent(g, idx)
    g._check_vertex(v)
    stats = UpdateStats()
    for w in list(g.successors(v)):
        stats.absorb(delete_edge(g, idx, v, w, rebuild_if_tainted=rebuild_if_tainted))
    for p in list(g.predecessors(v)):
        stats.absorb(delete_edge(g, idx, p, v, rebuild_if_tainted=rebuild_if_tainted))
    own_dl = idx.landmark_set.bit(v)
    base = (own_dl, own_dl, idx.leaf_sets.in_bit(v), idx.leaf_sets.out_bit(v))
    current = (idx.dl_in[v], idx.dl_out[v], idx.bl_in[v], idx.bl_out[v])
    if base != current:
        idx.dl_in[v], idx.dl_out[v], idx.bl_in[v], idx.bl_out[v] = base
        stats.labels_changed += 1
    return stats


@dataclass(frozen=True)
class LabelViolation:
    """One vertex/family pair where the stored label is wrong."""

    vertex: int
    family: str  # "dl_in" | "dl_out" | "bl_in" | "bl_out"
    expected: int
    actual: int

    def __str__(self) -> str:
        missing = self.expected & ~self.actual
        extra = self.actual & ~self.expected
        parts = []
        if missing:
            parts.append(f"missing bits {sorted(BitLabel(missing.bit_length(), missing))}")
        if extra:
            parts.append(f"stale bits {sorted(BitLabel(extra.bit_length(), extra))}")
        return f"{self.family}({self.vertex}): {', '.join(parts)}"


@dataclass
class VerifyReport:
    ok: bool
    violations: list[LabelViolation] = field(default_factory=list)


def verify_labels(g: DynamicGraph, idx: DblIndex,
                  exhaustive: bool | None = None) -> VerifyReport:
    """Diagnostic label check; violations are data, not errors.

    Always checks the union fixpoint: every in-label must equal the union
    of the predecessors' in-labels plus the vertex's own self bit (out-
    labels symmetrically over successors). With ``exhaustive`` (default:
    automatically for graphs up to 500 vertices) the labels are also
    compared against a fresh batch build, which catches stale bits that a
    cycle sustains through the fixpoint.
    """
    _check_consistent(g, idx)
    found: dict[tuple[int, str], LabelViolation] = {}

    landmark_bit = idx.landmark_set.bit
    leaves = idx.leaf_sets
    families = (
        ("dl_in", idx.dl_in, g.reverse, landmark_bit),
        ("dl_out", idx.dl_out, g.forward, landmark_bit),
        ("bl_in", idx.bl_in, g.reverse, leaves.in_bit),
        ("bl_out", idx.bl_out, g.forward, leaves.out_bit),
    )
    for name, labels, suppliers, own_bit in families:
        for v in g.vertices():
            expected = own_bit(v)
            for y in suppliers[v]:
                expected |= labels[y]
            if expected != labels[v]:
                found[(v, name)] = LabelViolation(v, name, expected, labels[v])

    if exhaustive or (exhaustive is None and g.vertex_count <= 500):
        fresh = rebuild_index(g, idx)
        pairs = (("dl_in", idx.dl_in, fresh.dl_in), ("dl_out", idx.dl_out, fresh.dl_out),
                 ("bl_in", idx.bl_in, fresh.bl_in), ("bl_out", idx.bl_out, fresh.bl_out))
        for name, actual, expected in pairs:
            for v in g.vertices():
                if actual[v] != expected[v]:
                    found[(v, name)] = LabelViolation(v, name, expected[v], actual[v])

    violations = [found[key] for key in sorted(found)]
    return VerifyReport(ok=not violations, violations=violations)
