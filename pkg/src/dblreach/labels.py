"""Label structures and batch construction for the DBL reachability index.

The index keeps four bit labels per vertex:

* ``dl_in(v)`` / ``dl_out(v)``: which of the k landmark vertices reach v /
  are reached by v (one bit per landmark, positive evidence only).
* ``bl_in(v)`` / ``bl_out(v)``: hash buckets of the source leaves that reach
  v / the sink leaves v reaches (k' buckets, negative evidence only).

Reachability is reflexive here: a landmark's own bit is set in both of its
DL labels and a leaf's bucket in its own BL label. Construction floods one
bit at a time with a BFS that uses the bit itself as the visited mark, so
labels are exact for the chosen landmark/leaf sets and two builds of the
same graph are bit-identical.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .bitset import BitLabel
from .errors import ConfigError, VertexRangeError
from .graph import DynamicGraph

_MASK64 = (1 << 64) - 1


class LandmarkStrategy(str, Enum):
    """Degree heuristics for ranking landmark candidates."""

    MAX = "max"          # max(in-degree, out-degree)
    MIN = "min"          # min(in-degree, out-degree)
    SUM = "sum"          # in-degree + out-degree
    PRODUCT = "product"  # in-degree * out-degree (default)

    def score(self, in_deg: int, out_deg: int) -> int:
        if self is LandmarkStrategy.MAX:
            return max(in_deg, out_deg)
        if self is LandmarkStrategy.MIN:
            return min(in_deg, out_deg)
        if self is LandmarkStrategy.SUM:
            return in_deg + out_deg
        return in_deg * out_deg


def centrality_score(g: DynamicGraph, v: int,
                     strategy: LandmarkStrategy = LandmarkStrategy.PRODUCT) -> int:
    return strategy.score(g.in_degree(v), g.out_degree(v))


@dataclass(frozen=True)
class LandmarkSet:
    """Ordered landmark vertices; list position doubles as the bit index."""

    landmarks: tuple[int, ...]
    position: Mapping[int, int] = field(repr=False)

    @classmethod
    def of(cls, landmarks: Sequence[int]) -> "LandmarkSet":
        seq = tuple(landmarks)
        if len(set(seq)) != len(seq):
            raise ConfigError("landmark vertices must be distinct")
        return cls(seq, {v: i for i, v in enumerate(seq)})

    def __len__(self) -> int:
        return len(self.landmarks)

    def bit(self, v: int) -> int:
        """Mask with v's landmark bit set, or 0 if v is not a landmark."""
        i = self.position.get(v)
        return 0 if i is None else 1 << i


@dataclass(frozen=True)
class LeafSets:
    """Source/sink leaf vertices plus their hash-bucket assignment."""

    leaves_in: frozenset[int]
    leaves_out: frozenset[int]
    bucket: Mapping[int, int] = field(repr=False)

    def in_bit(self, v: int) -> int:
        return 1 << self.bucket[v] if v in self.leaves_in else 0

    def out_bit(self, v: int) -> int:
        return 1 << self.bucket[v] if v in self.leaves_out else 0


@dataclass
class IndexConfig:
    """Build-time parameters for the index.

    k may be 0 (no landmarks: every positive answer falls to BFS);
    k_prime must be at least 1 because leaf hashing reduces modulo it.
    """

    k: int = 64
    k_prime: int = 64
    landmark_strategy: LandmarkStrategy = LandmarkStrategy.PRODUCT
    leaf_threshold: int = 0
    hash_seed: int = 0

    def validate(self, vertex_count: int) -> None:
        if self.k < 0:
            raise ConfigError(f"k must be >= 0, got {self.k}")
        if self.k > vertex_count:
            raise ConfigError(f"k={self.k} exceeds vertex count {vertex_count}")
        if self.k_prime < 1:
            raise ConfigError(f"k_prime must be >= 1, got {self.k_prime}")
        if self.leaf_threshold < 0:
            raise ConfigError(f"leaf_threshold must be >= 0, got {self.leaf_threshold}")
        if self.hash_seed < 0:
            raise ConfigError(f"hash_seed must be >= 0, got {self.hash_seed}")


def leaf_hash(v: int, k_prime: int, seed: int = 0) -> int:
    """Deterministic bucket for a leaf vertex: splitmix64-style mix mod k'.

    Bit-exact definition (all arithmetic mod 2**64):
        x  = v * 0x9E3779B97F4A7C15 + seed * 0xD1B54A32D192ED03
        x ^= x >> 30;  x *= 0xBF58476D1CE4E5B9
        x ^= x >> 27;  x *= 0x94D049BB133111EB
        x ^= x >> 31
        bucket = x mod k_prime
    """
    if k_prime < 1:
        raise ConfigError(f"k_prime must be >= 1, got {k_prime}")
    x = (v * 0x9E3779B97F4A7C15 + seed * 0xD1B54A32D192ED03) & _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x % k_prime


def select_landmarks(g: DynamicGraph, k: int,
                     strategy: LandmarkStrategy = LandmarkStrategy.PRODUCT) -> LandmarkSet:
    """Top-k vertices by the strategy score; ties go to the smaller id."""
    if k < 0 or k > g.vertex_count:
        raise ConfigError(f"k={k} outside [0, {g.vertex_count}]")
    ranked = sorted(g.vertices(),
                    key=lambda v: (-strategy.score(g.in_degree(v), g.out_degree(v)), v))
    return LandmarkSet.of(ranked[:k])


def select_leaves(g: DynamicGraph, threshold: int = 0, *, k_prime: int = 64,
                  hash_seed: int = 0,
                  bucket_override: Mapping[int, int] | None = None) -> LeafSets:
    """Pick leaf vertices and assign each a hash bucket.

    With threshold 0 the leaves are exactly the zero-in-degree sources
    (for the in side) and zero-out-degree sinks (for the out side). A
    positive threshold additionally admits every vertex whose degree
    product is at most the threshold, into both sides.

    ``bucket_override`` pins bucket assignments (used by tests that need a
    specific collision pattern); unlisted leaves fall back to leaf_hash.
    """
    if threshold < 0:
        raise ConfigError(f"threshold must be >= 0, got {threshold}")
    leaves_in = {v for v in g.vertices() if g.in_degree(v) == 0}
    leaves_out = {v for v in g.vertices() if g.out_degree(v) == 0}
    if threshold > 0:
        extra = {v for v in g.vertices()
                 if g.in_degree(v) * g.out_degree(v) <= threshold}
        leaves_in |= extra
        leaves_out |= extra
    bucket: dict[int, int] = {}
    for v in leaves_in | leaves_out:
        if bucket_override is not None and v in bucket_override:
            b = bucket_override[v]
            if not 0 <= b < k_prime:
                raise ConfigError(f"bucket override {b} for vertex {v} outside [0, {k_prime})")
            bucket[v] = b
        else:
            bucket[v] = leaf_hash(v, k_prime, hash_seed)
    return LeafSets(frozenset(leaves_in), frozenset(leaves_out), bucket)


@dataclass
class DblIndex:
    """Per-vertex DL/BL labels plus the frozen landmark/leaf metadata.

    Labels are raw integer masks (``dl_*`` width k, ``bl_*`` width k').
    The landmark and leaf sets are fixed at construction; incremental
    updates never reselect them.
    """

    vertex_count: int
    config: IndexConfig
    landmark_set: LandmarkSet
    leaf_sets: LeafSets
    dl_in: list[int]
    dl_out: list[int]
    bl_in: list[int]
    bl_out: list[int]

    @classmethod
    def empty(cls, vertex_count: int, config: IndexConfig,
              landmark_set: LandmarkSet, leaf_sets: LeafSets) -> "DblIndex":
        return cls(vertex_count, config, landmark_set, leaf_sets,
                   [0] * vertex_count, [0] * vertex_count,
                   [0] * vertex_count, [0] * vertex_count)

    def grow_to(self, vertex_count: int) -> None:
        """Extend label storage for newly added vertices (labels start empty)."""
        extra = vertex_count - self.vertex_count
        if extra < 0:
            raise ConfigError("index cannot shrink")
        for labels in (self.dl_in, self.dl_out, self.bl_in, self.bl_out):
            labels.extend([0] * extra)
        self.vertex_count = vertex_count

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.vertex_count:
            raise VertexRangeError(f"vertex {v} outside [0, {self.vertex_count})")

    def dl_in_label(self, v: int) -> BitLabel:
        self._check_vertex(v)
        return BitLabel(self.config.k, self.dl_in[v])

    def dl_out_label(self, v: int) -> BitLabel:
        self._check_vertex(v)
        return BitLabel(self.config.k, self.dl_out[v])

    def bl_in_label(self, v: int) -> BitLabel:
        self._check_vertex(v)
        return BitLabel(self.config.k_prime, self.bl_in[v])

    def bl_out_label(self, v: int) -> BitLabel:
        self._check_vertex(v)
        return BitLabel(self.config.k_prime, self.bl_out[v])

    def labels_equal(self, other: "DblIndex") -> bool:
        """Bit-identical label comparison (metadata widths must match)."""
        return (self.vertex_count == other.vertex_count
                and self.config.k == other.config.k
                and self.config.k_prime == other.config.k_prime
                and self.dl_in == other.dl_in and self.dl_out == other.dl_out
                and self.bl_in == other.bl_in and self.bl_out == other.bl_out)


def _flood(adj: list[list[int]], seeds: Iterable[int], labels: list[int], bit: int) -> None:
    # The bit doubles as the visited mark, so each vertex is expanded at
    # most once per bit and cycles terminate.
    queue: deque[int] = deque()
    for s in seeds:
        if not labels[s] & bit:
            labels[s] |= bit
            queue.append(s)
    while queue:
        p = queue.popleft()
        for x in adj[p]:
            if not labels[x] & bit:
                labels[x] |= bit
                queue.append(x)


def build_index(g: DynamicGraph, config: IndexConfig | None = None, *,
                landmarks: Sequence[int] | None = None,
                leaf_sets: LeafSets | None = None) -> DblIndex:
    """Construct the four label families from scratch.

    Each landmark floods its bit forward into dl_in and backward into
    dl_out; each hash bucket floods all its leaves together, forward from
    source leaves into bl_in and backward from sink leaves into bl_out.

    Explicit ``landmarks`` / ``leaf_sets`` pin the metadata instead of
    selecting it from the graph — used to rebuild an index with frozen
    sets and by fixtures that dictate the landmark choice.
    """
    cfg = config if config is not None else IndexConfig()
    cfg.validate(g.vertex_count)
    if landmarks is not None:
        if len(landmarks) != cfg.k:
            raise ConfigError(f"{len(landmarks)} landmarks given but k={cfg.k}")
        for v in landmarks:
            g._check_vertex(v)
        landmark_set = LandmarkSet.of(landmarks)
    else:
        landmark_set = select_landmarks(g, cfg.k, cfg.landmark_strategy)
    if leaf_sets is None:
        leaf_sets = select_leaves(g, cfg.leaf_threshold,
                                  k_prime=cfg.k_prime, hash_seed=cfg.hash_seed)

    idx = DblIndex.empty(g.vertex_count, cfg, landmark_set, leaf_sets)
    for i, landmark in enumerate(landmark_set.landmarks):
        _flood(g.forward, (landmark,), idx.dl_in, 1 << i)
        _flood(g.reverse, (landmark,), idx.dl_out, 1 << i)

    by_bucket_in: dict[int, list[int]] = {}
    for s in sorted(leaf_sets.leaves_in):
        by_bucket_in.setdefault(leaf_sets.bucket[s], []).append(s)
    for b, seeds in by_bucket_in.items():
        _flood(g.forward, seeds, idx.bl_in, 1 << b)

    by_bucket_out: dict[int, list[int]] = {}
    for t in sorted(leaf_sets.leaves_out):
        by_bucket_out.setdefault(leaf_sets.bucket[t], []).append(t)
    for b, seeds in by_bucket_out.items():
        _flood(g.reverse, seeds, idx.bl_out, 1 << b)
    return idx


def rebuild_index(g: DynamicGraph, idx: DblIndex) -> DblIndex:
    """Fresh batch build reusing idx's frozen landmark/leaf metadata."""
    return build_index(g, idx.config, landmarks=idx.landmark_set.landmarks,
                       leaf_sets=idx.leaf_sets)


def dl_intersec(idx: DblIndex, x: int, y: int) -> bool:
    """True iff some landmark is reached by x and reaches y (so x reaches y)."""
    idx._check_vertex(x)
    idx._check_vertex(y)
    return idx.dl_out[x] & idx.dl_in[y] != 0


def bl_contain(idx: DblIndex, x: int, y: int) -> bool:
    """Leaf-label containment; False proves x cannot reach y."""
    idx._check_vertex(x)
    idx._check_vertex(y)
    return (idx.bl_in[x] & ~idx.bl_in[y] == 0
            and idx.bl_out[y] & ~idx.bl_out[x] == 0)
