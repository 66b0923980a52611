"""Binary index snapshot files.

Layout (all integers little-endian, see docs/snapshot-format.md):

    magic     8 bytes  b"DBLIDX01"
    version   u32      currently 1
    n         u64      vertex count
    k         u32      landmark label width
    k_prime   u32      leaf label width
    hash_seed u64
    leaf_threshold u32
    strategy  u8       0=max 1=min 2=sum 3=product
    landmarks        k x u64, in bit order
    leaves_in        u64 count, then count x u64 (ascending)
    leaves_out       u64 count, then count x u64 (ascending)
    bucket table     u64 count, then count x (u64 vertex, u32 bucket), ascending
    labels           n records of dl_in, dl_out, bl_in, bl_out; each label is
                     ceil(width/64) u64 words, least-significant word first

The snapshot stores labels and metadata only; answering queries still
needs the graph for the BFS fallback.
"""

from __future__ import annotations

import struct
from typing import IO, Union

from .errors import DblError
from .labels import DblIndex, IndexConfig, LandmarkSet, LandmarkStrategy, LeafSets

MAGIC = b"DBLIDX01"
VERSION = 1

_STRATEGY_CODES = {
    LandmarkStrategy.MAX: 0,
    LandmarkStrategy.MIN: 1,
    LandmarkStrategy.SUM: 2,
    LandmarkStrategy.PRODUCT: 3,
}
_STRATEGY_BY_CODE = {code: s for s, code in _STRATEGY_CODES.items()}

_MASK64 = (1 << 64) - 1


class SnapshotFormatError(DblError, ValueError):
    """The file is not a valid index snapshot."""


def _words(width: int) -> int:
    return (width + 63) // 64


def _pack_label(bits: int, width: int) -> bytes:
    words = [(bits >> (64 * w)) & _MASK64 for w in range(_words(width))]
    return struct.pack(f"<{len(words)}Q", *words) if words else b""


def _unpack_label(data: bytes, offset: int, width: int) -> tuple[int, int]:
    count = _words(width)
    bits = 0
    for w, word in enumerate(struct.unpack_from(f"<{count}Q", data, offset)):
        bits |= word << (64 * w)
    return bits, offset + 8 * count


def sniff_snapshot(path: str) -> bool:
    """True if the file starts with the snapshot magic."""
    try:
        with open(path, "rb") as fh:
            return fh.read(len(MAGIC)) == MAGIC
    except OSError:
        return False


def save_index(idx: DblIndex, sink: Union[str, IO[bytes]]) -> None:
    if isinstance(sink, str):
        with open(sink, "wb") as fh:
            save_index(idx, fh)
        return
    cfg = idx.config
    out = sink
    out.write(MAGIC)
    out.write(struct.pack("<IQIIQIB", VERSION, idx.vertex_count, cfg.k, cfg.k_prime,
                          cfg.hash_seed, cfg.leaf_threshold,
                          _STRATEGY_CODES[cfg.landmark_strategy]))
    for v in idx.landmark_set.landmarks:
        out.write(struct.pack("<Q", v))
    for group in (sorted(idx.leaf_sets.leaves_in), sorted(idx.leaf_sets.leaves_out)):
        out.write(struct.pack("<Q", len(group)))
        for v in group:
            out.write(struct.pack("<Q", v))
    buckets = sorted(idx.leaf_sets.bucket.items())
    out.write(struct.pack("<Q", len(buckets)))
    for v, b in buckets:
        out.write(struct.pack("<QI", v, b))
    for v in range(idx.vertex_count):
        out.write(_pack_label(idx.dl_in[v], cfg.k))
        out.write(_pack_label(idx.dl_out[v], cfg.k))
        out.write(_pack_label(idx.bl_in[v], cfg.k_prime))
        out.write(_pack_label(idx.bl_out[v], cfg.k_prime))


def load_index(source: Union[str, IO[bytes]]) -> DblIndex:
    if isinstance(source, str):
        with open(source, "rb") as fh:
            return load_index(fh)
    data = source.read()
    if data[:len(MAGIC)] != MAGIC:
        raise SnapshotFormatError("bad magic; not an index snapshot")
    offset = len(MAGIC)
    header = struct.Struct("<IQIIQIB")
    version, n, k, k_prime, hash_seed, leaf_threshold, strategy_code = header.unpack_from(data, offset)
    offset += header.size
    if version != VERSION:
        raise SnapshotFormatError(f"unsupported snapshot version {version}")
    if strategy_code not in _STRATEGY_BY_CODE:
        raise SnapshotFormatError(f"unknown strategy code {strategy_code}")
    cfg = IndexConfig(k=k, k_prime=k_prime,
                      landmark_strategy=_STRATEGY_BY_CODE[strategy_code],
                      leaf_threshold=leaf_threshold, hash_seed=hash_seed)

    landmarks = list(struct.unpack_from(f"<{k}Q", data, offset))
    offset += 8 * k
    groups: list[list[int]] = []
    for _ in range(2):
        (count,) = struct.unpack_from("<Q", data, offset)
        offset += 8
        groups.append(list(struct.unpack_from(f"<{count}Q", data, offset)))
        offset += 8 * count
    (count,) = struct.unpack_from("<Q", data, offset)
    offset += 8
    bucket: dict[int, int] = {}
    for _ in range(count):
        v, b = struct.unpack_from("<QI", data, offset)
        offset += 12
        bucket[v] = b

    leaf_sets = LeafSets(frozenset(groups[0]), frozenset(groups[1]), bucket)
    idx = DblIndex.empty(n, cfg, LandmarkSet.of(landmarks), leaf_sets)
    for v in range(n):
        idx.dl_in[v], offset = _unpack_label(data, offset, k)
        idx.dl_out[v], offset = _unpack_label(data, offset, k)
        idx.bl_in[v], offset = _unpack_label(data, offset, k_prime)
        idx.bl_out[v], offset = _unpack_label(data, offset, k_prime)
    if offset != len(data):
        raise SnapshotFormatError(f"trailing bytes: expected {offset}, file has {len(data)}")
    return idx
