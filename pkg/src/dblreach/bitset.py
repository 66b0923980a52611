"""Fixed-width bit sets backed by Python integers.

A label is a set of bit positions in ``[0, width)``. All set algebra
(union, intersection, difference, subset tests) compiles down to single
big-int operations, which keeps label math word-wise regardless of the
configured width. Index internals store raw integer masks; this class is
the public face used by accessors and tests.
"""

from __future__ import annotations

from typing import Iterable, Iterator


def mask_for_width(width: int) -> int:
    return (1 << width) - 1


class BitLabel:
    """A mutable set of bit positions with a fixed logical width."""

    __slots__ = ("width", "bits")

    def __init__(self, width: int, bits: int = 0):
        if width < 0:
            raise ValueError("width must be non-negative")
        self.width = width
        self.bits = bits & mask_for_width(width)

    @classmethod
    def from_positions(cls, width: int, positions: Iterable[int]) -> "BitLabel":
        bits = 0
        for p in positions:
            if not 0 <= p < width:
                raise ValueError(f"bit position {p} outside [0, {width})")
            bits |= 1 << p
        return cls(width, bits)

    def add(self, position: int) -> None:
        if not 0 <= position < self.width:
            raise ValueError(f"bit position {position} outside [0, {self.width})")
        self.bits |= 1 << position

    def discard(self, position: int) -> None:
        self.bits &= ~(1 << position)

    def __contains__(self, position: int) -> bool:
        return 0 <= position < self.width and bool(self.bits >> position & 1)

    def __iter__(self) -> Iterator[int]:
        bits, pos = self.bits, 0
        while bits:
            if bits & 1:
                yield pos
            bits >>= 1
            pos += 1

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __bool__(self) -> bool:
        return self.bits != 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitLabel):
            return NotImplemented
        return self.width == other.width and self.bits == other.bits

    def __or__(self, other: "BitLabel") -> "BitLabel":
        self._check_width(other)
        return BitLabel(self.width, self.bits | other.bits)

    def __and__(self, other: "BitLabel") -> "BitLabel":
        self._check_width(other)
        return BitLabel(self.width, self.bits & other.bits)

    def __sub__(self, other: "BitLabel") -> "BitLabel":
        self._check_width(other)
        return BitLabel(self.width, self.bits & ~other.bits)

    def issubset(self, other: "BitLabel") -> bool:
        self._check_width(other)
        return self.bits & ~other.bits == 0

    def intersects(self, other: "BitLabel") -> bool:
        self._check_width(other)
        return self.bits & other.bits != 0

    def to_set(self) -> set[int]:
        return set(self)

    def copy(self) -> "BitLabel":
        return BitLabel(self.width, self.bits)

    def _check_width(self, other: "BitLabel") -> None:
        if self.width != other.width:
            raise ValueError(f"width mismatch: {self.width} != {other.width}")

    def __repr__(self) -> str:
        return f"BitLabel(width={self.width}, bits={{{', '.join(map(str, self))}}})"
