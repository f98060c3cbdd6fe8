"""Contiguous area shapes, interior fills and canonical pattern keys.

Shapes are free polyominoes: one representative per class under rotation,
reflection and translation. A Pattern assigns black stones to a shape's
cells, leaving 2 or 3 cells empty. Its canonical key is the lexicographically
smallest byte encoding over the 8 square symmetries; the same bytes are used
verbatim as database entries.

Key encoding: [bbox_w u8, bbox_h u8] + ceil(w*h/4) bytes of 2-bit cell codes,
row-major, least-significant bits first: 0=outside the shape, 1=empty,
2=black.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import FrozenSet, Iterable, Tuple

OUTSIDE = 0
CODE_EMPTY = 1
CODE_BLACK = 2

MIN_AREA = 5
MAX_AREA = 8

#: Known free-polyomino counts for sizes 1..8, used as enumeration oracle.
FREE_SHAPE_COUNTS = {1: 1, 2: 1, 3: 2, 4: 5, 5: 12, 6: 35, 7: 108, 8: 369}

# The 8 symmetries of the square grid.
_TRANSFORMS = (
    lambda c, r: (c, r),
    lambda c, r: (-r, c),
    lambda c, r: (-c, -r),
    lambda c, r: (r, -c),
    lambda c, r: (-c, r),
    lambda c, r: (c, -r),
    lambda c, r: (r, c),
    lambda c, r: (-r, -c),
)


class SizeOutOfRangeError(ValueError):
    pass


def _normalize(cells: Iterable[Tuple[int, int]]) -> Tuple[Tuple[int, int], ...]:
    cells = list(cells)
    min_c = min(c for c, _ in cells)
    min_r = min(r for _, r in cells)
    return tuple(sorted((c - min_c, r - min_r) for c, r in cells))


def _is_connected(cells) -> bool:
    cells = set(cells)
    stack = [next(iter(cells))]
    seen = {stack[0]}
    while stack:
        c, r = stack.pop()
        for nb in ((c + 1, r), (c - 1, r), (c, r + 1), (c, r - 1)):
            if nb in cells and nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == len(cells)


@dataclass(frozen=True, order=True)
class Shape:
    """A translation-normalized 4-connected set of cells."""

    cells: Tuple[Tuple[int, int], ...]

    @classmethod
    def from_cells(cls, cells: Iterable[Tuple[int, int]]) -> "Shape":
        normalized = _normalize(cells)
        if len(set(normalized)) != len(normalized):
            raise ValueError("duplicate cells in shape")
        if not _is_connected(normalized):
            raise ValueError("shape cells are not 4-connected")
        return cls(normalized)

    @property
    def n(self) -> int:
        return len(self.cells)

    @property
    def bbox(self) -> Tuple[int, int]:
        width = max(c for c, _ in self.cells) + 1
        height = max(r for _, r in self.cells) + 1
        return width, height


@dataclass(frozen=True)
class Pattern:
    """A shape plus the subset of its cells occupied by black stones."""

    shape: Shape
    black: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        if not self.black <= set(self.shape.cells):
            raise ValueError("black stones outside the shape")

    @property
    def empties(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset(self.shape.cells) - self.black


def _canonical_cells(cells) -> Tuple[Tuple[int, int], ...]:
    return min(_normalize(t(c, r) for c, r in cells) for t in _TRANSFORMS)


def enumerate_shapes(n: int) -> Tuple[Shape, ...]:
    """All free shapes of area n, one per symmetry class, sorted."""
    if not 1 <= n <= MAX_AREA:
        raise SizeOutOfRangeError(f"area size {n} not in [1, {MAX_AREA}]")
    current = {((0, 0),)}
    for _ in range(n - 1):
        grown = set()
        for cells in current:
            occupied = set(cells)
            for c, r in cells:
                for nb in ((c + 1, r), (c - 1, r), (c, r + 1), (c, r - 1)):
                    if nb not in occupied:
                        grown.add(_canonical_cells(cells + (nb,)))
        current = grown
    return tuple(Shape(cells) for cells in sorted(current))


def enumerate_patterns(shape: Shape) -> Tuple[Pattern, ...]:
    """All fills of `shape` leaving 2 or 3 empty cells.

    The raw count is C(n,2) + C(n,3); symmetric duplicates are not removed
    here, that happens on canonical keys during database construction.
    """
    if shape.n < MIN_AREA:
        raise SizeOutOfRangeError(f"area size {shape.n} below {MIN_AREA}")
    cells = set(shape.cells)
    patterns = []
    for k in (2, 3):
        for empties in combinations(shape.cells, k):
            patterns.append(Pattern(shape, frozenset(cells - set(empties))))
    return tuple(patterns)


def _encode(cells, black) -> bytes:
    normalized = _normalize(cells)
    shift_c = min(c for c, _ in cells)
    shift_r = min(r for _, r in cells)
    black_norm = {(c - shift_c, r - shift_r) for c, r in black}
    width = max(c for c, _ in normalized) + 1
    height = max(r for _, r in normalized) + 1
    codes = bytearray((width * height + 3) // 4)
    occupied = set(normalized)
    for r in range(height):
        for c in range(width):
            if (c, r) not in occupied:
                code = OUTSIDE
            elif (c, r) in black_norm:
                code = CODE_BLACK
            else:
                code = CODE_EMPTY
            k = r * width + c
            codes[k >> 2] |= code << ((k & 3) << 1)
    return bytes([width, height]) + bytes(codes)


def canonical_key(pattern: Pattern) -> bytes:
    """Symmetry- and translation-invariant byte key of a pattern."""
    best = None
    for t in _TRANSFORMS:
        cells = [t(c, r) for c, r in pattern.shape.cells]
        black = [t(c, r) for c, r in pattern.black]
        encoded = _encode(cells, black)
        if best is None or encoded < best:
            best = encoded
    return best


def decode_key(key: bytes) -> Pattern:
    """Inverse of canonical_key for canonically encoded keys."""
    if len(key) < 2:
        raise ValueError("key too short")
    width, height = key[0], key[1]
    if width == 0 or height == 0:
        raise ValueError("empty bounding box")
    packed = key[2:]
    if len(packed) != (width * height + 3) // 4:
        raise ValueError("key length does not match bounding box")
    cells = []
    black = set()
    for r in range(height):
        for c in range(width):
            k = r * width + c
            code = (packed[k >> 2] >> ((k & 3) << 1)) & 3
            if code == OUTSIDE:
                continue
            if code == CODE_BLACK:
                black.add((c, r))
            elif code != CODE_EMPTY:
                raise ValueError(f"bad cell code {code}")
            cells.append((c, r))
    # trailing padding bits must be zero
    for k in range(width * height, len(packed) * 4):
        if (packed[k >> 2] >> ((k & 3) << 1)) & 3:
            raise ValueError("nonzero padding bits")
    if not cells:
        raise ValueError("key encodes no cells")
    shape = Shape.from_cells(cells)
    if shape.cells != tuple(sorted(cells)):
        raise ValueError("key is not translation-normalized")
    return Pattern(shape, frozenset(black))


def transform_pattern(pattern: Pattern, transform_id: int) -> Pattern:
    """Apply one of the 8 square symmetries (0 is the identity)."""
    t = _TRANSFORMS[transform_id]
    cells = [t(c, r) for c, r in pattern.shape.cells]
    shift_c = min(c for c, _ in cells)
    shift_r = min(r for _, r in cells)
    shape = Shape.from_cells(cells)
    black = frozenset((c - shift_c, r - shift_r)
                      for c, r in (t(c, r) for c, r in pattern.black))
    return Pattern(shape, black)
