"""Persistent seki pattern store and the board query procedure.

File format (little-endian): magic "SKDB", version u32, then for each size
n = 5..8 a count u32 followed by that many entries. An entry is a canonical
pattern key: bbox_w u8, bbox_h u8, ceil(w*h/4) bytes of 2-bit cell codes
row-major (0=outside, 1=empty, 2=black). Entries are written sorted, so a
database saves to identical bytes regardless of how it was built. A text
sidecar "stats.txt" next to the database carries the generation statistics.

A query extracts the enclosed region around the most recent move, requires
the enclosing white block to be free of external liberties, and tests the
region's canonical key for membership. A hit proves the enclosing block
alive; every failed precondition is a miss, which asserts nothing.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from .board import BLACK, EMPTY, WHITE, Board, Coord, neighbor_table
from .shapes import MAX_AREA, MIN_AREA, Pattern, Shape, canonical_key, decode_key
from .verifier import DatabaseStats, SizeStats

MAGIC = b"SKDB"
FORMAT_VERSION = 1
STATS_SIDECAR = "stats.txt"


class DatabaseError(Exception):
    pass


class BadMagicError(DatabaseError):
    pass


class UnsupportedVersionError(DatabaseError):
    pass


class CorruptEntryError(DatabaseError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


@dataclass
class SekiDatabase:
    """Per-size sets of canonical keys of verified seki patterns."""

    entries: Dict[int, FrozenSet[bytes]] = field(default_factory=dict)
    stats: Optional[DatabaseStats] = None
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        self._all_keys = frozenset().union(*self.entries.values()) \
            if self.entries else frozenset()

    def sizes(self) -> Tuple[int, ...]:
        return tuple(sorted(self.entries))

    def __len__(self) -> int:
        return len(self._all_keys)

    def __contains__(self, key: bytes) -> bool:
        return key in self._all_keys


def contains(db: SekiDatabase, key: bytes) -> bool:
    """Set membership of a canonical key."""
    return key in db


@dataclass(frozen=True)
class QueryResult:
    """Hit carries the enclosing block's stones and the matched region."""

    hit: bool
    block: Optional[FrozenSet[Coord]] = None
    region: Optional[FrozenSet[Coord]] = None


_MISS = QueryResult(hit=False)


def region_size_filter(db: SekiDatabase, region: Iterable[Coord],
                       board: Board) -> bool:
    """Cheap pre-check: only regions of size 5..8 with 2 or 3 empty cells
    can match a stored pattern."""
    region = list(region)
    if not MIN_AREA <= len(region) <= MAX_AREA:
        return False
    empties = sum(1 for c in region if board[c] == EMPTY)
    return empties in (2, 3)


# ---------------------------------------------------------------------------
# query on raw cells (shared by the public API and the solver's hot path)

def query_cells(db: SekiDatabase, cells: bytes, width: int, height: int,
                last_idx: int):
    """Query with the most recent stone at `last_idx`.

    Returns (block_indices, region_indices) on a hit, else None.
    """
    color = cells[last_idx]
    if color == WHITE:
        block = _white_block(cells, width, height, last_idx)
        return _match_block(db, cells, width, height, block, None)
    if color == BLACK:
        comp, _, whites, ok = _region_info(cells, width, height, last_idx)
        if not ok or not whites:
            return None
        block = _white_block(cells, width, height, next(iter(whites)))
        if not whites <= block:
            return None  # region bounded by more than one white block
        return _match_block(db, cells, width, height, block, comp)
    return None


def query_any_block(db: SekiDatabase, cells: bytes, width: int, height: int):
    """Root-position query: try every white block on the board."""
    seen = set()
    for idx, value in enumerate(cells):
        if value == WHITE and idx not in seen:
            block = _white_block(cells, width, height, idx)
            seen.update(block)
            found = _match_block(db, cells, width, height, block, None)
            if found is not None:
                return found
    return None


def _white_block(cells, width, height, idx) -> frozenset:
    neigh = neighbor_table(width, height)
    stack = [idx]
    seen = {idx}
    while stack:
        i = stack.pop()
        for n in neigh[i]:
            if cells[n] == WHITE and n not in seen:
                seen.add(n)
                stack.append(n)
    return frozenset(seen)


def _region_info(cells, width, height, idx):
    """Flood the non-white component containing idx.

    Returns (cells, empty_count, adjacent_white_roots, usable) where usable
    is False when the component touches the board edge or grows past the
    maximum storable area size.
    """
    neigh = neighbor_table(width, height)
    stack = [idx]
    seen = {idx}
    comp = []
    empties = 0
    whites = set()
    ok = True
    while stack:
        i = stack.pop()
        comp.append(i)
        if len(comp) > MAX_AREA:
            return frozenset(comp), empties, whites, False
        if cells[i] == EMPTY:
            empties += 1
        col = i % width
        row = i // width
        if col in (0, width - 1) or row in (0, height - 1):
            ok = False
        for n in neigh[i]:
            if cells[n] == WHITE:
                whites.add(n)
            elif n not in seen:
                seen.add(n)
                stack.append(n)
    return frozenset(comp), empties, whites, ok


def _match_block(db, cells, width, height, block, only_region):
    """Check a candidate enclosing block against the database.

    `only_region` limits matching to the region containing the last move;
    when the last move extended the block itself, every enclosed region is
    tried. The block must have no liberties outside its enclosed regions.
    """
    neigh = neighbor_table(width, height)
    liberties = set()
    for i in block:
        for n in neigh[i]:
            if cells[n] == EMPTY:
                liberties.add(n)
    if not liberties:
        return None

    visited = set()
    regions = []
    for lib in liberties:
        if lib in visited:
            continue
        stack = [lib]
        seen = {lib}
        comp = []
        empties = 0
        touches_edge = False
        foreign_white = False
        while stack:
            i = stack.pop()
            comp.append(i)
            if cells[i] == EMPTY:
                empties += 1
            col = i % width
            row = i // width
            if col in (0, width - 1) or row in (0, height - 1):
                touches_edge = True
            for n in neigh[i]:
                if cells[n] == WHITE:
                    if n not in block:
                        foreign_white = True
                elif n not in seen:
                    seen.add(n)
                    stack.append(n)
        visited.update(seen)
        if touches_edge or foreign_white:
            return None  # a liberty escapes the verified enclosure
        regions.append((frozenset(comp), empties))

    candidates = []
    for comp, empties in regions:
        if only_region is not None and comp != only_region:
            continue
        if MIN_AREA <= len(comp) <= MAX_AREA and empties in (2, 3):
            candidates.append(comp)
    if only_region is not None and not candidates:
        return None

    for comp in candidates:
        key = _region_key(cells, width, comp)
        if key in db:
            return block, comp
    return None


def _region_key(cells, width, comp) -> bytes:
    coords = [(i % width, i // width) for i in comp]
    black = frozenset((c, r) for c, r in coords
                      if cells[r * width + c] == BLACK)
    shape = Shape.from_cells(coords)
    shift_c = min(c for c, _ in coords)
    shift_r = min(r for _, r in coords)
    black = frozenset((c - shift_c, r - shift_r) for c, r in black)
    return canonical_key(Pattern(shape, black))


def query(db: SekiDatabase, board: Board, last_move: Coord) -> QueryResult:
    """Database lookup keyed on the most recent move.

    The candidate white block is the block containing last_move when it is
    white, otherwise the unique white block bounding the region containing
    last_move. A hit proves the block alive; any failed precondition is a
    miss.
    """
    if not board.in_bounds(last_move):
        return _MISS
    found = query_cells(db, board.cells, board.width, board.height,
                        board.index(last_move))
    if found is None:
        return _MISS
    block, region = found
    return QueryResult(
        hit=True,
        block=frozenset(board.coord(i) for i in block),
        region=frozenset(board.coord(i) for i in region),
    )


def query_root(db: SekiDatabase, board: Board) -> QueryResult:
    """Query without a last move, trying every white block on the board."""
    found = query_any_block(db, board.cells, board.width, board.height)
    if found is None:
        return _MISS
    block, region = found
    return QueryResult(
        hit=True,
        block=frozenset(board.coord(i) for i in block),
        region=frozenset(board.coord(i) for i in region),
    )


# ---------------------------------------------------------------------------
# persistence

def save(db: SekiDatabase, destination) -> None:
    """Write the database file plus a stats.txt sidecar when stats exist."""
    path = Path(destination)
    out = bytearray()
    out += MAGIC
    out += struct.pack("<I", db.format_version)
    for n in range(MIN_AREA, MAX_AREA + 1):
        keys = sorted(db.entries.get(n, ()))
        out += struct.pack("<I", len(keys))
        for key in keys:
            out += key
    path.write_bytes(bytes(out))
    if db.stats is not None:
        sidecar = path.parent / STATS_SIDECAR
        sidecar.write_text("".join(line + "\n" for line in db.stats.lines()))


def load(source) -> SekiDatabase:
    """Read and validate a database file."""
    path = Path(source)
    data = path.read_bytes()
    if len(data) < 8 or data[:4] != MAGIC:
        raise BadMagicError(f"{path} is not a seki database")
    version = struct.unpack_from("<I", data, 4)[0]
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"unsupported format version {version}")
    offset = 8
    entries = {}
    for n in range(MIN_AREA, MAX_AREA + 1):
        if offset + 4 > len(data):
            raise CorruptEntryError("truncated size header", offset)
        count = struct.unpack_from("<I", data, offset)[0]
        offset += 4
        keys = set()
        for _ in range(count):
            if offset + 2 > len(data):
                raise CorruptEntryError("truncated entry header", offset)
            w, h = data[offset], data[offset + 1]
            length = 2 + (w * h + 3) // 4
            if offset + length > len(data):
                raise CorruptEntryError("truncated entry body", offset)
            key = data[offset:offset + length]
            try:
                pattern = decode_key(key)
            except ValueError as exc:
                raise CorruptEntryError(f"undecodable entry: {exc}", offset)
            if pattern.shape.n != n:
                raise CorruptEntryError(
                    f"entry of size {pattern.shape.n} in size-{n} section",
                    offset)
            if len(pattern.empties) not in (2, 3):
                raise CorruptEntryError("entry does not have 2 or 3 empty cells",
                                        offset)
            if canonical_key(pattern) != bytes(key):
                raise CorruptEntryError("entry key is not canonical", offset)
            keys.add(bytes(key))
            offset += length
        if keys:
            entries[n] = frozenset(keys)
    if offset != len(data):
        raise CorruptEntryError("trailing bytes after last section", offset)
    stats = _load_stats_sidecar(path.parent / STATS_SIDECAR)
    return SekiDatabase(entries=entries, stats=stats, format_version=version)


def _load_stats_sidecar(path: Path) -> Optional[DatabaseStats]:
    if not path.exists():
        return None
    stats = DatabaseStats()
    for line in path.read_text().splitlines():
        fields = dict(part.split("=", 1) for part in line.split())
        try:
            n = int(fields["size"])
            stats.per_size[n] = SizeStats(
                patterns=int(fields["patterns"]),
                seki=int(fields["seki"]),
                seconds=float(fields["seconds"]),
            )
        except (KeyError, ValueError):
            return None
    return stats
