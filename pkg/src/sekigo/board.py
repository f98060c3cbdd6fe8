"""Rectangular Go board with capture, suicide and positional-superko rules.

Cells are addressed as (col, row) pairs, 0-based. A Board is an immutable
value: play() returns a new Board, so boards can be copied to concurrent
workers freely. Positional superko is keyed on (cells, side to move); pass
moves are always legal and never trigger the superko check, but the position
reached by a pass is still recorded in the history.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Tuple

EMPTY = 0
BLACK = 1
WHITE = 2

MAX_SIDE = 9

#: A move is a (col, row) pair, or PASS.
Coord = Tuple[int, int]
PASS: Optional[Coord] = None

_CELL_CHARS = {EMPTY: ".", BLACK: "X", WHITE: "O"}
_CHAR_CELLS = {v: k for k, v in _CELL_CHARS.items()}


def opponent(color: int) -> int:
    """The other player color."""
    return 3 - color


class IllegalMoveError(ValueError):
    pass


class OccupiedError(IllegalMoveError):
    pass


class SuicideError(IllegalMoveError):
    pass


class SuperkoError(IllegalMoveError):
    pass


class OutOfBoundsError(IllegalMoveError):
    pass


# Zobrist tables, fixed seed so position keys are stable across runs.
_rng = random.Random(0x5EC1B0A3D)
_ZOBRIST_STONE = {
    color: tuple(_rng.getrandbits(64) for _ in range(MAX_SIDE * MAX_SIDE))
    for color in (BLACK, WHITE)
}
_ZOBRIST_TURN = _rng.getrandbits(64)
_ZOBRIST_DIMS = tuple(
    tuple(_rng.getrandbits(64) for _ in range(MAX_SIDE + 1)) for _ in range(2)
)

_neighbor_cache: dict = {}


def neighbor_table(width: int, height: int) -> Tuple[Tuple[int, ...], ...]:
    """Orthogonal neighbor indices for every cell of a width x height grid."""
    key = (width, height)
    table = _neighbor_cache.get(key)
    if table is None:
        rows = []
        for row in range(height):
            for col in range(width):
                adj = []
                if col > 0:
                    adj.append(row * width + col - 1)
                if col + 1 < width:
                    adj.append(row * width + col + 1)
                if row > 0:
                    adj.append((row - 1) * width + col)
                if row + 1 < height:
                    adj.append((row + 1) * width + col)
                rows.append(tuple(adj))
        table = tuple(rows)
        _neighbor_cache[key] = table
    return table


def _zobrist_stone(color: int, width: int, idx: int) -> int:
    col = idx % width
    row = idx // width
    return _ZOBRIST_STONE[color][row * MAX_SIDE + col]


def key_from_scratch(cells: bytes, width: int, height: int, to_move: int) -> int:
    """Position key recomputed from the full cell contents."""
    key = _ZOBRIST_DIMS[0][width] ^ _ZOBRIST_DIMS[1][height]
    for idx, value in enumerate(cells):
        if value != EMPTY:
            key ^= _zobrist_stone(value, width, idx)
    if to_move == WHITE:
        key ^= _ZOBRIST_TURN
    return key


def key_after_stone(key: int, width: int, color: int, idx: int,
                    captured: Iterable[int]) -> int:
    """Incremental position key after `color` plays at `idx`."""
    key ^= _zobrist_stone(color, width, idx) ^ _ZOBRIST_TURN
    opp = 3 - color
    for i in captured:
        key ^= _zobrist_stone(opp, width, i)
    return key


def key_after_pass(key: int) -> int:
    return key ^ _ZOBRIST_TURN


def block_if_captured(buf, start: int, neigh) -> Tuple[int, ...]:
    """Stones of the block at `start` if it has no liberties, else ()."""
    color = buf[start]
    seen = {start}
    stack = [start]
    stones = []
    while stack:
        i = stack.pop()
        stones.append(i)
        for n in neigh[i]:
            v = buf[n]
            if v == EMPTY:
                return ()
            if v == color and n not in seen:
                seen.add(n)
                stack.append(n)
    return tuple(stones)


def place_stone(cells: bytes, neigh, idx: int, color: int):
    """Place a stone and resolve captures.

    Returns (new_cells, captured_indices), or None when the placement would
    be suicide. The target cell must be empty; captures are removed before
    the suicide check, so a capturing move is always legal.
    """
    buf = bytearray(cells)
    buf[idx] = color
    opp = 3 - color
    captured = []
    for n in neigh[idx]:
        if buf[n] == opp:
            dead = block_if_captured(buf, n, neigh)
            if dead:
                for s in dead:
                    buf[s] = EMPTY
                captured.extend(dead)
    if not captured and block_if_captured(buf, idx, neigh):
        return None
    return bytes(buf), tuple(captured)


@dataclass(frozen=True)
class Block:
    """A maximal 4-connected set of same-colored stones and its liberties."""

    color: int
    stones: frozenset
    liberties: frozenset

    @property
    def anchor(self) -> Coord:
        return min(self.stones)


class Board:
    """Immutable rectangular Go position."""

    __slots__ = ("width", "height", "cells", "to_move", "consecutive_passes",
                 "history", "key")

    def __init__(self, width: int, height: int, cells: Optional[bytes] = None,
                 to_move: int = BLACK, consecutive_passes: int = 0,
                 history: Optional[frozenset] = None):
        if not (1 <= width <= MAX_SIDE and 1 <= height <= MAX_SIDE):
            raise ValueError(f"board size {width}x{height} out of range")
        if to_move not in (BLACK, WHITE):
            raise ValueError("to_move must be BLACK or WHITE")
        if cells is None:
            cells = bytes(width * height)
        elif len(cells) != width * height:
            raise ValueError("cell buffer does not match board size")
        object.__setattr__(self, "width", width)
        object.__setattr__(self, "height", height)
        object.__setattr__(self, "cells", bytes(cells))
        object.__setattr__(self, "to_move", to_move)
        object.__setattr__(self, "consecutive_passes", consecutive_passes)
        self._validate_no_dead_blocks()
        key = key_from_scratch(self.cells, width, height, to_move)
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "history",
                           frozenset([key]) if history is None else history)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("Board is immutable")

    def _validate_no_dead_blocks(self):
        neigh = neighbor_table(self.width, self.height)
        seen = set()
        for idx, value in enumerate(self.cells):
            if value == EMPTY or idx in seen:
                continue
            dead = block_if_captured(self.cells, idx, neigh)
            if dead:
                raise ValueError(f"block at {self.coord(idx)} has no liberties")
            # mark the whole block as visited
            stack = [idx]
            seen.add(idx)
            while stack:
                i = stack.pop()
                for n in neigh[i]:
                    if self.cells[n] == value and n not in seen:
                        seen.add(n)
                        stack.append(n)

    @classmethod
    def _trusted(cls, width, height, cells, to_move, passes, history, key):
        board = object.__new__(cls)
        object.__setattr__(board, "width", width)
        object.__setattr__(board, "height", height)
        object.__setattr__(board, "cells", cells)
        object.__setattr__(board, "to_move", to_move)
        object.__setattr__(board, "consecutive_passes", passes)
        object.__setattr__(board, "history", history)
        object.__setattr__(board, "key", key)
        return board

    @classmethod
    def empty(cls, width: int, height: int, to_move: int = BLACK) -> "Board":
        return cls(width, height, to_move=to_move)

    # -- geometry -----------------------------------------------------------

    def index(self, coord: Coord) -> int:
        col, row = coord
        return row * self.width + col

    def coord(self, idx: int) -> Coord:
        return (idx % self.width, idx // self.width)

    def in_bounds(self, coord: Coord) -> bool:
        col, row = coord
        return 0 <= col < self.width and 0 <= row < self.height

    def __getitem__(self, coord: Coord) -> int:
        if not self.in_bounds(coord):
            raise OutOfBoundsError(f"{coord} outside {self.width}x{self.height}")
        return self.cells[self.index(coord)]

    def coords(self) -> Iterator[Coord]:
        for row in range(self.height):
            for col in range(self.width):
                yield (col, row)

    # -- play ---------------------------------------------------------------

    def play(self, move: Optional[Coord], color: Optional[int] = None) -> "Board":
        """Apply a move (stone or PASS) and return the resulting board.

        Raises OccupiedError, SuicideError, SuperkoError or OutOfBoundsError
        for illegal stone placements. Passes are always legal.
        """
        if color is None:
            color = self.to_move
        elif color != self.to_move:
            raise ValueError(f"color {color} is not to move")
        if move is PASS:
            key = key_after_pass(self.key)
            return Board._trusted(self.width, self.height, self.cells,
                                  opponent(color), self.consecutive_passes + 1,
                                  self.history | {key}, key)
        if not self.in_bounds(move):
            raise OutOfBoundsError(f"{move} outside {self.width}x{self.height}")
        idx = self.index(move)
        if self.cells[idx] != EMPTY:
            raise OccupiedError(f"{move} is occupied")
        neigh = neighbor_table(self.width, self.height)
        placed = place_stone(self.cells, neigh, idx, color)
        if placed is None:
            raise SuicideError(f"{move} would be suicide")
        new_cells, captured = placed
        key = key_after_stone(self.key, self.width, color, idx, captured)
        if key in self.history:
            raise SuperkoError(f"{move} recreates an earlier position")
        return Board._trusted(self.width, self.height, new_cells,
                              opponent(color), 0, self.history | {key}, key)

    def replace(self, to_move: Optional[int] = None) -> "Board":
        """A copy with a different side to move and a fresh history."""
        return Board(self.width, self.height, self.cells,
                     self.to_move if to_move is None else to_move)

    def stones(self, color: int) -> Iterator[Coord]:
        for idx, value in enumerate(self.cells):
            if value == color:
                yield self.coord(idx)

    # -- dunder -------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (isinstance(other, Board)
                and self.width == other.width and self.height == other.height
                and self.cells == other.cells and self.to_move == other.to_move
                and self.consecutive_passes == other.consecutive_passes)

    def __hash__(self) -> int:
        return hash((self.key, self.consecutive_passes))

    def __repr__(self) -> str:
        return (f"Board({self.width}x{self.height} to_move="
                f"{_CELL_CHARS[self.to_move]} key={self.key:#x})")

    def __str__(self) -> str:
        return format_board(self)


def blocks(board: Board, color: int) -> list:
    """All maximal blocks of `color`, scanned row-major, with liberties."""
    neigh = neighbor_table(board.width, board.height)
    cells = board.cells
    seen = set()
    result = []
    for idx, value in enumerate(cells):
        if value != color or idx in seen:
            continue
        stack = [idx]
        seen.add(idx)
        stones = []
        libs = set()
        while stack:
            i = stack.pop()
            stones.append(i)
            for n in neigh[i]:
                v = cells[n]
                if v == EMPTY:
                    libs.add(n)
                elif v == color and n not in seen:
                    seen.add(n)
                    stack.append(n)
        result.append(Block(
            color=color,
            stones=frozenset(board.coord(i) for i in stones),
            liberties=frozenset(board.coord(i) for i in libs),
        ))
    return result


def block_at(board: Board, coord: Coord) -> Optional[Block]:
    """The block containing the stone at `coord`, or None for an empty cell."""
    color = board[coord]
    if color == EMPTY:
        return None
    for blk in blocks(board, color):
        if coord in blk.stones:
            return blk
    raise AssertionError("unreachable")


def enclosed_regions(board: Board, white_block: Block) -> list:
    """Regions of non-white cells enclosed by a single white block.

    A region is a maximal 4-connected component of non-white cells that
    touches at least one stone of `white_block`, touches no other white
    block, and contains no cell on the board edge (the stored patterns
    assume white stones in every direction around the area, so a region
    reaching the edge can never be a verified match). The returned flag is
    True when every liberty of `white_block` lies inside some returned
    region, i.e. the block has no external liberties.
    """
    if not white_block.stones:
        return []
    width, height = board.width, board.height
    neigh = neighbor_table(width, height)
    cells = board.cells
    block_idx = {board.index(c) for c in white_block.stones}

    seen = set()
    regions = []
    for idx, value in enumerate(cells):
        if value == WHITE or idx in seen:
            continue
        stack = [idx]
        seen.add(idx)
        component = []
        touches_block = False
        touches_other_white = False
        touches_edge = False
        while stack:
            i = stack.pop()
            component.append(i)
            col = i % width
            row = i // width
            if col in (0, width - 1) or row in (0, height - 1):
                touches_edge = True
            for n in neigh[i]:
                if cells[n] == WHITE:
                    if n in block_idx:
                        touches_block = True
                    else:
                        touches_other_white = True
                elif n not in seen:
                    seen.add(n)
                    stack.append(n)
        if touches_block and not touches_other_white and not touches_edge:
            regions.append(frozenset(board.coord(i) for i in component))

    covered = set()
    for region in regions:
        covered.update(region)
    liberty_free = all(lib in covered for lib in white_block.liberties)
    return [(region, liberty_free) for region in regions]


def position_key(board: Board) -> int:
    """Deterministic 64-bit key of (cells, side to move)."""
    return board.key


# -- text format ------------------------------------------------------------

def parse_board(text: str) -> Board:
    """Parse the text board format.

    First line is "<width> <height> <to_move:B|W>", then one row per line
    with '.'=empty, 'X'=black, 'O'=white.
    """
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty board text")
    head = lines[0].split()
    if len(head) != 3 or head[2] not in ("B", "W"):
        raise ValueError(f"bad header line: {lines[0]!r}")
    width, height = int(head[0]), int(head[1])
    to_move = BLACK if head[2] == "B" else WHITE
    rows = lines[1:]
    if len(rows) != height:
        raise ValueError(f"expected {height} rows, got {len(rows)}")
    buf = bytearray()
    for row in rows:
        if len(row) != width:
            raise ValueError(f"row {row!r} does not have width {width}")
        for ch in row:
            if ch not in _CHAR_CELLS:
                raise ValueError(f"bad cell character {ch!r}")
            buf.append(_CHAR_CELLS[ch])
    return Board(width, height, bytes(buf), to_move)


def format_board(board: Board) -> str:
    """Inverse of parse_board; round-trips bit-exactly."""
    side = "B" if board.to_move == BLACK else "W"
    lines = [f"{board.width} {board.height} {side}"]
    for row in range(board.height):
        start = row * board.width
        lines.append("".join(_CELL_CHARS[c]
                             for c in board.cells[start:start + board.width]))
    return "\n".join(lines) + "\n"


def board_from_rows(rows: Iterable[str], to_move: int = BLACK) -> Board:
    """Build a board from row strings ('.', 'X', 'O'); test/fixture helper."""
    rows = list(rows)
    height = len(rows)
    width = len(rows[0])
    text = f"{width} {height} {'B' if to_move == BLACK else 'W'}\n"
    return parse_board(text + "\n".join(rows))
