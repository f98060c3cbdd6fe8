"""Baseline and-or solver for small Killall-Go positions.

Black aims to capture every white stone; White wins by keeping any block
alive. Terminal detection is pluggable: unconditional life always counts as
a White win, and when a pattern database is supplied, a query hit on the
most recent move counts too (skipping the life computation entirely). Black
wins when both sides pass consecutively and no white block is alive, or when
no white stones remain after a White pass.

The search is full-width depth-first and-or over win/loss with a
transposition table and positional superko. Cached values can in principle
interact with superko history (the classic graph-history problem); the test
suite pins this down empirically by re-solving fixtures with the table
disabled. Move ordering (captures, then proximity to the last move) is a
performance knob only and never changes the proven value.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from .benson import any_white_alive
from .board import (BLACK, EMPTY, PASS, WHITE, Board, Coord, key_after_pass,
                    key_after_stone, neighbor_table, place_stone)
from .database import SekiDatabase, query_any_block, query_cells


class GameValue(Enum):
    WHITE_WIN = "WhiteWin"
    BLACK_WIN = "BlackWin"
    UNKNOWN = "Unknown"


class TerminalStatus(Enum):
    WHITE_WIN = "WhiteWin"
    BLACK_WIN = "BlackWin"
    NON_TERMINAL = "NonTerminal"


class UndefinedHitRateError(ValueError):
    """hit_rate is undefined when no terminal node was seen."""


@dataclass(frozen=True)
class SolveLimits:
    max_nodes: int = 10_000_000
    max_seconds: float = 3600.0
    transposition_table_capacity: int = 2_000_000

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_seconds <= 0 \
                or self.transposition_table_capacity <= 0:
            raise ValueError("solve limits must be positive")


@dataclass
class SolveResult:
    value: GameValue
    nodes: int
    terminal_nodes: int
    db_hits: int
    elapsed_seconds: float
    principal_variation: Tuple[Optional[Coord], ...] = ()

    def record(self) -> str:
        """One-line JSON-style summary."""
        rate = (self.db_hits / self.terminal_nodes
                if self.terminal_nodes else None)
        rate_text = "null" if rate is None else f"{rate:.6f}"
        return ('{"value": "%s", "nodes": %d, "terminal_nodes": %d, '
                '"db_hits": %d, "elapsed_seconds": %.3f, "hit_rate": %s}'
                % (self.value.value, self.nodes, self.terminal_nodes,
                   self.db_hits, self.elapsed_seconds, rate_text))


@dataclass(frozen=True)
class HitRateReport:
    hit_rate: float
    solved: bool


def hit_rate(result: SolveResult) -> HitRateReport:
    """Database hits divided by terminal nodes for one solve."""
    if result.terminal_nodes == 0:
        raise UndefinedHitRateError("no terminal nodes encountered")
    return HitRateReport(hit_rate=result.db_hits / result.terminal_nodes,
                         solved=result.value is not GameValue.UNKNOWN)


def hit_rate_bucket(rate: float) -> str:
    """The four reporting bins for per-position hit rates."""
    if rate == 0:
        return "0%"
    if rate < 0.10:
        return "(0%-10%)"
    if rate < 0.50:
        return "[10%-50%)"
    return "[50%-100%]"


@dataclass
class _Counters:
    nodes: int = 0
    terminal_nodes: int = 0
    db_hits: int = 0


class _LimitExhausted(Exception):
    pass


# query_mode values for _terminal_value
_QUERY_NONE = 0
_QUERY_LAST = 1
_QUERY_ROOT = 2


def _terminal_value(cells, width, height, to_move, passes, last_idx,
                    db, query_mode, counters, alive_fn=None):
    """True/False for a decided position (White wins / Black wins), else None."""
    if db is not None:
        if query_mode == _QUERY_LAST:
            if query_cells(db, cells, width, height, last_idx) is not None:
                counters.terminal_nodes += 1
                counters.db_hits += 1
                return True
        elif query_mode == _QUERY_ROOT:
            if query_any_block(db, cells, width, height) is not None:
                counters.terminal_nodes += 1
                counters.db_hits += 1
                return True
    alive = (alive_fn(cells) if alive_fn is not None
             else any_white_alive(cells, width, height))
    if alive:
        counters.terminal_nodes += 1
        return True
    if passes >= 2:
        counters.terminal_nodes += 1
        return False
    if passes >= 1 and to_move == BLACK and WHITE not in cells:
        # White passed with no stones left on the board
        counters.terminal_nodes += 1
        return False
    return None


def terminal_check(board: Board, last_move: Optional[Coord] = None,
                   db: Optional[SekiDatabase] = None) -> TerminalStatus:
    """Decide whether a position is already won.

    `last_move` gates the database query; pass None to query every white
    block (used for root positions).
    """
    counters = _Counters()
    if last_move is None:
        mode = _QUERY_ROOT
        idx = -1
    else:
        mode = _QUERY_LAST
        idx = board.index(last_move)
    verdict = _terminal_value(board.cells, board.width, board.height,
                              board.to_move, board.consecutive_passes, idx,
                              db, mode, counters)
    if verdict is None:
        return TerminalStatus.NON_TERMINAL
    return TerminalStatus.WHITE_WIN if verdict else TerminalStatus.BLACK_WIN


def solve(board: Board, limits: SolveLimits = SolveLimits(),
          db: Optional[SekiDatabase] = None,
          use_transposition_table: bool = True) -> SolveResult:
    """Prove the Killall-Go value of a position, or Unknown at the limits."""
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 200_000))
    start = time.monotonic()
    counters = _Counters()
    width, height = board.width, board.height
    neigh = neighbor_table(width, height)
    tt = {}
    tt_capacity = limits.transposition_table_capacity \
        if use_transposition_table else 0
    deadline = start + limits.max_seconds
    max_nodes = limits.max_nodes

    # prior positions of the line are forbidden below the root
    path = {key: -1 for key in board.history}
    path[board.key] = 0
    killers = {}  # depth -> move index that last decided a node there

    # memo for the life check: a pure function of the cells, so always safe
    alive_cache = {}
    alive_capacity = limits.transposition_table_capacity

    def white_alive(cells):
        hit = alive_cache.get(cells)
        if hit is None:
            hit = any_white_alive(cells, width, height)
            if len(alive_cache) < alive_capacity:
                alive_cache[cells] = hit
        return hit

    def search(cells, to_move, passes, last_idx, key, depth, query_mode):
        counters.nodes += 1
        if counters.nodes >= max_nodes:
            raise _LimitExhausted
        if counters.nodes % 1024 == 0 and time.monotonic() > deadline:
            raise _LimitExhausted
        tk = (key, passes)
        cached = tt.get(tk)
        if cached is not None:
            return cached
        verdict = _terminal_value(cells, width, height, to_move, passes,
                                  last_idx, db, query_mode, counters,
                                  white_alive)
        if verdict is not None:
            if len(tt) < tt_capacity:
                tt[tk] = verdict
            return verdict

        is_or = to_move == WHITE  # White picks; Black must refute everything
        opp = 3 - to_move
        killer = killers.get(depth, -1)
        children = []
        for idx in range(len(cells)):
            if cells[idx]:
                continue
            placed = place_stone(cells, neigh, idx, to_move)
            if placed is None:
                continue
            new_cells, captured = placed
            ckey = key_after_stone(key, width, to_move, idx, captured)
            if is_or and white_alive(new_cells):
                rank = 0  # immediately settles the game for White
            elif idx == killer:
                rank = 1
            elif captured:
                rank = 2
            elif last_idx >= 0 and idx in neigh[last_idx]:
                rank = 3
            else:
                rank = 4
            children.append((rank, idx, new_cells, ckey))
        children.sort(key=lambda c: (c[0], c[1]))

        result = not is_or
        for rank, idx, new_cells, ckey in children:
            if ckey in path:
                continue  # superko: position already on the line
            path[ckey] = depth + 1
            v = search(new_cells, opp, 0, idx, ckey, depth + 1, _QUERY_LAST)
            del path[ckey]
            if is_or and v:
                result = True
                killers[depth] = idx
                break
            if not is_or and not v:
                result = False
                killers[depth] = idx
                break
        else:
            # pass: always legal, exempt from superko, tried last
            pkey = key_after_pass(key)
            added = pkey not in path
            if added:
                path[pkey] = depth + 1
            v = search(cells, opp, passes + 1, -1, pkey, depth + 1,
                       _QUERY_NONE)
            if added:
                del path[pkey]
            if is_or and v:
                result = True
            if not is_or and not v:
                result = False

        if len(tt) < tt_capacity:
            tt[tk] = result
        return result

    try:
        white_wins = search(board.cells, board.to_move,
                            board.consecutive_passes, -1, board.key, 0,
                            _QUERY_ROOT)
        value = GameValue.WHITE_WIN if white_wins else GameValue.BLACK_WIN
    except _LimitExhausted:
        value = GameValue.UNKNOWN
    elapsed = time.monotonic() - start
    pv = ()
    if value is not GameValue.UNKNOWN:
        pv = _principal_variation(board, db, tt, value)
    return SolveResult(value=value, nodes=counters.nodes,
                       terminal_nodes=counters.terminal_nodes,
                       db_hits=counters.db_hits, elapsed_seconds=elapsed,
                       principal_variation=pv)


def _principal_variation(board: Board, db, tt, value,
                         max_plies: int = 64) -> Tuple[Optional[Coord], ...]:
    """Best-effort line reconstruction from the transposition table."""
    white_wins = value is GameValue.WHITE_WIN
    counters = _Counters()
    width, height = board.width, board.height
    neigh = neighbor_table(width, height)
    cells, to_move, passes, key = (board.cells, board.to_move,
                                   board.consecutive_passes, board.key)
    last_idx = -1
    seen = {key}
    pv = []
    for _ in range(max_plies):
        verdict = _terminal_value(cells, width, height, to_move, passes,
                                  last_idx, db,
                                  _QUERY_LAST if last_idx >= 0 else _QUERY_ROOT,
                                  counters)
        if verdict is not None:
            break
        found = None
        for idx in range(len(cells)):
            if cells[idx]:
                continue
            placed = place_stone(cells, neigh, idx, to_move)
            if placed is None:
                continue
            new_cells, captured = placed
            ckey = key_after_stone(key, width, to_move, idx, captured)
            if ckey in seen:
                continue
            if tt.get((ckey, 0)) is white_wins:
                found = (idx, new_cells, ckey)
                break
        if found is None:
            pkey = key_after_pass(key)
            if tt.get((pkey, passes + 1)) is white_wins:
                pv.append(PASS)
                cells, to_move, passes, key = (cells, 3 - to_move,
                                               passes + 1, pkey)
                last_idx = -1
                seen.add(pkey)
                continue
            break
        idx, new_cells, ckey = found
        pv.append((idx % width, idx // width))
        cells, to_move, passes, key = new_cells, 3 - to_move, 0, ckey
        last_idx = idx
        seen.add(ckey)
    return tuple(pv)
